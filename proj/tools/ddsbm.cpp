// Command-line front end: network generation, posterior fitting, the
// replicated simulation study, and ARI between two label files.
//
// Exit codes: 0 success, 1 usage error, 2 input-format error.

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ddsbm/experiment.hpp"

namespace {

struct CommonFlags {
  ddsbm::ExperimentConfig cfg;
  std::string config_path;
};

void add_cell_flags(CLI::App* cmd, CommonFlags& cf, bool with_chain) {
  cmd->add_option("--config", cf.config_path,
                  "key=value config file; flags given on the command line "
                  "override it");
  cmd->add_option("--case", cf.cfg.case_id, "benchmark case (1..4)");
  cmd->add_option("--k0", cf.cfg.k0, "true number of communities");
  cmd->add_option("--n", cf.cfg.n, "number of nodes");
  cmd->add_option("--rho", cf.cfg.rho, "sparsity factor scaling P0");
  cmd->add_option("--replicates", cf.cfg.replicates, "number of replicates");
  cmd->add_option("--seed", cf.cfg.master_seed, "master seed");
  if (with_chain) {
    cmd->add_option("--keep", cf.cfg.n_keep, "posterior draws to keep");
    cmd->add_option("--burn", cf.cfg.n_burn, "burn-in iterations");
    cmd->add_option("--delta", cf.cfg.delta,
                    "dominance gap (default min(0.05, log n / n))");
    cmd->add_option("--kmax", cf.cfg.k_max,
                    "prior truncation on K (default floor(sqrt n))");
    cmd->add_option("--lambda", cf.cfg.lambda, "Poisson rate of the K prior");
  }
}

// Flags must override config-file values, so re-parse order is: defaults,
// then file, then whatever the user typed.
void fold_in_config_file(CLI::App* cmd, CommonFlags& cf) {
  if (cf.config_path.empty()) return;
  ddsbm::ExperimentConfig from_file = ddsbm::ExperimentConfig{};
  ddsbm::apply_config_file(from_file, cf.config_path);

  auto keep_flag = [&](const std::string& name) {
    return cmd->count(name) > 0;
  };
  ddsbm::ExperimentConfig merged = from_file;
  if (keep_flag("--case")) merged.case_id = cf.cfg.case_id;
  if (keep_flag("--k0")) merged.k0 = cf.cfg.k0;
  if (keep_flag("--n")) merged.n = cf.cfg.n;
  if (keep_flag("--rho")) merged.rho = cf.cfg.rho;
  if (keep_flag("--replicates")) merged.replicates = cf.cfg.replicates;
  if (keep_flag("--seed")) merged.master_seed = cf.cfg.master_seed;
  if (cmd->get_option_no_throw("--keep")) {
    if (keep_flag("--keep")) merged.n_keep = cf.cfg.n_keep;
    if (keep_flag("--burn")) merged.n_burn = cf.cfg.n_burn;
    if (keep_flag("--delta")) merged.delta = cf.cfg.delta;
    if (keep_flag("--kmax")) merged.k_max = cf.cfg.k_max;
    if (keep_flag("--lambda")) merged.lambda = cf.cfg.lambda;
  }
  cf.cfg = merged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian community detection under diagonally dominant "
               "stochastic block models"};
  app.require_subcommand(1);

  CommonFlags gen_cf, sim_cf;
  std::string gen_out = "networks";
  std::string sim_out = "results.csv";

  CLI::App* gen = app.add_subcommand(
      "generate", "write replicate edge lists and a manifest");
  add_cell_flags(gen, gen_cf, false);
  gen->add_option("--out", gen_out, "output directory");

  CLI::App* sim = app.add_subcommand(
      "simulate", "run the replicated simulation study");
  add_cell_flags(sim, sim_cf, true);
  sim->add_option("--out", sim_out,
                  "results CSV path (summary written next to it)");

  ddsbm::FitOptions fit_opt;
  std::string fit_edges;
  CLI::App* fit = app.add_subcommand("fit", "sample the posterior on one network");
  fit->add_option("edgelist", fit_edges, "edge-list file")->required();
  fit->add_option("--keep", fit_opt.n_keep, "posterior draws to keep");
  fit->add_option("--burn", fit_opt.n_burn, "burn-in iterations");
  fit->add_option("--seed", fit_opt.seed, "chain seed");
  fit->add_option("--delta", fit_opt.delta,
                  "dominance gap (default min(0.05, log n / n))");
  fit->add_option("--kmax", fit_opt.k_max,
                  "prior truncation on K (default floor(sqrt n))");
  fit->add_option("--lambda", fit_opt.lambda, "Poisson rate of the K prior");
  fit->add_option("--trace", fit_opt.trace_path,
                  "dump kept draws, one \"iter k_eff z_1 .. z_n\" line each");

  std::string ari_a, ari_b;
  CLI::App* ari = app.add_subcommand("ari", "adjusted Rand index of two label files");
  ari->add_option("labels_a", ari_a, "first labels file")->required();
  ari->add_option("labels_b", ari_b, "second labels file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (gen->parsed()) {
      fold_in_config_file(gen, gen_cf);
      ddsbm::generate_networks(gen_cf.cfg, gen_out);
      std::cout << "wrote " << gen_cf.cfg.replicates << " networks to "
                << gen_out << "\n";
    } else if (sim->parsed()) {
      fold_in_config_file(sim, sim_cf);
      const ddsbm::SimulationResult res = ddsbm::run_simulation(sim_cf.cfg);
      const std::string summary_path =
          ddsbm::write_simulation_outputs(sim_cf.cfg, res, sim_out);
      std::cout << "results: " << sim_out << "\nsummary: " << summary_path
                << "\n"
                << ddsbm::summary_csv(sim_cf.cfg, res.summary);
    } else if (fit->parsed()) {
      const ddsbm::AdjacencyMatrix a = ddsbm::read_edge_list_file(fit_edges);
      const ddsbm::FitReport rep = ddsbm::fit_network(a, fit_opt);
      std::cout << rep.summary_json << "\n";
    } else if (ari->parsed()) {
      const std::vector<int> la = ddsbm::read_labels_file(ari_a);
      const std::vector<int> lb = ddsbm::read_labels_file(ari_b);
      if (la.size() != lb.size())
        throw ddsbm::FormatError("label files have different lengths");
      std::printf("%.6f\n", ddsbm::adjusted_rand_index(la, lb));
    }
  } catch (const ddsbm::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
