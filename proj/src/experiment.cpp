#include "ddsbm/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ddsbm {

namespace {

std::string fmt6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << body;
  if (!os) throw std::runtime_error("write failed: " + path);
}

const char* kMoveNames[kNumMoveKinds] = {"mk", "gs", "m3", "ae"};

}  // namespace

void validate(const ExperimentConfig& cfg) {
  if (cfg.case_id < 1 || cfg.case_id > 4)
    throw std::invalid_argument("config: case must be in 1..4");
  if (cfg.k0 < 1) throw std::invalid_argument("config: k0 must be >= 1");
  if (cfg.n < 2 * cfg.k0)
    throw std::invalid_argument("config: need n >= 2*k0");
  if (!(cfg.rho > 0.0 && cfg.rho <= 1.0))
    throw std::invalid_argument("config: rho must be in (0,1]");
  if (cfg.replicates < 1)
    throw std::invalid_argument("config: replicates must be >= 1");
  if (cfg.n_keep < 1 || cfg.n_burn < 0)
    throw std::invalid_argument("config: bad chain lengths");
  if (cfg.delta >= 0.0 && !(cfg.delta < 1.0))
    throw std::invalid_argument("config: delta must be < 1");
  if (cfg.k_max == 0 || cfg.k_max < -1)
    throw std::invalid_argument("config: kmax must be >= 1");
  if (!(cfg.lambda > 0.0))
    throw std::invalid_argument("config: lambda must be > 0");
}

Hyperparams hyperparams_for(const ExperimentConfig& cfg) {
  Hyperparams hp = Hyperparams::defaults_for(cfg.n);
  if (cfg.delta >= 0.0) hp.delta = cfg.delta;
  if (cfg.k_max > 0) hp.k_max = cfg.k_max;
  hp.lambda = cfg.lambda;
  return hp;
}

std::uint64_t replicate_seed(std::uint64_t master_seed, int r) {
  return Rng::derive_seed(master_seed, static_cast<std::uint64_t>(r));
}

void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open config: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    // trim
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw FormatError("config line " + std::to_string(lineno) +
                        ": expected key=value");
    auto strip = [](std::string s) {
      const auto sb = s.find_first_not_of(" \t");
      if (sb == std::string::npos) return std::string();
      const auto se = s.find_last_not_of(" \t");
      return s.substr(sb, se - sb + 1);
    };
    const std::string key = strip(line.substr(0, eq));
    const std::string val = strip(line.substr(eq + 1));
    try {
      if (key == "case") cfg.case_id = std::stoi(val);
      else if (key == "k0") cfg.k0 = std::stoi(val);
      else if (key == "n") cfg.n = std::stoi(val);
      else if (key == "rho") cfg.rho = std::stod(val);
      else if (key == "replicates") cfg.replicates = std::stoi(val);
      else if (key == "keep") cfg.n_keep = std::stoi(val);
      else if (key == "burn") cfg.n_burn = std::stoi(val);
      else if (key == "seed") cfg.master_seed = std::stoull(val);
      else if (key == "delta") cfg.delta = std::stod(val);
      else if (key == "kmax") cfg.k_max = std::stoi(val);
      else if (key == "lambda") cfg.lambda = std::stod(val);
      else
        throw FormatError("config line " + std::to_string(lineno) +
                          ": unknown key \"" + key + "\"");
    } catch (const FormatError&) {
      throw;
    } catch (const std::exception&) {
      throw FormatError("config line " + std::to_string(lineno) +
                        ": bad value for \"" + key + "\"");
    }
  }
}

SimulationResult run_simulation(const ExperimentConfig& cfg) {
  validate(cfg);
  const Hyperparams hp = hyperparams_for(cfg);
  const GroundTruth truth = make_truth(cfg.case_id, cfg.k0, cfg.n);
  SimulationResult res;
  res.rows.resize(static_cast<std::size_t>(cfg.replicates));

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (int r = 0; r < cfg.replicates; ++r) {
    const std::uint64_t seed = replicate_seed(cfg.master_seed, r);
    const AdjacencyMatrix a =
        generate_sbm(truth, cfg.rho, Rng::derive_seed(seed, 0));
    ChainConfig cc;
    cc.n_keep = cfg.n_keep;
    cc.n_burn = cfg.n_burn;
    cc.seed = Rng::derive_seed(seed, 1);
    cc.hp = hp;
    const Trace tr = run_chain(a, cc);
    ReplicateResult row;
    row.replicate = r;
    row.seed = seed;
    row.k_hat = posterior_mode_k(tr);
    row.mean_ari = mean_ari(tr, truth.z0);
    res.rows[static_cast<std::size_t>(r)] = row;
  }

  std::vector<int> k_hats;
  double ari_sum = 0.0;
  for (const auto& row : res.rows) {
    k_hats.push_back(row.k_hat);
    ari_sum += row.mean_ari;
  }
  const ErrorStats err = bias_rmse(k_hats, cfg.k0);
  res.summary.bias = err.bias;
  res.summary.rmse = err.rmse;
  res.summary.mean_ari = ari_sum / static_cast<double>(cfg.replicates);
  return res;
}

std::string results_csv(const std::vector<ReplicateResult>& rows) {
  std::ostringstream os;
  os << "replicate,seed,k_hat,mean_ari\n";
  for (const auto& r : rows)
    os << r.replicate << "," << r.seed << "," << r.k_hat << ","
       << fmt6(r.mean_ari) << "\n";
  return os.str();
}

std::string summary_csv(const ExperimentConfig& cfg,
                        const SimulationSummary& s) {
  std::ostringstream os;
  os << "case,k0,n,rho,replicates,bias,rmse,mean_ari\n";
  os << cfg.case_id << "," << cfg.k0 << "," << cfg.n << "," << fmt6(cfg.rho)
     << "," << cfg.replicates << "," << fmt6(s.bias) << "," << fmt6(s.rmse)
     << "," << fmt6(s.mean_ari) << "\n";
  return os.str();
}

std::string write_simulation_outputs(const ExperimentConfig& cfg,
                                     const SimulationResult& res,
                                     const std::string& out_csv) {
  write_text_file(out_csv, results_csv(res.rows));
  std::filesystem::path p(out_csv);
  std::filesystem::path stem = p;
  stem.replace_extension();
  const std::string summary_path = stem.string() + ".summary.csv";
  write_text_file(summary_path, summary_csv(cfg, res.summary));
  return summary_path;
}

void generate_networks(const ExperimentConfig& cfg,
                       const std::string& out_dir) {
  validate(cfg);
  const GroundTruth truth = make_truth(cfg.case_id, cfg.k0, cfg.n);
  std::filesystem::create_directories(out_dir);

  std::ostringstream man;
  man << "case " << cfg.case_id << "\n";
  man << "k0 " << cfg.k0 << "\n";
  man << "n " << cfg.n << "\n";
  man << "rho " << fmt6(cfg.rho) << "\n";
  man << "replicates " << cfg.replicates << "\n";
  man << "master_seed " << cfg.master_seed << "\n";
  man << "z0";
  for (int l : truth.z0.labels) man << " " << l + 1;
  man << "\n";
  man << "p0\n";
  for (int a = 0; a < cfg.k0; ++a) {
    for (int b = 0; b < cfg.k0; ++b)
      man << (b ? " " : "") << fmt6(truth.p0(a, b));
    man << "\n";
  }

  for (int r = 0; r < cfg.replicates; ++r) {
    const std::uint64_t seed = replicate_seed(cfg.master_seed, r);
    const AdjacencyMatrix a =
        generate_sbm(truth, cfg.rho, Rng::derive_seed(seed, 0));
    char name[64];
    std::snprintf(name, sizeof name, "replicate_%03d.edges", r);
    write_edge_list_file((std::filesystem::path(out_dir) / name).string(), a);
    man << "replicate " << r << " seed " << seed << " file " << name << "\n";
  }
  write_text_file((std::filesystem::path(out_dir) / "manifest.txt").string(),
                  man.str());
}

FitReport fit_network(const AdjacencyMatrix& a, const FitOptions& opt) {
  ChainConfig cc;
  cc.n_keep = opt.n_keep;
  cc.n_burn = opt.n_burn;
  cc.seed = opt.seed;
  cc.hp = Hyperparams::defaults_for(a.n());
  if (opt.delta >= 0.0) cc.hp.delta = opt.delta;
  if (opt.k_max > 0) cc.hp.k_max = opt.k_max;
  cc.hp.lambda = opt.lambda;
  cc.store_p = opt.store_p;

  const Trace tr = run_chain(a, cc);

  FitReport rep;
  rep.hp = cc.hp;
  rep.k_mode = posterior_mode_k(tr);
  rep.z_mode = posterior_mode_z(tr);
  for (int m = 0; m < kNumMoveKinds; ++m) rep.tally[m] = tr.tally[m];

  if (!opt.trace_path.empty()) {
    std::ostringstream os;
    for (std::size_t t = 0; t < tr.draws.size(); ++t) {
      os << t + 1 << " " << tr.draws[t].k_eff;
      for (int l : tr.draws[t].z) os << " " << l + 1;
      os << "\n";
    }
    write_text_file(opt.trace_path, os.str());
  }

  nlohmann::json j;
  j["n"] = a.n();
  j["edges"] = a.edge_count();
  j["seed"] = cc.seed;
  j["burn"] = cc.n_burn;
  j["keep"] = cc.n_keep;
  j["delta"] = cc.hp.delta;
  j["k_max"] = cc.hp.k_max;
  j["lambda"] = cc.hp.lambda;
  j["k_mode"] = rep.k_mode;
  {
    std::vector<int> zm;
    zm.reserve(rep.z_mode.labels.size());
    for (int l : rep.z_mode.labels) zm.push_back(l + 1);
    j["z_mode"] = zm;
  }
  for (int m = 0; m < kNumMoveKinds; ++m) {
    const auto& t = rep.tally[m];
    j["moves"][kMoveNames[m]]["proposed"] = t.proposed;
    j["moves"][kMoveNames[m]]["accepted"] = t.accepted;
    j["moves"][kMoveNames[m]]["rate"] =
        t.proposed > 0 ? static_cast<double>(t.accepted) /
                             static_cast<double>(t.proposed)
                       : 0.0;
  }
  rep.summary_json = j.dump(2);
  return rep;
}

std::vector<int> read_labels_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open labels file: " + path);
  std::vector<int> labels;
  std::string tok;
  while (is >> tok) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      labels.push_back(v);
    } catch (const std::exception&) {
      throw FormatError("labels file " + path + ": bad token \"" + tok + "\"");
    }
  }
  if (labels.empty())
    throw FormatError("labels file " + path + ": no labels found");
  return labels;
}

}  // namespace ddsbm
