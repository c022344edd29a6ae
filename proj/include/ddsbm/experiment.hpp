#ifndef DDSBM_EXPERIMENT_HPP
#define DDSBM_EXPERIMENT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ddsbm/inference.hpp"
#include "ddsbm/netgen.hpp"
#include "ddsbm/sampler.hpp"
#include "ddsbm/types.hpp"

namespace ddsbm {

// One simulation cell.  delta < 0 and k_max < 0 mean "use the defaults
// derived from n" (min(0.05, log n / n) and floor(sqrt n)).
struct ExperimentConfig {
  int case_id = 1;
  int k0 = 3;
  int n = 50;
  double rho = 1.0;
  int replicates = 20;
  int n_keep = 10000;
  int n_burn = 5000;
  std::uint64_t master_seed = 1;
  double delta = -1.0;
  int k_max = -1;
  double lambda = 1.0;
};

void validate(const ExperimentConfig& cfg);  // throws std::invalid_argument
Hyperparams hyperparams_for(const ExperimentConfig& cfg);

// Seed for replicate r, a stated 64-bit mix of the master seed; the network
// stream and the chain stream are derived from it with indices 0 and 1.
std::uint64_t replicate_seed(std::uint64_t master_seed, int r);

// Flat key=value text file (keys: case,k0,n,rho,replicates,keep,burn,seed,
// delta,kmax,lambda); '#' starts a comment.  CLI flags override file values.
void apply_config_file(ExperimentConfig& cfg, const std::string& path);

struct ReplicateResult {
  int replicate = 0;
  std::uint64_t seed = 0;
  int k_hat = 0;
  double mean_ari = 0.0;
};

struct SimulationSummary {
  double bias = 0.0;
  double rmse = 0.0;
  double mean_ari = 0.0;
};

struct SimulationResult {
  std::vector<ReplicateResult> rows;
  SimulationSummary summary;
};

// Replicates run in parallel (OpenMP when available); rows come back in
// replicate order regardless of scheduling, so output is deterministic.
SimulationResult run_simulation(const ExperimentConfig& cfg);

// CSV bodies; fixed 6-decimal formatting so identical runs are identical
// byte-for-byte.
std::string results_csv(const std::vector<ReplicateResult>& rows);
std::string summary_csv(const ExperimentConfig& cfg,
                        const SimulationSummary& s);

// Writes <out_csv> and the one-row summary next to it (".summary.csv"
// appended to the stem).  Returns the summary path.
std::string write_simulation_outputs(const ExperimentConfig& cfg,
                                     const SimulationResult& res,
                                     const std::string& out_csv);

// Writes replicate_<r>.edges files plus manifest.txt (config, ground truth
// labels and matrix, per-replicate seeds) under out_dir.
void generate_networks(const ExperimentConfig& cfg, const std::string& out_dir);

struct FitOptions {
  int n_keep = 10000;
  int n_burn = 5000;
  std::uint64_t seed = 1;
  double delta = -1.0;
  int k_max = -1;
  double lambda = 1.0;
  bool store_p = false;
  std::string trace_path;  // when non-empty, dump "iter k_eff z_1 .. z_n" lines
};

struct FitReport {
  int k_mode = 0;
  Assignment z_mode;
  MoveTally tally[kNumMoveKinds];
  Hyperparams hp;
  std::string summary_json;  // seed, config, acceptance rates, modal state
};

FitReport fit_network(const AdjacencyMatrix& a, const FitOptions& opt);

// Whitespace-separated integer labels, one per node.
std::vector<int> read_labels_file(const std::string& path);

}  // namespace ddsbm

#endif  // DDSBM_EXPERIMENT_HPP
