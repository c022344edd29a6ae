#ifndef DDSBM_SAMPLER_HPP
#define DDSBM_SAMPLER_HPP

#include <cstdint>
#include <limits>
#include <vector>

#include "ddsbm/model.hpp"
#include "ddsbm/netgen.hpp"
#include "ddsbm/rng.hpp"
#include "ddsbm/types.hpp"

namespace ddsbm {

enum MoveKind { kMoveMK = 0, kMoveGS = 1, kMoveM3 = 2, kMoveAE = 3 };
constexpr int kNumMoveKinds = 4;

struct ChainState {
  Assignment z;
  ConnectivityMatrix p;
  BlockStats stats;      // cached tallies of (A, z), updated incrementally
  double log_post = 0.0; // cached log_posterior(A, z, p)
};

struct ChainConfig {
  int n_keep = 20000;
  int n_burn = 10000;
  std::uint64_t seed = 1;
  Hyperparams hp;
  bool store_p = false;  // also keep per-draw connectivity snapshots
};

struct Draw {
  int k_eff = 0;         // number of non-empty communities
  std::vector<int> z;    // declared labels, 0-based
};

struct MoveTally {
  long long proposed = 0;
  long long accepted = 0;
};

struct Trace {
  std::vector<Draw> draws;
  std::vector<ConnectivityMatrix> p_draws;  // filled only when store_p
  MoveTally tally[kNumMoveKinds];
};

// Full record of one proposal, including every random choice the move made,
// so tests can rebuild the proposal density from first principles and check
// the streamlined acceptance ratio against the generic one.
struct ProposalOutcome {
  int kind = kMoveMK;
  bool abandoned = false;  // precondition failed; counted proposed-and-rejected

  Assignment z_star;
  ConnectivityMatrix p_star;
  BlockStats stats_star;
  // Streamlined log acceptance ratio, not capped at 0; -inf when the
  // proposal falls outside the prior support.
  double log_accept = -std::numeric_limits<double>::infinity();

  // MK: identifier drawn and direction.
  int mk_slot = -1;
  bool mk_add = false;

  // GS: node moved and its labels.
  int gs_node = -1;
  int gs_from = -1;
  int gs_to = -1;

  // M3 / AE: community pair involved.
  int pair_c1 = -1;
  int pair_c2 = -1;
  bool ae_split = false;
  int ae_presplit_size = -1;  // size of the community chosen for splitting

  // M3: processing order over the pooled nodes and per-node chosen
  // log-probabilities, forward (under P) and reverse replay (under P*).
  std::vector<int> m3_order;
  std::vector<double> m3_logp_fwd;
  std::vector<double> m3_logp_rev;
};

// Second proposal stage: every entry (a <= b) redrawn independently from
// Beta(o + 1, pairs - o + 1); row-major upper-triangle draw order.  When
// log_density is non-null it receives the summed log Beta density at the
// returned matrix.
ConnectivityMatrix propose_p(const BlockStats& s, Rng& rng,
                             double* log_density = nullptr);

// K = 2 with uniform labels; P redrawn from propose_p until diagonally
// dominant (up to 1000 attempts, then a fixed dominant fallback).
ChainState init_state(const AdjacencyMatrix& a, const Hyperparams& hp,
                      Rng& rng);

ProposalOutcome move_mk(const ChainState& st, const AdjacencyMatrix& a,
                        const Hyperparams& hp, Rng& rng);
ProposalOutcome move_gs(const ChainState& st, const AdjacencyMatrix& a,
                        const Hyperparams& hp, Rng& rng);
ProposalOutcome move_m3(const ChainState& st, const AdjacencyMatrix& a,
                        const Hyperparams& hp, Rng& rng);
ProposalOutcome move_ae(const ChainState& st, const AdjacencyMatrix& a,
                        const Hyperparams& hp, Rng& rng);

// One iteration: uniform move-kind pick, proposal, log-space accept test,
// incremental cache update.  Returns whether the proposal was accepted; when
// out is non-null the full proposal record is copied there.
bool step(ChainState& st, const AdjacencyMatrix& a, const Hyperparams& hp,
          Rng& rng, Trace& trace, ProposalOutcome* out = nullptr);

Trace run_chain(const AdjacencyMatrix& a, const ChainConfig& cfg);

}  // namespace ddsbm

#endif  // DDSBM_SAMPLER_HPP
