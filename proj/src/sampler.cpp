#include "ddsbm/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "ddsbm/identify.hpp"
#include "ddsbm/inference.hpp"

namespace ddsbm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double lbeta(double x, double y) {
  return std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y);
}

// log(1 / (1 + exp(-x))), stable on both tails.
double log_sigmoid(double x) {
  if (x > 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

// Edge counts from node i into every community under `labels`; nodes labeled
// -1 (detached during a move) are skipped.
void edge_profile(const AdjacencyMatrix& a, const std::vector<int>& labels,
                  int i, int k, std::vector<long long>& e) {
  e.assign(static_cast<std::size_t>(k), 0);
  const int n = a.n();
  for (int j = 0; j < n; ++j) {
    if (j == i || labels[j] < 0) continue;
    if (a.at(i, j)) e[static_cast<std::size_t>(labels[j])]++;
  }
}

void remove_node(BlockStats& s, std::vector<int>& labels,
                 const AdjacencyMatrix& a, int i,
                 std::vector<long long>& scratch) {
  const int c = labels[i];
  edge_profile(a, labels, i, s.k, scratch);
  for (int b = 0; b < s.k; ++b)
    if (scratch[b] != 0) s.add_o(c, b, -scratch[b]);
  s.sizes[c]--;
  labels[i] = -1;
}

void insert_node(BlockStats& s, std::vector<int>& labels,
                 const AdjacencyMatrix& a, int i, int c,
                 std::vector<long long>& scratch) {
  edge_profile(a, labels, i, s.k, scratch);
  for (int b = 0; b < s.k; ++b)
    if (scratch[b] != 0) s.add_o(c, b, scratch[b]);
  s.sizes[c]++;
  labels[i] = c;
}

void move_node(BlockStats& s, std::vector<int>& labels,
               const AdjacencyMatrix& a, int i, int to,
               std::vector<long long>& scratch) {
  const int c = labels[i];
  edge_profile(a, labels, i, s.k, scratch);
  for (int b = 0; b < s.k; ++b) {
    if (scratch[b] == 0) continue;
    s.add_o(c, b, -scratch[b]);
    s.add_o(to, b, scratch[b]);
  }
  s.sizes[c]--;
  s.sizes[to]++;
  labels[i] = to;
}

// Posterior of the full state from cached tallies.
double full_log_post(const BlockStats& s, const ConnectivityMatrix& p,
                     const Hyperparams& hp, int n) {
  const double lk = log_prior_k(s.k, hp);
  if (lk == kNegInf) return kNegInf;
  const double lp = log_prior_p(p, hp);
  if (lp == kNegInf) return kNegInf;
  const double ll = log_likelihood(s, p);
  if (ll == kNegInf) return kNegInf;
  return ll + lp + log_prior_z(n, s.sizes, s.k) + lk;
}

// Evidence change when a detached node with edge profile e joins community c
// of `base` (the tallies with the node removed); only pairs (c, .) move.
double insert_evidence_delta(const BlockStats& base,
                             const std::vector<long long>& e, int c) {
  double d = 0.0;
  for (int b = 0; b < base.k; ++b) {
    const long long o_old = base.get_o(std::min(b, c), std::max(b, c));
    const long long m_old = base.pairs(std::min(b, c), std::max(b, c));
    long long o_new = o_old + e[b];
    long long m_new;
    if (b == c) {
      const long long sz = base.sizes[c];
      m_new = (sz + 1) * sz / 2;
    } else {
      m_new = m_old + base.sizes[b];
    }
    d += lbeta(static_cast<double>(o_new) + 1.0,
               static_cast<double>(m_new - o_new) + 1.0) -
         lbeta(static_cast<double>(o_old) + 1.0,
               static_cast<double>(m_old - o_old) + 1.0);
  }
  return d;
}

// Log odds of assigning node i to c1 rather than c2 given the currently
// attached nodes: sub-network likelihood ratio plus the size-biased prior
// factor (n_c + 1).
double m3_logit(const AdjacencyMatrix& a, const std::vector<int>& labels,
                const BlockStats& s, int i, int c1, int c2,
                const ConnectivityMatrix& p, std::vector<long long>& scratch) {
  edge_profile(a, labels, i, s.k, scratch);
  double lo = std::log(static_cast<double>(s.sizes[c1]) + 1.0) -
              std::log(static_cast<double>(s.sizes[c2]) + 1.0);
  for (int b = 0; b < s.k; ++b) {
    const long long eb = scratch[b];
    const long long nb = s.sizes[b] - eb;
    if (eb != 0)
      lo += static_cast<double>(eb) * (std::log(p(c1, b)) - std::log(p(c2, b)));
    if (nb != 0)
      lo += static_cast<double>(nb) *
            (std::log1p(-p(c1, b)) - std::log1p(-p(c2, b)));
  }
  return lo;
}

void shift_up(std::vector<int>& labels, int j) {
  for (int& l : labels)
    if (l >= j) ++l;
}

void shift_down(std::vector<int>& labels, int j) {
  for (int& l : labels)
    if (l > j) --l;
}

}  // namespace

ConnectivityMatrix propose_p(const BlockStats& s, Rng& rng,
                             double* log_density) {
  ConnectivityMatrix p(s.k);
  double lq = 0.0;
  for (int a = 0; a < s.k; ++a) {
    for (int b = a; b < s.k; ++b) {
      const double o = static_cast<double>(s.get_o(a, b));
      const double m = static_cast<double>(s.pairs(a, b));
      const double al = o + 1.0;
      const double be = m - o + 1.0;
      const double x = rng.beta(al, be);
      p.set(a, b, x);
      lq += (al - 1.0) * std::log(x) + (be - 1.0) * std::log1p(-x) -
            lbeta(al, be);
    }
  }
  if (log_density) *log_density = lq;
  return p;
}

ChainState init_state(const AdjacencyMatrix& a, const Hyperparams& hp,
                      Rng& rng) {
  ChainState st;
  const int n = a.n();
  st.z.k = std::min(2, hp.k_max);
  st.z.labels.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    st.z.labels[i] = static_cast<int>(rng.below(st.z.k));
  st.stats = block_stats(a, st.z);

  bool ok = false;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    st.p = propose_p(st.stats, rng);
    if (is_diagonally_dominant(st.p, hp.delta)) {
      ok = true;
      break;
    }
  }
  if (!ok) {
    // fixed dominant fallback, valid whenever delta < 0.5
    st.p = ConnectivityMatrix(st.z.k, 0.25);
    for (int c = 0; c < st.z.k; ++c) st.p.set(c, c, 0.75);
  }
  st.log_post = full_log_post(st.stats, st.p, hp, n);
  return st;
}

ProposalOutcome move_mk(const ChainState& st, const AdjacencyMatrix& a,
                        const Hyperparams& hp, Rng& rng) {
  (void)a;
  ProposalOutcome out;
  out.kind = kMoveMK;
  const int k = st.z.k;
  const int n = st.z.n();
  const double lpp_old = log_prior_p(st.p, hp);

  if (rng.below(2) == 0) {
    // grow: fresh empty community at a uniform identifier, others shift up
    out.mk_add = true;
    const int j = static_cast<int>(rng.below(static_cast<std::uint32_t>(k + 1)));
    out.mk_slot = j;
    out.z_star = st.z;
    shift_up(out.z_star.labels, j);
    out.z_star.k = k + 1;
    out.stats_star = st.stats;
    out.stats_star.insert_slot(j);
    out.p_star = propose_p(out.stats_star, rng);
    if (k + 1 > hp.k_max) return out;  // prior truncation: auto-reject
    const double lpp_new = log_prior_p(out.p_star, hp);
    if (lpp_new == kNegInf) return out;
    out.log_accept = lpp_new - lpp_old + std::log(static_cast<double>(k)) -
                     std::log(static_cast<double>(k + 1)) -
                     std::log(static_cast<double>(n + k)) +
                     std::log(hp.lambda);
  } else {
    // shrink: delete the drawn identifier if it is empty, else abandon
    const int j = static_cast<int>(rng.below(static_cast<std::uint32_t>(k)));
    out.mk_slot = j;
    if (st.stats.sizes[j] != 0) {
      out.abandoned = true;
      return out;
    }
    out.z_star = st.z;
    shift_down(out.z_star.labels, j);
    out.z_star.k = k - 1;
    out.stats_star = st.stats;
    out.stats_star.remove_slot(j);
    out.p_star = propose_p(out.stats_star, rng);
    const double lpp_new = log_prior_p(out.p_star, hp);
    if (lpp_new == kNegInf) return out;
    out.log_accept = lpp_new - lpp_old + std::log(static_cast<double>(k)) -
                     std::log(static_cast<double>(k - 1)) +
                     std::log(static_cast<double>(n + k - 1)) -
                     std::log(hp.lambda);
  }
  return out;
}

ProposalOutcome move_gs(const ChainState& st, const AdjacencyMatrix& a,
                        const Hyperparams& hp, Rng& rng) {
  ProposalOutcome out;
  out.kind = kMoveGS;
  const int k = st.z.k;
  const int n = st.z.n();
  const int i = static_cast<int>(rng.below(static_cast<std::uint32_t>(n)));
  out.gs_node = i;
  out.gs_from = st.z.labels[i];

  // Detach node i; candidate weights are the collapsed posterior of its
  // label: evidence ratio times the allocation prior factor (n_c + 1).
  std::vector<int> labels = st.z.labels;
  BlockStats base = st.stats;
  std::vector<long long> scratch;
  remove_node(base, labels, a, i, scratch);
  std::vector<long long> e = scratch;  // profile is label-independent now

  std::vector<double> w(static_cast<std::size_t>(k));
  double wmax = kNegInf;
  for (int c = 0; c < k; ++c) {
    w[c] = insert_evidence_delta(base, e, c) +
           std::log(static_cast<double>(base.sizes[c]) + 1.0);
    wmax = std::max(wmax, w[c]);
  }
  double z = 0.0;
  for (int c = 0; c < k; ++c) z += std::exp(w[c] - wmax);
  const double lse = wmax + std::log(z);

  const double u = rng.uniform01();
  int chosen = k - 1;
  double acc = 0.0;
  for (int c = 0; c < k; ++c) {
    acc += std::exp(w[c] - lse);
    if (u < acc) {
      chosen = c;
      break;
    }
  }
  out.gs_to = chosen;

  insert_node(base, labels, a, i, chosen, scratch);
  out.z_star.labels = std::move(labels);
  out.z_star.k = k;
  out.stats_star = std::move(base);
  out.p_star = propose_p(out.stats_star, rng);
  const double lpp_new = log_prior_p(out.p_star, hp);
  if (lpp_new == kNegInf) return out;
  // forward and reverse categorical normalizers coincide, so only the
  // connectivity prior ratio survives
  out.log_accept = lpp_new - log_prior_p(st.p, hp);
  return out;
}

ProposalOutcome move_m3(const ChainState& st, const AdjacencyMatrix& a,
                        const Hyperparams& hp, Rng& rng) {
  ProposalOutcome out;
  out.kind = kMoveM3;
  const int k = st.z.k;
  if (k < 2) {
    out.abandoned = true;
    return out;
  }
  const int c1 = static_cast<int>(rng.below(static_cast<std::uint32_t>(k)));
  int c2 = static_cast<int>(rng.below(static_cast<std::uint32_t>(k - 1)));
  if (c2 >= c1) ++c2;
  out.pair_c1 = c1;
  out.pair_c2 = c2;

  std::vector<int> pooled;
  for (int i = 0; i < st.z.n(); ++i)
    if (st.z.labels[i] == c1 || st.z.labels[i] == c2) pooled.push_back(i);
  // one shared random order; forward path and reverse replay both use it
  for (int i = static_cast<int>(pooled.size()) - 1; i >= 1; --i) {
    const int j = static_cast<int>(rng.below(static_cast<std::uint32_t>(i + 1)));
    std::swap(pooled[static_cast<std::size_t>(i)],
              pooled[static_cast<std::size_t>(j)]);
  }
  out.m3_order = pooled;

  std::vector<int> labels = st.z.labels;
  BlockStats work = st.stats;
  std::vector<long long> scratch;
  for (int i : pooled) remove_node(work, labels, a, i, scratch);

  double lfwd = 0.0;
  out.m3_logp_fwd.reserve(pooled.size());
  for (int i : pooled) {
    const double lo = m3_logit(a, labels, work, i, c1, c2, st.p, scratch);
    const double p1 = 1.0 / (1.0 + std::exp(-lo));
    const int c = (rng.uniform01() < p1) ? c1 : c2;
    const double lp = (c == c1) ? log_sigmoid(lo) : log_sigmoid(-lo);
    out.m3_logp_fwd.push_back(lp);
    lfwd += lp;
    insert_node(work, labels, a, i, c, scratch);
  }

  out.z_star.labels = std::move(labels);
  out.z_star.k = k;
  out.stats_star = std::move(work);
  out.p_star = propose_p(out.stats_star, rng);
  const double lpp_new = log_prior_p(out.p_star, hp);
  if (lpp_new == kNegInf) return out;

  // reverse replay: same order, target labels from the current state, odds
  // evaluated under the proposed connectivity matrix
  std::vector<int> rlabels = out.z_star.labels;
  BlockStats rwork = out.stats_star;
  for (int i : pooled) remove_node(rwork, rlabels, a, i, scratch);
  double lrev = 0.0;
  out.m3_logp_rev.reserve(pooled.size());
  for (int i : pooled) {
    const double lo = m3_logit(a, rlabels, rwork, i, c1, c2, out.p_star, scratch);
    const int c = st.z.labels[i];
    const double lp = (c == c1) ? log_sigmoid(lo) : log_sigmoid(-lo);
    out.m3_logp_rev.push_back(lp);
    lrev += lp;
    insert_node(rwork, rlabels, a, i, c, scratch);
  }

  const double sz1_old = static_cast<double>(st.stats.sizes[c1]);
  const double sz2_old = static_cast<double>(st.stats.sizes[c2]);
  const double sz1_new = static_cast<double>(out.stats_star.sizes[c1]);
  const double sz2_new = static_cast<double>(out.stats_star.sizes[c2]);
  out.log_accept = lpp_new - log_prior_p(st.p, hp) + (lrev - lfwd) +
                   std::lgamma(sz1_new + 1.0) + std::lgamma(sz2_new + 1.0) -
                   std::lgamma(sz1_old + 1.0) - std::lgamma(sz2_old + 1.0) +
                   log_marginal_evidence(out.stats_star) -
                   log_marginal_evidence(st.stats);
  return out;
}

ProposalOutcome move_ae(const ChainState& st, const AdjacencyMatrix& a,
                        const Hyperparams& hp, Rng& rng) {
  ProposalOutcome out;
  out.kind = kMoveAE;
  const int k = st.z.k;
  const int n = st.z.n();

  if (rng.below(2) == 0) {
    // eject: insert an empty community at c2, then spill members of c1 into
    // it with a shared uniform coin; the coin integrates out in the ratio
    out.ae_split = true;
    if (k + 1 > hp.k_max) {
      out.abandoned = true;
      return out;
    }
    const int c2 = static_cast<int>(rng.below(static_cast<std::uint32_t>(k + 1)));
    const int r = static_cast<int>(rng.below(static_cast<std::uint32_t>(k)));
    const int c1 = (r >= c2) ? r + 1 : r;  // post-insert identifier of donor
    out.pair_c1 = c1;
    out.pair_c2 = c2;
    const int m = st.stats.sizes[r];  // donor size before the split
    out.ae_presplit_size = m;

    out.z_star = st.z;
    shift_up(out.z_star.labels, c2);
    out.z_star.k = k + 1;
    out.stats_star = st.stats;
    out.stats_star.insert_slot(c2);

    const double pc = rng.uniform01();
    std::vector<long long> scratch;
    for (int i = 0; i < n; ++i) {
      if (out.z_star.labels[i] != c1) continue;
      if (rng.uniform01() < pc)
        move_node(out.stats_star, out.z_star.labels, a, i, c2, scratch);
    }
    out.p_star = propose_p(out.stats_star, rng);
    const double lpp_new = log_prior_p(out.p_star, hp);
    if (lpp_new == kNegInf) return out;
    out.log_accept =
        lpp_new - log_prior_p(st.p, hp) + std::log(static_cast<double>(k)) -
        std::log(static_cast<double>(k + 1)) + std::log(hp.lambda) +
        log_marginal_evidence(out.stats_star) -
        log_marginal_evidence(st.stats) +
        std::log(static_cast<double>(m) + 1.0) -
        std::log(static_cast<double>(k + n));
  } else {
    // absorb: pour c2 into c1 and drop the emptied identifier
    if (k < 2) {
      out.abandoned = true;
      return out;
    }
    const int c1 = static_cast<int>(rng.below(static_cast<std::uint32_t>(k)));
    int c2 = static_cast<int>(rng.below(static_cast<std::uint32_t>(k - 1)));
    if (c2 >= c1) ++c2;
    out.pair_c1 = c1;
    out.pair_c2 = c2;
    const int m12 = st.stats.sizes[c1] + st.stats.sizes[c2];

    out.z_star = st.z;
    for (int& l : out.z_star.labels)
      if (l == c2) l = c1;
    shift_down(out.z_star.labels, c2);
    out.z_star.k = k - 1;
    out.stats_star = st.stats;
    out.stats_star.merge_slots(c1, c2);

    out.p_star = propose_p(out.stats_star, rng);
    const double lpp_new = log_prior_p(out.p_star, hp);
    if (lpp_new == kNegInf) return out;
    // the reverse split must release exactly the absorbed members, hence the
    // post-merge size in the (n_c + 1) factor
    out.log_accept =
        lpp_new - log_prior_p(st.p, hp) + std::log(static_cast<double>(k)) -
        std::log(static_cast<double>(k - 1)) - std::log(hp.lambda) +
        log_marginal_evidence(out.stats_star) -
        log_marginal_evidence(st.stats) +
        std::log(static_cast<double>(n + k - 1)) -
        std::log(static_cast<double>(m12) + 1.0);
  }
  return out;
}

bool step(ChainState& st, const AdjacencyMatrix& a, const Hyperparams& hp,
          Rng& rng, Trace& trace, ProposalOutcome* out) {
  const int kind = static_cast<int>(rng.below(kNumMoveKinds));
  ProposalOutcome po;
  switch (kind) {
    case kMoveMK: po = move_mk(st, a, hp, rng); break;
    case kMoveGS: po = move_gs(st, a, hp, rng); break;
    case kMoveM3: po = move_m3(st, a, hp, rng); break;
    default: po = move_ae(st, a, hp, rng); break;
  }
  trace.tally[kind].proposed++;

  bool accepted = false;
  if (!po.abandoned) {
    const double u = rng.uniform01();
    if (std::log(u) < po.log_accept) {
      accepted = true;
      st.z = po.z_star;
      st.p = po.p_star;
      st.stats = po.stats_star;
      st.log_post = full_log_post(st.stats, st.p, hp, st.z.n());
      trace.tally[kind].accepted++;
    }
  }
  if (out) *out = std::move(po);
  return accepted;
}

Trace run_chain(const AdjacencyMatrix& a, const ChainConfig& cfg) {
  if (cfg.n_keep < 1 || cfg.n_burn < 0)
    throw std::invalid_argument("run_chain: bad chain lengths");
  Rng rng(cfg.seed);
  ChainState st = init_state(a, cfg.hp, rng);
  Trace trace;
  trace.draws.reserve(static_cast<std::size_t>(cfg.n_keep));
  for (int t = 0; t < cfg.n_burn; ++t) step(st, a, cfg.hp, rng, trace);
  for (int t = 0; t < cfg.n_keep; ++t) {
    step(st, a, cfg.hp, rng, trace);
    Draw d;
    d.k_eff = effective_k(st.z.labels);
    d.z = st.z.labels;
    trace.draws.push_back(std::move(d));
    if (cfg.store_p) trace.p_draws.push_back(st.p);
  }
  return trace;
}

}  // namespace ddsbm
