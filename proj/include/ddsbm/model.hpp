#ifndef DDSBM_MODEL_HPP
#define DDSBM_MODEL_HPP

#include <vector>

#include "ddsbm/netgen.hpp"
#include "ddsbm/types.hpp"

namespace ddsbm {

// Sufficient statistics of (A, Z): per block pair the observed edge count
// o(a,b) and the available pair count pairs(a,b).  Within-block pairs count
// each unordered pair once.  Pair counts are derived from block sizes, so the
// invariant pairs(a,a) = s_a (s_a - 1) / 2 holds by construction.
struct BlockStats {
  int k = 0;
  std::vector<long long> o;  // k*k, symmetric
  std::vector<int> sizes;

  BlockStats() = default;
  explicit BlockStats(int k_)
      : k(k_), o(static_cast<std::size_t>(k_) * k_, 0), sizes(k_, 0) {}

  long long get_o(int a, int b) const {
    return o[static_cast<std::size_t>(a) * k + b];
  }
  void add_o(int a, int b, long long d) {
    o[static_cast<std::size_t>(a) * k + b] += d;
    if (a != b) o[static_cast<std::size_t>(b) * k + a] += d;
  }
  long long pairs(int a, int b) const {
    if (a == b) {
      long long s = sizes[a];
      return s * (s - 1) / 2;
    }
    return static_cast<long long>(sizes[a]) * sizes[b];
  }

  // Structural edits used by the dimension-changing sampler moves.
  void insert_slot(int j);             // new empty community at identifier j
  void remove_slot(int j);             // community j must be empty
  void merge_slots(int c1, int c2);    // fold c2's tallies into c1, drop c2

  bool operator==(const BlockStats& t) const {
    return k == t.k && o == t.o && sizes == t.sizes;
  }
};

BlockStats block_stats(const AdjacencyMatrix& a, const Assignment& z);

// Bernoulli product likelihood from the tallies; 0*log(0) = 0, and -inf when
// an impossible edge (p = 0) or non-edge (p = 1) was observed.
double log_likelihood(const BlockStats& s, const ConnectivityMatrix& p);

// Conditionally uniform prior density of P: diagonals U(delta, 1], entry
// (a,b) then U(0, min(P_aa, P_bb) - delta]; -inf outside the support.
double log_prior_p(const ConnectivityMatrix& p, const Hyperparams& hp);

// Uniform-allocation prior on labels given K (Gamma(K)/Gamma(n+K) *
// prod_c Gamma(n_c + 1)); depends on Z only through block sizes.
double log_prior_z(int n, const std::vector<int>& sizes, int k);
double log_prior_z(const Assignment& z);

// Truncated Poisson(lambda) on 1..k_max; the normalizing constant is omitted
// consistently, only ratios are ever used.
double log_prior_k(int k, const Hyperparams& hp);

double log_posterior(const AdjacencyMatrix& a, const Assignment& z,
                     const ConnectivityMatrix& p, const Hyperparams& hp);

// log of the integrated Bernoulli likelihood under flat per-block priors,
// sum over a <= b of log Beta(o + 1, pairs - o + 1).  The sampler's collapsed
// acceptance ratios are differences of this quantity.
double log_marginal_evidence(const BlockStats& s);

}  // namespace ddsbm

#endif  // DDSBM_MODEL_HPP
