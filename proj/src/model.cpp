#include "ddsbm/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ddsbm {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double lbeta(double x, double y) {
  return std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y);
}
}  // namespace

Hyperparams Hyperparams::defaults_for(int n) {
  if (n < 2) throw std::invalid_argument("hyperparams: n must be >= 2");
  Hyperparams hp;
  hp.delta = std::min(0.05, std::log(static_cast<double>(n)) / n);
  hp.k_max = static_cast<int>(std::floor(std::sqrt(static_cast<double>(n))));
  hp.lambda = 1.0;
  return hp;
}

void BlockStats::insert_slot(int j) {
  const int k2 = k + 1;
  std::vector<long long> o2(static_cast<std::size_t>(k2) * k2, 0);
  for (int a = 0; a < k; ++a) {
    const int a2 = a >= j ? a + 1 : a;
    for (int b = 0; b < k; ++b) {
      const int b2 = b >= j ? b + 1 : b;
      o2[static_cast<std::size_t>(a2) * k2 + b2] = get_o(a, b);
    }
  }
  o = std::move(o2);
  sizes.insert(sizes.begin() + j, 0);
  k = k2;
}

void BlockStats::remove_slot(int j) {
  if (sizes[j] != 0)
    throw std::invalid_argument("block stats: can only remove an empty slot");
  const int k2 = k - 1;
  std::vector<long long> o2(static_cast<std::size_t>(k2) * k2, 0);
  for (int a = 0; a < k; ++a) {
    if (a == j) continue;
    const int a2 = a > j ? a - 1 : a;
    for (int b = 0; b < k; ++b) {
      if (b == j) continue;
      const int b2 = b > j ? b - 1 : b;
      o2[static_cast<std::size_t>(a2) * k2 + b2] = get_o(a, b);
    }
  }
  o = std::move(o2);
  sizes.erase(sizes.begin() + j);
  k = k2;
}

void BlockStats::merge_slots(int c1, int c2) {
  for (int b = 0; b < k; ++b) {
    if (b == c1 || b == c2) continue;
    add_o(c1, b, get_o(c2, b));
  }
  add_o(c1, c1, get_o(c2, c2) + get_o(c1, c2));
  sizes[c1] += sizes[c2];
  // zero out c2 so remove_slot's emptiness check refers to membership only
  for (int b = 0; b < k; ++b) {
    o[static_cast<std::size_t>(c2) * k + b] = 0;
    o[static_cast<std::size_t>(b) * k + c2] = 0;
  }
  sizes[c2] = 0;
  remove_slot(c2);
}

BlockStats block_stats(const AdjacencyMatrix& a, const Assignment& z) {
  z.check();
  if (z.n() != a.n())
    throw std::invalid_argument("block_stats: dimension mismatch");
  BlockStats s(z.k);
  for (int l : z.labels) s.sizes[l]++;
  const int n = a.n();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (a.at(i, j)) s.add_o(z.labels[i], z.labels[j], 1);
  return s;
}

double log_likelihood(const BlockStats& s, const ConnectivityMatrix& p) {
  if (p.k() != s.k)
    throw std::invalid_argument("log_likelihood: dimension mismatch");
  double ll = 0.0;
  for (int a = 0; a < s.k; ++a) {
    for (int b = a; b < s.k; ++b) {
      const long long o = s.get_o(a, b);
      const long long m = s.pairs(a, b);
      const double q = p(a, b);
      if (q <= 0.0) {
        if (o > 0) return kNegInf;
        // all pairs are non-edges with probability 1; contributes 0
      } else if (q >= 1.0) {
        if (o < m) return kNegInf;
      } else {
        if (o > 0) ll += static_cast<double>(o) * std::log(q);
        if (m > o) ll += static_cast<double>(m - o) * std::log1p(-q);
      }
    }
  }
  return ll;
}

double log_prior_p(const ConnectivityMatrix& p, const Hyperparams& hp) {
  const int k = p.k();
  const double d = hp.delta;
  for (int a = 0; a < k; ++a)
    if (!(p(a, a) > d && p(a, a) <= 1.0)) return kNegInf;
  double lp = -k * std::log1p(-d);  // diagonals: density 1/(1-delta) each
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      const double cap = std::min(p(a, a), p(b, b)) - d;
      if (!(p(a, b) >= 0.0 && p(a, b) <= cap)) return kNegInf;
      lp -= std::log(cap);
    }
  }
  return lp;
}

double log_prior_z(int n, const std::vector<int>& sizes, int k) {
  if (k < 1 || static_cast<int>(sizes.size()) != k)
    throw std::invalid_argument("log_prior_z: bad sizes");
  double lp = std::lgamma(static_cast<double>(k)) -
              std::lgamma(static_cast<double>(n) + k);
  for (int c = 0; c < k; ++c)
    lp += std::lgamma(static_cast<double>(sizes[c]) + 1.0);
  return lp;
}

double log_prior_z(const Assignment& z) {
  return log_prior_z(z.n(), z.block_sizes(), z.k);
}

double log_prior_k(int k, const Hyperparams& hp) {
  if (k < 1 || k > hp.k_max) return kNegInf;
  return k * std::log(hp.lambda) - std::lgamma(static_cast<double>(k) + 1.0);
}

double log_posterior(const AdjacencyMatrix& a, const Assignment& z,
                     const ConnectivityMatrix& p, const Hyperparams& hp) {
  if (p.k() != z.k)
    throw std::invalid_argument("log_posterior: dimension mismatch");
  const double lk = log_prior_k(z.k, hp);
  if (lk == kNegInf) return kNegInf;
  const double lp = log_prior_p(p, hp);
  if (lp == kNegInf) return kNegInf;
  const BlockStats s = block_stats(a, z);
  const double ll = log_likelihood(s, p);
  if (ll == kNegInf) return kNegInf;
  return ll + lp + log_prior_z(z.n(), s.sizes, z.k) + lk;
}

double log_marginal_evidence(const BlockStats& s) {
  double lm = 0.0;
  for (int a = 0; a < s.k; ++a) {
    for (int b = a; b < s.k; ++b) {
      const double o = static_cast<double>(s.get_o(a, b));
      const double m = static_cast<double>(s.pairs(a, b));
      lm += lbeta(o + 1.0, m - o + 1.0);
    }
  }
  return lm;
}

}  // namespace ddsbm
