#include "ddsbm/inference.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace ddsbm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::vector<int> partition_key(const std::vector<int>& labels) {
  std::vector<int> key(labels.size());
  std::unordered_map<int, int> rank;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, fresh] =
        rank.try_emplace(labels[i], static_cast<int>(rank.size()));
    (void)fresh;
    key[i] = it->second;
  }
  return key;
}

int effective_k(const std::vector<int>& labels) {
  std::unordered_map<int, int> rank;
  for (int l : labels) rank.try_emplace(l, 0);
  return static_cast<int>(rank.size());
}

int posterior_mode_k(const Trace& trace) {
  if (trace.draws.empty())
    throw std::invalid_argument("posterior_mode_k: empty trace");
  std::map<int, long long> counts;
  for (const Draw& d : trace.draws) counts[d.k_eff]++;
  int best = 0;
  long long best_count = -1;
  for (const auto& [k, c] : counts) {
    if (c > best_count) {  // map iterates ascending, so ties keep smaller K
      best = k;
      best_count = c;
    }
  }
  return best;
}

Assignment posterior_mode_z(const Trace& trace) {
  if (trace.draws.empty())
    throw std::invalid_argument("posterior_mode_z: empty trace");
  std::map<std::vector<int>, std::pair<long long, std::size_t>> counts;
  for (std::size_t t = 0; t < trace.draws.size(); ++t) {
    auto key = partition_key(trace.draws[t].z);
    auto [it, fresh] = counts.try_emplace(std::move(key), 0, t);
    (void)fresh;
    it->second.first++;
  }
  const std::vector<int>* best = nullptr;
  long long best_count = -1;
  std::size_t best_first = 0;
  for (const auto& [key, v] : counts) {
    if (v.first > best_count ||
        (v.first == best_count && v.second < best_first)) {
      best = &key;
      best_count = v.first;
      best_first = v.second;
    }
  }
  Assignment z;
  z.labels = *best;
  z.k = effective_k(z.labels);
  return z;
}

double adjusted_rand_index(const std::vector<int>& a,
                           const std::vector<int>& b) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("ari: label vectors must match and be non-empty");
  const auto ka = partition_key(a);
  const auto kb = partition_key(b);
  const int ra = effective_k(ka);
  const int rb = effective_k(kb);
  std::vector<long long> table(static_cast<std::size_t>(ra) * rb, 0);
  std::vector<long long> rows(ra, 0), cols(rb, 0);
  for (std::size_t i = 0; i < ka.size(); ++i) {
    table[static_cast<std::size_t>(ka[i]) * rb + kb[i]]++;
    rows[ka[i]]++;
    cols[kb[i]]++;
  }
  auto choose2 = [](long long m) {
    return static_cast<double>(m) * (m - 1) / 2.0;
  };
  double index = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (long long c : table) index += choose2(c);
  for (long long c : rows) sum_a += choose2(c);
  for (long long c : cols) sum_b += choose2(c);
  const double total = choose2(static_cast<long long>(a.size()));
  const double expected = sum_a * sum_b / total;
  const double max_index = 0.5 * (sum_a + sum_b);
  const double denom = max_index - expected;
  if (denom == 0.0) return 1.0;  // both partitions trivial
  return (index - expected) / denom;
}

double mean_ari(const Trace& trace, const Assignment& z0) {
  if (trace.draws.empty())
    throw std::invalid_argument("mean_ari: empty trace");
  double s = 0.0;
  for (const Draw& d : trace.draws)
    s += adjusted_rand_index(d.z, z0.labels);
  return s / static_cast<double>(trace.draws.size());
}

ErrorStats bias_rmse(const std::vector<int>& k_hats, int k0) {
  if (k_hats.empty()) throw std::invalid_argument("bias_rmse: empty input");
  double sum = 0.0, sq = 0.0;
  for (int k : k_hats) {
    const double d = static_cast<double>(k - k0);
    sum += d;
    sq += d * d;
  }
  const double m = static_cast<double>(k_hats.size());
  return ErrorStats{sum / m, std::sqrt(sq / m)};
}

double hellinger(const NodeProbMatrix& t0, const NodeProbMatrix& t1) {
  if (t0.n() != t1.n())
    throw std::invalid_argument("hellinger: dimension mismatch");
  double prod = 1.0;
  for (int i = 0; i < t0.n(); ++i) {
    for (int j = i + 1; j < t0.n(); ++j) {
      const double p = t0.at(i, j);
      const double q = t1.at(i, j);
      const double s1 = std::sqrt(p) - std::sqrt(q);
      const double s2 = std::sqrt(1.0 - p) - std::sqrt(1.0 - q);
      const double h2 = 0.5 * (s1 * s1 + s2 * s2);
      prod *= 1.0 - 0.5 * h2;
    }
  }
  const double h2 = 2.0 - 2.0 * prod;
  return std::sqrt(std::max(0.0, h2));
}

double kl_divergence(const NodeProbMatrix& t0, const NodeProbMatrix& t1) {
  if (t0.n() != t1.n())
    throw std::invalid_argument("kl_divergence: dimension mismatch");
  double kl = 0.0;
  for (int i = 0; i < t0.n(); ++i) {
    for (int j = i + 1; j < t0.n(); ++j) {
      const double p = t0.at(i, j);
      const double q = t1.at(i, j);
      if (p > 0.0) {
        if (q <= 0.0) return kInf;
        kl += p * std::log(p / q);
      }
      if (p < 1.0) {
        if (q >= 1.0) return kInf;
        kl += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
      }
    }
  }
  return kl;
}

}  // namespace ddsbm
