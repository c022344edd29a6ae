#ifndef DDSBM_TYPES_HPP
#define DDSBM_TYPES_HPP

#include <stdexcept>
#include <vector>

namespace ddsbm {

// Community labels for n nodes.  Labels are 0-based in memory; every text
// format (edge lists, label files, trace dumps, manifests) is 1-based.
// k counts declared communities, which may include empty ones.
struct Assignment {
  std::vector<int> labels;
  int k = 0;

  int n() const { return static_cast<int>(labels.size()); }

  std::vector<int> block_sizes() const {
    std::vector<int> s(k, 0);
    for (int l : labels) s.at(static_cast<std::size_t>(l))++;
    return s;
  }

  void check() const {
    if (k < 1) throw std::invalid_argument("assignment: k must be >= 1");
    for (int l : labels)
      if (l < 0 || l >= k)
        throw std::invalid_argument("assignment: label out of range");
  }
};

// Symmetric k x k matrix of community connectivity probabilities.
class ConnectivityMatrix {
 public:
  ConnectivityMatrix() = default;
  explicit ConnectivityMatrix(int k, double fill = 0.0)
      : k_(k), v_(static_cast<std::size_t>(k) * k, fill) {
    if (k < 1) throw std::invalid_argument("connectivity: k must be >= 1");
  }

  int k() const { return k_; }

  double operator()(int a, int b) const {
    return v_[static_cast<std::size_t>(a) * k_ + b];
  }

  // Writes both (a,b) and (b,a).
  void set(int a, int b, double x) {
    v_[static_cast<std::size_t>(a) * k_ + b] = x;
    v_[static_cast<std::size_t>(b) * k_ + a] = x;
  }

  bool in_range() const {
    for (double x : v_)
      if (!(x >= 0.0 && x <= 1.0)) return false;
    return true;
  }

  bool operator==(const ConnectivityMatrix& o) const {
    return k_ == o.k_ && v_ == o.v_;
  }

 private:
  int k_ = 0;
  std::vector<double> v_;
};

struct Hyperparams {
  double delta = 0.05;  // dominance gap delta_n
  int k_max = 1;        // truncation of the prior on K
  double lambda = 1.0;  // Poisson rate for the prior on K

  static Hyperparams defaults_for(int n);
};

}  // namespace ddsbm

#endif  // DDSBM_TYPES_HPP
