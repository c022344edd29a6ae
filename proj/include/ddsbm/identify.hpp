#ifndef DDSBM_IDENTIFY_HPP
#define DDSBM_IDENTIFY_HPP

#include <vector>

#include "ddsbm/types.hpp"

namespace ddsbm {

// Node-level edge-probability matrix theta = T(Z P Z^T): symmetric, zero
// diagonal, entries in [0,1].
class NodeProbMatrix {
 public:
  NodeProbMatrix() = default;
  explicit NodeProbMatrix(int n);

  int n() const { return n_; }
  double at(int i, int j) const {
    return v_[static_cast<std::size_t>(i) * n_ + j];
  }
  // i != j; writes both triangles.
  void set(int i, int j, double x);

 private:
  int n_ = 0;
  std::vector<double> v_;
};

NodeProbMatrix theta_from(const Assignment& z, const ConnectivityMatrix& p);

// Gap condition P_aa > delta + max_{b != a} P_ab for every a; at k = 1 this
// reduces to P_11 > delta.
bool is_diagonally_dominant(const ConnectivityMatrix& p, double delta);

double sup_norm(const NodeProbMatrix& a, const NodeProbMatrix& b);

struct RecoveredModel {
  Assignment z;          // labels ordered by smallest member per community
  ConnectivityMatrix p;  // read back from theta, averaged per block when tol > 0
};

// Inverts theta back to (K, Z, P) through the row-argmax sets
// C_i = { j != i : theta_ij >= max_l theta_il - tol }, grouping nodes by
// mutual membership.  Throws std::runtime_error when the C_i sets do not
// form a consistent partition or when a recovered community has a single
// member (minimum community size is 2).
RecoveredModel recover(const NodeProbMatrix& theta, double tol);

}  // namespace ddsbm

#endif  // DDSBM_IDENTIFY_HPP
