#ifndef DDSBM_NETGEN_HPP
#define DDSBM_NETGEN_HPP

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ddsbm/types.hpp"

namespace ddsbm {

// Input file does not match its documented format.  The CLI maps this to
// exit code 2.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dense symmetric 0/1 adjacency with an empty diagonal.
class AdjacencyMatrix {
 public:
  AdjacencyMatrix() = default;
  explicit AdjacencyMatrix(int n);

  int n() const { return n_; }

  bool at(int i, int j) const {
    return a_[static_cast<std::size_t>(i) * n_ + j] != 0;
  }

  // i != j; writes both triangles.
  void set(int i, int j, bool v);

  long long edge_count() const;

  // Unordered pairs (i,j), i < j, lexicographically sorted.
  std::vector<std::pair<int, int>> edges() const;

  bool operator==(const AdjacencyMatrix& o) const {
    return n_ == o.n_ && a_ == o.a_;
  }

 private:
  int n_ = 0;
  std::vector<std::uint8_t> a_;
};

struct GroundTruth {
  Assignment z0;
  ConnectivityMatrix p0;
};

// The four benchmark connectivity patterns; case 4 follows the literal
// rank-one bump formula (diag 0.4 + 0.4*1{a<=h}, off-diag 0.2 +
// 0.4*1{a<=h}1{b<=h}, h = ceil(k0/2)).
ConnectivityMatrix make_case(int case_id, int k0);

// Deterministic round-robin labels, node i -> i mod k0; requires n >= 2*k0 so
// every community has at least two members.
Assignment balanced_assignment(int n, int k0);

GroundTruth make_truth(int case_id, int k0, int n);

// Bernoulli draws with edge probability rho * p0(z0_i, z0_j); pair draws are
// consumed in row-major i < j order so output does not depend on storage
// layout.
AdjacencyMatrix generate_sbm(const GroundTruth& truth, double rho,
                             std::uint64_t seed);

// Edge-list text format: first line "n <count>", then one "i j" pair per
// edge, 1-indexed, i < j, lexicographically sorted.
void write_edge_list(std::ostream& os, const AdjacencyMatrix& a);
AdjacencyMatrix read_edge_list(std::istream& is);
void write_edge_list_file(const std::string& path, const AdjacencyMatrix& a);
AdjacencyMatrix read_edge_list_file(const std::string& path);

}  // namespace ddsbm

#endif  // DDSBM_NETGEN_HPP
