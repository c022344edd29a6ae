#include "ddsbm/netgen.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "ddsbm/rng.hpp"

namespace ddsbm {

AdjacencyMatrix::AdjacencyMatrix(int n)
    : n_(n), a_(static_cast<std::size_t>(n) * n, 0) {
  if (n < 1) throw std::invalid_argument("adjacency: n must be >= 1");
}

void AdjacencyMatrix::set(int i, int j, bool v) {
  if (i == j) throw std::invalid_argument("adjacency: no self-loops");
  a_[static_cast<std::size_t>(i) * n_ + j] = v ? 1 : 0;
  a_[static_cast<std::size_t>(j) * n_ + i] = v ? 1 : 0;
}

long long AdjacencyMatrix::edge_count() const {
  long long c = 0;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      if (at(i, j)) ++c;
  return c;
}

std::vector<std::pair<int, int>> AdjacencyMatrix::edges() const {
  std::vector<std::pair<int, int>> e;
  e.reserve(static_cast<std::size_t>(edge_count()));
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      if (at(i, j)) e.emplace_back(i, j);
  return e;
}

ConnectivityMatrix make_case(int case_id, int k0) {
  if (k0 < 1) throw std::invalid_argument("make_case: k0 must be >= 1");
  ConnectivityMatrix p(k0);
  const int h = (k0 + 1) / 2;  // ceil(k0 / 2)
  for (int a = 0; a < k0; ++a) {
    for (int b = a; b < k0; ++b) {
      double v = 0.0;
      switch (case_id) {
        case 1:
          v = (a == b) ? 0.8 : 0.2;
          break;
        case 2:
          v = (a == b) ? 0.8 : 0.6;
          break;
        case 3:
          v = (a == b) ? 0.8 : 0.4;
          break;
        case 4: {
          const bool bump = (a < h) && (b < h);
          v = 0.2 + (a == b ? 0.2 : 0.0) + (bump ? 0.4 : 0.0);
          break;
        }
        default:
          throw std::invalid_argument("make_case: case_id must be in 1..4");
      }
      p.set(a, b, v);
    }
  }
  return p;
}

Assignment balanced_assignment(int n, int k0) {
  if (k0 < 1) throw std::invalid_argument("balanced_assignment: k0 must be >= 1");
  if (n < 2 * k0)
    throw std::invalid_argument(
        "balanced_assignment: need n >= 2*k0 so every community has >= 2 nodes");
  Assignment z;
  z.k = k0;
  z.labels.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) z.labels[i] = i % k0;
  return z;
}

GroundTruth make_truth(int case_id, int k0, int n) {
  return GroundTruth{balanced_assignment(n, k0), make_case(case_id, k0)};
}

AdjacencyMatrix generate_sbm(const GroundTruth& truth, double rho,
                             std::uint64_t seed) {
  const Assignment& z = truth.z0;
  z.check();
  if (truth.p0.k() != z.k)
    throw std::invalid_argument("generate_sbm: dimension mismatch");
  for (int a = 0; a < z.k; ++a)
    for (int b = a; b < z.k; ++b) {
      const double q = rho * truth.p0(a, b);
      if (!(q >= 0.0 && q <= 1.0))
        throw std::invalid_argument(
            "generate_sbm: rho*P entries must lie in [0,1]");
    }
  const int n = z.n();
  AdjacencyMatrix a(n);
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double q = rho * truth.p0(z.labels[i], z.labels[j]);
      if (rng.uniform01() < q) a.set(i, j, true);
    }
  }
  return a;
}

void write_edge_list(std::ostream& os, const AdjacencyMatrix& a) {
  os << "n " << a.n() << "\n";
  for (const auto& [i, j] : a.edges()) os << i + 1 << " " << j + 1 << "\n";
}

AdjacencyMatrix read_edge_list(std::istream& is) {
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& what) -> void {
    throw FormatError("edge list line " + std::to_string(lineno) + ": " + what);
  };

  if (!std::getline(is, line)) {
    lineno = 1;
    fail("missing header");
  }
  ++lineno;
  std::istringstream hs(line);
  std::string tag;
  int n = 0;
  if (!(hs >> tag >> n) || tag != "n" || n < 1) {
    fail("expected header \"n <count>\"");
  }
  std::string extra;
  if (hs >> extra) fail("trailing tokens after header");

  AdjacencyMatrix a(n);
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    long long i = 0, j = 0;
    if (!(ls >> i >> j)) fail("expected \"i j\"");
    if (ls >> extra) fail("trailing tokens after edge");
    if (i < 1 || j < 1 || i > n || j > n) fail("node id out of range");
    if (i >= j) fail("edges must satisfy i < j");
    a.set(static_cast<int>(i) - 1, static_cast<int>(j) - 1, true);
  }
  return a;
}

void write_edge_list_file(const std::string& path, const AdjacencyMatrix& a) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  write_edge_list(os, a);
  if (!os) throw std::runtime_error("write failed: " + path);
}

AdjacencyMatrix read_edge_list_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open edge list: " + path);
  return read_edge_list(is);
}

}  // namespace ddsbm
