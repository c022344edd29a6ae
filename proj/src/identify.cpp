#include "ddsbm/identify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ddsbm {

NodeProbMatrix::NodeProbMatrix(int n)
    : n_(n), v_(static_cast<std::size_t>(n) * n, 0.0) {
  if (n < 1) throw std::invalid_argument("node prob matrix: n must be >= 1");
}

void NodeProbMatrix::set(int i, int j, double x) {
  if (i == j) throw std::invalid_argument("node prob matrix: zero diagonal");
  if (!(x >= 0.0 && x <= 1.0))
    throw std::invalid_argument("node prob matrix: entries must be in [0,1]");
  v_[static_cast<std::size_t>(i) * n_ + j] = x;
  v_[static_cast<std::size_t>(j) * n_ + i] = x;
}

NodeProbMatrix theta_from(const Assignment& z, const ConnectivityMatrix& p) {
  z.check();
  if (p.k() != z.k) throw std::invalid_argument("theta_from: dimension mismatch");
  const int n = z.n();
  NodeProbMatrix t(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      t.set(i, j, p(z.labels[i], z.labels[j]));
  return t;
}

bool is_diagonally_dominant(const ConnectivityMatrix& p, double delta) {
  const int k = p.k();
  for (int a = 0; a < k; ++a) {
    double off = 0.0;
    for (int b = 0; b < k; ++b)
      if (b != a) off = std::max(off, p(a, b));
    if (k > 1 && !(p(a, a) > delta + off)) return false;
    if (k == 1 && !(p(a, a) > delta)) return false;
  }
  return true;
}

double sup_norm(const NodeProbMatrix& a, const NodeProbMatrix& b) {
  if (a.n() != b.n()) throw std::invalid_argument("sup_norm: dimension mismatch");
  double m = 0.0;
  for (int i = 0; i < a.n(); ++i)
    for (int j = i + 1; j < a.n(); ++j)
      m = std::max(m, std::fabs(a.at(i, j) - b.at(i, j)));
  return m;
}

RecoveredModel recover(const NodeProbMatrix& theta, double tol) {
  const int n = theta.n();
  if (n < 2) throw std::invalid_argument("recover: need at least two nodes");
  if (tol < 0.0) throw std::invalid_argument("recover: tol must be >= 0");

  // Row argmax sets, tolerance-relaxed.
  std::vector<std::vector<char>> in_c(n, std::vector<char>(n, 0));
  for (int i = 0; i < n; ++i) {
    double m = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) m = std::max(m, theta.at(i, j));
    for (int j = 0; j < n; ++j)
      if (j != i && theta.at(i, j) >= m - tol) in_c[i][j] = 1;
  }
  auto mutual = [&](int i, int j) { return in_c[i][j] && in_c[j][i]; };

  std::vector<int> label(n, -1);
  std::vector<std::vector<int>> groups;
  for (int i = 0; i < n; ++i) {
    if (label[i] >= 0) continue;
    const int g = static_cast<int>(groups.size());
    std::vector<int> members{i};
    for (int j = i + 1; j < n; ++j) {
      if (label[j] < 0 && mutual(i, j)) members.push_back(j);
    }
    // Mutual membership must be an equivalence on the group: every member
    // pairs with exactly the same set.
    for (int a : members) {
      for (int j = 0; j < n; ++j) {
        if (j == a) continue;
        const bool inside =
            label[j] == g ||
            std::find(members.begin(), members.end(), j) != members.end();
        if (static_cast<bool>(mutual(a, j)) != inside)
          throw std::runtime_error(
              "recover: argmax sets do not form a consistent partition");
      }
    }
    if (members.size() < 2)
      throw std::runtime_error(
          "recover: community of size 1 (minimum community size is 2)");
    for (int a : members) label[a] = g;
    groups.push_back(std::move(members));
  }

  const int k = static_cast<int>(groups.size());
  RecoveredModel out;
  out.z.k = k;
  out.z.labels = std::move(label);
  out.p = ConnectivityMatrix(k);
  for (int a = 0; a < k; ++a) {
    for (int b = a; b < k; ++b) {
      if (tol == 0.0) {
        // entries tie exactly; read one representative to avoid rounding
        const int i = groups[a][0];
        const int j = (a == b) ? groups[a][1] : groups[b][0];
        out.p.set(a, b, theta.at(i, j));
      } else {
        double sum = 0.0;
        long long cnt = 0;
        for (int i : groups[a])
          for (int j : groups[b]) {
            if (a == b && j <= i) continue;
            sum += theta.at(i, j);
            ++cnt;
          }
        out.p.set(a, b, sum / static_cast<double>(cnt));
      }
    }
  }
  return out;
}

}  // namespace ddsbm
