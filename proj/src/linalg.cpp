#include "ijets/linalg.hpp"

namespace ijets {

Echelon row_echelon(QMatrix m, int ncols) {
  if (ncols < 0) ncols = m.empty() ? 0 : static_cast<int>(m[0].size());
  Echelon e;
  std::size_t r = 0;
  for (int c = 0; c < ncols && r < m.size(); ++c) {
    std::size_t piv = r;
    while (piv < m.size() && m[piv][c] == 0) ++piv;
    if (piv == m.size()) continue;
    std::swap(m[piv], m[r]);
    Q inv = 1 / m[r][c];
    for (auto& x : m[r]) x *= inv;
    for (std::size_t k = 0; k < m.size(); ++k) {
      if (k == r || m[k][c] == 0) continue;
      Q f = m[k][c];
      for (int j = c; j < ncols; ++j) m[k][j] -= f * m[r][j];
    }
    e.pivots.push_back(c);
    ++r;
  }
  m.resize(r);
  e.rows = std::move(m);
  return e;
}

int rank(const QMatrix& m, int ncols) { return row_echelon(m, ncols).rank(); }

QMatrix nullspace(const QMatrix& a, int ncols) {
  Echelon e = row_echelon(a, ncols);
  std::vector<bool> is_pivot(ncols, false);
  for (int p : e.pivots) is_pivot[p] = true;
  QMatrix basis;
  for (int f = 0; f < ncols; ++f) {
    if (is_pivot[f]) continue;
    QVec v(ncols, Q(0));
    v[f] = 1;
    for (int r = 0; r < e.rank(); ++r) v[e.pivots[r]] = -e.rows[r][f];
    basis.push_back(std::move(v));
  }
  return basis;
}

QMatrix left_nullspace(const QMatrix& a) {
  if (a.empty()) return {};
  const std::size_t rows = a.size(), cols = a[0].size();
  QMatrix t(cols, QVec(rows));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) t[j][i] = a[i][j];
  return nullspace(t, static_cast<int>(rows));
}

QVec solve_linear(const QMatrix& a, const QVec& b, int ncols) {
  QMatrix aug = a;
  for (std::size_t i = 0; i < aug.size(); ++i) aug[i].push_back(b[i]);
  Echelon e = row_echelon(aug, ncols + 1);
  QVec x(ncols, Q(0));
  for (int r = 0; r < e.rank(); ++r) {
    if (e.pivots[r] == ncols) throw MathError("inconsistent linear system");
    x[e.pivots[r]] = e.rows[r][ncols];
  }
  return x;
}

bool row_space_within(const QMatrix& a, const QMatrix& b, int ncols) {
  int rb = rank(b, ncols);
  QMatrix both = b;
  both.insert(both.end(), a.begin(), a.end());
  return rank(both, ncols) == rb;
}

bool same_row_space(const QMatrix& a, const QMatrix& b, int ncols) {
  return rank(a, ncols) == rank(b, ncols) && row_space_within(a, b, ncols);
}

}  // namespace ijets
