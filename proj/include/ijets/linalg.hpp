#pragma once

#include <vector>

#include "ijets/rational.hpp"

namespace ijets {

using QVec = std::vector<Q>;
using QMatrix = std::vector<QVec>;

/// Reduced row echelon form; `pivots[r]` is the pivot column of row r.
struct Echelon {
  QMatrix rows;
  std::vector<int> pivots;
  int rank() const { return static_cast<int>(pivots.size()); }
};

Echelon row_echelon(QMatrix m, int ncols = -1);
int rank(const QMatrix& m, int ncols = -1);
/// basis of {y : y A = 0}
QMatrix left_nullspace(const QMatrix& a);
/// basis of {x : A x = 0}
QMatrix nullspace(const QMatrix& a, int ncols);
/// some solution of A x = b, or throws MathError if inconsistent
QVec solve_linear(const QMatrix& a, const QVec& b, int ncols);
bool same_row_space(const QMatrix& a, const QMatrix& b, int ncols);
/// row space of a contained in row space of b
bool row_space_within(const QMatrix& a, const QMatrix& b, int ncols);

}  // namespace ijets
