#include "qthresh/simplex.hpp"

#include <stdexcept>

namespace qthresh {

SimplexResult solve_packing_lp(const PackingLp& lp) {
  const std::size_t rows = lp.b.size();
  const std::size_t cols = lp.c.size();
  if (lp.a.size() != rows) throw std::invalid_argument("simplex: A/b row mismatch");
  for (const auto& row : lp.a)
    if (row.size() != cols) throw std::invalid_argument("simplex: A/c column mismatch");
  for (const auto& bi : lp.b)
    if (sgn(bi) < 0) throw std::invalid_argument("simplex: b must be nonnegative");

  // Variables 0..cols-1 are structural, cols..cols+rows-1 are slacks.
  const std::size_t vars = cols + rows;
  std::vector<std::vector<Rational>> t(rows, std::vector<Rational>(vars + 1));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) t[i][j] = lp.a[i][j];
    t[i][cols + i] = 1;
    t[i][vars] = lp.b[i];
  }
  // Objective row holds reduced costs z_j - c_j; optimal when all are >= 0.
  std::vector<Rational> obj(vars + 1);
  for (std::size_t j = 0; j < cols; ++j) obj[j] = -lp.c[j];
  std::vector<std::size_t> basis(rows);
  for (std::size_t i = 0; i < rows; ++i) basis[i] = cols + i;

  SimplexResult result;
  while (true) {
    std::size_t enter = vars;
    for (std::size_t j = 0; j < vars; ++j) {
      if (sgn(obj[j]) < 0) {
        enter = j;
        break;
      }
    }
    if (enter == vars) break;

    std::size_t leave = rows;
    Rational best_ratio;
    for (std::size_t i = 0; i < rows; ++i) {
      if (sgn(t[i][enter]) <= 0) continue;
      Rational ratio = t[i][vars] / t[i][enter];
      if (leave == rows || ratio < best_ratio ||
          (ratio == best_ratio && basis[i] < basis[leave])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave == rows) {
      result.status = SimplexResult::Status::kUnbounded;
      return result;
    }

    const Rational pivot = t[leave][enter];
    for (auto& v : t[leave]) v /= pivot;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == leave || sgn(t[i][enter]) == 0) continue;
      const Rational f = t[i][enter];
      for (std::size_t j = 0; j <= vars; ++j)
        if (sgn(t[leave][j]) != 0) t[i][j] -= f * t[leave][j];
    }
    if (sgn(obj[enter]) != 0) {
      const Rational f = obj[enter];
      for (std::size_t j = 0; j <= vars; ++j)
        if (sgn(t[leave][j]) != 0) obj[j] -= f * t[leave][j];
    }
    basis[leave] = enter;
    ++result.pivots;
  }

  result.value = obj[vars];
  result.x.assign(cols, Rational(0));
  for (std::size_t i = 0; i < rows; ++i)
    if (basis[i] < cols) result.x[basis[i]] = t[i][vars];
  result.dual.resize(rows);
  for (std::size_t i = 0; i < rows; ++i) result.dual[i] = obj[cols + i];
  return result;
}

}  // namespace qthresh
