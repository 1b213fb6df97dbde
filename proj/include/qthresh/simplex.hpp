#pragma once

#include <vector>

#include "qthresh/rational.hpp"

namespace qthresh {

/// Dense exact-rational primal simplex for
///
///     maximize  c·x   subject to  A x <= b,  x >= 0,
///
/// with b >= 0 so the slack basis is feasible and no phase one is needed.
/// Pivoting follows Bland's rule (lowest-index entering column, lowest-index
/// leaving basic variable among ratio ties), which guarantees termination.
struct PackingLp {
  std::vector<std::vector<Rational>> a;  // rows x cols
  std::vector<Rational> b;
  std::vector<Rational> c;
};

struct SimplexResult {
  enum class Status { kOptimal, kUnbounded };
  Status status = Status::kOptimal;
  Rational value;
  std::vector<Rational> x;     // primal solution
  std::vector<Rational> dual;  // one shadow price per row, dual optimal
  int pivots = 0;
};

/// Throws std::invalid_argument on shape mismatch or a negative b entry.
SimplexResult solve_packing_lp(const PackingLp& lp);

}  // namespace qthresh
