#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qthresh/family.hpp"
#include "qthresh/rational.hpp"

namespace qthresh {

/// Maximum support size for λ; nullopt means unbounded.
using Restriction = std::optional<int>;
inline constexpr Restriction kUnbounded = std::nullopt;

std::string to_string(Restriction r);

/// The 1/2 in both smallness definitions.
inline Rational default_budget() { return make_rational(1, 2); }
/// 2^-40.
Rational default_tolerance();

struct CoverCertificate {
  Rational p;
  Cover cover;
  Rational weight;  // Σ_{S∈cover} p^|S|
};

struct LambdaCertificate {
  Rational p;
  Restriction r;
  Lambda lambda;
  Rational weight;  // Σ_S λ_S p^|S|
};

/// Dual variables y_I, one per minimal element.
using DualVector = std::map<Subset, Rational, CanonicalLess>;

/// Candidate sets for covers and λ supports: nonempty subsets of minimal
/// elements with |S| <= r, preceded by {} when `include_empty`. A set inside
/// no minimal element covers nothing and can always be dropped, so the
/// restriction loses no optimal solution. Canonical order, deduplicated.
std::vector<Subset> candidate_sets(const MinimalFamily& family, Restriction r, bool include_empty);

struct CoverResult {
  Rational weight;
  Cover cover;
  /// {} is a minimal element: weight 1 at every p, never p-small for budget < 1.
  bool never_small = false;
  long nodes = 0;
};

/// Exact min Σ_{S∈G} p^|S| over covers G (every minimal element contains
/// some S ∈ G). Branch and bound: branch on which subset of the first
/// uncovered minimal element joins G; prune with a packing lower bound of
/// pairwise-disjoint uncovered minimal elements. Among optimal covers the
/// one with fewest sets, then smallest in canonical order, is returned.
/// The cover {} (weight 1) is always available, so the weight never exceeds 1.
/// Requires 0 < p <= 1.
CoverResult min_cover_weight(const MinimalFamily& family, const Rational& p);

struct LpResult {
  Rational value;
  Lambda lambda;
  DualVector dual;
};

/// Exact optimum of  min Σ λ_S p^|S|  s.t.  Σ_{S⊆I} λ_S >= 1 for every
/// minimal I, λ >= 0, supported on candidate_sets(family, r, include_empty).
///
/// Constraints at non-minimal members are implied: the left side only grows
/// with I. The packing dual  max Σ y_I  s.t.  Σ_{I⊇S} y_I <= p^|S|  is solved
/// by the exact simplex; λ is read off its shadow prices, so the returned
/// dual is an optimality certificate with equal value.
///
/// Any p > 0 is accepted. Throws DegenerateInput when `include_empty` is
/// false and {} is minimal (the LP is infeasible).
LpResult lp_min_weight(const MinimalFamily& family, const Rational& p, Restriction r,
                       bool include_empty = true);

struct ThresholdOptions {
  Rational tol = default_tolerance();
  Rational budget = default_budget();
};

struct QResult {
  Rational lower;  // reported p̂; small at lower
  Rational upper;  // upper - lower <= tol; not small at upper (unless upper = lower = 1)
  CoverCertificate certificate;
  int iterations = 0;
};

struct QfResult {
  Rational lower;
  Rational upper;
  LambdaCertificate certificate;
  int iterations = 0;
};

/// Bisection on [0,1] against min_cover_weight <= budget. Empty family: 1;
/// {} minimal: 0.
QResult q_threshold(const MinimalFamily& family, const ThresholdOptions& options = {});

/// Bisection on [0,1] against lp_min_weight <= budget.
QfResult qf_threshold(const MinimalFamily& family, Restriction r,
                      const ThresholdOptions& options = {});

/// Covering holds, the stored weight equals the recomputed one, and the
/// weight is <= budget. Exact.
bool verify_cover(const CoverCertificate& cert, const MinimalFamily& family,
                  const Rational& budget = default_budget());

/// Constraint sums >= 1 at every minimal element, support within r, stored
/// weight equals the recomputed one and is <= budget. Exact.
bool verify_lambda(const LambdaCertificate& cert, const MinimalFamily& family,
                   const Rational& budget = default_budget());

struct DualCheck {
  Rational dual_value;
  bool feasible = false;
};

/// Weak-duality check: feasible iff y >= 0, y only on minimal elements and
/// Σ_{minimal I⊇S} y_I <= p^|S| for every candidate S (including {}).
DualCheck check_dual_certificate(const MinimalFamily& family, const Rational& p, Restriction r,
                                 const DualVector& y);

// Certificate text: `p=<num>/<den>`, (`r=<int|inf>` for λ), `weight=<num>/<den>`,
// then one `{a,b,...}` set per line, followed by ` <num>/<den>` for λ.
std::string serialize_certificate(const CoverCertificate& cert);
std::string serialize_certificate(const LambdaCertificate& cert);
CoverCertificate parse_cover_certificate(std::string_view text);
LambdaCertificate parse_lambda_certificate(std::string_view text);

}  // namespace qthresh
