#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qthresh/family.hpp"
#include "qthresh/selector.hpp"
#include "qthresh/threshold.hpp"

namespace qthresh {

/// The λ fed to the μ construction for an instance: the r-restricted LP
/// optimum at `scaled_p` with its {} entry removed by normalize_lambda. When
/// the optimum puts all its mass on {} (λ_∅ = 1, nothing to normalize) the
/// LP is re-solved without {} as a candidate, which is always feasible
/// unless {} is minimal.
struct ProofLambda {
  LpResult lp;              // LP with {} allowed
  Rational empty_weight;    // λ_∅ of that optimum
  bool empty_free_resolve = false;
  Lambda lambda;            // λ_∅ = 0, feasible, support <= r
};

ProofLambda proof_lambda(const MinimalFamily& family, const Rational& scaled_p, int r);

/// kContract rows are consequences that must hold on every instance (a
/// failure means a bug); kHypothesis rows record which assumptions of the
/// argument the instance satisfies; kInfo rows are measurements.
enum class CheckKind { kParam, kHypothesis, kContract, kInfo };

struct AuditRow {
  CheckKind kind = CheckKind::kInfo;
  std::string name;
  std::optional<Rational> lhs;
  std::optional<Rational> rhs;
  std::optional<Rational> slack;  // >= 0 (or > 0 for strict rows) iff pass
  bool pass = false;
  bool skipped = false;
  std::string note;

  /// "contract.claim_chain", "hypothesis.not_p_small", ...
  std::string qualified_name() const;
};

struct AuditOptions {
  std::uint64_t seed = 0;
  std::uint64_t trials = 10'000;
  int threads = 1;
  Rational budget = default_budget();
  Rational e_upper = default_e_upper();
  std::optional<Rational> C_override;
  std::optional<int> m_override;
  /// (Y, I) pairs are exhausted up to this n and sampled beyond.
  int exhaustive_max_n = 8;
};

struct AuditReport {
  MinimalFamily family;
  Rational p;
  int r = 1;
  std::optional<SelectorConfig> config;
  Lambda lambda;
  std::vector<AuditRow> rows;

  const AuditRow* find(const std::string& qualified_name) const;
  /// No executed contract row failed.
  bool contracts_hold() const;
};

/// Runs the argument on one instance: smallness at p, weak (Jp, r)-smallness,
/// λ normalization, ν/μ identities, the claim chain, the expectation chain,
/// the Markov step, the tail bound, and badness probabilities. Records slack
/// for each step and never asserts the final contradiction. Requires
/// 0 < p <= 1 and r >= 1.
AuditReport theorem_audit(const MinimalFamily& family, const Rational& p, int r,
                          const AuditOptions& options = {});

/// check_name,lhs,rhs,slack,pass with 12-significant-digit decimals; pass is
/// true, false or skipped.
std::string audit_csv(const AuditReport& report);

}  // namespace qthresh
