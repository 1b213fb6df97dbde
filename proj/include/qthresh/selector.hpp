#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <unordered_map>
#include <vector>

#include "qthresh/family.hpp"
#include "qthresh/rational.hpp"

namespace qthresh {

/// C(n, m) ceiling for anything that enumerates all m-subsets.
inline constexpr std::uint64_t kExactEnumerationCap = 1'000'000;

std::uint64_t binomial(int n, int k);

/// Removes the {} entry and rescales: λ'_S = λ_S / (1 - λ_∅). Constraint sums
/// stay >= 1 and a budget-1/2 weight becomes <= (1 - 2λ_∅)/(2(1 - λ_∅)).
/// Throws DegenerateInput when λ_∅ >= 1.
Lambda normalize_lambda(const Lambda& lambda);

/// ν_I = Σ_{S⊆I} |S| λ_S and μ_I(v) = ν_I^{-1} Σ_{v∈S⊆I} λ_S.
struct MuWeights {
  Subset member;
  Rational nu;
  std::map<int, Rational> weights;  // every v ∈ I, zeros included

  /// μ_I(X ∩ I).
  Rational mass(Subset x) const;
};

/// Requires λ_∅ = 0 and Σ_{S⊆I} λ_S >= 1; throws ContractError naming the
/// failed inequality otherwise.
MuWeights mu_weights(Subset member, const Lambda& lambda);

struct BadnessResult {
  Rational sup;          // max over members I of μ_I(X ∩ I); 0 for the empty family
  bool is_bad = false;   // sup < c, strict
  bool empty_family = false;
};

/// Sup over every member of the family (not just minimal elements: μ_I is
/// not monotone in I). Reference implementation, rational arithmetic
/// throughout; BadnessOracle is the fast path.
BadnessResult badness(Subset x, const MinimalFamily& family, const Lambda& lambda,
                      const Rational& c);

/// Precomputed μ_I for all members, scaled to a common integer denominator,
/// so a c-badness test costs integer additions only. Members are capped at
/// 2^18 (CapExceeded beyond).
class BadnessOracle {
 public:
  BadnessOracle(const MinimalFamily& family, const Lambda& lambda, const Rational& c);
  ~BadnessOracle();
  BadnessOracle(BadnessOracle&&) noexcept;
  BadnessOracle& operator=(BadnessOracle&&) noexcept;

  bool is_bad(Subset x) const;
  /// Exact sup_I μ_I(X ∩ I).
  Rational sup(Subset x) const;
  std::size_t member_count() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Pr(S ⊆ W) for |S| = s and W uniform among m-subsets of an n-set:
/// Π_{i<s} (m-i)/(n-i).
Rational subset_prob(int s, int n, int m);

/// E[Σ_{S⊆W} λ_S] = Σ_S λ_S subset_prob(|S|, n, m).
Rational expected_mass(const Lambda& lambda, int n, int m);

/// Σ_S ratio^|S| λ_S; with ratio = m/n this is the Markov-step upper bound on
/// expected_mass.
Rational ratio_mass(const Lambda& lambda, const Rational& ratio);

/// Exact Pr(Σ_{S⊆W} λ_S <= 1/(2r)) over all m-subsets W. Throws CapExceeded
/// when C(n, m) > kExactEnumerationCap.
Rational o1_probability(const Lambda& lambda, int n, int m, int r);

struct ClaimSides {
  Rational lhs;  // μ_I(Y ∩ I)
  Rational rhs;  // 1 - 1/r + Σ_{S⊆Y∩I} λ_S
};

/// Both ends of the displayed inequality chain. Requires the mu_weights
/// preconditions and support sizes <= r (ContractError otherwise).
ClaimSides claim_slack(Subset y, Subset member, const Lambda& lambda, int r);

/// Integer fast path for claim_slack over many (Y, I) pairs. Per-member data
/// is built on first use.
class ClaimChecker {
 public:
  ClaimChecker(const Lambda& lambda, int r);
  ~ClaimChecker();

  bool holds(Subset y, Subset member);
  /// rhs - lhs, exact.
  Rational slack(Subset y, Subset member);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// 2718281828459046/10^15: e rounded up at the 15th decimal.
Rational default_e_upper();

/// Constants of the selector argument for one instance. C = (2er)^2 with the
/// rational upper approximation of e, J = 10rC, sample size m = ⌈Jpn/(2r)⌉
/// capped at n, badness level c = 1 - 1/(2r).
struct SelectorConfig {
  int r = 1;
  int n = 0;
  Rational p;
  Rational e_upper;
  Rational C;
  Rational J;
  int m = 0;
  bool m_capped = false;  // ⌈Jpn/(2r)⌉ exceeded n
  bool m_overridden = false;
  Rational c;

  /// Jpn/(2r) = 5Cpn, unrounded.
  Rational m_exact() const;

  static SelectorConfig standard(int n, const Rational& p, int r,
                                      const Rational& e_upper = default_e_upper());
  SelectorConfig with_C(const Rational& C) const;
  SelectorConfig with_m(int m) const;
};

struct BoundValue {
  Rational value;  // 2 Σ_{t=1..n} (Cnp/m)^t
  bool vacuous = false;  // value >= 1
};

/// Tail bound at the configured sample size. Throws std::invalid_argument
/// when m = 0.
BoundValue bmm_bound(const SelectorConfig& cfg);
/// Same expression for an arbitrary positive (possibly fractional) m.
BoundValue bmm_bound(int n, const Rational& p, const Rational& m, const Rational& C);

/// SplitMix64 finalizer of seed + stream; per-worker seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Uniform m-subset of {1..n} by a partial Fisher–Yates shuffle.
Subset sample_m_subset(int n, int m, std::mt19937_64& rng);

struct ExactProbability {
  Rational prob;
  std::uint64_t bad = 0;
  std::uint64_t total = 0;
};

/// Pr over all m-subsets W (m = cfg.m) that W is cfg.c-bad. Throws
/// CapExceeded when C(n, m) > kExactEnumerationCap.
ExactProbability bad_prob_exact(const MinimalFamily& family, const Lambda& lambda,
                                const SelectorConfig& cfg);

struct MonteCarloOptions {
  std::uint64_t trials = 10'000;
  std::uint64_t seed = 0;
  /// Trials are split into this many streams; partition k draws from
  /// mt19937_64(mix_seed(seed, k)). Fixing it fixes the estimate.
  int partitions = 8;
  int threads = 1;
};

struct MonteCarloEstimate {
  double estimate = 0;
  double std_error = 0;  // sqrt(est (1 - est) / trials)
  std::uint64_t bad = 0;
  std::uint64_t trials = 0;
  int partitions = 0;
};

/// Result is identical for any thread count.
MonteCarloEstimate bad_prob_monte_carlo(const MinimalFamily& family, const Lambda& lambda,
                                        const SelectorConfig& cfg, const MonteCarloOptions& options);

}  // namespace qthresh
