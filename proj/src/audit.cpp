#include "qthresh/audit.hpp"

#include <algorithm>
#include <random>

namespace qthresh {

ProofLambda proof_lambda(const MinimalFamily& family, const Rational& scaled_p, int r) {
  ProofLambda out;
  out.lp = lp_min_weight(family, scaled_p, r);
  out.empty_weight = out.lp.lambda.empty_weight();
  if (out.empty_weight < 1) {
    out.lambda = normalize_lambda(out.lp.lambda);
  } else {
    out.empty_free_resolve = true;
    out.lambda = lp_min_weight(family, scaled_p, r, /*include_empty=*/false).lambda;
  }
  return out;
}

std::string AuditRow::qualified_name() const {
  switch (kind) {
    case CheckKind::kParam: return "param." + name;
    case CheckKind::kHypothesis: return "hypothesis." + name;
    case CheckKind::kContract: return "contract." + name;
    case CheckKind::kInfo: return "info." + name;
  }
  return name;
}

const AuditRow* AuditReport::find(const std::string& qualified_name) const {
  for (const auto& row : rows)
    if (row.qualified_name() == qualified_name) return &row;
  return nullptr;
}

bool AuditReport::contracts_hold() const {
  return std::none_of(rows.begin(), rows.end(), [](const AuditRow& row) {
    return row.kind == CheckKind::kContract && !row.skipped && !row.pass;
  });
}

namespace {

class RowBuilder {
 public:
  explicit RowBuilder(std::vector<AuditRow>& rows) : rows_(rows) {}

  void param(const std::string& name, const Rational& value) {
    rows_.push_back({CheckKind::kParam, name, value, value, Rational(0), true, false, {}});
  }

  /// lhs <= rhs
  void le(CheckKind kind, const std::string& name, const Rational& lhs, const Rational& rhs,
          std::string note = {}) {
    Rational slack = rhs - lhs;
    rows_.push_back({kind, name, lhs, rhs, slack, sgn(slack) >= 0, false, std::move(note)});
  }

  /// lhs >= rhs
  void ge(CheckKind kind, const std::string& name, const Rational& lhs, const Rational& rhs,
          std::string note = {}) {
    Rational slack = lhs - rhs;
    rows_.push_back({kind, name, lhs, rhs, slack, sgn(slack) >= 0, false, std::move(note)});
  }

  /// lhs > rhs
  void gt(CheckKind kind, const std::string& name, const Rational& lhs, const Rational& rhs,
          std::string note = {}) {
    Rational slack = lhs - rhs;
    rows_.push_back({kind, name, lhs, rhs, slack, sgn(slack) > 0, false, std::move(note)});
  }

  void skip(CheckKind kind, const std::string& name, std::string note) {
    rows_.push_back({kind, name, std::nullopt, std::nullopt, std::nullopt, false, true, std::move(note)});
  }

 private:
  std::vector<AuditRow>& rows_;
};

constexpr std::uint64_t kPairStream = 0x5eed0001;
constexpr std::uint64_t kSampleStream = 0x5eed0002;
constexpr std::uint64_t kPointwiseWorkCap = 20'000'000;

Subset random_member(const MinimalFamily& family, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, family.minimal().size() - 1);
  const Subset base = family.minimal()[pick(rng)];
  return base | Subset(static_cast<std::uint32_t>(rng()) & family.ground().all().bits());
}

void skip_all_machinery(RowBuilder& rows, const std::string& why) {
  for (const char* name : {"normalized_feasible", "normalized_weight", "nu_at_least_one", "mu_total_mass",
                           "claim_chain", "expectation_markov_step"})
    rows.skip(CheckKind::kContract, name, why);
  rows.skip(CheckKind::kHypothesis, "expectation_budget_step", why);
  for (const char* name : {"markov", "claim_pointwise", "bmm_envelope", "bmm_vs_bad_prob"})
    rows.skip(CheckKind::kContract, name, why);
}

}  // namespace

AuditReport theorem_audit(const MinimalFamily& family, const Rational& p, int r,
                          const AuditOptions& options) {
  if (sgn(p) <= 0 || p > 1) throw std::invalid_argument("audit requires 0 < p <= 1");
  if (r < 1) throw std::invalid_argument("r must be a positive integer");

  AuditReport report{family, p, r, std::nullopt, Lambda(), {}};
  RowBuilder rows(report.rows);
  const int n = family.n();

  SelectorConfig cfg = SelectorConfig::standard(n, p, r, options.e_upper);
  if (options.C_override) cfg = cfg.with_C(*options.C_override);
  if (options.m_override) cfg = cfg.with_m(*options.m_override);
  report.config = cfg;
  const Rational jp = cfg.J * p;

  rows.param("n", n);
  rows.param("p", p);
  rows.param("r", r);
  rows.param("C", cfg.C);
  rows.param("J", cfg.J);
  rows.param("Jp", jp);
  rows.param("m_exact", cfg.m_exact());
  rows.param("m", cfg.m);
  rows.param("m_capped", cfg.m_capped ? 1 : 0);
  rows.param("c", cfg.c);

  if (family.empty()) {
    rows.skip(CheckKind::kHypothesis, "not_p_small", "empty family");
    rows.skip(CheckKind::kHypothesis, "weakly_Jp_r_small", "empty family");
    skip_all_machinery(rows, "empty family");
    return report;
  }

  const CoverResult cover = min_cover_weight(family, p);
  rows.gt(CheckKind::kHypothesis, "not_p_small", cover.weight, options.budget);
  const bool not_small = cover.weight > options.budget;

  if (family.is_full()) {
    rows.skip(CheckKind::kHypothesis, "weakly_Jp_r_small", "{} is minimal");
    skip_all_machinery(rows, "{} is minimal: every λ needs a {} entry");
    return report;
  }

  const ProofLambda pl = proof_lambda(family, jp, r);
  const Lambda& lambda = pl.lambda;
  report.lambda = lambda;
  const bool weakly_small = pl.lp.value <= options.budget;
  rows.le(CheckKind::kHypothesis, "weakly_Jp_r_small", pl.lp.value, options.budget);
  rows.le(CheckKind::kInfo, "lp_empty_set_weight", pl.empty_weight, Rational(1),
          pl.empty_free_resolve ? "λ_∅ = 1; λ re-solved without {}" : "");

  // Normalization.
  Rational min_inside = -1;
  for (Subset i : family.minimal()) {
    Rational inside = lambda.mass_inside(i);
    if (sgn(min_inside) < 0 || inside < min_inside) min_inside = inside;
  }
  rows.ge(CheckKind::kContract, "normalized_feasible", min_inside, Rational(1));
  if (!pl.empty_free_resolve && weakly_small) {
    Rational bound = (options.budget - pl.empty_weight) / (1 - pl.empty_weight);
    rows.le(CheckKind::kContract, "normalized_weight", lambda.weight(jp), bound);
  } else {
    rows.skip(CheckKind::kContract, "normalized_weight", "LP weight above budget");
  }

  // ν and μ identities; (Y, I) claim chain.
  ClaimChecker checker(lambda, r);
  std::optional<Rational> min_nu;
  Rational worst_mass_error = 0;
  std::optional<Rational> min_slack;
  Subset worst_y;
  Subset worst_i;
  auto visit_member = [&](Subset i) {
    const MuWeights mu = mu_weights(i, lambda);
    if (!min_nu || mu.nu < *min_nu) min_nu = mu.nu;
    Rational err = abs(mu.mass(i) - 1);
    if (err > worst_mass_error) worst_mass_error = err;
  };
  auto visit_pair = [&](Subset y, Subset i) {
    Rational s = checker.slack(y, i);
    if (!min_slack || s < *min_slack) {
      min_slack = s;
      worst_y = y;
      worst_i = i;
    }
  };
  const bool exhaustive = n <= options.exhaustive_max_n;
  if (exhaustive) {
    const std::uint32_t all = family.ground().all().bits();
    for_each_member(family, [&](Subset i) {
      visit_member(i);
      for (std::uint64_t y = 0; y <= all; ++y) visit_pair(Subset(static_cast<std::uint32_t>(y)), i);
    });
  } else {
    std::mt19937_64 rng(mix_seed(options.seed, kPairStream));
    const std::uint64_t member_samples = std::min<std::uint64_t>(options.trials, 2000);
    for (std::uint64_t t = 0; t < member_samples; ++t) visit_member(random_member(family, rng));
    for (std::uint64_t t = 0; t < options.trials; ++t) {
      const Subset i = random_member(family, rng);
      visit_pair(Subset(static_cast<std::uint32_t>(rng()) & family.ground().all().bits()), i);
    }
  }
  const std::string coverage = exhaustive ? "exhaustive" : "sampled";
  rows.ge(CheckKind::kContract, "nu_at_least_one", *min_nu, Rational(1), coverage);
  rows.le(CheckKind::kContract, "mu_total_mass", worst_mass_error, Rational(0), coverage + " |μ_I(I)-1|");
  {
    const ClaimSides sides = claim_slack(worst_y, worst_i, lambda, r);
    rows.le(CheckKind::kContract, "claim_chain", sides.lhs, sides.rhs,
            coverage + " min slack at Y=" + worst_y.to_braces() + " I=" + worst_i.to_braces());
  }

  // Expectation chain.
  const int m = cfg.m;
  const Rational half_r_inv(1, 2 * r);
  const Rational expected = n > 0 ? expected_mass(lambda, n, m) : Rational(0);
  const Rational ratio = n > 0 ? Rational(m, n) : Rational(0);
  const Rational step1 = ratio_mass(lambda, ratio);
  rows.le(CheckKind::kContract, "expectation_markov_step", expected, step1);
  const Rational step2 = ratio_mass(lambda, jp) * half_r_inv;
  const bool ratio_ok = ratio <= jp * half_r_inv;
  rows.le(ratio_ok ? CheckKind::kContract : CheckKind::kInfo, "expectation_scaling_step", step1, step2,
          ratio_ok ? "" : "m/n > Jp/(2r) after rounding m up");
  rows.le(CheckKind::kHypothesis, "expectation_budget_step", step2, options.budget * half_r_inv);

  // Markov step.
  const bool enumerable = binomial(n, m) <= kExactEnumerationCap;
  if (enumerable) {
    const Rational o1 = o1_probability(lambda, n, m, r);
    rows.ge(CheckKind::kContract, "markov", o1, 1 - 2 * r * expected);
    const bool markov_applies = expected <= half_r_inv / 2;
    rows.ge(markov_applies ? CheckKind::kContract : CheckKind::kInfo, "o1_at_least_half", o1,
            Rational(1, 2), markov_applies ? "E <= 1/(4r)" : "E > 1/(4r)");
  } else {
    rows.skip(CheckKind::kContract, "markov", "C(n,m) above exact cap");
    rows.skip(CheckKind::kInfo, "o1_at_least_half", "C(n,m) above exact cap");
  }

  // Pointwise claim: small λ-mass inside X forces sup_I μ_I(X ∩ I) <= 1 - 1/(2r).
  {
    const BadnessOracle oracle(family, lambda, cfg.c);
    std::optional<Rational> worst;
    Subset worst_x;
    auto visit = [&](Subset x) {
      if (2 * r * lambda.mass_inside(x) > 1) return;
      Rational s = oracle.sup(x);
      if (!worst || s > *worst) {
        worst = s;
        worst_x = x;
      }
    };
    const std::uint64_t work = binomial(n, m) * std::max<std::uint64_t>(1, oracle.member_count());
    const bool exact = enumerable && work <= kPointwiseWorkCap;
    if (exact) {
      for_each_m_subset(n, m, visit);
    } else {
      std::mt19937_64 rng(mix_seed(options.seed, kSampleStream));
      for (std::uint64_t t = 0; t < options.trials; ++t) visit(sample_m_subset(n, m, rng));
    }
    if (worst) {
      rows.le(CheckKind::kContract, "claim_pointwise", *worst, cfg.c,
              std::string(exact ? "exhaustive" : "sampled") + " worst X=" + worst_x.to_braces());
    } else {
      rows.skip(CheckKind::kContract, "claim_pointwise", "no sampled X with mass <= 1/(2r)");
    }
  }

  // Tail bound and badness probability.
  if (m == 0) {
    rows.skip(CheckKind::kContract, "bmm_envelope", "m = 0");
    rows.skip(CheckKind::kContract, "bmm_vs_bad_prob", "m = 0");
    return report;
  }
  const BoundValue bound = bmm_bound(cfg);
  const bool envelope_applies = !cfg.m_capped && !cfg.m_overridden;
  rows.le(envelope_applies ? CheckKind::kContract : CheckKind::kInfo, "bmm_envelope", bound.value,
          Rational(1, 2), envelope_applies ? "m >= 5Cpn" : "m capped at n or overridden");

  std::optional<Rational> bad;
  std::string how;
  if (enumerable) {
    bad = bad_prob_exact(family, lambda, cfg).prob;
    how = "exact";
  } else {
    MonteCarloOptions mc;
    mc.trials = options.trials;
    mc.seed = options.seed;
    mc.threads = options.threads;
    const MonteCarloEstimate est = bad_prob_monte_carlo(family, lambda, cfg, mc);
    bad = Rational(est.estimate);
    how = "monte-carlo";
  }
  const bool standard_constant = !options.C_override && options.e_upper >= default_e_upper();
  if (not_small && how == "exact" && standard_constant) {
    rows.le(CheckKind::kContract, "bmm_vs_bad_prob", *bad, bound.value,
            bound.vacuous ? "exact; bound vacuous" : "exact");
  } else {
    std::string note = how;
    if (!not_small) note += "; F is p-small, bound not claimed";
    if (!standard_constant) note += "; C below (2er)^2, bound not claimed";
    rows.le(CheckKind::kInfo, "bmm_vs_bad_prob", *bad, bound.value, note);
  }
  rows.ge(CheckKind::kInfo, "claim_bad_probability", *bad, Rational(1, 2), how);
  rows.ge(CheckKind::kInfo, "hypotheses_jointly_hold", Rational((not_small && weakly_small) ? 1 : 0),
          Rational(1));
  return report;
}

std::string audit_csv(const AuditReport& report) {
  std::string out = "check_name,lhs,rhs,slack,pass\n";
  auto cell = [](const std::optional<Rational>& v) { return v ? to_decimal(*v) : std::string("nan"); };
  for (const auto& row : report.rows) {
    out += row.qualified_name() + "," + cell(row.lhs) + "," + cell(row.rhs) + "," + cell(row.slack) + "," +
           (row.skipped ? "skipped" : row.pass ? "true" : "false") + "\n";
  }
  return out;
}

}  // namespace qthresh
