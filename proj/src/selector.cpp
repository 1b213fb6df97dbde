#include "qthresh/selector.hpp"

#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>
#include <variant>

namespace qthresh {

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  // Exact in 128 bits for every n <= 62.
  unsigned __int128 result = 1;
  for (int i = 1; i <= k; ++i) result = result * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
  return static_cast<std::uint64_t>(result);
}

Lambda normalize_lambda(const Lambda& lambda) {
  const Rational empty = lambda.empty_weight();
  if (empty >= 1)
    throw DegenerateInput("normalize_lambda: λ_∅ = " + to_short(empty) + " >= 1");
  if (sgn(empty) == 0) return lambda;
  const Rational scale = 1 - empty;
  Lambda out;
  for (const auto& [s, w] : lambda.entries())
    if (!s.empty()) out.set(s, w / scale);
  return out;
}

namespace {

void require_no_empty(const Lambda& lambda) {
  if (sgn(lambda.empty_weight()) != 0)
    throw ContractError("λ_∅ = " + to_short(lambda.empty_weight()) + " != 0");
}

void require_feasible(const Lambda& lambda, Subset member) {
  const Rational inside = lambda.mass_inside(member);
  if (inside < 1)
    throw ContractError("Σ_{S⊆I} λ_S = " + to_short(inside) + " < 1 at I = " + member.to_braces());
}

void require_support(const Lambda& lambda, int r) {
  if (r < 1) throw std::invalid_argument("r must be a positive integer");
  if (lambda.max_support_size() > r)
    throw ContractError("λ has a support set of size " + std::to_string(lambda.max_support_size()) +
                        " > r = " + std::to_string(r));
}

/// λ scaled by the lcm of its denominators.
struct ScaledLambda {
  mpz_class scale = 1;
  std::vector<std::pair<Subset, mpz_class>> entries;

  explicit ScaledLambda(const Lambda& lambda) {
    for (const auto& [s, w] : lambda.entries()) mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), w.get_den_mpz_t());
    for (const auto& [s, w] : lambda.entries()) {
      mpz_class v = w.get_num() * (scale / w.get_den());
      entries.emplace_back(s, v);
    }
  }

  mpz_class mass_inside(Subset x) const {
    mpz_class total = 0;
    for (const auto& [s, v] : entries)
      if (s.subset_of(x)) total += v;
    return total;
  }
};

}  // namespace

Rational MuWeights::mass(Subset x) const {
  Rational total = 0;
  for (const auto& [v, w] : weights)
    if (x.has(v)) total += w;
  return total;
}

MuWeights mu_weights(Subset member, const Lambda& lambda) {
  require_no_empty(lambda);
  require_feasible(lambda, member);
  MuWeights mu;
  mu.member = member;
  for (int v : member.elements()) mu.weights[v] = 0;
  for (const auto& [s, w] : lambda.entries()) {
    if (!s.subset_of(member)) continue;
    mu.nu += s.size() * w;
    for (int v : s.elements()) mu.weights[v] += w;
  }
  for (auto& [v, w] : mu.weights) w /= mu.nu;
  return mu;
}

BadnessResult badness(Subset x, const MinimalFamily& family, const Lambda& lambda,
                      const Rational& c) {
  BadnessResult out;
  if (family.empty()) {
    out.empty_family = true;
    out.is_bad = sgn(c) > 0;
    return out;
  }
  require_no_empty(lambda);
  bool first = true;
  for_each_member(family, [&](Subset i) {
    const Rational value = mu_weights(i, lambda).mass(x);
    if (first || value > out.sup) out.sup = value;
    first = false;
  });
  out.is_bad = out.sup < c;
  return out;
}

// BadnessOracle ------------------------------------------------------------

namespace {

inline __int128 widen(std::int64_t v) { return v; }
inline const mpz_class& widen(const mpz_class& v) { return v; }

template <typename Int>
struct MemberTable {
  int n = 0;
  std::vector<Subset> members;
  std::vector<Int> numerators;  // members.size() * n, element v at v-1
  std::vector<Int> nu;
  Int c_num{};
  Int c_den{};

  Int sum(std::size_t idx, Subset x) const {
    Int total{0};
    const Int* row = numerators.data() + idx * static_cast<std::size_t>(n);
    for (std::uint32_t b = (x & members[idx]).bits(); b != 0; b &= b - 1) total += row[std::countr_zero(b)];
    return total;
  }

  bool is_bad(Subset x) const {
    for (std::size_t i = 0; i < members.size(); ++i)
      if (!(widen(c_den) * widen(sum(i, x)) < widen(c_num) * widen(nu[i]))) return false;
    return true;
  }

  Rational sup(Subset x) const {
    if (members.empty()) return 0;
    std::size_t best = 0;
    Int best_sum = sum(0, x);
    for (std::size_t i = 1; i < members.size(); ++i) {
      Int s = sum(i, x);
      if (widen(s) * widen(nu[best]) > widen(best_sum) * widen(nu[i])) {
        best = i;
        best_sum = s;
      }
    }
    Rational q{mpz_class(best_sum), mpz_class(nu[best])};
    q.canonicalize();
    return q;
  }
};

template <typename Int>
Int from_mpz(const mpz_class& v) {
  if constexpr (std::is_same_v<Int, mpz_class>) return v;
  else return static_cast<std::int64_t>(v.get_si());
}

}  // namespace

struct BadnessOracle::Impl {
  std::variant<MemberTable<std::int64_t>, MemberTable<mpz_class>> table;
};

BadnessOracle::BadnessOracle(const MinimalFamily& family, const Lambda& lambda, const Rational& c)
    : impl_(std::make_unique<Impl>()) {
  require_no_empty(lambda);
  const int n = family.n();
  if (!family.empty() && n > 18) {
    std::uint64_t count = 0;
    for_each_member(family, [&](Subset) { ++count; });
    if (count > (std::uint64_t{1} << 18))
      throw CapExceeded("badness oracle: " + std::to_string(count) + " members exceed 2^18");
  }
  const ScaledLambda scaled(lambda);
  std::vector<Subset> members;
  std::vector<mpz_class> nums;
  std::vector<mpz_class> nus;
  mpz_class largest = 0;
  for_each_member(family, [&](Subset i) {
    mpz_class inside = 0;
    mpz_class nu = 0;
    std::vector<mpz_class> row(static_cast<std::size_t>(n));
    for (const auto& [s, v] : scaled.entries) {
      if (!s.subset_of(i)) continue;
      inside += v;
      nu += s.size() * v;
      for (int e : s.elements()) row[static_cast<std::size_t>(e - 1)] += v;
    }
    if (inside < scaled.scale) require_feasible(lambda, i);
    if (nu > largest) largest = nu;
    members.push_back(i);
    nus.push_back(std::move(nu));
    for (auto& x : row) nums.push_back(std::move(x));
  });

  const mpz_class& a = c.get_num();
  const mpz_class& b = c.get_den();
  const mpz_class limit = mpz_class(1) << 62;
  auto fill = [&](auto& table) {
    using Int = typename std::decay_t<decltype(table.nu)>::value_type;
    table.n = n;
    table.members = std::move(members);
    table.numerators.reserve(nums.size());
    for (const auto& v : nums) table.numerators.push_back(from_mpz<Int>(v));
    table.nu.reserve(nus.size());
    for (const auto& v : nus) table.nu.push_back(from_mpz<Int>(v));
    table.c_num = from_mpz<Int>(a);
    table.c_den = from_mpz<Int>(b);
  };
  if (largest < limit && abs(a) < limit && b < limit) {
    MemberTable<std::int64_t> table;
    fill(table);
    impl_->table = std::move(table);
  } else {
    MemberTable<mpz_class> table;
    fill(table);
    impl_->table = std::move(table);
  }
}

BadnessOracle::~BadnessOracle() = default;
BadnessOracle::BadnessOracle(BadnessOracle&&) noexcept = default;
BadnessOracle& BadnessOracle::operator=(BadnessOracle&&) noexcept = default;

bool BadnessOracle::is_bad(Subset x) const {
  return std::visit([x](const auto& t) { return t.is_bad(x); }, impl_->table);
}

Rational BadnessOracle::sup(Subset x) const {
  return std::visit([x](const auto& t) { return t.sup(x); }, impl_->table);
}

std::size_t BadnessOracle::member_count() const {
  return std::visit([](const auto& t) { return t.members.size(); }, impl_->table);
}

// Subset inclusion and expected masses ---------------------------------------

Rational subset_prob(int s, int n, int m) {
  if (n < 0 || s < 0 || s > n || m < 0 || m > n)
    throw std::invalid_argument("subset_prob requires 0 <= s <= n and 0 <= m <= n");
  if (s > m) return 0;
  Rational prob = 1;
  for (int i = 0; i < s; ++i) prob *= Rational(m - i, n - i);
  prob.canonicalize();
  return prob;
}

Rational expected_mass(const Lambda& lambda, int n, int m) {
  const Subset ground = Subset::full(n);
  Rational total = 0;
  for (const auto& [s, w] : lambda.entries()) {
    if (!s.subset_of(ground)) throw std::invalid_argument("λ support set " + s.to_braces() + " outside ground set");
    total += w * subset_prob(s.size(), n, m);
  }
  return total;
}

Rational ratio_mass(const Lambda& lambda, const Rational& ratio) {
  Rational total = 0;
  for (const auto& [s, w] : lambda.entries()) total += w * pow(ratio, static_cast<unsigned>(s.size()));
  return total;
}

Rational o1_probability(const Lambda& lambda, int n, int m, int r) {
  if (r < 1) throw std::invalid_argument("r must be a positive integer");
  if (m < 0 || m > n) throw std::invalid_argument("o1_probability requires 0 <= m <= n");
  const std::uint64_t total = binomial(n, m);
  if (total > kExactEnumerationCap)
    throw CapExceeded("C(" + std::to_string(n) + "," + std::to_string(m) + ") = " + std::to_string(total) +
                      " exceeds the exact cap; use Monte Carlo");
  const ScaledLambda scaled(lambda);
  // mass <= 1/(2r)  <=>  2r * scaled mass <= scale
  std::uint64_t good = 0;
  for_each_m_subset(n, m, [&](Subset w) {
    if (2 * r * scaled.mass_inside(w) <= scaled.scale) ++good;
  });
  Rational prob(static_cast<unsigned long>(good), static_cast<unsigned long>(total));
  prob.canonicalize();
  return prob;
}

ClaimSides claim_slack(Subset y, Subset member, const Lambda& lambda, int r) {
  require_support(lambda, r);
  const MuWeights mu = mu_weights(member, lambda);
  ClaimSides out;
  out.lhs = mu.mass(y);
  out.rhs = 1 - Rational(1, r) + lambda.mass_inside(y & member);
  out.rhs.canonicalize();
  return out;
}

struct ClaimChecker::Impl {
  struct Member {
    std::vector<mpz_class> num;  // element v at v-1
    mpz_class nu;
  };
  Lambda lambda;
  ScaledLambda scaled;
  int r;
  std::unordered_map<Subset, Member> cache;

  const Member& member(Subset i) {
    auto it = cache.find(i);
    if (it != cache.end()) return it->second;
    require_feasible(lambda, i);
    Member data;
    data.num.resize(static_cast<std::size_t>(std::max(1, i.max_element())));
    for (const auto& [s, v] : scaled.entries) {
      if (!s.subset_of(i)) continue;
      data.nu += s.size() * v;
      for (int e : s.elements()) data.num[static_cast<std::size_t>(e - 1)] += v;
    }
    return cache.emplace(i, std::move(data)).first->second;
  }

  /// Numerator of rhs - lhs over the positive denominator r * scale * ν̃.
  mpz_class slack_numerator(Subset y, Subset i) {
    const Member& m = member(i);
    const Subset z = y & i;
    mpz_class sum_num = 0;
    for (std::uint32_t b = z.bits(); b != 0; b &= b - 1) sum_num += m.num[static_cast<std::size_t>(std::countr_zero(b))];
    const mpz_class sum_lam = scaled.mass_inside(z);
    return m.nu * ((r - 1) * scaled.scale + r * sum_lam) - r * scaled.scale * sum_num;
  }
};

ClaimChecker::ClaimChecker(const Lambda& lambda, int r)
    : impl_(std::make_unique<Impl>(Impl{lambda, ScaledLambda(lambda), r, {}})) {
  require_no_empty(lambda);
  require_support(lambda, r);
}

ClaimChecker::~ClaimChecker() = default;

bool ClaimChecker::holds(Subset y, Subset member) {
  return sgn(impl_->slack_numerator(y, member)) >= 0;
}

Rational ClaimChecker::slack(Subset y, Subset member) {
  mpz_class num = impl_->slack_numerator(y, member);
  Rational q(num, impl_->r * impl_->scaled.scale * impl_->member(member).nu);
  q.canonicalize();
  return q;
}

// Selector constants -----------------------------------------------------------

Rational default_e_upper() {
  Rational e(mpz_class("2718281828459046"), mpz_class("1000000000000000"));
  e.canonicalize();
  return e;
}

Rational SelectorConfig::m_exact() const {
  Rational m = J * p * n / (2 * r);
  m.canonicalize();
  return m;
}

namespace {

void fill_sample_size(SelectorConfig& cfg) {
  const Rational exact = cfg.m_exact();
  mpz_class up;
  mpz_cdiv_q(up.get_mpz_t(), exact.get_num_mpz_t(), exact.get_den_mpz_t());
  cfg.m_capped = up > cfg.n;
  cfg.m = cfg.m_capped ? cfg.n : static_cast<int>(up.get_si());
  cfg.m_overridden = false;
}

}  // namespace

SelectorConfig SelectorConfig::standard(int n, const Rational& p, int r, const Rational& e_upper) {
  if (r < 1) throw std::invalid_argument("r must be a positive integer");
  if (n < 0) throw std::invalid_argument("n must be nonnegative");
  if (sgn(p) <= 0) throw std::invalid_argument("p must be positive");
  SelectorConfig cfg;
  cfg.r = r;
  cfg.n = n;
  cfg.p = p;
  cfg.e_upper = e_upper;
  const Rational two_er = 2 * e_upper * r;
  cfg.C = two_er * two_er;
  cfg.J = 10 * r * cfg.C;
  cfg.c = 1 - Rational(1, 2 * r);
  cfg.c.canonicalize();
  fill_sample_size(cfg);
  return cfg;
}

SelectorConfig SelectorConfig::with_C(const Rational& C_override) const {
  if (sgn(C_override) <= 0) throw std::invalid_argument("C must be positive");
  SelectorConfig cfg = *this;
  cfg.C = C_override;
  cfg.J = 10 * r * cfg.C;
  if (!m_overridden) fill_sample_size(cfg);
  return cfg;
}

SelectorConfig SelectorConfig::with_m(int m_override) const {
  if (m_override < 0 || m_override > n) throw std::invalid_argument("sample size m must lie in 0..n");
  SelectorConfig cfg = *this;
  cfg.m = m_override;
  cfg.m_capped = false;
  cfg.m_overridden = true;
  return cfg;
}

BoundValue bmm_bound(int n, const Rational& p, const Rational& m, const Rational& C) {
  if (sgn(m) <= 0) throw std::invalid_argument("bmm_bound requires m >= 1");
  Rational x = C * n * p / m;
  x.canonicalize();
  BoundValue out;
  if (x == 1) {
    out.value = 2 * n;
  } else {
    // 2 Σ_{t=1..n} x^t = 2x(1 - x^n)/(1 - x)
    out.value = 2 * x * (1 - pow(x, static_cast<unsigned>(n))) / (1 - x);
  }
  out.value.canonicalize();
  out.vacuous = out.value >= 1;
  return out;
}

BoundValue bmm_bound(const SelectorConfig& cfg) {
  if (cfg.m == 0) throw std::invalid_argument("bmm_bound requires m >= 1");
  return bmm_bound(cfg.n, cfg.p, Rational(cfg.m), cfg.C);
}

// Sampling -----------------------------------------------------------------------

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + stream + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Subset sample_m_subset(int n, int m, std::mt19937_64& rng) {
  if (m < 0 || m > n) throw std::invalid_argument("sample_m_subset requires 0 <= m <= n");
  std::vector<int> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), 1);
  Subset out;
  for (int i = 0; i < m; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
    out = out.with(pool[static_cast<std::size_t>(i)]);
  }
  return out;
}

ExactProbability bad_prob_exact(const MinimalFamily& family, const Lambda& lambda,
                                const SelectorConfig& cfg) {
  const std::uint64_t total = binomial(family.n(), cfg.m);
  if (total > kExactEnumerationCap)
    throw CapExceeded("C(" + std::to_string(family.n()) + "," + std::to_string(cfg.m) + ") = " +
                      std::to_string(total) + " exceeds the exact cap; use Monte Carlo");
  const BadnessOracle oracle(family, lambda, cfg.c);
  ExactProbability out;
  out.total = total;
  for_each_m_subset(family.n(), cfg.m, [&](Subset w) {
    if (oracle.is_bad(w)) ++out.bad;
  });
  out.prob = Rational(static_cast<unsigned long>(out.bad), static_cast<unsigned long>(total));
  out.prob.canonicalize();
  return out;
}

MonteCarloEstimate bad_prob_monte_carlo(const MinimalFamily& family, const Lambda& lambda,
                                        const SelectorConfig& cfg, const MonteCarloOptions& options) {
  if (options.partitions < 1) throw std::invalid_argument("partitions must be >= 1");
  if (options.threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (options.trials == 0) throw std::invalid_argument("trials must be >= 1");
  const BadnessOracle oracle(family, lambda, cfg.c);
  const auto parts = static_cast<std::uint64_t>(options.partitions);
  std::vector<std::uint64_t> bad(parts, 0);

  auto run_partition = [&](std::uint64_t k) {
    const std::uint64_t count = options.trials / parts + (k < options.trials % parts ? 1 : 0);
    std::mt19937_64 rng(mix_seed(options.seed, k));
    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < count; ++t)
      if (oracle.is_bad(sample_m_subset(family.n(), cfg.m, rng))) ++hits;
    bad[k] = hits;
  };

  const auto workers = std::min<std::uint64_t>(static_cast<std::uint64_t>(options.threads), parts);
  if (workers <= 1) {
    for (std::uint64_t k = 0; k < parts; ++k) run_partition(k);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    for (std::uint64_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::uint64_t k = next++; k < parts; k = next++) run_partition(k);
      });
    for (auto& t : pool) t.join();
  }

  MonteCarloEstimate out;
  out.partitions = options.partitions;
  out.trials = options.trials;
  out.bad = std::accumulate(bad.begin(), bad.end(), std::uint64_t{0});
  out.estimate = static_cast<double>(out.bad) / static_cast<double>(out.trials);
  out.std_error = std::sqrt(out.estimate * (1 - out.estimate) / static_cast<double>(out.trials));
  return out;
}

}  // namespace qthresh
