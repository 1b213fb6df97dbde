#pragma once

// Brute-force reference computations used only by the tests. None of these
// call into the branch and bound, the simplex, or the badness oracle.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "qthresh/family.hpp"
#include "qthresh/rational.hpp"

namespace oracle {

using qthresh::MinimalFamily;
using qthresh::Rational;
using qthresh::Subset;

inline Rational rat(long num, long den = 1) { return qthresh::make_rational(num, den); }

inline Rational power(const Rational& base, int e) {
  Rational out = 1;
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

inline bool is_subset(const std::vector<int>& a, const std::vector<int>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

/// Members by testing all 2^n subsets against the element lists.
inline std::vector<Subset> members_by_brute_force(const MinimalFamily& f) {
  std::vector<Subset> out;
  const std::uint32_t limit = 1u << f.n();
  for (std::uint32_t b = 0; b < limit; ++b) {
    const auto elems = Subset(b).elements();
    for (Subset a : f.minimal())
      if (is_subset(a.elements(), elems)) {
        out.push_back(Subset(b));
        break;
      }
  }
  return out;
}

/// Nonempty subsets of minimal elements, deduplicated.
inline std::vector<Subset> cover_candidates(const MinimalFamily& f) {
  std::set<std::uint32_t> seen;
  for (Subset i : f.minimal()) {
    for (std::uint32_t b = 1; b < (1u << 24); ++b) {
      if ((b & ~i.bits()) != 0) continue;
      seen.insert(b);
      if (b >= i.bits()) break;
    }
  }
  std::vector<Subset> out;
  for (auto b : seen) out.push_back(Subset(b));
  return out;
}

/// Calls fn(sizes) for every cover drawn from cover_candidates, with the
/// multiset of set sizes as a count vector.
template <typename Fn>
void for_each_cover_profile(const MinimalFamily& f, Fn&& fn) {
  const auto cands = cover_candidates(f);
  const std::size_t c = cands.size();
  if (c > 24) throw std::runtime_error("too many cover candidates for exhaustive search");
  const auto& minimal = f.minimal();
  // covers[j] = bitmask of minimal elements containing candidate j
  std::vector<std::uint32_t> covers(c, 0);
  for (std::size_t j = 0; j < c; ++j)
    for (std::size_t i = 0; i < minimal.size(); ++i)
      if ((cands[j].bits() & ~minimal[i].bits()) == 0) covers[j] |= 1u << i;
  const std::uint32_t need = minimal.size() >= 32 ? ~0u : (1u << minimal.size()) - 1;
  for (std::uint64_t pick = 1; pick < (std::uint64_t{1} << c); ++pick) {
    std::uint32_t got = 0;
    std::vector<int> sizes(25, 0);
    for (std::size_t j = 0; j < c; ++j)
      if ((pick >> j) & 1) {
        got |= covers[j];
        ++sizes[static_cast<std::size_t>(cands[j].size())];
      }
    if (got == need) fn(sizes);
  }
}

/// Distinct cover profiles that are not dominated coordinatewise.
inline std::vector<std::vector<int>> cover_profiles(const MinimalFamily& f) {
  std::set<std::vector<int>> all;
  for_each_cover_profile(f, [&](const std::vector<int>& s) { all.insert(s); });
  std::vector<std::vector<int>> out;
  for (const auto& a : all) {
    bool dominated = false;
    for (const auto& b : all) {
      if (a == b) continue;
      bool le = true;
      for (std::size_t k = 0; k < a.size(); ++k) le = le && b[k] <= a[k];
      if (le) {
        dominated = true;
        break;
      }
    }
    if (!dominated) out.push_back(a);
  }
  return out;
}

inline Rational profile_weight(const std::vector<int>& sizes, const Rational& p) {
  Rational w = 0;
  for (std::size_t k = 0; k < sizes.size(); ++k)
    if (sizes[k]) w += sizes[k] * power(p, static_cast<int>(k));
  return w;
}

/// min over every cover of Σ p^|S|. The cover {} always costs 1.
inline Rational exhaustive_cover_weight(const MinimalFamily& f, const Rational& p) {
  if (f.empty()) return 0;
  std::optional<Rational> best = Rational(1);
  for (const auto& prof : cover_profiles(f)) {
    Rational w = profile_weight(prof, p);
    if (!best || w < *best) best = w;
  }
  return *best;
}

/// max over profiles of the root of weight(p) = budget in (0, 1], each by
/// exact bisection to width 2^-bits.
inline Rational exhaustive_q(const MinimalFamily& f, const Rational& budget, int bits = 60) {
  Rational best = 0;
  for (const auto& prof : cover_profiles(f)) {
    Rational lo = 0, hi = 1;
    if (profile_weight(prof, hi) <= budget) return 1;
    for (int i = 0; i < bits; ++i) {
      Rational mid = (lo + hi) / 2;
      if (profile_weight(prof, mid) <= budget) lo = mid;
      else hi = mid;
    }
    if (lo > best) best = lo;
  }
  return best;
}

/// Solves the square system M x = rhs exactly; nullopt when singular.
inline std::optional<std::vector<Rational>> solve_square(std::vector<std::vector<Rational>> m,
                                                         std::vector<Rational> rhs) {
  const std::size_t k = rhs.size();
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t piv = col;
    while (piv < k && sgn(m[piv][col]) == 0) ++piv;
    if (piv == k) return std::nullopt;
    std::swap(m[piv], m[col]);
    std::swap(rhs[piv], rhs[col]);
    for (std::size_t row = 0; row < k; ++row) {
      if (row == col || sgn(m[row][col]) == 0) continue;
      Rational factor = m[row][col] / m[col][col];
      for (std::size_t j = col; j < k; ++j) m[row][j] -= factor * m[col][j];
      rhs[row] -= factor * rhs[col];
    }
  }
  for (std::size_t i = 0; i < k; ++i) rhs[i] /= m[i][i];
  return rhs;
}

/// Basic feasible solutions of [A | -I] z = 1, z >= 0, where A has one 0/1
/// column per nonempty pattern P ⊆ {0..k-1} (pattern order 1..2^k-1, then
/// the k surplus columns). Only depends on k, so it is cached.
struct Vertex {
  std::vector<std::pair<std::size_t, Rational>> z;  // column, value
};

inline const std::vector<Vertex>& lp_vertices(std::size_t k) {
  static std::map<std::size_t, std::vector<Vertex>> cache;
  auto it = cache.find(k);
  if (it != cache.end()) return it->second;
  std::vector<std::vector<Rational>> cols;
  for (std::uint32_t pat = 1; pat < (1u << k); ++pat) {
    std::vector<Rational> a(k);
    for (std::size_t i = 0; i < k; ++i) a[i] = ((pat >> i) & 1) ? 1 : 0;
    cols.push_back(std::move(a));
  }
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<Rational> a(k);
    a[i] = -1;
    cols.push_back(std::move(a));
  }
  std::vector<Vertex> out;
  std::vector<std::size_t> basis(k);
  const std::size_t total = cols.size();
  std::function<void(std::size_t, std::size_t)> choose = [&](std::size_t start, std::size_t depth) {
    if (depth == k) {
      std::vector<std::vector<Rational>> m(k, std::vector<Rational>(k));
      for (std::size_t row = 0; row < k; ++row)
        for (std::size_t j = 0; j < k; ++j) m[row][j] = cols[basis[j]][row];
      auto sol = solve_square(m, std::vector<Rational>(k, Rational(1)));
      if (!sol) return;
      Vertex v;
      for (std::size_t j = 0; j < k; ++j) {
        if (sgn((*sol)[j]) < 0) return;
        if (sgn((*sol)[j]) > 0) v.z.emplace_back(basis[j], (*sol)[j]);
      }
      out.push_back(std::move(v));
      return;
    }
    for (std::size_t j = start; j < total; ++j) {
      basis[depth] = j;
      choose(j + 1, depth + 1);
    }
  };
  choose(0, 0);
  return cache.emplace(k, std::move(out)).first->second;
}

/// LP optimum by vertex enumeration. Column P stands for the set
/// ∩_{i∈P} I_i cut down to size r, which covers P at cost p^min(r, |∩|):
/// the cheapest any candidate whose containing minimal elements are exactly
/// P can achieve (p <= 1). A set realizing column P may also sit inside other
/// minimal elements; that only helps, and the larger pattern is a column too.
inline Rational vertex_enumeration_lp(const MinimalFamily& f, const Rational& p, std::optional<int> r) {
  const auto& minimal = f.minimal();
  const std::size_t k = minimal.size();
  if (k == 0) return 0;
  std::vector<Rational> cost;
  for (std::uint32_t pat = 1; pat < (1u << k); ++pat) {
    Subset inter = f.ground().all();
    for (std::size_t i = 0; i < k; ++i)
      if ((pat >> i) & 1) inter = inter & minimal[i];
    cost.push_back(power(p, r ? std::min(*r, inter.size()) : inter.size()));
  }
  for (std::size_t i = 0; i < k; ++i) cost.push_back(Rational(0));
  std::optional<Rational> best;
  for (const auto& v : lp_vertices(k)) {
    Rational value = 0;
    for (const auto& [j, z] : v.z) value += z * cost[j];
    if (!best || value < *best) best = value;
  }
  return *best;
}

/// Every antichain of subsets of {1..n}, n <= 4, as a family.
inline std::vector<MinimalFamily> all_increasing_families(int n) {
  const std::uint32_t sets = 1u << n;
  std::vector<MinimalFamily> out;
  for (std::uint64_t pick = 0; pick < (std::uint64_t{1} << sets); ++pick) {
    std::vector<Subset> chosen;
    for (std::uint32_t s = 0; s < sets; ++s)
      if ((pick >> s) & 1) chosen.push_back(Subset(s));
    bool antichain = true;
    for (std::size_t a = 0; a < chosen.size() && antichain; ++a)
      for (std::size_t b = 0; b < chosen.size(); ++b)
        if (a != b && chosen[a].subset_of(chosen[b])) {
          antichain = false;
          break;
        }
    if (antichain) out.emplace_back(qthresh::GroundSet(n), chosen);
  }
  return out;
}

/// A random family with `sets` minimal elements on {1..n} (before reduction).
inline MinimalFamily random_family(std::mt19937_64& rng, int n, int sets, int max_size) {
  std::vector<Subset> chosen;
  std::uniform_int_distribution<int> elem(1, n);
  std::uniform_int_distribution<int> size(1, std::min(n, max_size));
  for (int s = 0; s < sets; ++s) {
    Subset x;
    const int target = size(rng);
    while (x.size() < target) x = x.with(elem(rng));
    chosen.push_back(x);
  }
  return MinimalFamily(qthresh::GroundSet(n), chosen);
}

/// Random λ with support sizes in 1..r inside minimal elements, rescaled so
/// every minimal element has constraint sum >= 1.
inline qthresh::Lambda random_feasible_lambda(std::mt19937_64& rng, const MinimalFamily& f, int r,
                                              int entries) {
  qthresh::Lambda lambda;
  std::uniform_int_distribution<std::size_t> pick(0, f.minimal().size() - 1);
  std::uniform_int_distribution<long> num(1, 9);
  for (int e = 0; e < entries; ++e) {
    const auto elems = f.minimal()[pick(rng)].elements();
    std::vector<int> shuffled = elems;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    std::uniform_int_distribution<int> size(1, std::min<int>(r, static_cast<int>(elems.size())));
    shuffled.resize(static_cast<std::size_t>(size(rng)));
    lambda.add(Subset::of(shuffled), rat(num(rng), num(rng)));
  }
  // Make each minimal element feasible by topping up a singleton inside it.
  for (Subset i : f.minimal()) {
    Rational inside = lambda.mass_inside(i);
    if (inside < 1) lambda.add(Subset::of({i.elements().front()}), 1 - inside);
  }
  return lambda;
}

}  // namespace oracle
