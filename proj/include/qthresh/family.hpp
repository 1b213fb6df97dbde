#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qthresh/errors.hpp"
#include "qthresh/rational.hpp"
#include "qthresh/subset.hpp"

namespace qthresh {

/// V = {1..n}, 0 <= n <= kMaxGround.
class GroundSet {
 public:
  explicit GroundSet(int n);
  int size() const { return n_; }
  Subset all() const { return Subset::full(n_); }
  bool contains(Subset s) const { return s.subset_of(all()); }

  friend bool operator==(GroundSet, GroundSet) = default;

 private:
  int n_ = 0;
};

/// An increasing family, stored as its antichain of minimal elements in
/// canonical order. Every increasing family on a finite ground set is the
/// up-closure of its minimal elements, so nothing is lost.
///
/// The empty family (no minimal elements) and the full family (minimal
/// element {}) are both valid.
class MinimalFamily {
 public:
  /// Applies antichain reduction (drops duplicates and every set containing
  /// another listed set) and canonical ordering. Throws std::invalid_argument
  /// if a set is not inside the ground set.
  MinimalFamily(GroundSet ground, std::vector<Subset> sets);

  const GroundSet& ground() const { return ground_; }
  int n() const { return ground_.size(); }
  const std::vector<Subset>& minimal() const { return minimal_; }
  bool empty() const { return minimal_.empty(); }
  /// True when {} is minimal, i.e. the family is all of 2^V.
  bool is_full() const { return minimal_.size() == 1 && minimal_.front().empty(); }
  /// Size of the largest minimal element (0 for the empty family).
  int max_minimal_size() const;

  /// Same minimal elements over a larger ground set.
  MinimalFamily embedded(int n) const;

  friend bool operator==(const MinimalFamily&, const MinimalFamily&) = default;

 private:
  GroundSet ground_;
  std::vector<Subset> minimal_;
};

/// Finite witness G for p-smallness: canonical order, no duplicates.
class Cover {
 public:
  Cover() = default;
  explicit Cover(std::vector<Subset> sets);
  const std::vector<Subset>& sets() const { return sets_; }
  std::size_t size() const { return sets_.size(); }
  /// Σ_{S∈G} p^|S|.
  Rational weight(const Rational& p) const;
  /// Every minimal element of `family` contains some member of the cover.
  bool covers(const MinimalFamily& family) const;

  friend bool operator==(const Cover&, const Cover&) = default;

 private:
  std::vector<Subset> sets_;
};

/// Sparse nonnegative weights on subsets of V. Zero entries are never stored.
class Lambda {
 public:
  using Map = std::map<Subset, Rational, CanonicalLess>;

  Lambda() = default;

  /// Throws std::invalid_argument for negative weights; zeros are dropped.
  void set(Subset s, const Rational& w);
  /// Adds to the existing weight.
  void add(Subset s, const Rational& w);
  Rational at(Subset s) const;
  Rational empty_weight() const { return at(Subset()); }

  const Map& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t support_size() const { return entries_.size(); }
  /// Largest |S| in the support (0 if empty).
  int max_support_size() const;

  /// Σ_{S⊆I} λ_S.
  Rational mass_inside(Subset i) const;
  /// Σ_S λ_S p^|S|.
  Rational weight(const Rational& p) const;

  friend bool operator==(const Lambda&, const Lambda&) = default;

 private:
  Map entries_;
};

/// Membership in the up-closure: some minimal element is a subset of `i`.
bool contains(const MinimalFamily& family, Subset i);

/// Calls fn(I) for every member I of the family in increasing bitmask order.
template <typename Fn>
void for_each_member(const MinimalFamily& family, Fn&& fn) {
  if (family.empty()) return;
  const std::uint32_t limit = family.ground().all().bits();
  for (std::uint64_t b = 0; b <= limit; ++b) {
    const Subset i(static_cast<std::uint32_t>(b));
    if (contains(family, i)) fn(i);
  }
}

/// All members in canonical order.
std::vector<Subset> enumerate_members(const MinimalFamily& family);

// Generators.
MinimalFamily gen_single(int n, Subset s);
/// All k-subsets of {1..n} as minimal elements.
MinimalFamily gen_k_uniform(int n, int k);
MinimalFamily gen_singletons(int n);
/// Ground set = the C(v,2) edges of K_v, minimal elements = edge sets of the
/// C(v,3) triangles. Edge {a,b} (a<b) is numbered in lexicographic order.
MinimalFamily gen_triangles(int v);

// Family file (".fam"): `n=<int>` then one strictly increasing element list
// per line; `#` comments. The empty set is written as `{}`.
MinimalFamily parse_family(std::string_view text);
std::string serialize_family(const MinimalFamily& family);
MinimalFamily load_family(const std::string& path);

// λ file (".lam"): `n=<int>` then `<num>/<den> : e1 e2 ...` per entry.
struct LambdaFile {
  int n = 0;
  Lambda lambda;
};
LambdaFile parse_lambda(std::string_view text);
std::string serialize_lambda(int n, const Lambda& lambda);
LambdaFile load_lambda(const std::string& path);

std::string read_text_file(const std::string& path);

}  // namespace qthresh
