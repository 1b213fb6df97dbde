#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace qthresh {

/// Largest supported ground set. Everything that enumerates 2^n members
/// relies on this cap.
inline constexpr int kMaxGround = 24;

/// A subset of the ground set {1..n}, element i stored in bit i-1.
class Subset {
 public:
  constexpr Subset() = default;
  constexpr explicit Subset(std::uint32_t bits) : bits_(bits) {}

  static Subset of(std::initializer_list<int> elements);
  static Subset of(const std::vector<int>& elements);
  /// The full ground set {1..n}.
  static constexpr Subset full(int n) {
    return Subset(n >= 32 ? ~0u : ((1u << n) - 1u));
  }

  constexpr std::uint32_t bits() const { return bits_; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool has(int element) const {
    return (bits_ >> (element - 1)) & 1u;
  }
  constexpr bool subset_of(Subset other) const {
    return (bits_ & ~other.bits_) == 0;
  }
  /// Largest element, 0 for the empty set.
  constexpr int max_element() const { return 32 - std::countl_zero(bits_); }

  constexpr Subset operator&(Subset o) const { return Subset(bits_ & o.bits_); }
  constexpr Subset operator|(Subset o) const { return Subset(bits_ | o.bits_); }
  constexpr Subset minus(Subset o) const { return Subset(bits_ & ~o.bits_); }
  constexpr Subset with(int element) const {
    return Subset(bits_ | (1u << (element - 1)));
  }

  std::vector<int> elements() const;
  /// "1 2 3" (empty string for the empty set).
  std::string to_list() const;
  /// "{1,2,3}" / "{}".
  std::string to_braces() const;

  friend constexpr bool operator==(Subset a, Subset b) = default;

 private:
  std::uint32_t bits_ = 0;
};

/// Lexicographic order on sorted element lists: {} < {1} < {1,2} < {1,2,3} <
/// {1,3} < {2}. This is the canonical order used for all serialization.
constexpr bool canonical_less(Subset a, Subset b) {
  const std::uint32_t diff = a.bits() ^ b.bits();
  if (diff == 0) return false;
  const std::uint32_t low = diff & (~diff + 1u);
  const std::uint32_t above = ~((low << 1) - 1u);
  // Exactly one of a, b holds `low`. The holder is smaller unless the other
  // set ends before `low` (then the other is a proper prefix).
  if (a.bits() & low) return (b.bits() & above) != 0;
  return (a.bits() & above) == 0;
}

struct CanonicalLess {
  constexpr bool operator()(Subset a, Subset b) const {
    return canonical_less(a, b);
  }
};

void sort_canonical(std::vector<Subset>& sets);

/// Calls fn(sub) for every subset of `s`, including {} and `s` itself.
template <typename Fn>
void for_each_subset(Subset s, Fn&& fn) {
  std::uint32_t sub = s.bits();
  while (true) {
    fn(Subset(sub));
    if (sub == 0) break;
    sub = (sub - 1) & s.bits();
  }
}

/// Calls fn(w) for every m-element subset of {1..n}, in increasing bit order.
template <typename Fn>
void for_each_m_subset(int n, int m, Fn&& fn) {
  if (m < 0 || m > n) return;
  if (m == 0) {
    fn(Subset());
    return;
  }
  std::uint64_t w = (std::uint64_t{1} << m) - 1;
  const std::uint64_t limit = std::uint64_t{1} << n;
  while (w < limit) {
    fn(Subset(static_cast<std::uint32_t>(w)));
    const std::uint64_t low = w & (~w + 1);
    const std::uint64_t ripple = w + low;
    w = ripple | (((w ^ ripple) >> 2) / low);
  }
}

}  // namespace qthresh

template <>
struct std::hash<qthresh::Subset> {
  std::size_t operator()(qthresh::Subset s) const noexcept {
    return std::hash<std::uint32_t>{}(s.bits());
  }
};
