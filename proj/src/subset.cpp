#include "qthresh/subset.hpp"

#include <algorithm>
#include <stdexcept>

namespace qthresh {

Subset Subset::of(std::initializer_list<int> elements) {
  return of(std::vector<int>(elements));
}

Subset Subset::of(const std::vector<int>& elements) {
  std::uint32_t bits = 0;
  for (int e : elements) {
    if (e < 1 || e > 32) throw std::out_of_range("subset element out of range: " + std::to_string(e));
    bits |= 1u << (e - 1);
  }
  return Subset(bits);
}

std::vector<int> Subset::elements() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(size()));
  for (std::uint32_t b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b) + 1);
  return out;
}

std::string Subset::to_list() const {
  std::string out;
  for (int e : elements()) {
    if (!out.empty()) out += ' ';
    out += std::to_string(e);
  }
  return out;
}

std::string Subset::to_braces() const {
  std::string out = "{";
  bool first = true;
  for (int e : elements()) {
    if (!first) out += ',';
    out += std::to_string(e);
    first = false;
  }
  return out + "}";
}

void sort_canonical(std::vector<Subset>& sets) {
  std::sort(sets.begin(), sets.end(), CanonicalLess{});
}

}  // namespace qthresh
