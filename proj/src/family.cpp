#include "qthresh/family.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace qthresh {

GroundSet::GroundSet(int n) : n_(n) {
  if (n < 0) throw std::invalid_argument("ground set size must be nonnegative");
  if (n > kMaxGround)
    throw CapExceeded("ground set size " + std::to_string(n) + " exceeds cap " +
                      std::to_string(kMaxGround));
}

MinimalFamily::MinimalFamily(GroundSet ground, std::vector<Subset> sets)
    : ground_(ground) {
  for (Subset s : sets)
    if (!ground_.contains(s))
      throw std::invalid_argument("set " + s.to_braces() + " is not inside the ground set of size " +
                                  std::to_string(ground_.size()));
  // Processing by size makes one pass enough: a set is kept iff no kept set
  // (all of which are no larger) is inside it.
  std::sort(sets.begin(), sets.end(), [](Subset a, Subset b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a.bits() < b.bits();
  });
  sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
  for (Subset s : sets) {
    const bool dominated = std::any_of(minimal_.begin(), minimal_.end(),
                                       [s](Subset kept) { return kept.subset_of(s); });
    if (!dominated) minimal_.push_back(s);
  }
  sort_canonical(minimal_);
}

int MinimalFamily::max_minimal_size() const {
  int best = 0;
  for (Subset s : minimal_) best = std::max(best, s.size());
  return best;
}

MinimalFamily MinimalFamily::embedded(int n) const {
  if (n < ground_.size()) throw std::invalid_argument("embedding must not shrink the ground set");
  return MinimalFamily(GroundSet(n), minimal_);
}

Cover::Cover(std::vector<Subset> sets) : sets_(std::move(sets)) {
  sort_canonical(sets_);
  sets_.erase(std::unique(sets_.begin(), sets_.end()), sets_.end());
}

Rational Cover::weight(const Rational& p) const {
  Rational total = 0;
  for (Subset s : sets_) total += pow(p, static_cast<unsigned>(s.size()));
  return total;
}

bool Cover::covers(const MinimalFamily& family) const {
  return std::all_of(family.minimal().begin(), family.minimal().end(), [this](Subset i) {
    return std::any_of(sets_.begin(), sets_.end(), [i](Subset s) { return s.subset_of(i); });
  });
}

void Lambda::set(Subset s, const Rational& w) {
  if (sgn(w) < 0) throw std::invalid_argument("lambda weights must be nonnegative");
  if (sgn(w) == 0) entries_.erase(s);
  else entries_[s] = w;
}

void Lambda::add(Subset s, const Rational& w) { set(s, at(s) + w); }

Rational Lambda::at(Subset s) const {
  auto it = entries_.find(s);
  return it == entries_.end() ? Rational(0) : it->second;
}

int Lambda::max_support_size() const {
  int best = 0;
  for (const auto& [s, w] : entries_) best = std::max(best, s.size());
  return best;
}

Rational Lambda::mass_inside(Subset i) const {
  Rational total = 0;
  for (const auto& [s, w] : entries_)
    if (s.subset_of(i)) total += w;
  return total;
}

Rational Lambda::weight(const Rational& p) const {
  Rational total = 0;
  for (const auto& [s, w] : entries_) total += w * pow(p, static_cast<unsigned>(s.size()));
  return total;
}

bool contains(const MinimalFamily& family, Subset i) {
  return std::any_of(family.minimal().begin(), family.minimal().end(),
                     [i](Subset a) { return a.subset_of(i); });
}

std::vector<Subset> enumerate_members(const MinimalFamily& family) {
  std::vector<Subset> out;
  for_each_member(family, [&](Subset i) { out.push_back(i); });
  sort_canonical(out);
  return out;
}

MinimalFamily gen_single(int n, Subset s) { return MinimalFamily(GroundSet(n), {s}); }

MinimalFamily gen_k_uniform(int n, int k) {
  GroundSet ground(n);
  if (k < 0 || k > n) throw std::invalid_argument("k_uniform needs 0 <= k <= n");
  std::vector<Subset> sets;
  for_each_m_subset(n, k, [&](Subset s) { sets.push_back(s); });
  return MinimalFamily(ground, std::move(sets));
}

MinimalFamily gen_singletons(int n) { return gen_k_uniform(n, 1); }

MinimalFamily gen_triangles(int v) {
  if (v < 3) throw std::invalid_argument("triangles needs v >= 3");
  const int edges = v * (v - 1) / 2;
  GroundSet ground(edges);
  auto edge = [v](int a, int b) {
    // 1-based index of {a,b}, a<b, in lexicographic edge order.
    return (a - 1) * v - (a - 1) * a / 2 + (b - a);
  };
  std::vector<Subset> sets;
  for (int a = 1; a <= v; ++a)
    for (int b = a + 1; b <= v; ++b)
      for (int c = b + 1; c <= v; ++c)
        sets.push_back(Subset::of({edge(a, b), edge(a, c), edge(b, c)}));
  return MinimalFamily(ground, std::move(sets));
}

namespace {

std::string_view strip(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string_view strip_comment(std::string_view line) {
  if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  return strip(line);
}

int parse_int(std::string_view token, int line) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw ParseError(line, "expected an integer, got '" + std::string(token) + "'");
  return value;
}

int parse_header(std::string_view body, int line) {
  if (body.substr(0, 2) != "n=") throw ParseError(line, "expected header 'n=<int>'");
  const int n = parse_int(strip(body.substr(2)), line);
  if (n < 0 || n > kMaxGround)
    throw ParseError(line, "n=" + std::to_string(n) + " outside 0.." + std::to_string(kMaxGround));
  return n;
}

/// Parses a strictly increasing element list in 1..n; "{}" is the empty set.
Subset parse_element_list(std::string_view body, int n, int line) {
  body = strip(body);
  if (body == "{}") return Subset();
  std::vector<int> elements;
  std::size_t pos = 0;
  while (pos < body.size()) {
    const auto start = body.find_first_not_of(" \t", pos);
    if (start == std::string_view::npos) break;
    auto end = body.find_first_of(" \t", start);
    if (end == std::string_view::npos) end = body.size();
    const int e = parse_int(body.substr(start, end - start), line);
    if (e < 1 || e > n)
      throw ParseError(line, "element " + std::to_string(e) + " outside 1.." + std::to_string(n));
    if (!elements.empty() && e <= elements.back())
      throw ParseError(line, "elements must be strictly increasing");
    elements.push_back(e);
    pos = end;
  }
  return Subset::of(elements);
}

template <typename LineFn>
int for_each_line(std::string_view text, LineFn&& fn) {
  int line_no = 0;
  std::optional<int> n;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    ++line_no;
    const std::string_view body = strip_comment(text.substr(pos, nl - pos));
    pos = nl + 1;
    if (body.empty()) continue;
    if (!n) n = parse_header(body, line_no);
    else fn(body, *n, line_no);
  }
  if (!n) throw ParseError(0, "missing header 'n=<int>'");
  return *n;
}

}  // namespace

MinimalFamily parse_family(std::string_view text) {
  std::vector<Subset> sets;
  const int n = for_each_line(text, [&](std::string_view body, int n, int line) {
    sets.push_back(parse_element_list(body, n, line));
  });
  return MinimalFamily(GroundSet(n), std::move(sets));
}

std::string serialize_family(const MinimalFamily& family) {
  std::string out = "n=" + std::to_string(family.n()) + "\n";
  for (Subset s : family.minimal()) out += (s.empty() ? std::string("{}") : s.to_list()) + "\n";
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

MinimalFamily load_family(const std::string& path) { return parse_family(read_text_file(path)); }

LambdaFile parse_lambda(std::string_view text) {
  Lambda lambda;
  const int n = for_each_line(text, [&](std::string_view body, int n, int line) {
    const auto colon = body.find(':');
    if (colon == std::string_view::npos) throw ParseError(line, "expected '<weight> : <elements>'");
    Rational w;
    try {
      w = parse_rational(body.substr(0, colon));
    } catch (const std::invalid_argument& e) {
      throw ParseError(line, e.what());
    }
    if (sgn(w) < 0) throw ParseError(line, "negative weight");
    const std::string_view rest = strip(body.substr(colon + 1));
    const Subset s = rest.empty() ? Subset() : parse_element_list(rest, n, line);
    lambda.add(s, w);
  });
  return {n, std::move(lambda)};
}

std::string serialize_lambda(int n, const Lambda& lambda) {
  std::string out = "n=" + std::to_string(n) + "\n";
  for (const auto& [s, w] : lambda.entries()) {
    out += to_fraction(w) + " :";
    if (!s.empty()) out += " " + s.to_list();
    out += "\n";
  }
  return out;
}

LambdaFile load_lambda(const std::string& path) { return parse_lambda(read_text_file(path)); }

}  // namespace qthresh
