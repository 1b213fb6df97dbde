#include "qthresh/threshold.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "qthresh/simplex.hpp"

namespace qthresh {

std::string to_string(Restriction r) { return r ? std::to_string(*r) : std::string("inf"); }

Rational default_tolerance() {
  Rational tol(1);
  tol /= mpz_class(1) << 40;
  return tol;
}

namespace {

void check_restriction(Restriction r) {
  if (r && *r < 1) throw std::invalid_argument("restriction r must be a positive integer");
}

std::vector<Rational> powers(const Rational& p, int max_exponent) {
  std::vector<Rational> out(static_cast<std::size_t>(max_exponent) + 1);
  out[0] = 1;
  for (std::size_t s = 1; s < out.size(); ++s) out[s] = out[s - 1] * p;
  return out;
}

bool lex_canonical_less(const std::vector<Subset>& a, const std::vector<Subset>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), CanonicalLess{});
}

class CoverSearch {
 public:
  CoverSearch(const MinimalFamily& family, const Rational& p)
      : minimal_(family.minimal()),
        k_(minimal_.size()),
        words_((k_ + 63) / 64),
        pw_(powers(p, kMaxGround)),
        options_(k_),
        options_ready_(k_, false),
        covered_(words_, 0) {
    by_size_.resize(k_);
    for (std::size_t j = 0; j < k_; ++j) by_size_[j] = j;
    std::stable_sort(by_size_.begin(), by_size_.end(), [this](std::size_t a, std::size_t b) {
      return minimal_[a].size() < minimal_[b].size();
    });
    // The minimal elements themselves form a cover; start from it.
    best_sets_ = minimal_;
    best_weight_ = 0;
    for (Subset s : minimal_) best_weight_ += pw_[s.size()];
  }

  void run() {
    descend(Rational(0));
  }

  const Rational& best_weight() const { return best_weight_; }
  const std::vector<Subset>& best_sets() const { return best_sets_; }
  long nodes() const { return nodes_; }

 private:
  struct Option {
    Subset set;
    std::vector<std::uint64_t> coverage;
  };

  bool is_covered(std::size_t j) const { return (covered_[j / 64] >> (j % 64)) & 1u; }

  const std::vector<Option>& options_for(std::size_t j) {
    if (!options_ready_[j]) {
      std::vector<Subset> subs;
      for_each_subset(minimal_[j], [&](Subset t) {
        if (!t.empty()) subs.push_back(t);
      });
      std::sort(subs.begin(), subs.end(), [](Subset a, Subset b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return canonical_less(a, b);
      });
      auto& opts = options_[j];
      opts.reserve(subs.size());
      for (Subset t : subs) {
        Option o{t, std::vector<std::uint64_t>(words_, 0)};
        for (std::size_t i = 0; i < k_; ++i)
          if (t.subset_of(minimal_[i])) o.coverage[i / 64] |= std::uint64_t{1} << (i % 64);
        opts.push_back(std::move(o));
      }
      options_ready_[j] = true;
    }
    return options_[j];
  }

  Rational packing_bound() const {
    Rational bound = 0;
    Subset used;
    for (std::size_t j : by_size_) {
      if (is_covered(j) || !(minimal_[j] & used).empty()) continue;
      bound += pw_[minimal_[j].size()];
      used = used | minimal_[j];
    }
    return bound;
  }

  void consider_complete(const Rational& weight) {
    if (weight > best_weight_) return;
    std::vector<Subset> sets = chosen_;
    sort_canonical(sets);
    if (weight == best_weight_) {
      if (sets.size() > best_sets_.size()) return;
      if (sets.size() == best_sets_.size() && !lex_canonical_less(sets, best_sets_)) return;
    }
    best_weight_ = weight;
    best_sets_ = std::move(sets);
  }

  void descend(const Rational& weight) {
    ++nodes_;
    std::size_t first = k_;
    for (std::size_t j = 0; j < k_; ++j) {
      if (!is_covered(j)) {
        first = j;
        break;
      }
    }
    if (first == k_) {
      consider_complete(weight);
      return;
    }
    for (const Option& o : options_for(first)) {
      Rational next = weight + pw_[o.set.size()];
      // Options are sorted by increasing weight, so nothing later can do better.
      if (next > best_weight_) break;
      std::vector<std::uint64_t> saved = covered_;
      for (std::size_t w = 0; w < words_; ++w) covered_[w] |= o.coverage[w];
      chosen_.push_back(o.set);
      // Strict comparison keeps equal-weight covers alive for the tie-break.
      if (next + packing_bound() <= best_weight_) descend(next);
      chosen_.pop_back();
      covered_ = std::move(saved);
    }
  }

  const std::vector<Subset>& minimal_;
  std::size_t k_;
  std::size_t words_;
  std::vector<Rational> pw_;
  std::vector<std::vector<Option>> options_;
  std::vector<bool> options_ready_;
  std::vector<std::size_t> by_size_;
  std::vector<std::uint64_t> covered_;
  std::vector<Subset> chosen_;
  Rational best_weight_;
  std::vector<Subset> best_sets_;
  long nodes_ = 0;
};

template <typename Small, typename Result>
void bisect(const Rational& tol, Small&& small, Result& out) {
  if (sgn(tol) <= 0) throw std::invalid_argument("tolerance must be positive");
  Rational lo = 0;
  Rational hi = 1;
  if (small(hi)) {
    out.lower = out.upper = hi;
    return;
  }
  while (hi - lo > tol) {
    Rational mid = (lo + hi) / 2;
    ++out.iterations;
    if (small(mid)) lo = mid;
    else hi = mid;
  }
  out.lower = lo;
  out.upper = hi;
}

}  // namespace

std::vector<Subset> candidate_sets(const MinimalFamily& family, Restriction r, bool include_empty) {
  check_restriction(r);
  std::set<Subset, CanonicalLess> found;
  if (include_empty) found.insert(Subset());
  for (Subset i : family.minimal())
    for_each_subset(i, [&](Subset s) {
      if (!s.empty() && (!r || s.size() <= *r)) found.insert(s);
    });
  return {found.begin(), found.end()};
}

CoverResult min_cover_weight(const MinimalFamily& family, const Rational& p) {
  if (sgn(p) <= 0 || p > 1) throw std::invalid_argument("min_cover_weight requires 0 < p <= 1");
  CoverResult result;
  if (family.empty()) return result;
  if (family.is_full()) {
    result.weight = 1;
    result.cover = Cover({Subset()});
    result.never_small = true;
    return result;
  }
  CoverSearch search(family, p);
  search.run();
  result.nodes = search.nodes();
  // {} covers everything at weight 1.
  if (search.best_weight() >= 1) {
    result.weight = 1;
    result.cover = Cover({Subset()});
    return result;
  }
  result.weight = search.best_weight();
  result.cover = Cover(search.best_sets());
  return result;
}

LpResult lp_min_weight(const MinimalFamily& family, const Rational& p, Restriction r,
                       bool include_empty) {
  check_restriction(r);
  if (sgn(p) <= 0) throw std::invalid_argument("lp_min_weight requires p > 0");
  LpResult result;
  if (family.empty()) return result;
  if (family.is_full() && !include_empty)
    throw DegenerateInput("{} is minimal: no λ without a {} entry is feasible");

  const std::vector<Subset>& minimal = family.minimal();
  const std::vector<Subset> candidates = candidate_sets(family, r, include_empty);
  const std::vector<Rational> pw = powers(p, kMaxGround);

  PackingLp lp;
  lp.c.assign(minimal.size(), Rational(1));
  lp.a.reserve(candidates.size());
  for (Subset s : candidates) {
    std::vector<Rational> row(minimal.size());
    for (std::size_t j = 0; j < minimal.size(); ++j) row[j] = s.subset_of(minimal[j]) ? 1 : 0;
    lp.a.push_back(std::move(row));
    lp.b.push_back(pw[s.size()]);
  }
  const SimplexResult sol = solve_packing_lp(lp);
  // Every y_I appears in the row of some candidate inside I, so the packing
  // LP is bounded.
  if (sol.status != SimplexResult::Status::kOptimal)
    throw std::logic_error("packing dual unexpectedly unbounded");

  result.value = sol.value;
  for (std::size_t i = 0; i < candidates.size(); ++i) result.lambda.set(candidates[i], sol.dual[i]);
  for (std::size_t j = 0; j < minimal.size(); ++j)
    if (sgn(sol.x[j]) != 0) result.dual[minimal[j]] = sol.x[j];
  return result;
}

QResult q_threshold(const MinimalFamily& family, const ThresholdOptions& options) {
  QResult out;
  if (family.empty()) {
    out.lower = out.upper = 1;
    out.certificate = {Rational(1), Cover(), Rational(0)};
    return out;
  }
  if (family.is_full()) {
    out.lower = out.upper = 0;
    out.certificate = {Rational(0), Cover({Subset()}), Rational(1)};
    return out;
  }
  std::optional<CoverResult> at_lower;
  bisect(options.tol, [&](const Rational& p) {
    CoverResult r = min_cover_weight(family, p);
    if (r.weight <= options.budget) {
      at_lower = std::move(r);
      return true;
    }
    return false;
  }, out);
  if (sgn(out.lower) == 0) {
    out.certificate = {Rational(0), Cover(family.minimal()), Rational(0)};
  } else {
    if (!at_lower) at_lower = min_cover_weight(family, out.lower);
    out.certificate = {out.lower, at_lower->cover, at_lower->weight};
  }
  return out;
}

QfResult qf_threshold(const MinimalFamily& family, Restriction r, const ThresholdOptions& options) {
  check_restriction(r);
  QfResult out;
  if (family.empty()) {
    out.lower = out.upper = 1;
    out.certificate = {Rational(1), r, Lambda(), Rational(0)};
    return out;
  }
  if (family.is_full()) {
    out.lower = out.upper = 0;
    Lambda full;
    full.set(Subset(), 1);
    out.certificate = {Rational(0), r, full, Rational(1)};
    return out;
  }
  std::optional<LpResult> at_lower;
  bisect(options.tol, [&](const Rational& p) {
    LpResult lp = lp_min_weight(family, p, r);
    if (lp.value <= options.budget) {
      at_lower = std::move(lp);
      return true;
    }
    return false;
  }, out);
  if (sgn(out.lower) == 0) {
    // At p = 0 any {}-free λ weighs 0; one singleton per minimal element
    // respects every r.
    Lambda singles;
    for (Subset i : family.minimal()) singles.set(Subset::of({i.elements().front()}), 1);
    out.certificate = {Rational(0), r, singles, Rational(0)};
  } else {
    if (!at_lower) at_lower = lp_min_weight(family, out.lower, r);
    out.certificate = {out.lower, r, at_lower->lambda, at_lower->value};
  }
  return out;
}

bool verify_cover(const CoverCertificate& cert, const MinimalFamily& family, const Rational& budget) {
  const Rational weight = cert.cover.weight(cert.p);
  return cert.cover.covers(family) && weight == cert.weight && weight <= budget;
}

bool verify_lambda(const LambdaCertificate& cert, const MinimalFamily& family,
                   const Rational& budget) {
  if (cert.r && cert.lambda.max_support_size() > *cert.r) return false;
  for (Subset i : family.minimal())
    if (cert.lambda.mass_inside(i) < 1) return false;
  const Rational weight = cert.lambda.weight(cert.p);
  return weight == cert.weight && weight <= budget;
}

DualCheck check_dual_certificate(const MinimalFamily& family, const Rational& p, Restriction r,
                                 const DualVector& y) {
  DualCheck out;
  out.feasible = true;
  for (const auto& [i, value] : y) {
    out.dual_value += value;
    if (sgn(value) < 0) out.feasible = false;
    if (!std::binary_search(family.minimal().begin(), family.minimal().end(), i, CanonicalLess{}))
      out.feasible = out.feasible && sgn(value) == 0;
  }
  if (!out.feasible) return out;
  for (Subset s : candidate_sets(family, r, true)) {
    Rational load = 0;
    for (const auto& [i, value] : y)
      if (s.subset_of(i)) load += value;
    if (load > pow(p, static_cast<unsigned>(s.size()))) {
      out.feasible = false;
      break;
    }
  }
  return out;
}

std::string serialize_certificate(const CoverCertificate& cert) {
  std::string out = "p=" + to_fraction(cert.p) + "\nweight=" + to_fraction(cert.weight) + "\n";
  for (Subset s : cert.cover.sets()) out += s.to_braces() + "\n";
  return out;
}

std::string serialize_certificate(const LambdaCertificate& cert) {
  std::string out = "p=" + to_fraction(cert.p) + "\nr=" + to_string(cert.r) +
                    "\nweight=" + to_fraction(cert.weight) + "\n";
  for (const auto& [s, w] : cert.lambda.entries()) out += s.to_braces() + " " + to_fraction(w) + "\n";
  return out;
}

namespace {

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string line(text.substr(pos, nl - pos));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(std::move(line));
    pos = nl + 1;
  }
  return lines;
}

Rational header_value(const std::vector<std::string>& lines, std::size_t index,
                      const std::string& key) {
  if (index >= lines.size() || lines[index].rfind(key + "=", 0) != 0)
    throw ParseError(static_cast<int>(index + 1), "expected '" + key + "=<num>/<den>'");
  try {
    return parse_rational(lines[index].substr(key.size() + 1));
  } catch (const std::invalid_argument& e) {
    throw ParseError(static_cast<int>(index + 1), e.what());
  }
}

Subset parse_braces(std::string_view text, int line) {
  if (text.size() < 2 || text.front() != '{' || text.back() != '}')
    throw ParseError(line, "expected a set written as {a,b,...}");
  std::vector<int> elements;
  std::string_view body = text.substr(1, text.size() - 2);
  std::size_t pos = 0;
  while (pos < body.size()) {
    auto comma = body.find(',', pos);
    if (comma == std::string_view::npos) comma = body.size();
    const std::string token(body.substr(pos, comma - pos));
    try {
      elements.push_back(std::stoi(token));
    } catch (const std::exception&) {
      throw ParseError(line, "bad element '" + token + "'");
    }
    pos = comma + 1;
  }
  try {
    return Subset::of(elements);
  } catch (const std::out_of_range& e) {
    throw ParseError(line, e.what());
  }
}

}  // namespace

CoverCertificate parse_cover_certificate(std::string_view text) {
  const auto lines = split_lines(text);
  CoverCertificate cert;
  cert.p = header_value(lines, 0, "p");
  cert.weight = header_value(lines, 1, "weight");
  std::vector<Subset> sets;
  for (std::size_t i = 2; i < lines.size(); ++i)
    sets.push_back(parse_braces(lines[i], static_cast<int>(i + 1)));
  cert.cover = Cover(std::move(sets));
  return cert;
}

LambdaCertificate parse_lambda_certificate(std::string_view text) {
  const auto lines = split_lines(text);
  LambdaCertificate cert;
  cert.p = header_value(lines, 0, "p");
  if (lines.size() < 2 || lines[1].rfind("r=", 0) != 0)
    throw ParseError(2, "expected 'r=<int|inf>'");
  const std::string r_text = lines[1].substr(2);
  if (r_text == "inf") {
    cert.r = kUnbounded;
  } else {
    try {
      cert.r = std::stoi(r_text);
    } catch (const std::exception&) {
      throw ParseError(2, "bad restriction '" + r_text + "'");
    }
  }
  cert.weight = header_value(lines, 2, "weight");
  for (std::size_t i = 3; i < lines.size(); ++i) {
    const int line = static_cast<int>(i + 1);
    const auto space = lines[i].rfind(' ');
    if (space == std::string::npos) throw ParseError(line, "expected '{set} <num>/<den>'");
    Rational w;
    try {
      w = parse_rational(lines[i].substr(space + 1));
    } catch (const std::invalid_argument& e) {
      throw ParseError(line, e.what());
    }
    cert.lambda.add(parse_braces(lines[i].substr(0, space), line), w);
  }
  return cert;
}

}  // namespace qthresh
