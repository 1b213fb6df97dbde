#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qthresh/threshold.hpp"

using namespace qthresh;
using oracle::rat;

namespace {

MinimalFamily fam(int n, std::initializer_list<std::initializer_list<int>> sets) {
  std::vector<Subset> v;
  for (auto s : sets) v.push_back(Subset::of(s));
  return MinimalFamily(GroundSet(n), v);
}

const MinimalFamily kPair = fam(2, {{1, 2}});
const MinimalFamily kTrianglePairs = fam(3, {{1, 2}, {2, 3}, {1, 3}});

bool near(const Rational& got, double expect, double tol = std::ldexp(1.0, -40)) {
  return std::fabs(got.get_d() - expect) <= tol + 1e-15;
}

}  // namespace

TEST_CASE("min_cover_weight examples") {
  const auto a = min_cover_weight(fam(3, {{1, 2, 3}}), rat(1, 2));
  CHECK(a.weight == rat(1, 8));
  CHECK(a.cover.sets() == std::vector<Subset>{Subset::of({1, 2, 3})});

  const auto b = min_cover_weight(kTrianglePairs, rat(2, 5));
  CHECK(b.weight == rat(12, 25));
  CHECK(b.cover.covers(kTrianglePairs));

  const auto e = min_cover_weight(MinimalFamily(GroundSet(3), {}), rat(1, 3));
  CHECK(e.weight == 0);
  CHECK(e.cover.size() == 0);

  const auto f = min_cover_weight(MinimalFamily(GroundSet(2), {Subset()}), rat(1, 3));
  CHECK(f.weight == 1);
  CHECK(f.never_small);
  CHECK(f.cover.sets() == std::vector<Subset>{Subset()});
}

TEST_CASE("min_cover_weight matches exhaustive covers on random families") {
  std::mt19937_64 rng(3);
  const Rational grid[] = {rat(1, 10), rat(1, 3), rat(1, 2), rat(7, 10), rat(1)};
  for (int t = 0; t < 120; ++t) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const auto f = oracle::random_family(rng, n, 1 + static_cast<int>(rng() % 4), 3);
    if (oracle::cover_candidates(f).size() > 16) continue;
    for (const auto& p : grid) {
      const auto res = min_cover_weight(f, p);
      CHECK(res.weight == oracle::exhaustive_cover_weight(f, p));
      CHECK(res.cover.covers(f));
      CHECK(res.cover.weight(p) == res.weight);
    }
  }
}

TEST_CASE("q_threshold examples") {
  CHECK(q_threshold(fam(1, {{1}})).lower == rat(1, 2));
  const auto pair = q_threshold(kPair);
  CHECK(near(pair.lower, std::sqrt(0.5)));
  CHECK(pair.upper - pair.lower <= default_tolerance());
  CHECK(pair.iterations == 40);
  CHECK(near(q_threshold(gen_singletons(3)).lower, 1.0 / 6));
  CHECK(near(q_threshold(kTrianglePairs).lower, 1 / std::sqrt(6.0)));
  CHECK(q_threshold(MinimalFamily(GroundSet(2), {})).lower == 1);
  CHECK(q_threshold(MinimalFamily(GroundSet(2), {Subset()})).lower == 0);
}

TEST_CASE("q_threshold bracket and certificate") {
  for (const auto& f : {kPair, kTrianglePairs, gen_singletons(4), gen_triangles(4)}) {
    const auto res = q_threshold(f);
    CHECK(verify_cover(res.certificate, f));
    CHECK(res.certificate.p == res.lower);
    CHECK(min_cover_weight(f, res.upper).weight > default_budget());
    CHECK(res.lower <= res.upper);
    CHECK(res.upper - res.lower <= default_tolerance());
  }
}

TEST_CASE("lp_min_weight examples") {
  const auto a = lp_min_weight(kPair, rat(1, 2), kUnbounded);
  CHECK(a.value == rat(1, 4));
  CHECK(a.lambda.at(Subset::of({1, 2})) == 1);

  const auto b = lp_min_weight(kPair, rat(1, 2), 1);
  CHECK(b.value == rat(1, 2));
  CHECK(b.lambda.at(Subset::of({1})) + b.lambda.at(Subset::of({2})) == 1);
  CHECK(b.lambda.max_support_size() <= 1);

  const auto c = lp_min_weight(kTrianglePairs, rat(3, 10), 2);
  CHECK(c.value == rat(27, 100));
  for (Subset s : kTrianglePairs.minimal()) CHECK(c.lambda.at(s) == 1);

  CHECK(lp_min_weight(MinimalFamily(GroundSet(2), {}), rat(1, 2), kUnbounded).value == 0);
}

TEST_CASE("lp_min_weight matches vertex enumeration") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 60; ++t) {
    const int n = 2 + static_cast<int>(rng() % 4);
    const auto f = oracle::random_family(rng, n, 1 + static_cast<int>(rng() % 3), 3);
    for (const auto& p : {rat(1, 10), rat(1, 2), rat(9, 10)})
      for (Restriction r : {kUnbounded, Restriction(1), Restriction(2)}) {
        const auto res = lp_min_weight(f, p, r);
        CHECK(res.value == oracle::vertex_enumeration_lp(f, p, r));
        CHECK(res.lambda.weight(p) == res.value);
        if (r) CHECK(res.lambda.max_support_size() <= *r);
      }
  }
}

TEST_CASE("qf_threshold examples") {
  const auto a = qf_threshold(kPair, kUnbounded);
  CHECK(near(a.lower, std::sqrt(0.5)));
  CHECK(verify_lambda(a.certificate, kPair));
  CHECK(near(qf_threshold(kPair, 1).lower, 0.5));
  CHECK(near(qf_threshold(kTrianglePairs, 2).lower, 1 / std::sqrt(6.0)));
  CHECK(qf_threshold(MinimalFamily(GroundSet(2), {}), 1).lower == 1);
  CHECK(qf_threshold(MinimalFamily(GroundSet(2), {Subset()}), kUnbounded).lower == 0);
  CHECK_THROWS_AS(qf_threshold(kPair, 0), std::invalid_argument);
}

TEST_CASE("verify_cover and verify_lambda examples") {
  CHECK(verify_cover({rat(1, 2), Cover({Subset::of({1})}), rat(1, 2)}, kPair));
  CHECK_FALSE(verify_cover({rat(1, 4), Cover({Subset::of({1})}), rat(1, 4)}, fam(3, {{2, 3}})));
  CHECK_FALSE(verify_cover({rat(1, 3), Cover({Subset()}), rat(1)}, kTrianglePairs));
  // A stored weight that disagrees with the recomputation is rejected.
  CHECK_FALSE(verify_cover({rat(1, 2), Cover({Subset::of({1})}), rat(1, 4)}, kPair));

  Lambda l1;
  l1.set(Subset::of({1, 2}), 1);
  CHECK(verify_lambda({rat(1, 2), 2, l1, rat(1, 4)}, kPair));
  Lambda l2;
  l2.set(Subset::of({1}), rat(1, 2));
  CHECK_FALSE(verify_lambda({rat(1, 2), 2, l2, rat(1, 4)}, kPair));
  Lambda l3;
  l3.set(Subset(), 1);
  CHECK_FALSE(verify_lambda({rat(1, 2), kUnbounded, l3, rat(1)}, kPair));
  // support exceeds r
  CHECK_FALSE(verify_lambda({rat(1, 2), 1, l1, rat(1, 4)}, kPair));
}

TEST_CASE("dual certificate examples") {
  const auto zero = check_dual_certificate(kPair, rat(1, 2), kUnbounded, {});
  CHECK(zero.feasible);
  CHECK(zero.dual_value == 0);

  const auto tight = check_dual_certificate(kPair, rat(1, 2), kUnbounded, {{Subset::of({1, 2}), rat(1, 4)}});
  CHECK(tight.feasible);
  CHECK(tight.dual_value == rat(1, 4));

  CHECK_FALSE(check_dual_certificate(kPair, rat(1, 2), kUnbounded, {{Subset::of({1, 2}), rat(1)}}).feasible);
}

TEST_CASE("weak duality on random duals") {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<long> num(0, 5);
  for (int t = 0; t < 80; ++t) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const auto f = oracle::random_family(rng, n, 1 + static_cast<int>(rng() % 4), 3);
    const Rational p = rat(1 + static_cast<long>(rng() % 9), 10);
    const Restriction r = (t % 3 == 0) ? kUnbounded : Restriction(1 + t % 3);
    const auto lp = lp_min_weight(f, p, r);

    // The solver's own dual is feasible and closes the gap.
    const auto own = check_dual_certificate(f, p, r, lp.dual);
    CHECK(own.feasible);
    CHECK(own.dual_value == lp.value);

    DualVector y;
    for (Subset s : f.minimal()) y[s] = rat(num(rng), 8);
    const auto chk = check_dual_certificate(f, p, r, y);
    if (chk.feasible) CHECK(chk.dual_value <= lp.value);
  }
}

TEST_CASE("constraints at minimal elements imply all members") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 150; ++t) {
    const int n = 1 + static_cast<int>(rng() % 8);
    const auto f = oracle::random_family(rng, n, 1 + static_cast<int>(rng() % 4), 4);
    const Restriction r = (t % 2) ? kUnbounded : Restriction(1 + t % 3);
    const auto lp = lp_min_weight(f, rat(1, 3), r);
    for (Subset i : oracle::members_by_brute_force(f)) CHECK(lp.lambda.mass_inside(i) >= 1);
  }
}

TEST_CASE("orderings on random families") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 60; ++t) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const auto f = oracle::random_family(rng, n, 1 + static_cast<int>(rng() % 4), 3);
    const int k = f.max_minimal_size();
    for (const auto& p : {rat(1, 5), rat(1, 2), rat(4, 5)}) {
      const auto un = lp_min_weight(f, p, kUnbounded).value;
      const auto rk = lp_min_weight(f, p, k).value;
      const auto r1 = lp_min_weight(f, p, 1).value;
      const auto cover = min_cover_weight(f, p).weight;
      CHECK(un <= rk);
      CHECK(rk <= r1);
      CHECK(rk <= cover);
    }
  }
}

TEST_CASE("certificate round trip") {
  const auto q = q_threshold(kTrianglePairs);
  const std::string text = serialize_certificate(q.certificate);
  const auto back = parse_cover_certificate(text);
  CHECK(back.p == q.certificate.p);
  CHECK(back.cover == q.certificate.cover);
  CHECK(back.weight == q.certificate.weight);
  CHECK(serialize_certificate(back) == text);

  for (Restriction r : {kUnbounded, Restriction(2)}) {
    const auto qf = qf_threshold(kTrianglePairs, r);
    const std::string lt = serialize_certificate(qf.certificate);
    const auto lb = parse_lambda_certificate(lt);
    CHECK(lb.r == r);
    CHECK(lb.lambda == qf.certificate.lambda);
    CHECK(serialize_certificate(lb) == lt);
    CHECK(verify_lambda(lb, kTrianglePairs));
  }
  CHECK_THROWS_AS(parse_cover_certificate("p=1/2\nweight=x\n"), ParseError);
  CHECK_THROWS_AS(parse_lambda_certificate("p=1/2\nr=zero\nweight=1/2\n"), ParseError);
}

TEST_CASE("candidate sets") {
  const auto c = candidate_sets(kTrianglePairs, 1, true);
  CHECK(c == std::vector<Subset>{Subset(), Subset::of({1}), Subset::of({2}), Subset::of({3})});
  CHECK(candidate_sets(kTrianglePairs, kUnbounded, false).size() == 6);
  CHECK_THROWS_AS(candidate_sets(kTrianglePairs, 0, true), std::invalid_argument);
}
