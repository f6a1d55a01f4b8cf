#include <gtest/gtest.h>

#include <random>
#include <set>

#include "facthappy/dynamics.hpp"
#include "oracle.hpp"

namespace fh = facthappy;
using fh::AttractorId;
using fh::Exponent;
using fh::Natural;

namespace {

AttractorId fixed(unsigned p) { return AttractorId::fixed_point(p); }

AttractorId cycle(std::initializer_list<unsigned> members) {
  std::vector<Natural> m;
  for (unsigned v : members) m.emplace_back(v);
  return AttractorId::cycle(std::move(m));
}

const fh::AttractorAtlas& atlas_for(unsigned e) {
  static std::map<unsigned, fh::AttractorAtlas> cache;
  auto it = cache.find(e);
  if (it == cache.end()) it = cache.emplace(e, fh::AttractorAtlas::build(Exponent(e))).first;
  return it->second;
}

}  // namespace

TEST(Exponent, RejectsZero) { EXPECT_THROW(Exponent(0), fh::PreconditionViolated); }

TEST(HappyStep, KnownValues) {
  EXPECT_EQ(fh::happy_step(fh::to_factoradic(std::uint64_t{2020}), Exponent(2)), 40);
  EXPECT_EQ(fh::happy_step(fh::to_factoradic(std::uint64_t{4}), Exponent(2)), 4);
  EXPECT_EQ(fh::happy_step(fh::FactoradicRep{}, Exponent(5)), 0);
  EXPECT_EQ(fh::happy_step(fh::to_factoradic(std::uint64_t{17}), Exponent(3)), 17);
}

TEST(HappyStepNat, KnownValues) {
  EXPECT_EQ(fh::happy_step_nat(5, Exponent(2)), 5);
  for (unsigned e = 1; e <= 12; ++e) EXPECT_EQ(fh::happy_step_nat(1, Exponent(e)), 1);
  EXPECT_EQ(fh::happy_step_nat(9, Exponent(4)), 3);
  EXPECT_EQ(fh::happy_step_nat(0, Exponent(3)), 0);
}

TEST(HappyStepNat, FastPathAgreesWithOracle) {
  std::mt19937_64 rng(5);
  for (unsigned e = 1; e <= 8; ++e) {
    const fh::PowerSum fast{Exponent(e)};
    ASSERT_TRUE(fast.exact());
    for (int trial = 0; trial < 20000; ++trial) {
      const std::uint64_t n = rng() >> (rng() % 40);
      ASSERT_EQ(fast(n), oracle::S(n, e)) << n << " e=" << e;
    }
  }
}

TEST(HappyStepNat, BigArgumentsUseExactArithmetic) {
  // 25! has digit 1 at position 25 only.
  EXPECT_EQ(fh::happy_step_nat(fh::factorial(25), Exponent(3)), 1);
  const Natural n = fh::factorial(30) * 30 + fh::factorial(29) * 29;
  EXPECT_EQ(fh::happy_step_nat(n, Exponent(2)), 900 + 841);
  // Exponent too large for the 64-bit table.
  const fh::PowerSum wide{Exponent(20)};
  EXPECT_FALSE(wide.exact());
  EXPECT_EQ(fh::happy_step_nat(23, Exponent(20)), 1 + fh::power(2, 20) + fh::power(3, 20));
}

TEST(Iterate, KnownValues) {
  EXPECT_EQ(fh::iterate(2020, Exponent(2), 5), 1);
  EXPECT_EQ(fh::iterate(2021, Exponent(2), 3), 5);
  EXPECT_EQ(fh::iterate(777, Exponent(4), 0), 777);
}

TEST(Classify, KnownOrbits) {
  auto r = fh::classify(2021, Exponent(2));
  EXPECT_EQ(r.attractor, fixed(5));
  EXPECT_EQ(r.steps_to_attractor, 3u);

  r = fh::classify(3401, Exponent(5));
  EXPECT_EQ(r.attractor, cycle({2114, 3401}));
  EXPECT_EQ(r.attractor.members().front(), 2114);
  EXPECT_EQ(r.steps_to_attractor, 0u);

  r = fh::classify(1, Exponent(3));
  EXPECT_EQ(r.attractor, fixed(1));
  EXPECT_EQ(r.steps_to_attractor, 0u);

  r = fh::classify(18, Exponent(3));
  EXPECT_EQ(r.attractor, fixed(1));
  EXPECT_EQ(r.steps_to_attractor, 4u);
}

TEST(Classify, TrajectoryEndsAtAttractorEntry) {
  fh::ClassifyOptions options;
  options.record_trajectory = true;
  const auto plain = fh::classify(2020, Exponent(2), nullptr, options);
  ASSERT_TRUE(plain.trajectory);
  ASSERT_EQ(plain.trajectory->size(), plain.steps_to_attractor + 1);
  EXPECT_EQ(plain.trajectory->front(), 2020);
  EXPECT_EQ(plain.trajectory->back(), 1);
  const auto memo = fh::classify(2020, Exponent(2), &atlas_for(2), options);
  EXPECT_EQ(memo.trajectory, plain.trajectory);
}

TEST(Classify, Errors) {
  EXPECT_THROW(fh::classify(0, Exponent(2)), fh::PreconditionViolated);
  fh::ClassifyOptions tight;
  tight.iteration_cap = 2;
  EXPECT_THROW(fh::classify(2021, Exponent(2), nullptr, tight), fh::IterationCapExceeded);
  EXPECT_THROW(fh::classify(5, Exponent(3), &atlas_for(2)), fh::PreconditionViolated);
}

TEST(Classify, CycleIsCanonicalFromEveryEntryPoint) {
  for (unsigned start : {67u, 731u, 794u}) {
    const auto r = fh::classify(start, Exponent(6));
    EXPECT_EQ(r.attractor, cycle({67, 794, 731}));
    std::vector<Natural> expected{67, 794, 731};
    EXPECT_EQ(r.attractor.members(), expected);
  }
  EXPECT_EQ(cycle({3401, 2114}), cycle({2114, 3401}));
}

TEST(Classify, AtlasPathAgreesWithPlainIteration) {
  std::mt19937_64 rng(13);
  for (unsigned e = 2; e <= 5; ++e) {
    const auto& atlas = atlas_for(e);
    for (int trial = 0; trial < 2000; ++trial) {
      const Natural n = 1 + rng() % 1'000'000'000'000ULL;
      const auto a = fh::classify(n, Exponent(e));
      const auto b = fh::classify(n, Exponent(e), &atlas);
      ASSERT_EQ(a.attractor, b.attractor) << n;
      ASSERT_EQ(a.steps_to_attractor, b.steps_to_attractor) << n;
    }
  }
  // Arguments beyond 64 bits descend through the exact path first.
  const Natural huge = fh::factorial(40) + 1;
  EXPECT_EQ(fh::classify(huge, Exponent(3), &atlas_for(3)).attractor, fh::classify(huge, Exponent(3)).attractor);
}

TEST(SmallestJ, KnownValues) {
  EXPECT_EQ(fh::smallest_j(Exponent(1)), 2u);
  EXPECT_EQ(fh::smallest_j(Exponent(2)), 3u);
  EXPECT_EQ(fh::smallest_j(Exponent(4)), 6u);
}

TEST(DescentBound, KnownValues) {
  const auto b4 = fh::descent_bound(Exponent(4));
  EXPECT_EQ(b4.j, 6u);
  EXPECT_EQ(b4.bound, 5039);
  EXPECT_EQ(b4.tail_offset, -260);
  EXPECT_TRUE(b4.certificate_ok());

  const auto b2 = fh::descent_bound(Exponent(2));
  EXPECT_EQ(b2.j, 3u);
  EXPECT_EQ(b2.bound, 23);
  EXPECT_TRUE(b2.certificate_ok());

  const auto b6 = fh::descent_bound(Exponent(6));
  EXPECT_EQ(b6.j, 8u);
  EXPECT_EQ(b6.bound, 362879);
  EXPECT_EQ(b6.tail_offset, -144501);  // frozen from the brute-force check below
  EXPECT_TRUE(b6.certificate_ok());
}

TEST(DescentBound, InvariantsHoldAgainstBruteForce) {
  for (unsigned e = 1; e <= 40; ++e) {
    const auto b = fh::descent_bound(Exponent(e));
    const Natural j(b.j);
    EXPECT_GT(fh::factorial(b.j), fh::power(j, e - 1));
    EXPECT_LE(fh::factorial(b.j - 1), fh::power(Natural(b.j - 1), e - 1));
    Natural sum = 0;
    for (unsigned i = 1; i <= b.j; ++i) sum += fh::factorial(i) * i;
    EXPECT_EQ(b.bound, sum);
    Natural offset = 0;
    for (unsigned i = 2; i < b.j; ++i) {
      Natural best = 0;
      for (unsigned a = 0; a <= i; ++a) {
        const Natural v = Natural(a) * fh::factorial(i) - fh::power(Natural(a), e);
        if (v < best) best = v;
      }
      offset += best;
    }
    EXPECT_EQ(b.tail_offset, offset) << e;
    EXPECT_TRUE(b.certificate_ok()) << e;
  }
}

TEST(DescentBound, FailureIsReportedNotIgnored) {
  fh::DescentBound b = fh::descent_bound(Exponent(3));
  b.dominance_ok = false;
  EXPECT_FALSE(b.certificate_ok());
  EXPECT_NE(b.failure().find("dominance"), std::string::npos);
  EXPECT_THROW(b.require_certified(), fh::CertificateFailed);
}

TEST(DescentBound, MapDescendsAboveBound) {
  std::mt19937_64 rng(17);
  for (unsigned e = 2; e <= 6; ++e) {
    const fh::PowerSum fast{Exponent(e)};
    const std::uint64_t bound = fh::descent_bound(Exponent(e)).bound.convert_to<std::uint64_t>();
    for (int trial = 0; trial < 10000; ++trial) {
      const std::uint64_t n = bound + 1 + rng() % (1'000'000'000ULL - bound);
      ASSERT_LT(fast(n), n) << n << " e=" << e;
    }
  }
}

TEST(Atlas, TableOfFixedPointsAndCycles) {
  using V = std::vector<Natural>;
  EXPECT_EQ(atlas_for(1).fixed_points(), (V{1}));
  EXPECT_EQ(atlas_for(2).fixed_points(), (V{1, 4, 5}));
  EXPECT_TRUE(atlas_for(2).cycles().empty());
  EXPECT_EQ(atlas_for(3).fixed_points(), (V{1, 16, 17}));
  EXPECT_EQ(atlas_for(4).fixed_points(), (V{1, 658, 659}));
  EXPECT_EQ(atlas_for(5).fixed_points(), (V{1, 34, 35, 308, 309, 1058, 1059}));
  ASSERT_EQ(atlas_for(5).cycles().size(), 1u);
  EXPECT_EQ(atlas_for(5).cycles()[0], cycle({2114, 3401}));
  EXPECT_EQ(atlas_for(6).fixed_points(), (V{1, 8258, 8259}));
  ASSERT_EQ(atlas_for(6).cycles().size(), 1u);
  EXPECT_EQ(atlas_for(6).cycles()[0].members(), (V{67, 794, 731}));
}

TEST(Atlas, EveryMemoEntryMatchesOracle) {
  for (unsigned e = 1; e <= 4; ++e) {
    const auto& atlas = atlas_for(e);
    for (std::uint64_t n = 1; n <= atlas.memo_limit(); ++n) {
      const auto entry = atlas.entry(n);
      const auto [members, steps] = oracle::attractor(n, e);
      std::vector<std::uint64_t> got;
      for (const auto& m : atlas.attractor(entry.attractor).members()) got.push_back(m.convert_to<std::uint64_t>());
      std::sort(got.begin(), got.end());
      ASSERT_EQ(got, members) << n;
      ASSERT_EQ(entry.steps, steps) << n;
    }
  }
}

TEST(Atlas, MembersAreExactlyThePeriodicPoints) {
  for (unsigned e = 1; e <= 6; ++e) {
    const auto& atlas = atlas_for(e);
    const fh::PowerSum fast{Exponent(e)};
    std::set<std::uint64_t> periodic;
    for (std::uint64_t n = 1; n <= atlas.memo_limit(); ++n) {
      if (atlas.entry(n).steps == 0) periodic.insert(n);
      // Totality: every value resolves.
      ASSERT_LT(atlas.entry(n).attractor, atlas.attractors().size());
    }
    const auto members = atlas.attractor_members();
    EXPECT_EQ(std::set<std::uint64_t>(members.begin(), members.end()), periodic) << e;
    for (const auto& a : atlas.attractors()) {
      const auto& m = a.members();
      for (std::size_t k = 0; k < m.size(); ++k) {
        EXPECT_EQ(fast(m[k].convert_to<std::uint64_t>()), m[(k + 1) % m.size()].convert_to<std::uint64_t>());
      }
    }
  }
}

TEST(Atlas, SizeCapIsEnforced) {
  fh::AttractorAtlas::Limits limits;
  limits.max_memo = 1000;
  EXPECT_THROW(fh::AttractorAtlas::build(Exponent(4), limits), fh::SizeCapExceeded);
  EXPECT_THROW(fh::AttractorAtlas::build(Exponent(9)), fh::SizeCapExceeded);
}

TEST(Properties, ParityIdentity) {
  for (unsigned e = 1; e <= 6; ++e) {
    const fh::PowerSum fast{Exponent(e)};
    auto gap = [&](std::uint64_t n) { return static_cast<std::int64_t>(n) - static_cast<std::int64_t>(fast(n)); };
    for (std::uint64_t n = 1; n <= 100'000; ++n) {
      if (n % 2 == 1) {
        ASSERT_EQ(gap(n), gap(n - 1)) << n;
      } else {
        ASSERT_EQ(gap(n), gap(n + 1)) << n;
      }
    }
  }
}

TEST(Properties, FixedPointsAboveOneComeInPairs) {
  for (unsigned e = 1; e <= 6; ++e) {
    auto fps = atlas_for(e).fixed_points();
    std::vector<Natural> rest(fps.begin() + 1, fps.end());
    ASSERT_EQ(fps.front(), 1);
    ASSERT_EQ(rest.size() % 2, 0u) << e;
    for (std::size_t k = 0; k < rest.size(); k += 2) {
      EXPECT_EQ(rest[k] % 2, 0) << e;
      EXPECT_EQ(rest[k + 1], rest[k] + 1) << e;
    }
  }
}

TEST(Properties, ExponentOneDescendsToOne) {
  const fh::PowerSum fast{Exponent(1)};
  const auto& atlas = atlas_for(1);
  for (std::uint64_t n = 2; n <= 100'000; ++n) ASSERT_LT(fast(n), n);
  for (std::uint64_t n = 1; n <= 100'000; ++n) ASSERT_EQ(atlas.attractor(atlas.resolve(n).attractor), fixed(1));
}
