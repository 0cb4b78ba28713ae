#include <gtest/gtest.h>

#include "boolrr/families.hpp"
#include "boolrr/fourier.hpp"
#include "boolrr/restriction.hpp"
#include "oracle.hpp"

using namespace boolrr;

TEST(SampleFixedAlive, EdgeCasesAndFrequency) {
  Rng rng = make_stream(21, {1});
  EXPECT_EQ(sample_fixed_alive(10, 10, rng).fixed_count(), 0);
  EXPECT_EQ(sample_fixed_alive(10, 0, rng).alive_count(), 0);
  EXPECT_THROW(sample_fixed_alive(10, 11, rng), std::exception);
  EXPECT_THROW(sample_fixed_alive(10, -1, rng), std::exception);
  const int draws = 100000;
  std::vector<int> alive(10, 0);
  for (int d = 0; d < draws; ++d) {
    const Restriction r = sample_fixed_alive(10, 3, rng);
    ASSERT_EQ(r.alive_count(), 3);
    for (int i : r.alive_indices()) ++alive[static_cast<std::size_t>(i)];
  }
  const double sigma = std::sqrt(0.3 * 0.7 / draws);
  for (int c : alive) EXPECT_NEAR(static_cast<double>(c) / draws, 0.3, 3 * sigma);
}

TEST(SampleIndependent, EdgeCasesAndFrequency) {
  Rng rng = make_stream(22, {1});
  EXPECT_EQ(sample_independent(9, 0.0, rng).fixed_count(), 0);
  EXPECT_EQ(sample_independent(9, 1.0, rng).alive_count(), 0);
  const int draws = 100000;
  std::int64_t fixed = 0;
  for (int d = 0; d < draws; ++d) fixed += sample_independent(10, 0.35, rng).fixed_count();
  const double sigma = std::sqrt(0.35 * 0.65 / (10.0 * draws));
  EXPECT_NEAR(static_cast<double>(fixed) / (10.0 * draws), 0.35, 3 * sigma);
}

TEST(Restrict, FrozenExamples) {
  Rng rng = make_stream(23, {1});
  auto par = make_family("parity:n=8");
  for (int k = 1; k <= 8; ++k) {
    auto g = restrict(par, sample_fixed_alive(8, k, rng));
    EXPECT_EQ(g->arity(), k);
    EXPECT_EQ(variance(*g), 0.25);
  }
  auto and5 = make_family("and:n=5");
  Restriction r{oracle::partial({0, 0, 1, 0, 0})};
  auto g = restrict(and5, r);
  EXPECT_EQ(g->constancy(PartialPoint(g->arity())), Constancy::kZero);
  EXPECT_EQ(g->mean(), 0.0);
  auto maj = make_family("maj:n=3");
  Restriction m{oracle::partial({-1, 0, 0})};
  auto h = restrict(maj, m);
  EXPECT_EQ(h->mean(), 0.75);
  auto ht = restrict(make_table_function(maj->materialize()), m);
  ASSERT_NE(ht->table(), nullptr);
  EXPECT_EQ(ht->mean(), 0.75);
  EXPECT_EQ(ht->table()->to_hex(), "e");  // alive coords 1,2 in ascending order
}

TEST(Restrict, TableAndClosedFormAgreeWithCondMean) {
  Rng rng = make_stream(24, {1});
  for (const char* s : {"tribes:w=3", "maj:n=7", "or:n=6", "random:n=9,seed=4"}) {
    auto f = make_family(s);
    auto ft = make_table_function(f->materialize());
    for (int q = 0; q < 100; ++q) {
      const Restriction r = sample_independent(f->arity(), 0.5, rng);
      auto g = restrict(f, r);
      auto gt = restrict(ft, r);
      ASSERT_EQ(g->mean(), f->cond_mean(r.point)) << s;
      ASSERT_EQ(gt->mean(), f->cond_mean(r.point)) << s;
      ASSERT_EQ(g->materialize(), gt->materialize()) << s;
      ASSERT_EQ(g->constancy(PartialPoint(g->arity())), gt->constancy(PartialPoint(gt->arity()))) << s;
    }
  }
}

TEST(Restrict, ConstancyMatchesEnumeration) {
  Rng rng = make_stream(25, {1});
  for (const char* s : {"tribes:w=2", "tribes:w=3", "maj:n=9", "parity:n=6", "and:n=6", "or:n=6", "dict:n=5,i=2"}) {
    auto f = make_family(s);
    for (int q = 0; q < 400; ++q) {
      const PartialPoint x = oracle::random_partial(f->arity(), rng);
      const auto [ones, total] = oracle::count_completions(*f, x);
      const Constancy want = ones == 0 ? Constancy::kZero : (ones == total ? Constancy::kOne : Constancy::kNonconstant);
      ASSERT_EQ(f->constancy(x), want) << s;
    }
  }
}

TEST(Compose, MatchesSequentialRestriction) {
  Rng rng = make_stream(26, {1});
  auto f = make_family("random:n=10,seed=9");
  for (int q = 0; q < 50; ++q) {
    const Restriction r1 = sample_fixed_alive(10, 6, rng);
    const Restriction r2 = sample_fixed_alive(6, 3, rng);
    const Restriction c = compose(r1, r2);
    EXPECT_EQ(c.alive_count(), 3);
    EXPECT_EQ(restrict(restrict(f, r1), r2)->materialize(), restrict(f, c)->materialize());
  }
}

TEST(Scan, ParitySurvivalIndependent) {
  auto par = make_family("parity:n=8");
  const auto res = scan(*par, {0.25, 0.5}, 100000, 3, ScanMode::kIndependent);
  for (const auto& s : res) {
    EXPECT_TRUE(s.p_constant.within(std::pow(1.0 - s.rho, 8))) << s.rho;
    EXPECT_TRUE(s.mean_restricted.within(0.5));
  }
}

TEST(Scan, DeterministicAcrossExecution) {
  auto f = make_family("tribes:w=4");
  const auto a = scan(*f, {0.1, 0.25}, 2000, 7, ScanMode::kFixed, Exec::kSerial);
  const auto b = scan(*f, {0.1, 0.25}, 2000, 7, ScanMode::kFixed, Exec::kParallel);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t g = 0; g < a.size(); ++g) {
    EXPECT_EQ(a[g].p_constant.value, b[g].p_constant.value);
    EXPECT_EQ(a[g].mean_restricted.value, b[g].mean_restricted.value);
    EXPECT_EQ(a[g].var_q50, b[g].var_q50);
  }
  EXPECT_EQ(a[0].alive_count, alive_for_rho(44, 0.1));
}

TEST(Scan, TribesConstancyAboveSurvivalFormula) {
  auto f = make_family("tribes:w=4");
  const auto res = scan(*f, {0.25}, 20000, 5, ScanMode::kIndependent);
  EXPECT_GE(res[0].p_constant.value + 3 * res[0].p_constant.std_error, tribes_survival_formula(4, 44));
  EXPECT_TRUE(res[0].p_constant_one.within(tribes_survival_formula(4, 44)));
}

TEST(Scan, MajorityVarianceQuantilesShrinkWithRho) {
  auto f = make_family("maj:n=101");
  const auto res = scan(*f, {0.05, 0.2, 0.5}, 4000, 8, ScanMode::kFixed);
  EXPECT_LE(res[0].var_q50, res[1].var_q50);
  EXPECT_LE(res[1].var_q50, res[2].var_q50);
}

TEST(SurvivalFormula, Values) {
  EXPECT_EQ(tribes_survival_formula(1, 1), 0.0);
  EXPECT_NEAR(tribes_survival_formula(2, 6), std::pow(1.0 - 0.75 * 0.75, 3), 1e-15);
  EXPECT_THROW(tribes_survival_formula(4, 10), std::exception);
}
