#include <gtest/gtest.h>

#include "boolrr/families.hpp"
#include "boolrr/hyperc.hpp"
#include "oracle.hpp"

using namespace boolrr;

namespace {

FunctionPtr fam(const char* s) { return make_family(s); }

double chi_sum(const MultilinearFunction& f, const PartialPoint& x) {
  double s = 0.0;
  for (std::uint64_t S = 0; S < f.coeffs().size(); ++S) {
    double term = f.coeffs()[S];
    for (int i = 0; i < f.arity(); ++i) {
      if ((S >> i) & 1U) term *= x.value(i);
    }
    s += term;
  }
  return s;
}

// Independent-reveal law at fixed t, summed term by term.
double brute_moment(const MultilinearFunction& f, double t, double p) {
  const int n = f.arity();
  double total = 0.0;
  for (std::uint64_t S = 0; S < (std::uint64_t{1} << n); ++S) {
    const int k = std::popcount(S);
    const double w = std::pow(t, k) * std::pow(1.0 - t, n - k) * std::ldexp(1.0, -k);
    for (std::uint64_t y = 0; y < (std::uint64_t{1} << n); ++y) {
      if ((y & ~S) != 0) continue;
      total += w * std::pow(std::abs(chi_sum(f, PartialPoint::from_masks(n, S, y))), p);
    }
  }
  return total;
}

}  // namespace

TEST(Multilinear, EvalMatchesCharacterSum) {
  Rng rng = make_stream(51, {1});
  const MultilinearFunction f = MultilinearFunction::random(6, rng);
  for (int q = 0; q < 200; ++q) {
    const PartialPoint x = oracle::random_partial(6, rng);
    ASSERT_NEAR(f.eval(x), chi_sum(f, x), 1e-12);
  }
  const auto g = MultilinearFunction::from_table(fam("maj:n=5")->materialize());
  for (std::uint64_t k = 0; k < 32; ++k) {
    const BitPoint x = BitPoint::from_index(5, k);
    ASSERT_NEAR(g.eval(PartialPoint::from_point(x)), fam("maj:n=5")->eval(x) ? 1.0 : 0.0, 1e-12);
  }
}

TEST(Multilinear, SupNormIsVertexMaximum) {
  // f = x1 x2 + x1/2: vertex maximum 3/2, never exceeded inside the square
  const MultilinearFunction f(2, {0.0, 0.5, 0.0, 1.0});
  EXPECT_DOUBLE_EQ(f.sup_norm(), 1.5);
  for (int a = 0; a <= 40; ++a) {
    for (int b = 0; b <= 40; ++b) {
      const double x = -1.0 + a / 20.0, y = -1.0 + b / 20.0;
      ASSERT_LE(std::abs(x * y + 0.5 * x), 1.5 + 1e-15);
    }
  }
}

TEST(Moment, FrozenAndBrute) {
  const MultilinearFunction c(3, {0.7, 0, 0, 0, 0, 0, 0, 0});
  for (double t : {0.0, 0.3, 1.0}) EXPECT_NEAR(exact_moment(c, t, 3.0), std::pow(0.7, 3.0), 1e-15);
  Rng rng = make_stream(52, {1});
  const MultilinearFunction f = MultilinearFunction::random(5, rng);
  double plancherel = 0.0;
  for (double v : f.coeffs()) plancherel += v * v;
  EXPECT_NEAR(exact_moment(f, 1.0, 2.0), plancherel, 1e-12);
  const double a = 0.6, b = -0.3;
  const MultilinearFunction lin(1, {b, a});
  for (double t : {0.0, 0.25, 0.8, 1.0}) {
    for (double p : {1.0, 2.0, 2.5}) {
      const double want = (1 - t) * std::pow(std::abs(b), p) + t / 2 * (std::pow(std::abs(b + a), p) + std::pow(std::abs(b - a), p));
      EXPECT_NEAR(exact_moment(lin, t, p), want, 1e-14);
    }
  }
  for (double t : {0.1, 0.5, 0.9}) EXPECT_NEAR(exact_moment(f, t, 2.3), brute_moment(f, t, 2.3), 1e-12);
}

TEST(Moment, SecondMomentNondecreasingInTime) {
  Rng rng = make_stream(53, {1});
  for (int q = 0; q < 50; ++q) {
    const MultilinearFunction f = MultilinearFunction::random(6, rng);
    const MomentOracle o(f);
    double prev = -1.0;
    for (int k = 0; k <= 20; ++k) {
      const double m = o.moment(k / 20.0, 2.0);
      ASSERT_GE(m, prev - 1e-12);
      prev = m;
    }
  }
}

TEST(Hypercontractivity, EqualityCases) {
  Rng rng = make_stream(54, {1});
  const MultilinearFunction f = MultilinearFunction::random(5, rng);
  for (double t : {0.0, 0.4, 1.0}) EXPECT_NEAR(hc_check(f, t, t).margin, 0.0, 1e-12);
  const MultilinearFunction c(4, std::vector<double>(16, 0.0));
  EXPECT_NEAR(hc_check(c, 0.2, 0.9).margin, 0.0, 1e-15);
}

TEST(Hypercontractivity, RandomSweep) {
  Rng rng = make_stream(55, {1});
  for (int q = 0; q < 100; ++q) {
    const int n = 1 + q % 8;
    const MultilinearFunction f = MultilinearFunction::random(n, rng);
    ASSERT_GE(hc_grid_min(f, 0.1).margin, -1e-9);
  }
}

TEST(GradientBounds, FrozenValues) {
  const auto d = gradient_bound_check(MultilinearFunction::from_table(fam("dict:n=3")->materialize()), 0.0);
  EXPECT_NEAR(d.grad_norm_sq, 0.25, 1e-15);
  EXPECT_NEAR(d.sup_norm, 1.0, 1e-15);
  const int n = 5;
  const auto par = MultilinearFunction::from_table(fam("parity:n=5")->materialize());
  for (double t : {0.0, 0.3, 0.75}) {
    const auto p = gradient_bound_check(par, t);
    for (int i = 0; i < n; ++i) {
      EXPECT_NEAR(p.coord_expect[static_cast<std::size_t>(i)], std::pow(t, n - 1) / 4.0, 1e-14);
      EXPECT_NEAR(p.coord_bound[static_cast<std::size_t>(i)], 0.25, 1e-14);
    }
  }
  EXPECT_THROW(gradient_bound_check(par, 1.0), std::exception);
}

TEST(GradientBounds, RandomSlacksAndSeries) {
  Rng rng = make_stream(56, {1});
  for (int q = 0; q < 100; ++q) {
    const MultilinearFunction f = MultilinearFunction::random(1 + q % 8, rng);
    for (double t : {0.0, 0.25, 0.5, 0.9}) {
      const auto p = gradient_bound_check(f, t);
      ASSERT_GE(p.grad_slack, -1e-9);
      ASSERT_GE(p.coord_slack, -1e-9);
      ASSERT_NEAR(p.grad_norm_sq, p.grad_norm_sq_series, 1e-10);
    }
  }
}

TEST(RevealPath, MonotoneAndCoupled) {
  Rng rng = make_stream(57, {1});
  for (int q = 0; q < 100; ++q) {
    const RevealPath path = sample_reveal_path(10, rng);
    int prev = -1;
    for (int k = 0; k <= 20; ++k) {
      const int c = path.state(k / 20.0).fixed_count();
      ASSERT_GE(c, prev);
      prev = c;
    }
    ASSERT_EQ(path.state(1.0).to_point(), path.x);
    const CoupledPath d = couple_to_discrete(path, 1.0);
    ASSERT_EQ(d.discrete.order, path.order());
    ASSERT_FALSE(d.short_event);
    ASSERT_EQ(d.discrete.endpoint(), path.x);
  }
}

TEST(Coupling, EndpointUniformAndTribes) {
  auto f = fam("tribes:w=4");
  const auto c = coupling_stats(*f, 0.25, 20000, 3);
  EXPECT_TRUE(c.endpoint_mean.within(f->mean()));
  EXPECT_TRUE(c.holds);
  EXPECT_TRUE(c.orders_agree);
}

TEST(BetaTail, ParityExact) {
  auto f = fam("parity:n=6");
  const double t = 0.7;
  const double want = std::pow(t, 6) + 6 * std::pow(t, 5) * (1 - t);
  const auto r = beta_tail(*f, t, 0.3, 40000, 4);
  EXPECT_TRUE(r.tail.within(want));
  EXPECT_TRUE(r.tail_star.within(want));
  EXPECT_EQ(r.star_exceeds_beta, 0);
}

TEST(BetaTail, StarBelowBetaAndDeterminism) {
  auto f = fam("maj:n=25");
  const auto a = beta_tail(*f, 0.5, 0.2, 2000, 5, Exec::kSerial);
  const auto b = beta_tail(*f, 0.5, 0.2, 2000, 5, Exec::kParallel);
  EXPECT_EQ(a.star_exceeds_beta, 0);
  EXPECT_EQ(a.tail.value, b.tail.value);
  EXPECT_LE(a.tail_star.value, a.tail.value);
  const auto d = discrete_beta_tail(*f, 0.2, 0.2, 2000, 6);
  EXPECT_EQ(d.star_exceeds_beta, 0);
  EXPECT_DOUBLE_EQ(d.t, 0.9);
}
