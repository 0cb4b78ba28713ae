#include <gtest/gtest.h>

#include <map>

#include "boolrr/errors.hpp"
#include "boolrr/families.hpp"
#include "boolrr/fourier.hpp"
#include "boolrr/info.hpp"
#include "boolrr/process.hpp"
#include "boolrr/stats.hpp"
#include "oracle.hpp"

using namespace boolrr;

namespace {

FunctionPtr fam(const char* s) { return make_family(s); }

std::map<std::uint64_t, double> uniform_on_ones(const BooleanFunction& f) {
  const TruthTable t = f.materialize();
  std::map<std::uint64_t, double> law;
  for (std::uint64_t k = 0; k < t.size(); ++k) {
    if (t.get(k)) law[k] = 1.0 / static_cast<double>(t.ones());
  }
  return law;
}

PiInputs fixed_inputs(std::vector<int> pi, std::vector<char> controlled, std::vector<int> z) {
  return PiInputs{std::move(pi), std::move(controlled), std::move(z)};
}

}  // namespace

TEST(UniformProcess, EndpointMeanAndMartingale) {
  auto f = fam("maj:n=7");
  Rng rng = make_stream(31, {1});
  std::int64_t ones = 0;
  const int runs = 100000;
  for (int r = 0; r < runs; ++r) {
    const ProcessPath p = run_uniform(7, rng);
    ones += f->eval(p.endpoint()) ? 1 : 0;
    if (r < 200) {
      for (int t = 1; t <= 7; ++t) {
        const PartialPoint prev = p.state(t - 1);
        const int i = p.order[static_cast<std::size_t>(t - 1)];
        ASSERT_EQ((f->cond_mean(prev.with(i, 1)) + f->cond_mean(prev.with(i, -1))) / 2.0, f->cond_mean(prev));
      }
    }
  }
  EXPECT_TRUE(proportion(ones, runs).within(0.5));
}

TEST(UniformProcess, ParityFlatUntilLastStep) {
  auto f = fam("parity:n=6");
  const ProcessPath p = run_uniform(*f, 4);
  for (int t = 0; t < 6; ++t) EXPECT_EQ(f->cond_mean(p.state(t)), 0.5);
  const double last = f->cond_mean(p.state(6));
  EXPECT_TRUE(last == 0.0 || last == 1.0);
}

TEST(StepLaw, FrozenValues) {
  const StepLaw a = step_distribution_q(*fam("and:n=2"), PartialPoint(2), 0);
  EXPECT_EQ(a.p_plus, 0.0);
  EXPECT_EQ(a.p_minus, 1.0);
  const StepLaw p = step_distribution_q(*fam("parity:n=4"), oracle::partial({1, 0, 0, 0}), 2);
  EXPECT_EQ(p.p_plus, 0.5);
  const StepLaw d = step_distribution_q(*fam("dict:n=3,i=1"), PartialPoint(3), 1);
  EXPECT_EQ(d.p_minus, 1.0);
  EXPECT_THROW(step_distribution_q(*fam("and:n=2"), oracle::partial({1, 0}), 1), DomainError);
}

TEST(ConditionedProcess, AndAndConstant) {
  auto and2 = fam("and:n=2");
  for (std::uint64_t s = 0; s < 50; ++s) EXPECT_EQ(run_conditioned(*and2, s).endpoint().index(), 3U);
  EXPECT_THROW(run_conditioned(*fam("const:n=3"), 1), DomainError);
  // f = 1 conditions on nothing: endpoint uniform
  auto one = fam("const:n=3,v=1");
  std::map<std::uint64_t, std::int64_t> counts;
  const int runs = 80000;
  for (int r = 0; r < runs; ++r) ++counts[run_conditioned(*one, static_cast<std::uint64_t>(r)).endpoint().index()];
  EXPECT_LT(total_variation(counts, runs, uniform_on_ones(*one)), 0.01);
}

TEST(ConditionedProcess, UniformOnPreimage) {
  for (const char* s : {"maj:n=3", "tribes:w=2"}) {
    auto f = fam(s);
    std::map<std::uint64_t, std::int64_t> counts;
    const int runs = 200000;
    Rng rng = make_stream(32, {1});
    for (int r = 0; r < runs; ++r) ++counts[run_conditioned(*f, rng).endpoint().index()];
    EXPECT_LT(total_variation(counts, runs, uniform_on_ones(*f)), 0.01) << s;
  }
}

TEST(ConditionedProcess, RadonNikodymTelescopes) {
  Rng rng = make_stream(33, {1});
  for (const char* s : {"maj:n=3", "tribes:w=2", "random:n=8,seed=2"}) {
    auto f = fam(s);
    for (int r = 0; r < 2000; ++r) {
      const ProcessPath p = run_conditioned(*f, rng);
      for (int t = 0; t <= f->arity(); ++t) ASSERT_LE(rn_check(*f, p, t), 1e-9) << s;
    }
  }
  const ProcessPath p = run_conditioned(*fam("const:n=4,v=1"), 3);
  EXPECT_EQ(rn_product(*fam("const:n=4,v=1"), p, 4), 1.0);
}

TEST(ChangeOfMeasure, PrefixEventBound) {
  // Prefix event: after 4 steps the conditional mean of MAJ_9 is at most 0.3.
  auto f = fam("maj:n=9");
  const int runs = 40000;
  std::int64_t hits_p = 0, hits_q = 0;
  Rng rp = make_stream(34, {1}), rq = make_stream(34, {2});
  for (int r = 0; r < runs; ++r) {
    hits_p += f->cond_mean(run_uniform(9, rp).state(4)) <= 0.3 ? 1 : 0;
    hits_q += f->cond_mean(run_conditioned(*f, rq).state(4)) <= 0.3 ? 1 : 0;
  }
  const Estimate q = proportion(hits_q, runs), p = proportion(hits_p, runs);
  EXPECT_LE(q.value, p.value / f->mean() + 3 * (q.std_error + p.std_error / f->mean()));
}

TEST(ControlledProcess, Preconditions) {
  auto f = fam("maj:n=3");
  EXPECT_THROW(run_controlled(*f, PiConfig{0.25, 0.1}), std::invalid_argument);  // eps n not integral
  EXPECT_THROW(run_controlled(*f, PiConfig{1.0 / 3.0, 0.6}), std::invalid_argument);  // delta > f(0)
  EXPECT_THROW(run_controlled(*fam("const:n=3"), PiConfig{1.0 / 3.0, 0.1}), DomainError);
}

TEST(ControlledProcess, MixtureIdentityAndNoClamp) {
  for (const char* s : {"maj:n=7", "parity:n=4", "random:n=8,seed=3", "tribes:w=2"}) {
    auto f = fam(s);
    const int n = f->arity();
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
      PiConfig c{2.0 / n, std::min(0.05, f->mean()), false, -1, seed};
      const PiRun run = run_controlled(*f, c);
      ASSERT_LE(run.max_mixture_residual, 1e-12) << s;
      ASSERT_FALSE(run.clamped) << s;
      ASSERT_EQ(run.tau, std::min({run.tau1, run.tau2, n + 1}));
      ASSERT_EQ(run.tau_prime, std::min(run.tau, run.m) + 1);
      ASSERT_TRUE(f->eval(run.y.endpoint())) << s;
    }
  }
}

TEST(ControlledProcess, ParityBreaksLate) {
  auto f = fam("parity:n=6");
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const PiRun run = run_controlled(*f, PiConfig{0.5, 0.1, false, -1, seed});
    EXPECT_GE(run.tau1, 5);
  }
}

TEST(ControlledProcess, EndpointMatchesConditioned) {
  auto f = fam("maj:n=3");
  const int runs = 200000;
  std::map<std::uint64_t, std::int64_t> counts;
  Rng rng = make_stream(35, {1});
  PiConfig c{1.0 / 3.0, 0.1};
  std::int64_t kept = 0;
  for (int r = 0; r < runs; ++r) {
    const PiRun run = run_controlled(*f, c, rng);
    if (run.clamped) continue;
    ++counts[run.y.endpoint().index()];
    ++kept;
  }
  EXPECT_LT(total_variation(counts, kept, uniform_on_ones(*f)), 0.01);
}

TEST(ControlledProcess, SerialEqualsParallelStats) {
  auto f = fam("maj:n=9");
  PiConfig c{1.0 / 9.0, 0.05, false, -1, 4};
  const StoppingStats a = stopping_stats(*f, c, 3000, Exec::kSerial);
  const StoppingStats b = stopping_stats(*f, c, 3000, Exec::kParallel);
  EXPECT_EQ(a.p_early.value, b.p_early.value);
  EXPECT_EQ(a.mean_sum_z.value, b.mean_sum_z.value);
  EXPECT_EQ(a.mean_terminal_kl.value, b.mean_terminal_kl.value);
  EXPECT_THROW(stopping_stats(*fam("const:n=9,v=1"), c, 10), DomainError);
}

TEST(KLLedger, EntryBoundsAndTerminal) {
  for (const char* s : {"parity:n=4", "random:n=8,seed=7", "maj:n=5", "tribes:w=2"}) {
    auto f = fam(s);
    const int n = f->arity();
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
      const PiRun run = run_controlled(*f, PiConfig{2.0 / n, std::min(0.1, f->mean()), false, -1, seed});
      const KLAudit a = kl_ledger_audit(run, run.m);
      ASSERT_TRUE(a.entries_ok) << s;
      ASSERT_LE(a.max_z_over_eps_sq, 1.0 + 1e-12);
      ASSERT_EQ(a.terminal_kl, std::log2(1.0 / run.f_path[static_cast<std::size_t>(a.tau_prime - 1)]));
      bool any = false;
      for (const auto& e : ledger_for(run, run.m)) any = any || (e.controlled && e.t < a.tau_prime);
      if (!any) {
        ASSERT_EQ(a.sum_z, 0.0);
        ASSERT_EQ(a.kl_total, a.terminal_kl);
      }
    }
  }
}

TEST(KLLedger, ActiveEntries) {
  auto f = oracle::perturbed_parity(8, 5);
  double total_z = 0.0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const PiRun run = run_controlled(*f, PiConfig{0.5, 0.1, false, 4, seed});
    const KLAudit a = kl_ledger_audit(run, run.m);
    ASSERT_TRUE(a.entries_ok);
    ASSERT_LE(run.max_mixture_residual, 1e-12);
    total_z += a.sum_z;
  }
  EXPECT_GT(total_z, 0.0);
}

TEST(KLLedger, BhatiaDavis) {
  Rng rng = make_stream(36, {1});
  auto f = fam("random:n=8,seed=11");
  const double eps = 0.25;
  for (int q = 0; q < 500; ++q) {
    const PartialPoint y = oracle::random_partial(8, rng);
    if (f->cond_mean(y) <= 0.0) continue;
    const ZMoments z = z_moments(*f, y, eps);
    ASSERT_LE(z.variance, z.max_ratio_sq * z.mean + 1e-15);
    const double fy = f->cond_mean(y);
    if (f->max_abs_derivative(y, false) <= eps * fy) ASSERT_LE(z.variance, eps * eps * z.mean + 1e-15);
  }
}

TEST(KLExact, FrozenValues) {
  auto one = fam("const:n=3,v=1");
  const KLExact a = kl_exact_small_n(*one, 1.0 / 3.0, 0.5, fixed_inputs({0, 1, 2}, {1, 0, 0}, {0, 1, -1}), 2);
  EXPECT_EQ(a.kl, 0.0);
  auto and2 = fam("and:n=2");
  const KLExact b = kl_exact_small_n(*and2, 0.5, 0.25, fixed_inputs({0, 1}, {0, 0}, {1, 1}), 0);
  EXPECT_NEAR(b.kl, 2.0, 1e-12);
  EXPECT_NEAR(b.chain_rule, 2.0, 1e-12);
  EXPECT_NEAR(b.total_probability, 1.0, 1e-12);
}

TEST(KLExact, ChainRuleOnRandomInstances) {
  Rng rng = make_stream(37, {1});
  for (const char* s : {"maj:n=3", "parity:n=4", "random:n=6,seed=1", "random:n=8,seed=2,bias=0.7"}) {
    auto f = fam(s);
    const int n = f->arity();
    for (int q = 0; q < 30; ++q) {
      const double eps = static_cast<double>(1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n - 1))) / n;
      const PiInputs in = sample_pi_inputs(n, eps, rng);
      const int m = static_cast<int>(rng() % static_cast<std::uint64_t>(n + 1));
      const KLExact e = kl_exact_small_n(*f, eps, std::min(0.1, f->mean()), in, m);
      ASSERT_NEAR(e.kl, e.chain_rule, 1e-9) << s;
      ASSERT_NEAR(e.total_probability, 1.0, 1e-12) << s;
    }
  }
}

TEST(KLExact, ChainRuleWithActiveControl) {
  Rng rng = make_stream(40, {1});
  double step_kl = 0.0;
  for (int n : {6, 8}) {
    auto f = oracle::perturbed_parity(n, 5);
    for (int q = 0; q < 40; ++q) {
      const PiInputs in = sample_pi_inputs(n, 0.5, rng);
      const KLExact e = kl_exact_small_n(*f, 0.5, 0.1, in, n / 2);
      ASSERT_NEAR(e.kl, e.chain_rule, 1e-9);
      step_kl += e.expected_step_kl;
    }
  }
  EXPECT_GT(step_kl, 0.0);
}

TEST(KLExact, EnumerationCap) {
  auto f = fam("maj:n=17");
  Rng rng = make_stream(38, {1});
  const PiInputs in = sample_pi_inputs(17, 1.0 / 17.0, rng);
  EXPECT_THROW(kl_exact_small_n(*f, 1.0 / 17.0, 0.1, in, 0), std::length_error);
}

TEST(KLToMean, FrozenAndRandom) {
  EXPECT_EQ(kl_to_mean(0.0, 1.0), 1.0);
  EXPECT_EQ(kl_to_mean(1.0, 0.5), 1.0 / 16.0);
  EXPECT_THROW(kl_to_mean(1.0, 0.0), std::invalid_argument);
  Rng rng = make_stream(39, {1});
  for (int q = 0; q < 300; ++q) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const TruthTable t = oracle::random_table(n, rng);
    std::vector<double> g(t.size());
    double s = 0.0;
    for (auto& v : g) s += (v = uniform01(rng));
    for (auto& v : g) v /= s;
    EXPECT_TRUE(kl_to_mean_verify(t, g).holds);
  }
}

TEST(DefaultParameters, FrozenValues) {
  const auto p = default_parameters(0.3, 1.0, *fam("dict:n=10"));
  EXPECT_DOUBLE_EQ(p.epsilon, 0.1);
  EXPECT_EQ(p.m, 9);
  EXPECT_EQ(p.delta, 1.0 / 32.0);
  EXPECT_THROW(default_parameters(0.2, 1.0, *fam("dict:n=10")), DomainError);
}
