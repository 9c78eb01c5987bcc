#include "monoqkd/security.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace monoqkd;

namespace {

// Eve plays CHSH with fixed input `i` to her device and output rule `rule`.
// For each (a, e) the winning event is A xor E = a e; P(G = A | a) = P[i][a].
double brute_force_beta_ae(const EveProcedure& proc, int i, OutputRule rule) {
  double total = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int e = 0; e < 2; ++e) {
      const int shift = rule == OutputRule::GuessXorSetting ? e : 0;  // E = G xor shift
      // A xor E = (A xor G) xor shift must equal a e.
      const bool need_match = ((a & e) ^ shift) == 0;
      total += need_match ? proc(i, a) : 1.0 - proc(i, a);
    }
  return total / 4.0;
}

// Series h(x) = 1 - (1/(2 ln 2)) sum_n (1-2x)^(2n) / (n (2n-1)).
double entropy_series(double x) {
  const double z = 1.0 - 2.0 * x;
  double sum = 0.0;
  double zp = 1.0;
  for (int n = 1; n < 2000; ++n) {
    zp *= z * z;
    sum += zp / (n * (2.0 * n - 1.0));
  }
  return 1.0 - sum / (2.0 * std::log(2.0));
}

}  // namespace

TEST(BobGuess, identity) {
  EXPECT_EQ(bob_guess_prob(0.85), 0.85);
  EXPECT_EQ(bob_guess_prob(0.5), 0.5);
  EXPECT_EQ(bob_guess_prob(1.0), 1.0);
  EXPECT_THROW((void)bob_guess_prob(0.4), DomainError);
}

TEST(EveGuess, values) {
  EXPECT_NEAR(eve_guess_prob(EveProcedure({{{0.9, 0.6}, {0.4, 0.7}}})), 0.8, 1e-15);
  EXPECT_EQ(eve_guess_prob(EveProcedure::uniform(0.5)), 0.5);
  EXPECT_EQ(eve_guess_prob(EveProcedure::uniform(1.0)), 1.0);
  EXPECT_THROW(EveProcedure({{{1.2, 0.0}, {0.0, 0.0}}}), DomainError);
}

TEST(Strategy, paper_cases) {
  const auto s1 = strategy_from_procedure(EveProcedure({{{0.9, 0.6}, {0.4, 0.7}}}));
  EXPECT_EQ(s1.input_choice, 0);
  EXPECT_EQ(s1.output_rule, OutputRule::Guess);
  EXPECT_NEAR(s1.achieved_beta_ae, 0.7, 1e-15);

  const auto s2 = strategy_from_procedure(EveProcedure({{{0.6, 0.3}, {0.2, 0.8}}}));
  EXPECT_EQ(s2.input_choice, 1);
  EXPECT_EQ(s2.output_rule, OutputRule::GuessXorSetting);
  EXPECT_NEAR(s2.achieved_beta_ae, 0.65, 1e-15);

  EXPECT_DOUBLE_EQ(strategy_from_procedure(EveProcedure::uniform(1.0)).achieved_beta_ae, 0.75);
}

TEST(Strategy, tie_uses_first_case) {
  const auto s = strategy_from_procedure(EveProcedure({{{0.7, 0.1}, {0.9, 0.7}}}));
  EXPECT_EQ(s.input_choice, 0);
  EXPECT_EQ(s.output_rule, OutputRule::Guess);
}

TEST(Strategy, reduction_on_grid) {
  // 0.05 grid over [0,1]^4: closed form equals the brute-force rows and
  // satisfies beta_AE >= P_E/2 + 1/4 with equality iff P00 = P11.
  for (int i00 = 0; i00 <= 20; ++i00)
    for (int i01 = 0; i01 <= 20; ++i01)
      for (int i10 = 0; i10 <= 20; ++i10)
        for (int i11 = 0; i11 <= 20; ++i11) {
          const EveProcedure proc({{{0.05 * i00, 0.05 * i01}, {0.05 * i10, 0.05 * i11}}});
          const auto s = strategy_from_procedure(proc);
          ASSERT_NEAR(s.achieved_beta_ae, brute_force_beta_ae(proc, s.input_choice, s.output_rule),
                      1e-12);
          ASSERT_NEAR(s.achieved_beta_ae, 0.5 * proc(s.input_choice, s.input_choice) + 0.25, 1e-12);
          const double lower = eve_chsh_lower_bound(eve_guess_prob(proc));
          ASSERT_GE(s.achieved_beta_ae, lower - 1e-15);
          ASSERT_EQ(std::abs(s.achieved_beta_ae - lower) < 1e-12, i00 == i11);
        }
}

TEST(EveLowerBound, values) {
  EXPECT_EQ(eve_chsh_lower_bound(1.0), 0.75);
  EXPECT_EQ(eve_chsh_lower_bound(0.5), 0.5);
  EXPECT_NEAR(eve_chsh_lower_bound(5.0 / 6.0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(eve_chsh_lower_bound(5.0 / 6.0), mono_ns(5.0 / 6.0), 1e-15);
  EXPECT_THROW((void)eve_chsh_lower_bound(1.5), DomainError);
}

TEST(MaxEveProb, values) {
  const auto ns = MonogamyFunction::ns();
  EXPECT_DOUBLE_EQ(max_eve_prob(ns, 1.0), 0.5);
  EXPECT_NEAR(max_eve_prob(ns, 5.0 / 6.0), 5.0 / 6.0, 1e-15);
  EXPECT_NEAR(max_eve_prob(ns, 0.9), 0.7, 1e-15);
  EXPECT_THROW((void)max_eve_prob(MonogamyFunction::qm(), 0.9), OutOfTheoryRange);
}

TEST(MaxEveProb, non_increasing) {
  for (const auto& f : {MonogamyFunction::ns(), MonogamyFunction::qm(), MonogamyFunction::pnorm(1.1)}) {
    double prev = 2.0;
    for (double b = 0.5; b <= f.domain_upper(); b += 1e-3) {
      const double v = max_eve_prob(f, b);
      EXPECT_LE(v, prev + 1e-15);
      prev = v;
    }
  }
}

TEST(Secure, examples) {
  const auto v = secure(MonogamyFunction::ns(), 0.9);
  EXPECT_TRUE(v.secure);
  EXPECT_NEAR(v.margin, 0.2, 1e-12);
  EXPECT_EQ(v.p_b, 0.9);
  EXPECT_NEAR(v.critical_beta.beta(), 5.0 / 6.0, 1e-10);
  EXPECT_FALSE(secure(MonogamyFunction::ns(), 0.8).secure);
  EXPECT_TRUE(secure(MonogamyFunction::qm(), 0.82).secure);
  EXPECT_THROW((void)secure(MonogamyFunction::qm(), 0.86), OutOfTheoryRange);
}

TEST(Secure, threshold_equivalence_and_monotone_margin) {
  for (const auto& f : {MonogamyFunction::ns(), MonogamyFunction::qm(), MonogamyFunction::pnorm(1.1)}) {
    const double crit = critical_beta(f).beta();
    double prev_margin = -2.0;
    for (double b = 0.5; b <= f.domain_upper(); b += 1e-3) {
      const auto v = secure(f, b);
      EXPECT_EQ(v.secure, v.margin > 0);
      if (std::abs(b - crit) > 1e-9) { EXPECT_EQ(v.secure, b > crit) << f.name() << " " << b; }
      EXPECT_GE(v.margin, prev_margin);
      prev_margin = v.margin;
    }
  }
}

TEST(BinaryEntropy, values) {
  EXPECT_DOUBLE_EQ(binary_entropy(0.5), 1.0);
  EXPECT_EQ(binary_entropy(0.0), 0.0);
  EXPECT_EQ(binary_entropy(1.0), 0.0);
  EXPECT_NEAR(binary_entropy(0.11), entropy_series(0.11), 1e-12);
  EXPECT_NEAR(binary_entropy(0.11), 0.4999159582, 1e-9);
  for (double x : {0.05, 0.2, 0.37, 0.5, 0.81}) EXPECT_NEAR(binary_entropy(x), entropy_series(x), 1e-12);
  EXPECT_THROW((void)binary_entropy(-0.1), DomainError);
}

TEST(KeyRateProxy, values) {
  EXPECT_EQ(key_rate_proxy(0.8, 0.8), 0.0);
  EXPECT_DOUBLE_EQ(key_rate_proxy(1.0, 0.5), 1.0);
  EXPECT_NEAR(key_rate_proxy(0.9, 0.7), binary_entropy(0.7) - binary_entropy(0.9), 1e-15);
  EXPECT_NEAR(key_rate_proxy(0.9, 0.7), 0.41229, 1e-5);
  EXPECT_THROW((void)key_rate_proxy(0.4, 0.7), DomainError);
}
