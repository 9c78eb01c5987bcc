#include "monoqkd/protocol.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>
#include <sstream>

#include "monoqkd/report_json.hpp"

using namespace monoqkd;

namespace {

ProtocolConfig config(const BipartiteBox& source, std::uint64_t rounds, std::uint64_t seed,
                      MonogamyFunction adversary = MonogamyFunction::ns(), double fraction = 0.5) {
  return {source, rounds, fraction, seed, adversary};
}

double chi_square_uniform(const std::array<std::uint64_t, 4>& counts) {
  double n = 0.0;
  for (auto c : counts) n += static_cast<double>(c);
  const double expected = n / 4.0;
  double chi = 0.0;
  for (auto c : counts) chi += (static_cast<double>(c) - expected) * (static_cast<double>(c) - expected) / expected;
  return chi;
}

// Upper 0.001 quantile of chi-square with 3 degrees of freedom.
constexpr double kChi2Df3P001 = 16.266;

}  // namespace

TEST(SampleRound, pr_box_support) {
  std::mt19937_64 rng(11);
  const auto box = pr_box(0.0);
  for (int i = 0; i < 20000; ++i) {
    const auto r = sample_round(box, rng);
    ASSERT_EQ(r.A ^ r.B, r.a & r.b);
  }
}

TEST(SampleRound, white_noise_uniform_outcomes_and_settings) {
  std::mt19937_64 rng(12);
  const auto box = white_noise_bipartite();
  std::array<std::uint64_t, 4> outcomes{};
  std::array<std::uint64_t, 4> settings{};
  for (int i = 0; i < 100000; ++i) {
    const auto r = sample_round(box, rng);
    ++outcomes[2 * r.A + r.B];
    ++settings[2 * r.a + r.b];
  }
  EXPECT_LT(chi_square_uniform(outcomes), kChi2Df3P001);
  EXPECT_LT(chi_square_uniform(settings), kChi2Df3P001);
}

TEST(SampleRound, conditional_frequencies) {
  std::mt19937_64 rng(13);
  const auto box = pr_box(0.3);
  std::array<std::uint64_t, 2> y0{};
  for (int i = 0; i < 200000; ++i) {
    const auto r = sample_round(box, rng);
    ++y0[r.B];
  }
  const double f = static_cast<double>(y0[0]) / 200000.0;
  EXPECT_NEAR(f, 0.8, 5.0 * std::sqrt(0.8 * 0.2 / 200000.0));
}

TEST(SampleRound, replay) {
  std::mt19937_64 r1(99);
  std::mt19937_64 r2(99);
  const auto box = isotropic_box(0.8);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(sample_round(box, r1), sample_round(box, r2));
}

TEST(RunProtocol, isotropic_estimate) {
  const auto rep = run_protocol(config(isotropic_box(0.85), 100000, 42));
  EXPECT_LT(std::abs(rep.beta_hat - 0.85), 5.0 * rep.beta_stderr);
  EXPECT_EQ(rep.estimation_rounds + rep.key_bits, 100000u);
  EXPECT_NEAR(static_cast<double>(rep.estimation_rounds), 50000.0, 5.0 * std::sqrt(25000.0));
  EXPECT_NEAR(rep.p_b_hat, 0.85, 5.0 * std::sqrt(0.85 * 0.15 / static_cast<double>(rep.key_bits)));
  ASSERT_TRUE(rep.verdict);
  EXPECT_EQ(rep.verdict->secure, secure(MonogamyFunction::ns(), rep.beta_hat).secure);
  EXPECT_DOUBLE_EQ(*rep.p_e_bound, max_eve_prob(MonogamyFunction::ns(), rep.beta_hat));
}

TEST(RunProtocol, pr_box_perfect) {
  const auto rep = run_protocol(config(pr_box(0.0), 1000, 5));
  EXPECT_EQ(rep.beta_hat, 1.0);
  EXPECT_EQ(rep.beta_stderr, 0.0);
  ASSERT_TRUE(rep.verdict);
  EXPECT_TRUE(rep.verdict->secure);
  EXPECT_DOUBLE_EQ(*rep.p_e_bound, 0.5);
  EXPECT_DOUBLE_EQ(*rep.key_rate_proxy, 1.0);
}

TEST(RunProtocol, below_threshold_insecure) {
  const auto rep = run_protocol(config(isotropic_box(0.80), 100000, 8));
  ASSERT_TRUE(rep.verdict);
  EXPECT_FALSE(rep.verdict->secure);
}

TEST(RunProtocol, out_of_range_under_qm) {
  const auto rep = run_protocol(config(pr_box(0.0), 1000, 5, MonogamyFunction::qm()));
  EXPECT_TRUE(rep.out_of_range);
  EXPECT_FALSE(rep.verdict);
  EXPECT_FALSE(rep.p_e_bound);
  EXPECT_EQ(to_json(rep)["verdict"], nullptr);
}

TEST(RunProtocol, config_validation) {
  EXPECT_THROW((void)run_protocol(config(pr_box(0.0), 99, 1)), DomainError);
  EXPECT_THROW((void)run_protocol(config(pr_box(0.0), 1000, 1, MonogamyFunction::ns(), 0.02)),
               DomainError);
  EXPECT_THROW((void)run_protocol(config(pr_box(0.0), 1000, 1, MonogamyFunction::ns(), 1.0)),
               DomainError);
}

TEST(RunProtocol, deterministic_across_threads) {
  const auto cfg = config(isotropic_box(0.87), 70000, 1234);
  const auto ref = to_json(run_protocol(cfg, 1)).dump();
  EXPECT_EQ(to_json(run_protocol(cfg, 1)).dump(), ref);
  for (unsigned t : {2u, 3u, 8u}) EXPECT_EQ(to_json(run_protocol(cfg, t)).dump(), ref) << t;
  EXPECT_NE(to_json(run_protocol(config(isotropic_box(0.87), 70000, 1235), 1)).dump(), ref);
}

TEST(RunProtocol, estimator_consistency_over_seeds) {
  int inside = 0;
  const double beta = 0.84;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto rep = run_protocol(config(isotropic_box(beta), 10000, seed));
    const double sigma = std::sqrt(beta * (1 - beta) / static_cast<double>(rep.estimation_rounds));
    if (std::abs(rep.beta_hat - beta) < 5.0 * sigma) ++inside;
  }
  EXPECT_GE(inside, 99);
}

TEST(RunProtocol, stderr_scaling) {
  std::array<double, 3> se{};
  int k = 0;
  for (std::uint64_t rounds : {2000u, 20000u, 200000u}) {
    se[k++] = run_protocol(config(isotropic_box(0.85), rounds, 77)).beta_stderr;
  }
  for (int i = 0; i < 2; ++i) {
    const double ratio = se[i] / se[i + 1];
    EXPECT_NEAR(ratio / std::sqrt(10.0), 1.0, 0.2);
  }
}

TEST(SimulateAttack, ns_at_point_nine) {
  const auto rep = simulate_attack(config(isotropic_box(0.9), 100000, 3));
  ASSERT_TRUE(rep.attack);
  EXPECT_NEAR(rep.attack->procedure(0, 0), 0.7, 1e-4);
  EXPECT_LT(std::abs(rep.attack->eve_rate - 0.7), 5.0 * rep.attack->eve_stderr);
  EXPECT_TRUE(rep.attack->within_bound);
  EXPECT_EQ(rep.attack->attacked_rounds, rep.key_bits);
}

TEST(SimulateAttack, qm_at_tsirelson) {
  const auto rep =
      simulate_attack(config(isotropic_box(kTsirelson), 100000, 4, MonogamyFunction::qm()));
  ASSERT_TRUE(rep.attack);
  EXPECT_LT(std::abs(rep.attack->eve_rate - 0.5), 5.0 * rep.attack->eve_stderr);
}

TEST(SimulateAttack, random_guess) {
  const auto rep = simulate_attack(config(isotropic_box(0.9), 50000, 5), EveProcedure::uniform(0.5));
  EXPECT_LT(std::abs(rep.attack->eve_rate - 0.5), 5.0 * rep.attack->eve_stderr);
  // Eve's extra draw does not disturb the honest statistics.
  const auto honest = run_protocol(config(isotropic_box(0.9), 50000, 5));
  EXPECT_EQ(rep.beta_hat, honest.beta_hat);
}

TEST(DumpRounds, matches_report) {
  const auto cfg = config(isotropic_box(0.85), 20000, 21);
  std::ostringstream csv;
  dump_rounds_csv(cfg, csv);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "a,b,A,B,is_estimation");
  std::uint64_t rows = 0;
  std::uint64_t est = 0;
  std::uint64_t wins = 0;
  while (std::getline(in, line)) {
    ++rows;
    const int a = line[0] - '0';
    const int b = line[2] - '0';
    const int A = line[4] - '0';
    const int B = line[6] - '0';
    if (line[8] == '1') {
      ++est;
      if ((A ^ B) == (a & b)) ++wins;
    }
  }
  const auto rep = run_protocol(cfg);
  EXPECT_EQ(rows, 20000u);
  EXPECT_EQ(est, rep.estimation_rounds);
  EXPECT_DOUBLE_EQ(static_cast<double>(wins) / static_cast<double>(est), rep.beta_hat);
}
