#pragma once

/// \file
/// Monte Carlo simulation of the CHSH key-distribution protocol: random
/// settings per round, a Bernoulli-chosen estimation subset announced in full,
/// and Alice's outcomes on the remaining rounds as key bits.
///
/// Streams: rounds are cut into fixed blocks of kBlockRounds. Block k uses its
/// own std::mt19937_64 seeded with std::seed_seq{seed_lo, seed_hi, k_lo, k_hi}
/// and draws exactly four 64-bit words per round (settings, estimation flag,
/// outcome, Eve's guess). Results are therefore identical for any thread
/// count and across standard libraries.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <thread>
#include <vector>

#include "monoqkd/attack_opt.hpp"
#include "monoqkd/boxes.hpp"
#include "monoqkd/monogamy.hpp"
#include "monoqkd/security.hpp"

namespace monoqkd {

inline constexpr std::uint64_t kBlockRounds = 8192;

struct ProtocolConfig {
  BipartiteBox source;
  std::uint64_t rounds;
  double estimation_fraction;
  std::uint64_t seed;
  MonogamyFunction adversary;

  void validate() const {
    if (rounds < 100) throw DomainError("protocol needs at least 100 rounds");
    if (!(estimation_fraction > 0.0 && estimation_fraction < 1.0)) {
      throw DomainError("estimation fraction must lie in (0, 1)");
    }
    if (estimation_fraction * static_cast<double>(rounds) < 30.0) {
      throw DomainError("estimation fraction yields fewer than 30 expected estimation rounds");
    }
  }
};

struct RoundRecord {
  int a;
  int b;
  int A;
  int B;
  bool is_estimation;

  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

struct AttackReport {
  EveProcedure procedure;
  std::uint64_t attacked_rounds;
  double eve_rate;
  double eve_stderr;
  bool within_bound;  // eve_rate <= p_e_bound + 5 stderr
};

struct SimulationReport {
  ProtocolConfig config;
  std::uint64_t estimation_rounds;
  double beta_hat;
  double beta_stderr;
  double p_b_hat;
  std::uint64_t key_bits;
  bool out_of_range;  // beta_hat outside the adversary's domain
  std::optional<double> p_e_bound;
  std::optional<SecurityVerdict> verdict;
  std::optional<double> key_rate_proxy;
  std::optional<AttackReport> attack;
};

namespace detail {

inline double unit_interval(std::uint64_t word) {
  return static_cast<double>(word >> 11) * 0x1.0p-53;
}

inline std::mt19937_64 block_engine(std::uint64_t seed, std::uint64_t block) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
  return std::mt19937_64(seq);
}

struct Tally {
  std::uint64_t estimation = 0;
  std::uint64_t estimation_wins = 0;
  std::uint64_t key = 0;
  std::uint64_t bob_correct = 0;
  std::uint64_t eve_correct = 0;

  Tally& operator+=(const Tally& o) {
    estimation += o.estimation;
    estimation_wins += o.estimation_wins;
    key += o.key;
    bob_correct += o.bob_correct;
    eve_correct += o.eve_correct;
    return *this;
  }
};

// Draws the outcome pair from the conditional distribution at (a, b).
inline void draw_outcomes(const BipartiteBox& box, int a, int b, double u, int& A, int& B) {
  double acc = 0.0;
  for (int o = 0; o < 4; ++o) {
    acc += box(a, b, o >> 1, o & 1);
    if (u < acc || o == 3) {
      A = o >> 1;
      B = o & 1;
      return;
    }
  }
}

}  // namespace detail

/// One protocol round: uniform independent settings, outcomes from the box.
/// Consumes two words of `rng`.
template <typename Engine>
RoundRecord sample_round(const BipartiteBox& box, Engine& rng) {
  const std::uint64_t bits = rng();
  RoundRecord r{static_cast<int>(bits & 1), static_cast<int>((bits >> 1) & 1), 0, 0, false};
  detail::draw_outcomes(box, r.a, r.b, detail::unit_interval(rng()), r.A, r.B);
  return r;
}

namespace detail {

// Visits every round of block `block` in order. `visit(record, eve_u)`.
template <typename Visitor>
void for_each_round_in_block(const ProtocolConfig& cfg, std::uint64_t block, Visitor&& visit) {
  auto rng = block_engine(cfg.seed, block);
  const std::uint64_t begin = block * kBlockRounds;
  const std::uint64_t end = std::min(cfg.rounds, begin + kBlockRounds);
  for (std::uint64_t i = begin; i < end; ++i) {
    const std::uint64_t bits = rng();
    const bool est = unit_interval(rng()) < cfg.estimation_fraction;
    RoundRecord r{static_cast<int>(bits & 1), static_cast<int>((bits >> 1) & 1), 0, 0, est};
    draw_outcomes(cfg.source, r.a, r.b, unit_interval(rng()), r.A, r.B);
    const double eve_u = unit_interval(rng());
    visit(r, eve_u);
  }
}

inline Tally run_block(const ProtocolConfig& cfg, std::uint64_t block,
                       const std::optional<EveProcedure>& eve) {
  Tally t;
  for_each_round_in_block(cfg, block, [&](const RoundRecord& r, double eve_u) {
    if (r.is_estimation) {
      ++t.estimation;
      if ((r.A ^ r.B) == (r.a & r.b)) ++t.estimation_wins;
      return;
    }
    ++t.key;
    if ((r.B ^ (r.a & r.b)) == r.A) ++t.bob_correct;
    if (eve && eve_u < (*eve)(r.a, r.a)) ++t.eve_correct;
  });
  return t;
}

inline Tally run_all_blocks(const ProtocolConfig& cfg, const std::optional<EveProcedure>& eve,
                            unsigned threads) {
  const std::uint64_t blocks = (cfg.rounds + kBlockRounds - 1) / kBlockRounds;
  std::vector<Tally> per_block(blocks);
  threads = std::max(1u, threads);
  if (threads == 1 || blocks == 1) {
    for (std::uint64_t k = 0; k < blocks; ++k) per_block[k] = run_block(cfg, k, eve);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::uint64_t k = w; k < blocks; k += threads) per_block[k] = run_block(cfg, k, eve);
      });
    }
  }
  Tally total;
  for (const auto& t : per_block) total += t;
  return total;
}

inline SimulationReport build_report(const ProtocolConfig& cfg, const Tally& t) {
  SimulationReport rep{cfg, t.estimation, 0.0, 0.0, 0.0, t.key, false, {}, {}, {}, {}};
  if (t.estimation > 0) {
    rep.beta_hat = static_cast<double>(t.estimation_wins) / static_cast<double>(t.estimation);
    rep.beta_stderr =
        std::sqrt(rep.beta_hat * (1.0 - rep.beta_hat) / static_cast<double>(t.estimation));
  }
  if (t.key > 0) rep.p_b_hat = static_cast<double>(t.bob_correct) / static_cast<double>(t.key);
  const auto& f = cfg.adversary;
  if (rep.beta_hat < f.domain_lower() || rep.beta_hat > f.domain_upper()) {
    rep.out_of_range = true;
    return rep;
  }
  rep.verdict = secure(f, rep.beta_hat);
  rep.p_e_bound = rep.verdict->p_e_max;
  rep.key_rate_proxy = key_rate_proxy(rep.verdict->p_b, std::max(0.5, rep.verdict->p_e_max));
  return rep;
}

}  // namespace detail

inline SimulationReport run_protocol(const ProtocolConfig& cfg, unsigned threads = 1) {
  cfg.validate();
  return detail::build_report(cfg, detail::run_all_blocks(cfg, std::nullopt, threads));
}

/// Runs the protocol with Eve holding `proc`: on every key round her guess is
/// right with probability proc(a, a).
inline SimulationReport simulate_attack(const ProtocolConfig& cfg, const EveProcedure& proc,
                                        unsigned threads = 1) {
  cfg.validate();
  const auto t = detail::run_all_blocks(cfg, proc, threads);
  auto rep = detail::build_report(cfg, t);
  AttackReport atk{proc, t.key, 0.0, 0.0, false};
  if (t.key > 0) {
    atk.eve_rate = static_cast<double>(t.eve_correct) / static_cast<double>(t.key);
    atk.eve_stderr = std::sqrt(atk.eve_rate * (1.0 - atk.eve_rate) / static_cast<double>(t.key));
  }
  atk.within_bound = rep.p_e_bound && atk.eve_rate <= *rep.p_e_bound + 5.0 * atk.eve_stderr;
  rep.attack = atk;
  return rep;
}

/// Eve uses the best procedure the adversary's monogamy allows at the
/// source's true CHSH value.
inline SimulationReport simulate_attack(const ProtocolConfig& cfg, unsigned threads = 1) {
  const auto best = best_procedure_under_monogamy(cfg.adversary, chsh_value(cfg.source), 1e-4);
  return simulate_attack(cfg, best.procedure, threads);
}

/// Writes every round as CSV (a,b,A,B,is_estimation), in round order.
inline void dump_rounds_csv(const ProtocolConfig& cfg, std::ostream& out) {
  cfg.validate();
  out << "a,b,A,B,is_estimation\n";
  const std::uint64_t blocks = (cfg.rounds + kBlockRounds - 1) / kBlockRounds;
  for (std::uint64_t k = 0; k < blocks; ++k) {
    detail::for_each_round_in_block(cfg, k, [&](const RoundRecord& r, double) {
      out << r.a << ',' << r.b << ',' << r.A << ',' << r.B << ',' << (r.is_estimation ? 1 : 0)
          << '\n';
    });
  }
}

}  // namespace monoqkd
