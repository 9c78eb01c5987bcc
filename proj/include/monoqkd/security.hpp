#pragma once

/// \file
/// Reduction from an eavesdropping procedure to a CHSH strategy for Eve, and
/// the resulting security verdict P_B > P_E under a monogamy relation.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "monoqkd/errors.hpp"
#include "monoqkd/monogamy.hpp"

namespace monoqkd {

/// Eve's device: guess[i][j] is the probability that its output G equals
/// Alice's outcome when Eve inputs i and Alice's setting is j.
class EveProcedure {
 public:
  using Matrix = std::array<std::array<double, 2>, 2>;

  explicit EveProcedure(const Matrix& guess) : guess_(guess) {
    for (const auto& row : guess_)
      for (double v : row)
        if (!(v >= 0.0 && v <= 1.0)) {
          throw DomainError("procedure entries must lie in [0, 1], got " + std::to_string(v));
        }
  }

  static EveProcedure uniform(double p) { return EveProcedure({{{p, p}, {p, p}}}); }

  double operator()(int input, int alice_setting) const { return guess_[input & 1][alice_setting & 1]; }
  const Matrix& matrix() const { return guess_; }

 private:
  Matrix guess_;
};

enum class OutputRule { Guess, GuessXorSetting };

inline const char* to_string(OutputRule rule) {
  return rule == OutputRule::Guess ? "E=G" : "E=G^e";
}

struct EveStrategy {
  int input_choice;
  OutputRule output_rule;
  double achieved_beta_ae;
};

struct SecurityVerdict {
  double p_b;
  double p_e_max;
  double margin;
  bool secure;
  CriticalBeta critical_beta;
};

/// Bob guesses A = B xor ab, which is right with probability beta(A,B).
inline double bob_guess_prob(double beta_ab) {
  if (!(beta_ab >= 0.5 && beta_ab <= 1.0)) {
    throw DomainError("beta(A,B) must lie in [1/2, 1], got " + std::to_string(beta_ab));
  }
  return beta_ab;
}

/// While eavesdropping Eve always inputs Alice's announced setting.
inline double eve_guess_prob(const EveProcedure& proc) { return 0.5 * (proc(0, 0) + proc(1, 1)); }

/// Turns the procedure into a CHSH player. If P00 >= P11 Eve always inputs 0
/// and outputs G; otherwise she inputs 1 and outputs G xor e. Either way
/// beta(A,E) = P_ii / 2 + 1/4 >= P_E / 2 + 1/4.
inline EveStrategy strategy_from_procedure(const EveProcedure& proc) {
  if (proc(0, 0) >= proc(1, 1)) return {0, OutputRule::Guess, 0.5 * proc(0, 0) + 0.25};
  return {1, OutputRule::GuessXorSetting, 0.5 * proc(1, 1) + 0.25};
}

inline double eve_chsh_lower_bound(double p_e) {
  if (!(p_e >= 0.0 && p_e <= 1.0)) {
    throw DomainError("P_E must lie in [0, 1], got " + std::to_string(p_e));
  }
  return 0.5 * p_e + 0.25;
}

/// Largest P_E compatible with f: P_E <= 2 f(beta) - 1/2, clamped to [0, 1].
inline double max_eve_prob(const MonogamyFunction& f, double beta_ab) {
  return std::clamp(2.0 * f(beta_ab) - 0.5, 0.0, 1.0);
}

inline SecurityVerdict secure(const MonogamyFunction& f, double beta_ab) {
  const double p_b = bob_guess_prob(beta_ab);
  const double p_e = max_eve_prob(f, beta_ab);
  return {p_b, p_e, p_b - p_e, p_b > p_e, critical_beta(f)};
}

inline double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("binary entropy argument must lie in [0, 1], got " + std::to_string(x));
  }
  const auto term = [](double v) { return v > 0.0 ? -v * std::log2(v) : 0.0; };
  return term(x) + term(1.0 - x);
}

/// h(P_E) - h(P_B). A diagnostic only; the verdict uses P_B > P_E.
inline double key_rate_proxy(double p_b, double p_e) {
  if (!(p_b >= 0.5 && p_b <= 1.0 && p_e >= 0.5 && p_e <= 1.0)) {
    throw DomainError("key_rate_proxy needs P_B, P_E in [1/2, 1]");
  }
  return binary_entropy(p_e) - binary_entropy(p_b);
}

}  // namespace monoqkd
