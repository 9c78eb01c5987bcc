#pragma once

/// \file
/// Independent oracles for the analytic results: an LP over the tripartite
/// no-signaling polytope that maximises beta(A,E) given beta(A,B) >= b, the
/// classical CHSH bound by enumeration, and a grid search for Eve's best
/// procedure under a monogamy relation.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "monoqkd/boxes.hpp"
#include "monoqkd/grid.hpp"
#include "monoqkd/monogamy.hpp"
#include "monoqkd/security.hpp"
#include "monoqkd/simplex.hpp"

namespace monoqkd {

inline constexpr double kLpTolerance = 1e-7;

namespace detail {

template <typename T>
std::vector<T> zero_row() {
  return std::vector<T>(TripartiteBox::kSize, T(0));
}

inline std::size_t tri_index(int a, int b, int e, int A, int B, int E) {
  return TripartiteBox::index({a, b, e}, {A, B, E});
}

// Places a pair's (setting, outcome) bits and the third party's into A,B,E slots.
inline std::size_t tri_index_for(PartyPair pair, int x, int y, int z, int X, int Y, int Z) {
  switch (pair) {
    case PartyPair::AB: return tri_index(x, y, z, X, Y, Z);
    case PartyPair::AE: return tri_index(x, z, y, X, Z, Y);
    case PartyPair::BE: return tri_index(z, x, y, Z, X, Y);
  }
  return 0;
}

/// CHSH functional on `pair` as a linear form over the 64 box entries, read
/// at third-party setting 0.
template <typename T>
std::vector<T> chsh_form(PartyPair pair) {
  auto row = zero_row<T>();
  const T quarter = T(1) / T(4);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int X = 0; X < 2; ++X)
        for (int Z = 0; Z < 2; ++Z) row[tri_index_for(pair, x, y, 0, X, X ^ (x & y), Z)] += quarter;
  return row;
}

}  // namespace detail

/// maximize beta(A,E) over no-signaling tripartite boxes with beta(A,B) >= b.
///
/// Constraints: normalisation of every setting row; each two-party marginal
/// independent of the third party's setting; each one-party marginal
/// independent of the other two settings (implied by the previous family,
/// kept as redundant rows).
template <typename T>
lp::LinearProgram<T> ns_tradeoff_program(const T& min_beta_ab) {
  using detail::tri_index;
  using detail::tri_index_for;
  lp::LinearProgram<T> prog(TripartiteBox::kSize);
  prog.objective = detail::chsh_form<T>(PartyPair::AE);

  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int e = 0; e < 2; ++e) {
        auto row = detail::zero_row<T>();
        for (int o = 0; o < 8; ++o) row[tri_index(a, b, e, o >> 2, (o >> 1) & 1, o & 1)] = T(1);
        prog.add(std::move(row), lp::Sense::Equal, T(1));
      }

  for (PartyPair pair : {PartyPair::AB, PartyPair::AE, PartyPair::BE})
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y)
        for (int X = 0; X < 2; ++X)
          for (int Y = 0; Y < 2; ++Y) {
            auto row = detail::zero_row<T>();
            for (int Z = 0; Z < 2; ++Z) {
              row[tri_index_for(pair, x, y, 0, X, Y, Z)] += T(1);
              row[tri_index_for(pair, x, y, 1, X, Y, Z)] -= T(1);
            }
            prog.add(std::move(row), lp::Sense::Equal, T(0));
          }

  // Single-party marginals: setting pair (u, v) of the others against (0, 0).
  for (int party = 0; party < 3; ++party)
    for (int s = 0; s < 2; ++s)
      for (int out = 0; out < 2; ++out)
        for (int others = 1; others < 4; ++others) {
          auto row = detail::zero_row<T>();
          for (int rest = 0; rest < 4; ++rest) {
            std::array<int, 3> s0{};
            std::array<int, 3> s1{};
            std::array<int, 3> o{};
            int k = 0;
            for (int q = 0; q < 3; ++q) {
              if (q == party) {
                s0[q] = s1[q] = s;
                o[q] = out;
              } else {
                s0[q] = 0;
                s1[q] = (others >> (1 - k)) & 1;
                o[q] = (rest >> (1 - k)) & 1;
                ++k;
              }
            }
            row[TripartiteBox::index(s0, o)] += T(1);
            row[TripartiteBox::index(s1, o)] -= T(1);
          }
          prog.add(std::move(row), lp::Sense::Equal, T(0));
        }

  prog.add(detail::chsh_form<T>(PartyPair::AB), lp::Sense::GreaterEqual, min_beta_ab);
  return prog;
}

struct LPResult {
  lp::Status status;
  double optimum;
  std::optional<TripartiteBox> argmax;
  std::size_t pivots;
};

inline LPResult max_chsh_ae_given_ab(double b) {
  if (!(b >= 0.5 && b <= 1.0)) {
    throw DomainError("beta(A,B) lower bound must lie in [1/2, 1], got " + std::to_string(b));
  }
  const auto sol = lp::solve(ns_tradeoff_program<double>(b));
  LPResult out{sol.status, sol.optimum, std::nullopt, sol.pivots};
  if (sol.status == lp::Status::Optimal) {
    std::vector<double> t(sol.x);
    for (double& v : t)
      if (v < 0.0 && v > -kLpTolerance) v = 0.0;
    out.argmax = TripartiteBox::from_table(t);
  }
  return out;
}

/// No-signaling trade-off: beta(A,E) <= 3/2 - beta(A,B).
inline double ns_tradeoff_bound(double b) { return 1.5 - b; }

struct TightnessRow {
  double b;
  double lp_optimum;
  double analytic_bound;
  double abs_error;
  bool pass;
};

/// LP optimum against 3/2 - b on the grid from..to (default [3/4, 1]).
inline std::vector<TightnessRow> verify_ns_monogamy_tightness(double grid_step, double from = 0.75,
                                                              double to = 1.0,
                                                              double tolerance = 1e-6) {
  if (!(grid_step > 0.0 && grid_step <= 0.1)) {
    throw DomainError("grid step must lie in (0, 0.1]");
  }
  if (!(from >= 0.5 && to <= 1.0 && from <= to)) throw DomainError("grid must lie in [1/2, 1]");
  std::vector<TightnessRow> rows;
  for (double b : step_grid(from, to, grid_step)) {
    const auto res = max_chsh_ae_given_ab(b);
    const double bound = ns_tradeoff_bound(b);
    const double err = res.status == lp::Status::Optimal ? std::abs(res.optimum - bound)
                                                         : std::numeric_limits<double>::infinity();
    rows.push_back({b, res.optimum, bound, err, err < tolerance});
  }
  return rows;
}

/// CHSH values of all 16 local deterministic strategies, indexed
/// x_out[0] | x_out[1] << 1 | y_out[0] << 2 | y_out[1] << 3.
inline std::array<double, 16> classical_strategy_values() {
  std::array<double, 16> values{};
  for (int k = 0; k < 16; ++k) {
    values[k] = chsh_value(deterministic_box({k & 1, (k >> 1) & 1}, {(k >> 2) & 1, (k >> 3) & 1}));
  }
  return values;
}

inline double brute_force_classical_bound() {
  const auto v = classical_strategy_values();
  return *std::max_element(v.begin(), v.end());
}

struct ProcedureSearch {
  EveProcedure procedure;
  double p_e;
};

/// Grid search over symmetric procedures P00 = P11 = t for the largest t
/// whose induced beta(A,E) = t/2 + 1/4 stays within f(beta_ab). Off-diagonal
/// entries are uninformative (1/2); they do not enter P_E.
inline ProcedureSearch best_procedure_under_monogamy(const MonogamyFunction& f, double beta_ab,
                                                     double search_step) {
  if (!(search_step > 0.0 && search_step <= 0.1)) {
    throw DomainError("search step must lie in (0, 0.1]");
  }
  const double cap = f(beta_ab);
  double best = 0.0;
  for (double t : step_grid(0.0, 1.0, search_step)) {
    if (strategy_from_procedure(EveProcedure({{{t, 0.5}, {0.5, t}}})).achieved_beta_ae <= cap + 1e-12) {
      best = t;
    }
  }
  return {EveProcedure({{{best, 0.5}, {0.5, best}}}), best};
}

}  // namespace monoqkd
