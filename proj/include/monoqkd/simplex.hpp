#pragma once

/// \file
/// Dense two-phase tableau simplex for small linear programs
///
///   maximize  c.x   subject to  rows (<=, >=, =),  x >= 0.
///
/// Bland's rule is used for both entering and leaving variables, so the
/// method terminates on the heavily degenerate polytopes that box constraints
/// produce. The scalar type may be a floating type (pivot tolerance 1e-9) or
/// an exact type such as boost::multiprecision::cpp_rational (tolerance 0).

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace monoqkd::lp {

enum class Sense { LessEqual, GreaterEqual, Equal };

template <typename T>
struct Constraint {
  std::vector<T> coeffs;
  Sense sense;
  T rhs;
};

template <typename T>
struct LinearProgram {
  std::vector<T> objective;
  std::vector<Constraint<T>> constraints;

  explicit LinearProgram(std::size_t variables) : objective(variables, T(0)) {}

  std::size_t variables() const { return objective.size(); }

  void add(std::vector<T> coeffs, Sense sense, T rhs) {
    if (coeffs.size() != variables()) throw std::invalid_argument("constraint width mismatch");
    constraints.push_back({std::move(coeffs), sense, std::move(rhs)});
  }
};

enum class Status { Optimal, Infeasible, Unbounded };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
  }
  return "?";
}

template <typename T>
struct Solution {
  Status status = Status::Infeasible;
  T optimum = T(0);
  std::vector<T> x;
  std::size_t pivots = 0;
};

namespace detail {

template <typename T>
T abs_value(const T& v) {
  return v < T(0) ? T(-v) : v;
}

template <typename T>
T pivot_tolerance() {
  if constexpr (std::numeric_limits<T>::is_exact) {
    return T(0);
  } else {
    return T(1e-9);
  }
}

template <typename T>
T feasibility_tolerance() {
  if constexpr (std::numeric_limits<T>::is_exact) {
    return T(0);
  } else {
    return T(1e-7);
  }
}

template <typename T>
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * (cols + 1), T(0)), basis_(rows, 0) {}

  T& at(std::size_t r, std::size_t c) { return a_[r * (cols_ + 1) + c]; }
  const T& at(std::size_t r, std::size_t c) const { return a_[r * (cols_ + 1) + c]; }
  T& rhs(std::size_t r) { return at(r, cols_); }
  const T& rhs(std::size_t r) const { return at(r, cols_); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<std::size_t>& basis() { return basis_; }

  // Reduced-cost row: z = z0 + sum_j cost[j] x_j over nonbasic j.
  void set_objective(const std::vector<T>& costs) {
    cost_ = costs;
    z0_ = T(0);
    for (std::size_t r = 0; r < rows_; ++r) {
      const T cb = cost_[basis_[r]];
      if (cb == T(0)) continue;
      for (std::size_t c = 0; c < cols_; ++c) cost_[c] -= cb * at(r, c);
      z0_ += cb * rhs(r);
    }
  }

  const T& objective_value() const { return z0_; }

  void pivot(std::size_t pr, std::size_t pc) {
    const T inv = T(1) / at(pr, pc);
    for (std::size_t c = 0; c <= cols_; ++c) at(pr, c) *= inv;
    at(pr, pc) = T(1);
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r == pr) continue;
      const T factor = at(r, pc);
      if (factor == T(0)) continue;
      for (std::size_t c = 0; c <= cols_; ++c) at(r, c) -= factor * at(pr, c);
      at(r, pc) = T(0);
    }
    const T cf = cost_[pc];
    if (cf != T(0)) {
      for (std::size_t c = 0; c < cols_; ++c) cost_[c] -= cf * at(pr, c);
      z0_ += cf * rhs(pr);
      cost_[pc] = T(0);
    }
    basis_[pr] = pc;
    ++pivots_;
  }

  /// Runs Bland-rule iterations over columns [0, allowed). Returns false if
  /// the objective is unbounded.
  bool optimize(std::size_t allowed) {
    const T eps = pivot_tolerance<T>();
    for (;;) {
      std::size_t enter = allowed;
      for (std::size_t c = 0; c < allowed; ++c) {
        if (cost_[c] > eps) {
          enter = c;
          break;
        }
      }
      if (enter == allowed) return true;
      std::size_t leave = rows_;
      T best_ratio = T(0);
      for (std::size_t r = 0; r < rows_; ++r) {
        if (!(at(r, enter) > eps)) continue;
        const T ratio = rhs(r) / at(r, enter);
        if (leave == rows_ || ratio < best_ratio ||
            (ratio == best_ratio && basis_[r] < basis_[leave])) {
          leave = r;
          best_ratio = ratio;
        }
      }
      if (leave == rows_) return false;
      pivot(leave, enter);
    }
  }

  void drop_row(std::size_t r) {
    const std::size_t width = cols_ + 1;
    a_.erase(a_.begin() + static_cast<std::ptrdiff_t>(r * width),
             a_.begin() + static_cast<std::ptrdiff_t>((r + 1) * width));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
    --rows_;
  }

  std::size_t pivots() const { return pivots_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<T> a_;
  std::vector<std::size_t> basis_;
  std::vector<T> cost_;
  T z0_ = T(0);
  std::size_t pivots_ = 0;
};

}  // namespace detail

template <typename T>
Solution<T> solve(const LinearProgram<T>& lp) {
  const std::size_t n = lp.variables();
  const std::size_t m = lp.constraints.size();

  // Normalise every row to a nonnegative right-hand side.
  std::vector<Constraint<T>> rows = lp.constraints;
  for (auto& row : rows) {
    if (row.rhs < T(0)) {
      for (auto& v : row.coeffs) v = -v;
      row.rhs = -row.rhs;
      if (row.sense == Sense::LessEqual) {
        row.sense = Sense::GreaterEqual;
      } else if (row.sense == Sense::GreaterEqual) {
        row.sense = Sense::LessEqual;
      }
    }
  }

  std::size_t slacks = 0;
  std::size_t artificials = 0;
  for (const auto& row : rows) {
    if (row.sense != Sense::Equal) ++slacks;
    if (row.sense != Sense::LessEqual) ++artificials;
  }
  const std::size_t first_art = n + slacks;
  const std::size_t cols = first_art + artificials;

  detail::Tableau<T> tab(m, cols);
  std::size_t next_slack = n;
  std::size_t next_art = first_art;
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < n; ++c) tab.at(r, c) = rows[r].coeffs[c];
    tab.rhs(r) = rows[r].rhs;
    switch (rows[r].sense) {
      case Sense::LessEqual:
        tab.at(r, next_slack) = T(1);
        tab.basis()[r] = next_slack++;
        break;
      case Sense::GreaterEqual:
        tab.at(r, next_slack++) = T(-1);
        tab.at(r, next_art) = T(1);
        tab.basis()[r] = next_art++;
        break;
      case Sense::Equal:
        tab.at(r, next_art) = T(1);
        tab.basis()[r] = next_art++;
        break;
    }
  }

  Solution<T> out;

  if (artificials > 0) {
    std::vector<T> phase1(cols, T(0));
    for (std::size_t c = first_art; c < cols; ++c) phase1[c] = T(-1);
    tab.set_objective(phase1);
    tab.optimize(cols);
    if (tab.objective_value() < -detail::feasibility_tolerance<T>()) {
      out.status = Status::Infeasible;
      out.pivots = tab.pivots();
      return out;
    }
    // Pivot remaining (zero-level) artificials out; rows with no usable
    // column are linearly dependent and get dropped.
    const T eps = detail::pivot_tolerance<T>();
    for (std::size_t r = 0; r < tab.rows();) {
      if (tab.basis()[r] < first_art) {
        ++r;
        continue;
      }
      std::size_t col = first_art;
      for (std::size_t c = 0; c < first_art; ++c) {
        if (detail::abs_value(tab.at(r, c)) > eps) {
          col = c;
          break;
        }
      }
      if (col == first_art) {
        tab.drop_row(r);
      } else {
        tab.pivot(r, col);
        ++r;
      }
    }
  }

  std::vector<T> phase2(cols, T(0));
  for (std::size_t c = 0; c < n; ++c) phase2[c] = lp.objective[c];
  tab.set_objective(phase2);
  if (!tab.optimize(first_art)) {
    out.status = Status::Unbounded;
    out.pivots = tab.pivots();
    return out;
  }

  out.status = Status::Optimal;
  out.x.assign(n, T(0));
  for (std::size_t r = 0; r < tab.rows(); ++r) {
    if (tab.basis()[r] < n) out.x[tab.basis()[r]] = tab.rhs(r);
  }
  out.optimum = T(0);
  for (std::size_t c = 0; c < n; ++c) out.optimum += lp.objective[c] * out.x[c];
  out.pivots = tab.pivots();
  return out;
}

}  // namespace monoqkd::lp
