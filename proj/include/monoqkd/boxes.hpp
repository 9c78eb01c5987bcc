#pragma once

/// \file
/// Conditional probability tables P(outcomes | settings) for two or three
/// parties with binary settings and binary outcomes, the CHSH functional, and
/// a no-signaling check.
///
/// Table layout is settings-major, outcomes-minor, party 0 most significant:
///
///   bipartite   index = ((x*2 + y)*2 + X)*2 + Y
///   tripartite  index = ((((a*2 + b)*2 + e)*2 + A)*2 + B)*2 + E
///
/// The same layout is used by the JSON box files.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>

#include "monoqkd/errors.hpp"

namespace monoqkd {

inline constexpr double kProbabilityTolerance = 1e-9;
inline constexpr double kClampTolerance = 1e-12;

enum class Party { A = 0, B = 1, E = 2 };
enum class PartyPair { AB, AE, BE };

inline const char* to_string(PartyPair pair) {
  switch (pair) {
    case PartyPair::AB: return "AB";
    case PartyPair::AE: return "AE";
    case PartyPair::BE: return "BE";
  }
  return "?";
}

/// Box over `N` parties. Immutable once built; every constructor validates.
template <std::size_t N>
class Box {
  static_assert(N == 2 || N == 3, "only bipartite and tripartite boxes");

 public:
  static constexpr std::size_t kParties = N;
  static constexpr std::size_t kRows = std::size_t{1} << N;
  static constexpr std::size_t kSize = kRows * kRows;
  using Bits = std::array<int, N>;

  /// Validates and clamps `table`. Throws NegativeProbability for entries
  /// below -1e-12 and NormalizationError when a setting row does not sum to 1.
  static Box from_table(std::span<const double> table) {
    if (table.size() != kSize) {
      throw ArityMismatch("box table must have " + std::to_string(kSize) +
                          " entries, got " + std::to_string(table.size()));
    }
    Box box;
    for (std::size_t i = 0; i < kSize; ++i) {
      const double v = table[i];
      if (!std::isfinite(v)) {
        throw NormalizationError("non-finite entry at index " + std::to_string(i), i);
      }
      if (v < -kClampTolerance) {
        throw NegativeProbability(
            "negative probability " + std::to_string(v) + " at index " + std::to_string(i), i);
      }
      box.p_[i] = v < 0.0 ? 0.0 : v;
    }
    for (std::size_t row = 0; row < kRows; ++row) {
      double sum = 0.0;
      for (std::size_t o = 0; o < kRows; ++o) sum += box.p_[row * kRows + o];
      if (std::abs(sum - 1.0) > kProbabilityTolerance) {
        throw NormalizationError("setting row " + std::to_string(row) + " sums to " +
                                     std::to_string(sum) + " (first index " +
                                     std::to_string(row * kRows) + ")",
                                 row * kRows);
      }
    }
    return box;
  }

  static constexpr std::size_t index(const Bits& settings, const Bits& outcomes) {
    std::size_t s = 0;
    std::size_t o = 0;
    for (std::size_t k = 0; k < N; ++k) {
      s = (s << 1) | static_cast<std::size_t>(settings[k] & 1);
      o = (o << 1) | static_cast<std::size_t>(outcomes[k] & 1);
    }
    return s * kRows + o;
  }

  /// Inverse of index(): fills settings and outcomes from a flat index.
  static constexpr void decode(std::size_t i, Bits& settings, Bits& outcomes) {
    std::size_t s = i / kRows;
    std::size_t o = i % kRows;
    for (std::size_t k = N; k-- > 0;) {
      settings[k] = static_cast<int>(s & 1);
      outcomes[k] = static_cast<int>(o & 1);
      s >>= 1;
      o >>= 1;
    }
  }

  double prob(const Bits& settings, const Bits& outcomes) const {
    return p_[index(settings, outcomes)];
  }

  /// box(x, y, X, Y) or box(a, b, e, A, B, E).
  template <typename... Ints>
    requires(sizeof...(Ints) == 2 * N)
  double operator()(Ints... bits) const {
    const std::array<int, 2 * N> all{static_cast<int>(bits)...};
    Bits s{};
    Bits o{};
    std::copy_n(all.begin(), N, s.begin());
    std::copy_n(all.begin() + N, N, o.begin());
    return prob(s, o);
  }

  std::span<const double, kSize> table() const { return p_; }

  friend bool operator==(const Box&, const Box&) = default;

 private:
  Box() = default;
  std::array<double, kSize> p_{};
};

using BipartiteBox = Box<2>;
using TripartiteBox = Box<3>;

/// P_q(X,Y|x,y) = (1/2 + (-1)^Y q) [X xor Y = xy]. q = 0 is the PR box.
inline BipartiteBox pr_box(double q) {
  if (!(q >= 0.0 && q <= 0.5)) {
    throw DomainError("pr_box bias q must lie in [0, 1/2], got " + std::to_string(q));
  }
  std::array<double, BipartiteBox::kSize> t{};
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int X = 0; X < 2; ++X) {
        const int Y = X ^ (x & y);
        t[BipartiteBox::index({x, y}, {X, Y})] = Y == 0 ? 0.5 + q : 0.5 - q;
      }
  return BipartiteBox::from_table(t);
}

template <std::size_t N = 2>
Box<N> white_noise() {
  std::array<double, Box<N>::kSize> t{};
  t.fill(1.0 / static_cast<double>(Box<N>::kRows));
  return Box<N>::from_table(t);
}

inline BipartiteBox white_noise_bipartite() { return white_noise<2>(); }

/// Local deterministic box: X = x_out[x], Y = y_out[y].
inline BipartiteBox deterministic_box(std::array<int, 2> x_out, std::array<int, 2> y_out) {
  std::array<double, BipartiteBox::kSize> t{};
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) t[BipartiteBox::index({x, y}, {x_out[x], y_out[y]})] = 1.0;
  return BipartiteBox::from_table(t);
}

/// Entrywise p*b1 + (1-p)*b2.
template <std::size_t N>
Box<N> mix(const Box<N>& b1, const Box<N>& b2, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("mixing weight must lie in [0, 1], got " + std::to_string(p));
  }
  std::array<double, Box<N>::kSize> t{};
  const auto t1 = b1.table();
  const auto t2 = b2.table();
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = p * t1[i] + (1.0 - p) * t2[i];
  return Box<N>::from_table(t);
}

/// PR box mixed with white noise, weight 2*beta - 1 on the PR box, so that
/// chsh_value(result) = beta.
inline BipartiteBox isotropic_box(double beta) {
  if (!(beta >= 0.5 && beta <= 1.0)) {
    throw DomainError("isotropic_box beta must lie in [1/2, 1], got " + std::to_string(beta));
  }
  return mix(pr_box(0.0), white_noise_bipartite(), 2.0 * beta - 1.0);
}

namespace detail {

// Tripartite slots (A=0, B=1, E=2) that receive the bipartite X and Y sides.
inline std::array<int, 2> pair_slots(PartyPair pair) {
  switch (pair) {
    case PartyPair::AB: return {0, 1};
    case PartyPair::AE: return {0, 2};
    case PartyPair::BE: return {1, 2};
  }
  throw DomainError("unknown party pair");
}

inline int third_slot(PartyPair pair) {
  const auto s = pair_slots(pair);
  return 3 - s[0] - s[1];
}

}  // namespace detail

/// Hands `bip` to the parties named by `pair` (X to the first, Y to the second,
/// reversed when `swapped`); the remaining party outputs a uniform bit
/// independent of every setting.
inline TripartiteBox extend_with_noise(const BipartiteBox& bip, PartyPair pair,
                                       bool swapped = false) {
  auto slots = detail::pair_slots(pair);
  if (swapped) std::swap(slots[0], slots[1]);
  std::array<double, TripartiteBox::kSize> t{};
  for (std::size_t i = 0; i < t.size(); ++i) {
    TripartiteBox::Bits s{};
    TripartiteBox::Bits o{};
    TripartiteBox::decode(i, s, o);
    t[i] = 0.5 * bip.prob({s[slots[0]], s[slots[1]]}, {o[slots[0]], o[slots[1]]});
  }
  return TripartiteBox::from_table(t);
}

/// With probability p, A and B share pr_box(q1); otherwise A and E share
/// pr_box(q2). The left-out party gets white noise.
inline TripartiteBox eve_example_box(double p, double q1, double q2) {
  return mix(extend_with_noise(pr_box(q1), PartyPair::AB),
             extend_with_noise(pr_box(q2), PartyPair::AE), p);
}

/// Two-party marginal of `tri` on `pair`, with the third party's setting fixed
/// to `third_setting` and its outcome summed out.
inline BipartiteBox marginal(const TripartiteBox& tri, PartyPair pair, int third_setting = 0) {
  const auto slots = detail::pair_slots(pair);
  const int z = detail::third_slot(pair);
  std::array<double, BipartiteBox::kSize> t{};
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int X = 0; X < 2; ++X)
        for (int Y = 0; Y < 2; ++Y) {
          double sum = 0.0;
          for (int Z = 0; Z < 2; ++Z) {
            TripartiteBox::Bits s{};
            TripartiteBox::Bits o{};
            s[slots[0]] = x;
            s[slots[1]] = y;
            s[z] = third_setting;
            o[slots[0]] = X;
            o[slots[1]] = Y;
            o[z] = Z;
            sum += tri.prob(s, o);
          }
          t[BipartiteBox::index({x, y}, {X, Y})] = sum;
        }
  return BipartiteBox::from_table(t);
}

/// beta(X,Y) = 1/4 sum_{x,y} P(X xor Y = xy | x, y).
inline double chsh_value(const BipartiteBox& box) {
  double total = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int X = 0; X < 2; ++X) total += box(x, y, X, X ^ (x & y));
  return 0.25 * total;
}

/// CHSH value on `pair` with the third party's setting fixed (default 0).
inline double chsh_value(const TripartiteBox& tri, PartyPair pair, int third_setting = 0) {
  return chsh_value(marginal(tri, pair, third_setting));
}

/// CHSH value on `pair` for both settings of the third party. The two agree
/// unless the third party signals to the pair.
inline std::array<double, 2> chsh_values(const TripartiteBox& tri, PartyPair pair) {
  return {chsh_value(tri, pair, 0), chsh_value(tri, pair, 1)};
}

inline double worst_case_chsh(const TripartiteBox& tri, PartyPair pair) {
  const auto v = chsh_values(tri, pair);
  return std::max(v[0], v[1]);
}

/// Largest change, over every nonempty proper subset S of parties, in any
/// marginal P(outcomes_S | settings_S, settings_rest) when only the settings
/// outside S vary. Zero (within 1e-9) iff the box is no-signaling.
template <std::size_t N>
double signaling_deficit(const Box<N>& box) {
  using B = Box<N>;
  constexpr std::size_t all = B::kRows - 1;
  double worst = 0.0;
  for (std::size_t subset = 1; subset < all; ++subset) {
    // Bits are indexed as in Box::index: party k has mask bit (N-1-k).
    for (std::size_t s1 = 0; s1 < B::kRows; ++s1)
      for (std::size_t s2 = s1 + 1; s2 < B::kRows; ++s2) {
        if ((s1 & subset) != (s2 & subset)) continue;
        for (std::size_t o_sub = 0; o_sub < B::kRows; ++o_sub) {
          if ((o_sub & ~subset) != 0) continue;
          double m1 = 0.0;
          double m2 = 0.0;
          for (std::size_t o = 0; o < B::kRows; ++o) {
            if ((o & subset) != o_sub) continue;
            m1 += box.table()[s1 * B::kRows + o];
            m2 += box.table()[s2 * B::kRows + o];
          }
          worst = std::max(worst, std::abs(m1 - m2));
        }
      }
  }
  return worst;
}

/// Relabels `party`'s outcome bit. For bipartite boxes Party::A is the X side
/// and Party::B the Y side.
template <std::size_t N>
Box<N> flip_outcome(const Box<N>& box, Party party) {
  const auto slot = static_cast<std::size_t>(party);
  if (slot >= N) throw DomainError("party not present in a bipartite box");
  std::array<double, Box<N>::kSize> t{};
  for (std::size_t i = 0; i < t.size(); ++i) {
    typename Box<N>::Bits s{};
    typename Box<N>::Bits o{};
    Box<N>::decode(i, s, o);
    o[slot] ^= 1;
    t[Box<N>::index(s, o)] = box.table()[i];
  }
  return Box<N>::from_table(t);
}

}  // namespace monoqkd
