#pragma once

/// \file
/// Monogamy functions f with beta(A,E) <= f(beta(A,B)), critical thresholds
/// for the sufficient security condition f(beta) < beta/2 + 1/4, and checks
/// of concrete tripartite boxes against a monogamy relation.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "monoqkd/bisection.hpp"
#include "monoqkd/boxes.hpp"
#include "monoqkd/errors.hpp"

namespace monoqkd {

/// Maximum quantum CHSH value, (1 + 1/sqrt 2) / 2.
inline constexpr double kTsirelson = 0.5 * (1.0 + 1.0 / std::numbers::sqrt2);

/// The line beta/2 + 1/4: Eve's CHSH value when her guess matches Bob's.
inline constexpr double sufficient_line(double beta) { return 0.5 * beta + 0.25; }

inline double mono_ns(double beta) {
  if (!(beta >= 0.5 && beta <= 1.0)) {
    throw DomainError("NS-monogamy is defined on [1/2, 1], got " + std::to_string(beta));
  }
  return 1.5 - beta;
}

inline double mono_qm(double beta) {
  if (beta > kTsirelson + 1e-12) {
    throw OutOfTheoryRange("beta = " + std::to_string(beta) +
                           " exceeds the Tsirelson bound; not reachable under QM-monogamy");
  }
  if (!(beta >= 0.5)) {
    throw DomainError("QM-monogamy is defined on [1/2, Tsirelson], got " + std::to_string(beta));
  }
  const double d = beta - 0.5;
  // Radicands at rounding level (beta within ~1e-12 of Tsirelson) are zero.
  const double r = 0.125 - d * d;
  return (r > 1e-15 ? std::sqrt(r) : 0.0) + 0.5;
}

/// (1/2) * ((1 - (2 beta - 1)^p)^(1/p) + 1). p = 1 reproduces mono_ns.
inline double mono_p(double p, double beta) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw DomainError("monogamy exponent must be a finite p >= 1, got " + std::to_string(p));
  }
  if (!(beta >= 0.5 && beta <= 1.0)) {
    throw DomainError("p-monogamy is defined on [1/2, 1], got " + std::to_string(beta));
  }
  const double t = 2.0 * beta - 1.0;
  const double inner = std::max(0.0, 1.0 - std::pow(t, p));
  return 0.5 * (std::pow(inner, 1.0 / p) + 1.0);
}

enum class MonogamyKind { NS, QM, PNorm };

class MonogamyFunction {
 public:
  static MonogamyFunction ns() { return MonogamyFunction(MonogamyKind::NS, 1.0); }
  static MonogamyFunction qm() { return MonogamyFunction(MonogamyKind::QM, 2.0); }
  static MonogamyFunction pnorm(double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) {
      throw DomainError("monogamy exponent must be a finite p >= 1, got " + std::to_string(p));
    }
    return MonogamyFunction(MonogamyKind::PNorm, p);
  }

  /// Selector grammar: "ns" | "qm" | "p:<real >= 1>".
  static MonogamyFunction parse(std::string_view selector) {
    if (selector == "ns") return ns();
    if (selector == "qm") return qm();
    if (selector.starts_with("p:")) {
      const auto digits = selector.substr(2);
      double p = 0.0;
      const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), p);
      if (ec != std::errc{} || end != digits.data() + digits.size() || digits.empty()) {
        throw DomainError("bad monogamy exponent in selector '" + std::string(selector) + "'");
      }
      return pnorm(p);
    }
    throw DomainError("unknown monogamy selector '" + std::string(selector) +
                      "' (expected ns, qm or p:<x>)");
  }

  MonogamyKind kind() const { return kind_; }
  double exponent() const { return exponent_; }

  std::string name() const {
    switch (kind_) {
      case MonogamyKind::NS: return "ns";
      case MonogamyKind::QM: return "qm";
      case MonogamyKind::PNorm: break;
    }
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, exponent_);
    return "p:" + std::string(buf, r.ptr);
  }

  double domain_lower() const { return 0.5; }
  double domain_upper() const { return kind_ == MonogamyKind::QM ? kTsirelson : 1.0; }

  /// Evaluates f(beta). Inputs in [0, 1/2) are reflected to 1 - beta, since
  /// Bob flipping his outcome maps beta to 1 - beta without affecting Eve.
  double operator()(double beta) const {
    if (beta >= 0.0 && beta < 0.5) beta = 1.0 - beta;
    switch (kind_) {
      case MonogamyKind::NS: return mono_ns(beta);
      case MonogamyKind::QM: return mono_qm(beta);
      case MonogamyKind::PNorm: return mono_p(exponent_, beta);
    }
    throw DomainError("unknown monogamy kind");
  }

  friend bool operator==(const MonogamyFunction&, const MonogamyFunction&) = default;

 private:
  MonogamyFunction(MonogamyKind kind, double exponent) : kind_(kind), exponent_(exponent) {}
  MonogamyKind kind_;
  double exponent_;
};

struct MonogamyReport {
  double beta_ab;
  double beta_ae;
  double bound;
  bool satisfied;
  double slack;
};

/// Checks beta(A,E) <= f(beta(A,B)) on `tri` using the strictest reading for
/// signaling boxes: beta(A,E) maximised over B's setting and the bound
/// minimised over E's setting.
inline MonogamyReport check_monogamy(const TripartiteBox& tri, const MonogamyFunction& f) {
  const auto ab = chsh_values(tri, PartyPair::AB);
  const double bound0 = f(ab[0]);
  const double bound1 = f(ab[1]);
  const bool first = bound0 <= bound1;
  MonogamyReport r{};
  r.beta_ab = first ? ab[0] : ab[1];
  r.bound = first ? bound0 : bound1;
  r.beta_ae = worst_case_chsh(tri, PartyPair::AE);
  r.slack = r.bound - r.beta_ae;
  r.satisfied = r.beta_ae <= r.bound + kProbabilityTolerance;
  return r;
}

/// Positive when f(beta) < beta/2 + 1/4, i.e. the sufficient condition holds.
inline double security_margin(const MonogamyFunction& f, double beta) {
  return sufficient_line(beta) - f(beta);
}

class CriticalBeta {
 public:
  enum class Kind { Value, SecureEverywhere, NeverSecureInDomain };

  static CriticalBeta value(double beta) { return CriticalBeta(Kind::Value, beta); }
  static CriticalBeta secure_everywhere() { return CriticalBeta(Kind::SecureEverywhere, 0.5); }
  static CriticalBeta never_secure() { return CriticalBeta(Kind::NeverSecureInDomain, 1.0); }

  Kind kind() const { return kind_; }
  bool is_numeric() const { return kind_ == Kind::Value; }
  /// The threshold itself; for markers, the relevant domain edge.
  double beta() const { return beta_; }

  std::string marker() const {
    switch (kind_) {
      case Kind::Value: return "value";
      case Kind::SecureEverywhere: return "secure-everywhere";
      case Kind::NeverSecureInDomain: return "never-secure-in-domain";
    }
    return "?";
  }

 private:
  CriticalBeta(Kind kind, double beta) : kind_(kind), beta_(beta) {}
  Kind kind_;
  double beta_;
};

/// Root of f(beta) = beta/2 + 1/4 on [lo, hi] for any non-increasing `f`, by
/// bisection to 1e-12. Markers report the degenerate cases.
template <typename Function>
CriticalBeta critical_beta(const Function& f, double lo, double hi) {
  const auto g = [&f](double beta) { return f(beta) - sufficient_line(beta); };
  if (g(lo) < 0.0) return CriticalBeta::secure_everywhere();
  if (g(hi) > 0.0) return CriticalBeta::never_secure();
  return CriticalBeta::value(bisect(g, lo, hi, 1e-12, 200).root);
}

inline CriticalBeta critical_beta(const MonogamyFunction& f) {
  return critical_beta(f, f.domain_lower(), f.domain_upper());
}

/// Honest parties reach `beta_honest`; the eavesdropper's theory obeys
/// `f_eve`. True iff f_eve(beta_honest) < beta_honest/2 + 1/4.
inline bool cross_theory_secure(const MonogamyFunction& f_eve, double beta_honest) {
  return f_eve(beta_honest) < sufficient_line(beta_honest);
}

}  // namespace monoqkd
