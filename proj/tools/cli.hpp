#pragma once

// Command-line front end. Kept in a header so the test suites can drive it
// in-process; tools/main.cpp only forwards argv.
//
// Exit codes: 0 ok/secure, 2 usage, 3 invalid box, 4 insecure verdict,
// 5 oracle mismatch.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <system_error>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "monoqkd/attack_opt.hpp"
#include "monoqkd/box_io.hpp"
#include "monoqkd/boxes.hpp"
#include "monoqkd/grid.hpp"
#include "monoqkd/monogamy.hpp"
#include "monoqkd/protocol.hpp"
#include "monoqkd/report_json.hpp"
#include "monoqkd/security.hpp"

namespace monoqkd::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kInvalidBox = 3,
  kInsecure = 4,
  kOracleMismatch = 5,
};

/// Ten significant digits, '.' separator regardless of locale.
inline std::string sig10(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 10);
  return std::string(buf, r.ptr);
}

/// Ten digits after the decimal point.
inline std::string fixed10(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 10);
  return std::string(buf, r.ptr);
}

struct CurveRow {
  double beta_ab;
  double f_ns;
  std::optional<double> f_qm;
  double f_p;
  double sufficient_line;
};

/// Rows on start, start+step, ... end. With `key_points`, rows at the critical
/// betas of the three built-in monogamies and at the Tsirelson bound are merged
/// in (ascending order kept, duplicates within 1e-12 dropped).
inline std::vector<CurveRow> curve_rows(double start, double end, double step, double p_exponent,
                                        bool key_points) {
  if (!(start >= 0.5 && start < end && end <= 1.0) || !(step > 0.0)) {
    throw DomainError("curve needs 1/2 <= start < end <= 1 and step > 0");
  }
  const auto f_p = MonogamyFunction::pnorm(p_exponent);
  std::vector<double> betas = step_grid(start, end, step);
  if (key_points) {
    std::vector<double> extra{kTsirelson};
    for (const auto& f : {MonogamyFunction::ns(), MonogamyFunction::qm(), f_p}) {
      const auto c = critical_beta(f);
      if (c.is_numeric()) extra.push_back(c.beta());
    }
    for (double b : extra)
      if (b >= start && b <= end) betas.push_back(b);
    std::sort(betas.begin(), betas.end());
    betas.erase(std::unique(betas.begin(), betas.end(),
                            [](double x, double y) { return std::abs(x - y) < 1e-12; }),
                betas.end());
  }
  std::vector<CurveRow> rows;
  rows.reserve(betas.size());
  for (double b : betas) {
    CurveRow row{b, mono_ns(b), std::nullopt, mono_p(p_exponent, b), sufficient_line(b)};
    if (b <= kTsirelson + 1e-12) row.f_qm = mono_qm(b);
    rows.push_back(row);
  }
  return rows;
}

namespace detail {

template <std::size_t N>
nlohmann::json describe_box(const Box<N>& box, const MonogamyFunction& f, std::ostream* text) {
  nlohmann::json j{{"valid", true}, {"arity", N}};
  const double deficit = signaling_deficit(box);
  j["signaling_deficit"] = deficit;
  if constexpr (N == 2) {
    const double v = chsh_value(box);
    j["chsh"] = v;
    if (text) *text << "arity: 2\nchsh: " << sig10(v) << '\n';
  } else {
    if (text) *text << "arity: 3\n";
    nlohmann::json pairs = nlohmann::json::object();
    for (PartyPair pair : {PartyPair::AB, PartyPair::AE, PartyPair::BE}) {
      const auto v = chsh_values(box, pair);
      pairs[to_string(pair)] = {v[0], v[1]};
      if (text) {
        *text << "chsh " << to_string(pair) << ": " << sig10(v[0]) << " (third setting 0), "
              << sig10(v[1]) << " (third setting 1)\n";
      }
    }
    j["chsh"] = pairs;
  }
  if (text) {
    *text << "signaling_deficit: " << sig10(deficit)
          << (deficit <= kProbabilityTolerance ? " (no-signaling)\n" : " (signaling)\n");
  }
  if constexpr (N == 3) {
    try {
      const auto rep = check_monogamy(box, f);
      j["monogamy"] = to_json(rep);
      j["monogamy"]["function"] = f.name();
      if (text) {
        *text << "monogamy " << f.name() << ": beta_ab=" << sig10(rep.beta_ab)
              << " beta_ae=" << sig10(rep.beta_ae) << " bound=" << sig10(rep.bound)
              << " slack=" << sig10(rep.slack)
              << (rep.satisfied ? " satisfied\n" : " VIOLATED\n");
      }
    } catch (const OutOfTheoryRange& e) {
      j["monogamy"] = {{"function", f.name()}, {"error", e.what()}};
      if (text) *text << "monogamy " << f.name() << ": out of theory range (" << e.what() << ")\n";
    }
  }
  return j;
}

inline nlohmann::json curve_json(const std::vector<CurveRow>& rows) {
  auto arr = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"beta_ab", r.beta_ab},
                   {"f_ns", r.f_ns},
                   {"f_qm", r.f_qm ? nlohmann::json(*r.f_qm) : nlohmann::json(nullptr)},
                   {"f_p", r.f_p},
                   {"sufficient_line", r.sufficient_line}});
  }
  return arr;
}

}  // namespace detail

/// Runs one invocation. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Security analysis of CHSH key distribution under Bell-monogamy constraints",
               "monoqkd"};
  app.require_subcommand(1, 1);

  bool json = false;

  // check-box
  std::string box_path;
  std::string check_selector = "ns";
  auto* check_box = app.add_subcommand("check-box", "Validate and report on a JSON box file");
  check_box->add_option("path", box_path, "Box file")->required();
  check_box->add_option("-m,--monogamy", check_selector, "Monogamy for the tripartite check");
  check_box->add_flag("--json", json, "Emit JSON");

  // chsh
  std::string chsh_path;
  std::optional<double> chsh_pr;
  std::optional<double> chsh_iso;
  bool chsh_noise = false;
  auto* chsh = app.add_subcommand("chsh", "CHSH value of a box file or a built-in box");
  auto* chsh_sources = chsh->add_option_group("source");
  chsh_sources->add_option("--box", chsh_path, "Box file");
  chsh_sources->add_option("--pr", chsh_pr, "Biased PR box with bias q");
  chsh_sources->add_option("--isotropic", chsh_iso, "Isotropic box with CHSH value beta");
  chsh_sources->add_flag("--white-noise", chsh_noise, "Uniform box");
  chsh_sources->require_option(1);
  chsh->add_flag("--json", json, "Emit JSON");

  // critical-beta
  std::string crit_selector;
  auto* crit = app.add_subcommand("critical-beta", "Critical beta(A,B) for a monogamy");
  crit->add_option("monogamy", crit_selector, "ns | qm | p:<x>")->required();
  crit->add_flag("--json", json, "Emit JSON");

  // curve
  double curve_start = 0.5;
  double curve_end = 1.0;
  double curve_step = 0.001;
  double curve_p = 1.1;
  bool no_key_points = false;
  auto* curve = app.add_subcommand("curve", "Monogamy curves and the sufficient-condition line");
  curve->add_option("--start", curve_start, "First beta")->capture_default_str();
  curve->add_option("--end", curve_end, "Last beta")->capture_default_str();
  curve->add_option("--step", curve_step, "Grid step")->capture_default_str();
  curve->add_option("--p", curve_p, "Exponent of the p-monogamy column")->capture_default_str();
  curve->add_flag("--no-key-points", no_key_points, "Grid rows only");
  curve->add_flag("--json", json, "Emit JSON");

  // secure
  std::string sec_selector = "ns";
  double sec_beta = 0.0;
  auto* sec = app.add_subcommand("secure", "Security verdict P_B > P_E at a given beta(A,B)");
  sec->add_option("-a,--adversary", sec_selector, "Eavesdropper monogamy")->capture_default_str();
  sec->add_option("--beta", sec_beta, "beta(A,B)")->required();
  sec->add_flag("--json", json, "Emit JSON");

  // simulate
  std::optional<double> sim_beta;
  std::string sim_box;
  std::uint64_t sim_rounds = 100000;
  double sim_fraction = 0.5;
  std::uint64_t sim_seed = 42;
  std::string sim_selector = "ns";
  unsigned sim_threads = 1;
  bool sim_attack = false;
  std::string sim_csv;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo run of the protocol (JSON report)");
  auto* sim_sources = sim->add_option_group("source");
  sim_sources->add_option("--beta", sim_beta, "Isotropic source with this CHSH value");
  sim_sources->add_option("--box", sim_box, "Bipartite source box file");
  sim_sources->require_option(1);
  sim->add_option("--rounds", sim_rounds, "Protocol rounds")->capture_default_str();
  sim->add_option("--fraction", sim_fraction, "Estimation fraction")->capture_default_str();
  sim->add_option("--seed", sim_seed, "RNG seed")->capture_default_str();
  sim->add_option("-a,--adversary", sim_selector, "Eavesdropper monogamy")->capture_default_str();
  sim->add_option("--threads", sim_threads, "Worker threads (results do not depend on it)")
      ->capture_default_str();
  sim->add_flag("--attack", sim_attack, "Also simulate Eve's best procedure");
  sim->add_option("--rounds-csv", sim_csv, "Write every round to this CSV file");
  sim->add_flag("--json", json, "Accepted for uniformity; output is always JSON");

  // lp-verify
  double lp_step = 0.05;
  double lp_from = 0.75;
  double lp_to = 1.0;
  auto* lpv = app.add_subcommand("lp-verify", "LP check of the NS trade-off 3/2 - b");
  lpv->add_option("--step", lp_step, "Grid step in (0, 0.1]")->capture_default_str();
  lpv->add_option("--from", lp_from, "First b")->capture_default_str();
  lpv->add_option("--to", lp_to, "Last b")->capture_default_str();
  lpv->add_flag("--json", json, "Emit JSON");

  // attack-bound
  std::string atk_selector = "ns";
  double atk_beta = 0.0;
  double atk_step = 1e-4;
  auto* atk = app.add_subcommand("attack-bound", "Grid search for Eve's best procedure");
  atk->add_option("-a,--adversary", atk_selector, "Eavesdropper monogamy")->capture_default_str();
  atk->add_option("--beta", atk_beta, "beta(A,B)")->required();
  atk->add_option("--step", atk_step, "Search step")->capture_default_str();
  atk->add_flag("--json", json, "Emit JSON");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (check_box->parsed()) {
      const auto f = MonogamyFunction::parse(check_selector);
      const AnyBox box = read_box_file(box_path);
      nlohmann::json j = std::visit(
          [&](const auto& b) { return detail::describe_box(b, f, json ? nullptr : &out); }, box);
      if (json) out << j.dump(2) << '\n';
      return kOk;
    }

    if (chsh->parsed()) {
      nlohmann::json j;
      if (!chsh_path.empty()) {
        const auto box = read_box_file(chsh_path);
        if (const auto* bip = std::get_if<BipartiteBox>(&box)) {
          j["chsh"] = chsh_value(*bip);
          if (!json) out << sig10(chsh_value(*bip)) << '\n';
        } else {
          const auto& tri = std::get<TripartiteBox>(box);
          for (PartyPair pair : {PartyPair::AB, PartyPair::AE, PartyPair::BE}) {
            const double v = worst_case_chsh(tri, pair);
            j["chsh"][to_string(pair)] = v;
            if (!json) out << to_string(pair) << ' ' << sig10(v) << '\n';
          }
        }
      } else {
        const BipartiteBox box = chsh_pr    ? pr_box(*chsh_pr)
                                 : chsh_iso ? isotropic_box(*chsh_iso)
                                            : white_noise_bipartite();
        j["chsh"] = chsh_value(box);
        if (!json) out << sig10(chsh_value(box)) << '\n';
      }
      if (json) out << j.dump(2) << '\n';
      return kOk;
    }

    if (crit->parsed()) {
      const auto f = MonogamyFunction::parse(crit_selector);
      const auto c = critical_beta(f);
      if (json) {
        auto j = to_json(c);
        j["monogamy"] = f.name();
        out << j.dump(2) << '\n';
      } else if (c.is_numeric()) {
        out << fixed10(c.beta()) << '\n';
      } else {
        out << c.marker() << '\n';
      }
      return kOk;
    }

    if (curve->parsed()) {
      const auto rows = curve_rows(curve_start, curve_end, curve_step, curve_p, !no_key_points);
      if (json) {
        out << detail::curve_json(rows).dump(2) << '\n';
        return kOk;
      }
      out << "beta_ab,f_ns,f_qm,f_p,sufficient_line\n";
      for (const auto& r : rows) {
        out << sig10(r.beta_ab) << ',' << sig10(r.f_ns) << ',' << (r.f_qm ? sig10(*r.f_qm) : "")
            << ',' << sig10(r.f_p) << ',' << sig10(r.sufficient_line) << '\n';
      }
      return kOk;
    }

    if (sec->parsed()) {
      const auto f = MonogamyFunction::parse(sec_selector);
      const auto v = secure(f, sec_beta);
      if (json) {
        auto j = to_json(v);
        j["adversary"] = f.name();
        j["beta_ab"] = sec_beta;
        out << j.dump(2) << '\n';
      } else {
        out << "adversary: " << f.name() << "\nP_B: " << sig10(v.p_b)
            << "\nP_E max: " << sig10(v.p_e_max) << "\nmargin: " << sig10(v.margin)
            << "\ncritical beta: "
            << (v.critical_beta.is_numeric() ? sig10(v.critical_beta.beta())
                                             : v.critical_beta.marker())
            << "\nverdict: " << (v.secure ? "secure" : "insecure") << '\n';
      }
      return v.secure ? kOk : kInsecure;
    }

    if (sim->parsed()) {
      const auto f = MonogamyFunction::parse(sim_selector);
      BipartiteBox source = white_noise_bipartite();
      if (sim_beta) {
        source = isotropic_box(*sim_beta);
      } else {
        const auto any = read_box_file(sim_box);
        const auto* bip = std::get_if<BipartiteBox>(&any);
        if (!bip) throw DomainError("simulation source must be a bipartite box");
        source = *bip;
      }
      const ProtocolConfig cfg{source, sim_rounds, sim_fraction, sim_seed, f};
      const auto rep = sim_attack ? simulate_attack(cfg, sim_threads) : run_protocol(cfg, sim_threads);
      if (!sim_csv.empty()) {
        std::ofstream csv(sim_csv);
        if (!csv) {
          err << "error: cannot write " << sim_csv << '\n';
          return kUsage;
        }
        dump_rounds_csv(cfg, csv);
      }
      out << to_json(rep).dump(2) << '\n';
      return rep.verdict && rep.verdict->secure ? kOk : kInsecure;
    }

    if (lpv->parsed()) {
      const auto rows = verify_ns_monogamy_tightness(lp_step, lp_from, lp_to);
      bool all = true;
      for (const auto& r : rows) all = all && r.pass;
      if (json) {
        auto arr = nlohmann::json::array();
        for (const auto& r : rows) {
          arr.push_back({{"b", r.b},
                         {"lp_optimum", r.lp_optimum},
                         {"analytic_bound", r.analytic_bound},
                         {"abs_error", r.abs_error},
                         {"pass", r.pass}});
        }
        out << nlohmann::json{{"rows", arr}, {"pass", all}}.dump(2) << '\n';
      } else {
        out << "b,lp_optimum,analytic_bound,abs_error\n";
        for (const auto& r : rows) {
          out << sig10(r.b) << ',' << sig10(r.lp_optimum) << ',' << sig10(r.analytic_bound) << ','
              << sig10(r.abs_error) << '\n';
        }
      }
      return all ? kOk : kOracleMismatch;
    }

    if (atk->parsed()) {
      const auto f = MonogamyFunction::parse(atk_selector);
      const auto found = best_procedure_under_monogamy(f, atk_beta, atk_step);
      const double closed = max_eve_prob(f, atk_beta);
      const bool agree = std::abs(found.p_e - closed) <= atk_step + 1e-12;
      if (json) {
        out << nlohmann::json{{"adversary", f.name()},
                              {"beta_ab", atk_beta},
                              {"procedure", to_json(found.procedure)},
                              {"p_e_search", found.p_e},
                              {"p_e_closed_form", closed},
                              {"agree", agree}}
                   .dump(2)
            << '\n';
      } else {
        out << "p_e_search: " << sig10(found.p_e) << "\np_e_closed_form: " << sig10(closed)
            << "\nagree: " << (agree ? "yes" : "no") << '\n';
      }
      return agree ? kOk : kOracleMismatch;
    }
  } catch (const BoxInvariantError& e) {
    if (json) {
      out << nlohmann::json{{"valid", false}, {"error", e.what()}, {"index", e.index}}.dump(2)
          << '\n';
    }
    err << "invalid box: " << e.what() << " [index " << e.index << "]\n";
    return kInvalidBox;
  } catch (const BoxSchemaError& e) {
    if (json) out << nlohmann::json{{"valid", false}, {"error", e.what()}}.dump(2) << '\n';
    err << "invalid box: " << e.what() << '\n';
    return kInvalidBox;
  } catch (const std::ios_base::failure& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace monoqkd::cli
