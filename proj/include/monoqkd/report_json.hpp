#pragma once

/// \file
/// JSON forms of verdicts and simulation reports.

#include <json.hpp>

#include "monoqkd/box_io.hpp"
#include "monoqkd/monogamy.hpp"
#include "monoqkd/protocol.hpp"
#include "monoqkd/security.hpp"

namespace monoqkd {

inline nlohmann::json to_json(const CriticalBeta& c) {
  nlohmann::json j{{"kind", c.marker()}};
  if (c.is_numeric()) {
    j["value"] = c.beta();
  } else {
    j["value"] = nullptr;
  }
  return j;
}

inline nlohmann::json to_json(const SecurityVerdict& v) {
  return {{"p_b", v.p_b},
          {"p_e_max", v.p_e_max},
          {"margin", v.margin},
          {"secure", v.secure},
          {"critical_beta", to_json(v.critical_beta)}};
}

inline nlohmann::json to_json(const MonogamyReport& r) {
  return {{"beta_ab", r.beta_ab},
          {"beta_ae", r.beta_ae},
          {"bound", r.bound},
          {"satisfied", r.satisfied},
          {"slack", r.slack}};
}

inline nlohmann::json to_json(const EveProcedure& p) { return p.matrix(); }

inline nlohmann::json to_json(const ProtocolConfig& c) {
  return {{"source", box_to_json(c.source)},
          {"rounds", c.rounds},
          {"estimation_fraction", c.estimation_fraction},
          {"seed", c.seed},
          {"adversary", c.adversary.name()}};
}

inline nlohmann::json to_json(const SimulationReport& r) {
  nlohmann::json j{{"config", to_json(r.config)},
                   {"estimation_rounds", r.estimation_rounds},
                   {"beta_hat", r.beta_hat},
                   {"beta_stderr", r.beta_stderr},
                   {"p_b_hat", r.p_b_hat},
                   {"key_bits", r.key_bits},
                   {"out_of_range", r.out_of_range}};
  j["p_e_bound"] = r.p_e_bound ? nlohmann::json(*r.p_e_bound) : nlohmann::json(nullptr);
  j["verdict"] = r.verdict ? to_json(*r.verdict) : nlohmann::json(nullptr);
  j["key_rate_proxy"] =
      r.key_rate_proxy ? nlohmann::json(*r.key_rate_proxy) : nlohmann::json(nullptr);
  if (r.attack) {
    j["attack"] = {{"procedure", to_json(r.attack->procedure)},
                   {"attacked_rounds", r.attack->attacked_rounds},
                   {"eve_rate", r.attack->eve_rate},
                   {"eve_stderr", r.attack->eve_stderr},
                   {"within_bound", r.attack->within_bound}};
  }
  return j;
}

}  // namespace monoqkd
