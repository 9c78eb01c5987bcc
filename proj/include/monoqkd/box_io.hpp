#pragma once

/// \file
/// JSON box files: {"arity": 2|3, "probs": [16|64 numbers]} in the flat index
/// order documented in boxes.hpp.

#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "monoqkd/boxes.hpp"

namespace monoqkd {

using AnyBox = std::variant<BipartiteBox, TripartiteBox>;

/// Malformed document (not JSON, missing keys, wrong types or lengths).
struct BoxSchemaError : Error {
  using Error::Error;
};

inline std::size_t arity(const AnyBox& box) { return box.index() == 0 ? 2 : 3; }

inline AnyBox mix(const AnyBox& b1, const AnyBox& b2, double p) {
  if (b1.index() != b2.index()) {
    throw ArityMismatch("cannot mix a " + std::to_string(arity(b1)) + "-party box with a " +
                        std::to_string(arity(b2)) + "-party box");
  }
  return std::visit(
      [&](const auto& lhs) -> AnyBox {
        using B = std::decay_t<decltype(lhs)>;
        return mix(lhs, std::get<B>(b2), p);
      },
      b1);
}

inline AnyBox box_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw BoxSchemaError("box document must be a JSON object");
  if (!doc.contains("arity") || !doc["arity"].is_number_integer()) {
    throw BoxSchemaError("box document needs an integer \"arity\"");
  }
  if (!doc.contains("probs") || !doc["probs"].is_array()) {
    throw BoxSchemaError("box document needs a \"probs\" array");
  }
  const int n = doc["arity"].get<int>();
  if (n != 2 && n != 3) throw BoxSchemaError("arity must be 2 or 3");
  const auto& probs = doc["probs"];
  const std::size_t expected = n == 2 ? BipartiteBox::kSize : TripartiteBox::kSize;
  if (probs.size() != expected) {
    throw BoxSchemaError("arity " + std::to_string(n) + " needs " + std::to_string(expected) +
                         " probabilities, got " + std::to_string(probs.size()));
  }
  std::vector<double> table;
  table.reserve(expected);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!probs[i].is_number()) {
      throw BoxSchemaError("probs[" + std::to_string(i) + "] is not a number");
    }
    table.push_back(probs[i].get<double>());
  }
  if (n == 2) return BipartiteBox::from_table(table);
  return TripartiteBox::from_table(table);
}

template <std::size_t N>
nlohmann::json box_to_json(const Box<N>& box) {
  const auto t = box.table();
  return {{"arity", N}, {"probs", std::vector<double>(t.begin(), t.end())}};
}

inline nlohmann::json box_to_json(const AnyBox& box) {
  return std::visit([](const auto& b) { return box_to_json(b); }, box);
}

/// Throws std::ios_base::failure if unreadable, BoxSchemaError on a bad
/// document, or a BoxInvariantError naming the first bad flat index.
inline AnyBox read_box_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open box file: " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw BoxSchemaError(std::string("box file is not valid JSON: ") + e.what());
  }
  return box_from_json(doc);
}

}  // namespace monoqkd
