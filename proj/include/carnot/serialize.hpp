#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <string>

#include "carnot/group.hpp"
#include "carnot/path.hpp"

namespace carnot {

// JSON shapes (documented in the README):
//   group element:  {"d": 2, "N": 2, "levels": [[1.0], [..d..], [..d^2..], ...]}
//   lie element:    {"d": 2, "N": 2, "lyndon": [[level-1 coeffs], ...]}  (lex word order)
//   group path:     {"d", "N", "times": [...], "values": [levels-array per time]}
// nlohmann serializes doubles with the shortest representation that parses
// back exactly, so round trips preserve full precision.

inline nlohmann::json group_element_to_json(const GroupElement& g) {
  nlohmann::json levels = nlohmann::json::array();
  for (int k = 0; k <= g.depth(); ++k) levels.push_back(g.series().level(k));
  return {{"d", g.dim()}, {"N", g.depth()}, {"levels", levels}};
}

inline GroupElement group_element_from_json(const nlohmann::json& j) {
  require(j.contains("d") && j.contains("N") && j.contains("levels"),
          "group element json: need fields 'd', 'N', 'levels'");
  const int d = j.at("d").get<int>();
  const int N = j.at("N").get<int>();
  const auto& levels = j.at("levels");
  require(levels.is_array() && levels.size() == static_cast<std::size_t>(N) + 1,
          "group element json: 'levels' must hold N + 1 arrays");
  TensorSeries s(d, N);
  for (int k = 0; k <= N; ++k) {
    const auto arr = levels[static_cast<std::size_t>(k)].get<std::vector<double>>();
    require(arr.size() == TensorSeries::level_size(d, k),
            "group element json: level " + std::to_string(k) + " must have d^k entries");
    s.level(k) = arr;
  }
  return GroupElement(std::move(s));
}

inline nlohmann::json lie_element_to_json(const LieElement& l) {
  return {{"d", l.d}, {"N", l.N}, {"lyndon", l.levels}};
}

inline LieElement lie_element_from_json(const nlohmann::json& j) {
  require(j.contains("d") && j.contains("N") && j.contains("lyndon"),
          "lie element json: need fields 'd', 'N', 'lyndon'");
  LieElement l = LieElement::zero(j.at("d").get<int>(), j.at("N").get<int>());
  const auto levels = j.at("lyndon").get<std::vector<std::vector<double>>>();
  require(levels.size() == l.levels.size(), "lie element json: wrong level count");
  for (std::size_t k = 0; k < levels.size(); ++k) {
    require(levels[k].size() == l.levels[k].size(),
            "lie element json: wrong coefficient count at level " + std::to_string(k + 1));
    l.levels[k] = levels[k];
  }
  return l;
}

inline nlohmann::json group_path_to_json(const GroupPath& x) {
  nlohmann::json values = nlohmann::json::array();
  for (std::size_t i = 0; i < x.size(); ++i) {
    nlohmann::json levels = nlohmann::json::array();
    for (int k = 0; k <= x.depth(); ++k) levels.push_back(x.value(i).series().level(k));
    values.push_back(levels);
  }
  return {{"d", x.dim()}, {"N", x.depth()}, {"times", x.times()}, {"values", values}};
}

inline GroupPath group_path_from_json(const nlohmann::json& j) {
  require(j.contains("d") && j.contains("N") && j.contains("times") && j.contains("values"),
          "group path json: need fields 'd', 'N', 'times', 'values'");
  const int d = j.at("d").get<int>();
  const int N = j.at("N").get<int>();
  const auto times = j.at("times").get<std::vector<double>>();
  const auto& values = j.at("values");
  require(values.is_array() && values.size() == times.size(),
          "group path json: 'times' and 'values' must have equal length");
  std::vector<GroupElement> vals;
  vals.reserve(times.size());
  for (const auto& vj : values) {
    TensorSeries s(d, N);
    require(vj.is_array() && vj.size() == static_cast<std::size_t>(N) + 1,
            "group path json: each value must hold N + 1 level arrays");
    for (int k = 0; k <= N; ++k) {
      const auto arr = vj[static_cast<std::size_t>(k)].get<std::vector<double>>();
      require(arr.size() == TensorSeries::level_size(d, k),
              "group path json: level " + std::to_string(k) + " must have d^k entries");
      s.level(k) = arr;
    }
    vals.emplace_back(std::move(s));
  }
  return GroupPath(times, std::move(vals));
}

// ---------------------------------------------------------------------------

/// FNV-1a of a byte string, as fixed-width hex (config fingerprints).
inline std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

/// Write-then-rename so readers never observe a partial file.
inline void atomic_write_text(const std::string& filename, const std::string& text) {
  const std::string tmp = filename + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    require(f.good(), "atomic_write_text: cannot open " + tmp);
    f << text;
    require(f.good(), "atomic_write_text: write failed for " + tmp);
  }
  std::filesystem::rename(tmp, filename);
}

inline nlohmann::json read_json_file(const std::string& filename) {
  std::ifstream f(filename);
  require(f.good(), "cannot open " + filename);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("malformed json in " + filename + ": " + e.what());
  }
  return j;
}

}  // namespace carnot
