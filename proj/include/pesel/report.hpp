#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "pesel/criteria.hpp"
#include "pesel/simgen.hpp"

namespace pesel {

/// Largest k_max chosen when the caller does not set one.
inline constexpr Index kDefaultKMaxCap = 50;

struct EstimateReport {
  Index n = 0;
  Index p = 0;
  std::string variant;  // resolved name, never "auto"
  Index k_max = 0;
  Index k_selected = 0;
  bool tie_broken = false;
  std::vector<ScoreParts> scores;
  std::vector<std::string> warnings;

  bool operator==(const EstimateReport&) const = default;
};

/// Runs the selection for a variant flag: "auto" or a variant name.
/// Without k_max, uses min(n, p) - 1 capped at kDefaultKMaxCap.
EstimateReport estimate(const DataMatrix& x, std::string_view variant_flag, std::optional<Index> k_max);

/// Non-finite numbers are written as null and read back as -inf.
nlohmann::json to_json(const EstimateReport& report);
EstimateReport report_from_json(const nlohmann::json& doc);

/// Plain-text table, one row per k, selected row marked with '*'.
std::string format_text(const EstimateReport& report);

nlohmann::json to_json(const sim::ScenarioSpec& spec);
sim::ScenarioSpec spec_from_json(const nlohmann::json& doc);

}  // namespace pesel
