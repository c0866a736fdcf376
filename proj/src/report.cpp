#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "pesel/errors.hpp"
#include "pesel/report.hpp"

namespace pesel {
namespace {

using nlohmann::json;

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& v) {
  return v.is_null() ? -std::numeric_limits<double>::infinity() : v.get<double>();
}

}  // namespace

EstimateReport estimate(const DataMatrix& x, std::string_view variant_flag, std::optional<Index> k_max) {
  const Index n = x.rows();
  const Index p = x.cols();
  if (n < 2 || p < 2) throw DomainError("estimation needs at least a 2 x 2 matrix");

  EstimateReport report;
  report.n = n;
  report.p = p;

  PeselVariant variant;
  if (variant_flag == "auto") {
    variant = auto_variant(n, p);
    report.warnings.push_back("auto resolved to " + std::string(variant_name(variant)));
  } else if (const auto v = parse_variant(variant_flag)) {
    variant = *v;
  } else {
    throw DomainError("unknown variant '" + std::string(variant_flag) + "'");
  }
  report.variant = std::string(variant_name(variant));

  const Index limit = std::min(n, p) - 1;
  if (k_max) {
    report.k_max = *k_max;
  } else {
    report.k_max = std::min(limit, kDefaultKMaxCap);
    if (limit > kDefaultKMaxCap)
      report.warnings.push_back("k_max capped at " + std::to_string(kDefaultKMaxCap) + " (full range is " +
                                std::to_string(limit) + ")");
  }

  auto selection = select_k(pesel_trace(x, variant, report.k_max));
  report.k_selected = selection.k_selected;
  report.tie_broken = selection.tie_broken;
  if (selection.tie_broken) report.warnings.push_back("tie on the maximum score broken toward the smaller k");
  report.scores = std::move(selection.trace.scores);
  return report;
}

json to_json(const EstimateReport& report) {
  json scores = json::array();
  for (const auto& s : report.scores) {
    scores.push_back({{"k", s.k},
                      {"loglik", number(s.loglik)},
                      {"penalty", number(s.penalty)},
                      {"total", number(s.total)},
                      {"sigma2_hat", number(s.sigma2_hat)}});
  }
  return json{{"n", report.n},
              {"p", report.p},
              {"variant", report.variant},
              {"k_max", report.k_max},
              {"k_selected", report.k_selected},
              {"tie_broken", report.tie_broken},
              {"scores", scores},
              {"warnings", report.warnings}};
}

EstimateReport report_from_json(const json& doc) {
  EstimateReport r;
  r.n = doc.at("n").get<Index>();
  r.p = doc.at("p").get<Index>();
  r.variant = doc.at("variant").get<std::string>();
  r.k_max = doc.at("k_max").get<Index>();
  r.k_selected = doc.at("k_selected").get<Index>();
  r.tie_broken = doc.at("tie_broken").get<bool>();
  for (const auto& s : doc.at("scores")) {
    ScoreParts parts;
    parts.k = s.at("k").get<Index>();
    parts.loglik = number_from(s.at("loglik"));
    parts.penalty = number_from(s.at("penalty"));
    parts.total = number_from(s.at("total"));
    parts.sigma2_hat = number_from(s.at("sigma2_hat"));
    r.scores.push_back(parts);
  }
  r.warnings = doc.at("warnings").get<std::vector<std::string>>();
  return r;
}

std::string format_text(const EstimateReport& report) {
  std::ostringstream out;
  out << "n = " << report.n << ", p = " << report.p << ", variant = " << report.variant << ", k_max = "
      << report.k_max << '\n';
  out << "selected k = " << report.k_selected << (report.tie_broken ? " (tie broken)" : "") << "\n\n";
  char line[160];
  std::snprintf(line, sizeof line, "  %5s %18s %14s %18s %14s\n", "k", "loglik", "penalty", "total", "sigma2_hat");
  out << line;
  for (const auto& s : report.scores) {
    std::snprintf(line, sizeof line, "%c %5lld %18.6f %14.6f %18.6f %14.6g\n", s.k == report.k_selected ? '*' : ' ',
                  static_cast<long long>(s.k), s.loglik, s.penalty, s.total, s.sigma2_hat);
    out << line;
  }
  for (const auto& w : report.warnings) out << "warning: " << w << '\n';
  return out.str();
}

json to_json(const sim::ScenarioSpec& spec) {
  return json{{"scenario", sim::scenario_name(spec.scenario)},
              {"n", spec.n},
              {"p", spec.p},
              {"k_true", spec.k_true},
              {"snr", spec.snr},
              {"seed", spec.seed},
              {"replicate", spec.replicate},
              {"student_scaling", sim::scaling_name(spec.student_scaling)}};
}

sim::ScenarioSpec spec_from_json(const json& doc) {
  sim::ScenarioSpec spec;
  const auto scenario = sim::parse_scenario(doc.at("scenario").get<std::string>());
  if (!scenario) throw ConfigError("scenario: unknown value");
  spec.scenario = *scenario;
  spec.n = doc.at("n").get<Index>();
  spec.p = doc.at("p").get<Index>();
  spec.k_true = doc.at("k_true").get<Index>();
  spec.snr = doc.at("snr").get<double>();
  spec.seed = doc.at("seed").get<std::uint64_t>();
  spec.replicate = doc.value("replicate", std::uint64_t{0});
  if (doc.contains("student_scaling")) {
    const auto s = sim::parse_scaling(doc["student_scaling"].get<std::string>());
    if (!s) throw ConfigError("student_scaling: unknown value");
    spec.student_scaling = *s;
  }
  return spec;
}

}  // namespace pesel
