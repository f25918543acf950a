#pragma once

// Report documents and their three renderings: versioned JSON, a plain-text
// table and CSV rows.
//
// JSON layout (schema_version 1):
//   { "schema": "vdec.report", "schema_version": 1, "kind": "<kind>",
//     "metadata": { "input": str, "config": {...}, "generator": str,
//                   "tool_version": str },
//     "payload": { ...kind specific... } }
// Derived fields (residual fractions, explained totals) are written for
// consumers and ignored when a document is read back.

#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <json.hpp>

#include "vdec/core.hpp"
#include "vdec/csv.hpp"
#include "vdec/experiments.hpp"
#include "vdec/histogram.hpp"
#include "vdec/soo.hpp"

namespace vdec {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

using json = nlohmann::json;

enum class ReportKind { decomposition, ranking, baseline, simulation, robustness, histogram };

NLOHMANN_JSON_SERIALIZE_ENUM(ReportKind, {
                                             {ReportKind::decomposition, "decomposition"},
                                             {ReportKind::ranking, "ranking"},
                                             {ReportKind::baseline, "baseline"},
                                             {ReportKind::simulation, "simulation"},
                                             {ReportKind::robustness, "robustness"},
                                             {ReportKind::histogram, "histogram"},
                                         })

using ReportPayload = std::variant<DecompositionResult, SooRanking, BaselineReport,
                                   SimulationReport, RobustnessReport, Histogram>;

struct ReportMetadata {
  std::string input;
  json config = json::object();
  std::string generator;
  std::string tool_version = kToolVersion;

  friend bool operator==(const ReportMetadata&, const ReportMetadata&) = default;
};

struct ReportDocument {
  ReportKind kind = ReportKind::decomposition;
  ReportPayload payload;
  ReportMetadata metadata;

  friend bool operator==(const ReportDocument&, const ReportDocument&) = default;
};

[[nodiscard]] inline ReportKind kind_of(const ReportPayload& payload) {
  return std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, DecompositionResult>) return ReportKind::decomposition;
        if constexpr (std::is_same_v<T, SooRanking>) return ReportKind::ranking;
        if constexpr (std::is_same_v<T, BaselineReport>) return ReportKind::baseline;
        if constexpr (std::is_same_v<T, SimulationReport>) return ReportKind::simulation;
        if constexpr (std::is_same_v<T, RobustnessReport>) return ReportKind::robustness;
        if constexpr (std::is_same_v<T, Histogram>) return ReportKind::histogram;
      },
      payload);
}

[[nodiscard]] inline ReportDocument make_report(ReportPayload payload, ReportMetadata metadata = {}) {
  const ReportKind kind = kind_of(payload);
  return ReportDocument{kind, std::move(payload), std::move(metadata)};
}

[[nodiscard]] inline std::string to_string(ReportKind kind) { return json(kind).get<std::string>(); }

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline json optional_fraction(double value, double total) {
  return total > 0.0 ? json(value / total) : json(nullptr);
}

}  // namespace detail

inline void to_json(json& j, const DecompositionStep& s) {
  j = json{{"character", s.character_name},
           {"component", s.component},
           {"residual_after", s.residual_after},
           {"classes_after", s.classes_after}};
}

inline void from_json(const json& j, DecompositionStep& s) {
  j.at("character").get_to(s.character_name);
  j.at("component").get_to(s.component);
  j.at("residual_after").get_to(s.residual_after);
  j.at("classes_after").get_to(s.classes_after);
}

inline void to_json(json& j, const DecompositionResult& r) {
  json fractions = json::array();
  for (const auto& s : r.steps) fractions.push_back(detail::optional_fraction(s.residual_after, r.total_variance));
  j = json{{"total_variance", r.total_variance},
           {"steps", r.steps},
           {"final_residual", r.final_residual},
           {"explained", r.explained()},
           {"explained_fraction", detail::optional_fraction(r.explained(), r.total_variance)},
           {"residual_fractions", std::move(fractions)}};
}

inline void from_json(const json& j, DecompositionResult& r) {
  j.at("total_variance").get_to(r.total_variance);
  j.at("steps").get_to(r.steps);
  j.at("final_residual").get_to(r.final_residual);
}

inline void to_json(json& j, const CandidateEvaluation& c) {
  j = json{{"name", c.name},
           {"column", c.column},
           {"increment", c.increment},
           {"residual_after", c.residual_after}};
}

inline void from_json(const json& j, CandidateEvaluation& c) {
  j.at("name").get_to(c.name);
  j.at("column").get_to(c.column);
  j.at("increment").get_to(c.increment);
  j.at("residual_after").get_to(c.residual_after);
}

inline void to_json(json& j, const StepTrace& t) {
  j = json{{"candidates", t.candidates}, {"chosen", t.chosen}};
}

inline void from_json(const json& j, StepTrace& t) {
  j.at("candidates").get_to(t.candidates);
  j.at("chosen").get_to(t.chosen);
}

inline void to_json(json& j, const SooRanking& r) {
  j = json{{"order", r.order},
           {"columns", r.columns},
           {"degenerate", r.degenerate},
           {"decomposition", r.result},
           {"trace", r.trace}};
}

inline void from_json(const json& j, SooRanking& r) {
  j.at("order").get_to(r.order);
  j.at("columns").get_to(r.columns);
  j.at("degenerate").get_to(r.degenerate);
  j.at("decomposition").get_to(r.result);
  j.at("trace").get_to(r.trace);
}

inline void to_json(json& j, const BaselineReport& r) {
  json fractions = json::array();
  for (double v : r.residuals) fractions.push_back(detail::optional_fraction(v, r.total_variance));
  j = json{{"subset_size", r.subset_size},
           {"total_variance", r.total_variance},
           {"subsets", r.subsets},
           {"residuals", r.residuals},
           {"residual_fractions", std::move(fractions)},
           {"min_random", r.min_random ? json(*r.min_random) : json(nullptr)},
           {"soo_order", r.soo_order},
           {"soo_residuals", r.soo_residuals},
           {"soo_residual", r.soo_residual},
           {"soo_residual_fraction", detail::optional_fraction(r.soo_residual, r.total_variance)},
           {"generator", r.generator}};
}

inline void from_json(const json& j, BaselineReport& r) {
  j.at("subset_size").get_to(r.subset_size);
  j.at("total_variance").get_to(r.total_variance);
  j.at("subsets").get_to(r.subsets);
  j.at("residuals").get_to(r.residuals);
  const auto& m = j.at("min_random");
  r.min_random = m.is_null() ? std::nullopt : std::optional<double>(m.get<double>());
  j.at("soo_order").get_to(r.soo_order);
  j.at("soo_residuals").get_to(r.soo_residuals);
  j.at("soo_residual").get_to(r.soo_residual);
  j.at("generator").get_to(r.generator);
}

inline void to_json(json& j, const SimulationReport& r) {
  j = json{{"trials", r.trials},
           {"per_trial_orders", r.per_trial_orders},
           {"exact_matches", r.exact_matches},
           {"one_inversion", r.one_inversion},
           {"generator", r.generator}};
}

inline void from_json(const json& j, SimulationReport& r) {
  j.at("trials").get_to(r.trials);
  j.at("per_trial_orders").get_to(r.per_trial_orders);
  j.at("exact_matches").get_to(r.exact_matches);
  j.at("one_inversion").get_to(r.one_inversion);
  j.at("generator").get_to(r.generator);
}

inline void to_json(json& j, const Omission& o) {
  j = json{{"omitted", o.omitted}, {"order", o.order}};
}

inline void from_json(const json& j, Omission& o) {
  j.at("omitted").get_to(o.omitted);
  j.at("order").get_to(o.order);
}

inline void to_json(json& j, const RobustnessReport& r) {
  j = json{{"full_order", r.full_order}, {"omissions", r.omissions}, {"stable", r.stable}};
}

inline void from_json(const json& j, RobustnessReport& r) {
  j.at("full_order").get_to(r.full_order);
  j.at("omissions").get_to(r.omissions);
  j.at("stable").get_to(r.stable);
}

inline void to_json(json& j, const Histogram& h) {
  j = json{{"bin_edges", h.bin_edges}, {"counts", h.counts}, {"out_of_range", h.out_of_range}};
}

inline void from_json(const json& j, Histogram& h) {
  j.at("bin_edges").get_to(h.bin_edges);
  j.at("counts").get_to(h.counts);
  j.at("out_of_range").get_to(h.out_of_range);
}

inline void to_json(json& j, const ReportMetadata& m) {
  j = json{{"input", m.input},
           {"config", m.config},
           {"generator", m.generator},
           {"tool_version", m.tool_version}};
}

inline void from_json(const json& j, ReportMetadata& m) {
  j.at("input").get_to(m.input);
  m.config = j.at("config");
  j.at("generator").get_to(m.generator);
  j.at("tool_version").get_to(m.tool_version);
}

inline void to_json(json& j, const ReportDocument& doc) {
  if (kind_of(doc.payload) != doc.kind) {
    throw InvalidArgument("report kind '" + to_string(doc.kind) +
                          "' does not match its payload");
  }
  j = json{{"schema", "vdec.report"},
           {"schema_version", kSchemaVersion},
           {"kind", doc.kind},
           {"metadata", doc.metadata}};
  std::visit([&](const auto& p) { j["payload"] = p; }, doc.payload);
}

inline void from_json(const json& j, ReportDocument& doc) {
  if (j.at("schema").get<std::string>() != "vdec.report") {
    throw DataError("not a vdec report document");
  }
  if (j.at("schema_version").get<int>() != kSchemaVersion) {
    throw DataError("unsupported report schema version " + j.at("schema_version").dump());
  }
  j.at("kind").get_to(doc.kind);
  j.at("metadata").get_to(doc.metadata);
  const json& p = j.at("payload");
  switch (doc.kind) {
    case ReportKind::decomposition: doc.payload = p.get<DecompositionResult>(); break;
    case ReportKind::ranking: doc.payload = p.get<SooRanking>(); break;
    case ReportKind::baseline: doc.payload = p.get<BaselineReport>(); break;
    case ReportKind::simulation: doc.payload = p.get<SimulationReport>(); break;
    case ReportKind::robustness: doc.payload = p.get<RobustnessReport>(); break;
    case ReportKind::histogram: doc.payload = p.get<Histogram>(); break;
  }
}

[[nodiscard]] inline ReportDocument parse_report(const std::string& text) {
  try {
    return json::parse(text).get<ReportDocument>();
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed report document: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Plain-text tables

namespace detail {

inline std::string fixed(double v, int precision = 6) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

inline std::string percent(double value, double total) {
  if (!(total > 0.0)) return "n/a";
  return fixed(100.0 * value / total, 1) + "%";
}

inline std::string fraction(double value, double total) {
  if (!(total > 0.0)) return "n/a";
  return fixed(value / total, 4);
}

inline std::string join(const std::vector<std::string>& items, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

inline std::string join(const std::vector<std::size_t>& items, const char* sep) {
  std::vector<std::string> text;
  for (std::size_t v : items) text.push_back(std::to_string(v));
  return join(text, sep);
}

inline void decomposition_table(std::ostream& os, const DecompositionResult& r) {
  std::size_t name_width = 9;
  for (const auto& s : r.steps) name_width = std::max(name_width, s.character_name.size());
  os << std::left << std::setw(5) << "step" << std::setw(static_cast<int>(name_width) + 2)
     << "character" << std::right << std::setw(14) << "component" << std::setw(10) << "% V(X)"
     << std::setw(14) << "residual" << std::setw(9) << "c_k" << std::setw(9) << "classes"
     << '\n';
  for (std::size_t k = 0; k < r.steps.size(); ++k) {
    const auto& s = r.steps[k];
    os << std::left << std::setw(5) << (k + 1) << std::setw(static_cast<int>(name_width) + 2)
       << s.character_name << std::right << std::setw(14) << fixed(s.component) << std::setw(10)
       << percent(s.component, r.total_variance) << std::setw(14) << fixed(s.residual_after)
       << std::setw(9) << fraction(s.residual_after, r.total_variance) << std::setw(9)
       << s.classes_after << '\n';
  }
  os << '\n';
  os << "total variance V(X)  " << fixed(r.total_variance) << '\n';
  os << "explained            " << fixed(r.explained()) << "  ("
     << percent(r.explained(), r.total_variance) << ")\n";
  os << "residual             " << fixed(r.final_residual) << "  ("
     << percent(r.final_residual, r.total_variance) << ")\n";
}

inline void render_table(std::ostream& os, const DecompositionResult& r) {
  os << "Variance decomposition\n\n";
  decomposition_table(os, r);
}

inline void render_table(std::ostream& os, const SooRanking& r) {
  os << "Stepwise optimal ordering: " << join(r.order, ", ") << "\n\n";
  decomposition_table(os, r.result);
  if (r.degenerate) os << "note: total variance is zero; order follows column order\n";
}

inline void render_table(std::ostream& os, const BaselineReport& r) {
  os << "Random " << r.subset_size << "-subset baseline (" << r.residuals.size()
     << " trials)\n\n";
  os << "total variance V(X)   " << fixed(r.total_variance) << '\n';
  os << "SOO order             " << join(r.soo_order, ", ") << '\n';
  os << "SOO residual          " << fixed(r.soo_residual) << "  ("
     << fraction(r.soo_residual, r.total_variance) << ")\n";
  if (r.min_random) {
    os << "min random residual   " << fixed(*r.min_random) << "  ("
       << fraction(*r.min_random, r.total_variance) << ")\n";
    os << "5th percentile        " << fixed(quantile(r.residuals, 0.05)) << "  ("
       << fraction(quantile(r.residuals, 0.05), r.total_variance) << ")\n";
    os << "median                " << fixed(quantile(r.residuals, 0.5)) << "  ("
       << fraction(quantile(r.residuals, 0.5), r.total_variance) << ")\n";
    std::size_t beaten = 0;
    for (double v : r.residuals) beaten += v < r.soo_residual ? 1 : 0;
    os << "random subsets below SOO  " << beaten << " of " << r.residuals.size() << '\n';
  } else {
    os << "min random residual   n/a (no trials)\n";
  }
  os << "generator             " << r.generator << '\n';
}

inline void render_table(std::ostream& os, const SimulationReport& r) {
  os << "SOO recovery simulation (" << r.trials << " trials)\n\n";
  os << std::left << std::setw(7) << "trial" << std::setw(8) << "match" << "order (1-based)\n";
  for (std::size_t t = 0; t < r.per_trial_orders.size(); ++t) {
    const auto& o = r.per_trial_orders[t];
    std::vector<std::size_t> one_based;
    for (std::size_t v : o) one_based.push_back(v + 1);
    const char* tag = is_identity(o) ? "exact" : is_single_adjacent_inversion(o) ? "swap" : "-";
    os << std::left << std::setw(7) << (t + 1) << std::setw(8) << tag << join(one_based, " ")
       << '\n';
  }
  os << "\nexact matches   " << r.exact_matches << " / " << r.trials << '\n';
  os << "one inversion   " << r.one_inversion << '\n';
  os << "generator       " << r.generator << '\n';
}

inline void render_table(std::ostream& os, const RobustnessReport& r) {
  os << "Leave-one-out robustness\n\n";
  os << "full order: " << join(r.full_order, ", ") << "\n\n";
  for (const auto& o : r.omissions) {
    std::vector<std::string> expected;
    for (const auto& s : r.full_order) {
      if (s != o.omitted) expected.push_back(s);
    }
    os << "without " << o.omitted << ": " << join(o.order, ", ")
       << (o.order == expected ? "" : "   (order changed)") << '\n';
  }
  os << "\nstable: " << (r.stable ? "yes" : "no") << '\n';
}

inline void render_table(std::ostream& os, const Histogram& h) {
  os << "Histogram\n\n";
  os << std::right << std::setw(14) << "lower" << std::setw(14) << "upper" << std::setw(10)
     << "count" << '\n';
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    os << std::setw(14) << fixed(h.bin_edges[i], 4) << std::setw(14)
       << fixed(h.bin_edges[i + 1], 4) << std::setw(10) << h.counts[i] << '\n';
  }
  os << "\nout of range: " << h.out_of_range << '\n';
}

// ---------------------------------------------------------------------------
// CSV

inline std::string csv_fraction(double value, double total) {
  return total > 0.0 ? format_real(value / total) : "";
}

inline void decomposition_rows(std::ostream& os, const DecompositionResult& r) {
  os << "step,character,component,residual_after,residual_fraction,classes_after\n";
  for (std::size_t k = 0; k < r.steps.size(); ++k) {
    const auto& s = r.steps[k];
    os << (k + 1) << ',' << quote_field(s.character_name, ',') << ','
       << format_real(s.component) << ',' << format_real(s.residual_after) << ','
       << csv_fraction(s.residual_after, r.total_variance) << ',' << s.classes_after << '\n';
  }
}

inline void render_csv(std::ostream& os, const DecompositionResult& r) { decomposition_rows(os, r); }
inline void render_csv(std::ostream& os, const SooRanking& r) { decomposition_rows(os, r.result); }

inline void render_csv(std::ostream& os, const BaselineReport& r) {
  os << "source,trial,residual,residual_fraction,subset\n";
  for (std::size_t t = 0; t < r.residuals.size(); ++t) {
    os << "random," << (t + 1) << ',' << format_real(r.residuals[t]) << ','
       << csv_fraction(r.residuals[t], r.total_variance) << ',' << join(r.subsets[t], ";")
       << '\n';
  }
  os << "soo,," << format_real(r.soo_residual) << ','
     << csv_fraction(r.soo_residual, r.total_variance) << ','
     << quote_field(join(r.soo_order, ";"), ',') << '\n';
}

inline void render_csv(std::ostream& os, const SimulationReport& r) {
  os << "trial,order,exact,one_inversion\n";
  for (std::size_t t = 0; t < r.per_trial_orders.size(); ++t) {
    const auto& o = r.per_trial_orders[t];
    os << (t + 1) << ',' << join(o, ";") << ',' << (is_identity(o) ? 1 : 0) << ','
       << (is_single_adjacent_inversion(o) ? 1 : 0) << '\n';
  }
}

inline void render_csv(std::ostream& os, const RobustnessReport& r) {
  os << "omitted,order,preserved\n";
  for (const auto& o : r.omissions) {
    std::vector<std::string> expected;
    for (const auto& s : r.full_order) {
      if (s != o.omitted) expected.push_back(s);
    }
    os << quote_field(o.omitted, ',') << ',' << quote_field(join(o.order, ";"), ',') << ','
       << (o.order == expected ? 1 : 0) << '\n';
  }
}

inline void render_csv(std::ostream& os, const Histogram& h) {
  os << "bin,lower,upper,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    os << (i + 1) << ',' << format_real(h.bin_edges[i]) << ',' << format_real(h.bin_edges[i + 1])
       << ',' << h.counts[i] << '\n';
  }
  os << "out_of_range,,," << h.out_of_range << '\n';
}

}  // namespace detail

enum class OutputFormat { json, table, csv };

inline void write_report(const ReportDocument& doc, OutputFormat format, std::ostream& os) {
  switch (format) {
    case OutputFormat::json:
      os << json(doc).dump(2) << '\n';
      break;
    case OutputFormat::table:
      std::visit([&](const auto& p) { detail::render_table(os, p); }, doc.payload);
      break;
    case OutputFormat::csv:
      std::visit([&](const auto& p) { detail::render_csv(os, p); }, doc.payload);
      break;
  }
}

inline void write_report(const ReportDocument& doc, OutputFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  write_report(doc, format, out);
  out.flush();
  if (!out) throw DataError("failed writing '" + path + "'");
}

}  // namespace vdec
