#pragma once

// Command-line front end. Every subcommand writes exactly one report (or, for
// `generate`, one CSV file). Exit codes: 0 success, 2 usage error, 3 data
// error, 4 numeric degeneracy.

#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vdec/core.hpp"
#include "vdec/csv.hpp"
#include "vdec/experiments.hpp"
#include "vdec/histogram.hpp"
#include "vdec/report.hpp"
#include "vdec/soo.hpp"

namespace vdec::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kData = 3, kDegenerate = 4 };

enum class Subcommand { rank, decompose, baseline, simulate, robustness, histogram, generate };

struct CommandConfig {
  Subcommand subcommand = Subcommand::rank;

  // data input
  std::string input;
  std::string target;
  std::optional<std::vector<std::string>> characters;
  MissingPolicy missing = MissingPolicy::reject;
  char delimiter = ',';
  std::optional<double> max_target;

  // rank / decompose
  std::optional<std::size_t> max_steps;
  std::optional<std::vector<std::string>> order;

  // baseline / simulate / generate
  std::size_t subset_size = 10;
  std::optional<std::size_t> trials;
  std::uint64_t seed = kDefaultSeed;

  // simulate
  std::size_t num_characters = 10;
  std::size_t population = 100;
  std::optional<std::vector<double>> coefficients;
  double noise_sd = 0.03;
  double bernoulli_p = 0.5;

  // histogram
  std::string column;
  double bin_width = 1.0;
  double origin = 0.0;
  std::optional<std::size_t> bins;

  // generate
  std::size_t questions = 30;
  double difficulty_spread = 2.0;

  OutputFormat format = OutputFormat::table;
  std::string output;  ///< empty: standard output
};

namespace detail {

inline std::string subcommand_name(Subcommand s) {
  switch (s) {
    case Subcommand::rank: return "rank";
    case Subcommand::decompose: return "decompose";
    case Subcommand::baseline: return "baseline";
    case Subcommand::simulate: return "simulate";
    case Subcommand::robustness: return "robustness";
    case Subcommand::histogram: return "histogram";
    case Subcommand::generate: return "generate";
  }
  return "";
}

inline json data_config(const CommandConfig& c) {
  json j{{"subcommand", subcommand_name(c.subcommand)},
         {"target", c.target},
         {"missing", c.missing == MissingPolicy::reject ? "reject" : "as_category"},
         {"delimiter", std::string(1, c.delimiter)}};
  j["characters"] = c.characters ? json(*c.characters) : json(nullptr);
  j["max_target"] = c.max_target ? json(*c.max_target) : json(nullptr);
  return j;
}

inline Dataset load_input(const CommandConfig& c) {
  if (c.input.empty()) throw InvalidArgument("--input is required");
  if (c.target.empty()) throw InvalidArgument("--target is required");
  LoadOptions opt{c.target, c.characters, c.missing, c.delimiter};
  Dataset d = load_csv(c.input, opt);
  if (c.max_target) d = filter_target_max(d, *c.max_target);
  return d;
}

inline void require_variance(const DecompositionResult& r) {
  if (!(r.total_variance > 0.0)) {
    throw DegenerateError("target has zero variance; residual fractions are undefined");
  }
}

inline ReportDocument build_report(const CommandConfig& c) {
  ReportMetadata meta;
  meta.input = c.input;
  switch (c.subcommand) {
    case Subcommand::rank: {
      const Dataset d = load_input(c);
      meta.config = data_config(c);
      meta.config["max_steps"] = c.max_steps ? json(*c.max_steps) : json(nullptr);
      SooRanking r = soo_rank(d, c.max_steps);
      require_variance(r.result);
      return make_report(std::move(r), std::move(meta));
    }
    case Subcommand::decompose: {
      const Dataset d = load_input(c);
      meta.config = data_config(c);
      const auto order = c.order.value_or(d.character_names());
      meta.config["order"] = order;
      DecompositionResult r = decompose_ordered(d, order);
      require_variance(r);
      return make_report(std::move(r), std::move(meta));
    }
    case Subcommand::baseline: {
      const Dataset d = load_input(c);
      BaselineConfig cfg{c.subset_size, c.trials.value_or(300), c.seed};
      meta.config = data_config(c);
      meta.config["subset_size"] = cfg.subset_size;
      meta.config["trials"] = cfg.trials;
      meta.config["seed"] = cfg.seed;
      meta.generator = generator_identity();
      BaselineReport r = random_subset_baseline(d, cfg);
      if (!(r.total_variance > 0.0)) {
        throw DegenerateError("target has zero variance; residual fractions are undefined");
      }
      return make_report(std::move(r), std::move(meta));
    }
    case Subcommand::simulate: {
      SimulationConfig cfg;
      cfg.num_characters = c.num_characters;
      cfg.population = c.population;
      cfg.coefficients = c.coefficients.value_or(descending_coefficients(c.num_characters));
      cfg.noise_sd = c.noise_sd;
      cfg.bernoulli_p = c.bernoulli_p;
      cfg.trials = c.trials.value_or(20);
      cfg.seed = c.seed;
      meta.config = json{{"subcommand", "simulate"},
                         {"num_characters", cfg.num_characters},
                         {"population", cfg.population},
                         {"coefficients", cfg.coefficients},
                         {"noise_sd", cfg.noise_sd},
                         {"bernoulli_p", cfg.bernoulli_p},
                         {"trials", cfg.trials},
                         {"seed", cfg.seed}};
      meta.generator = generator_identity();
      return make_report(simulate_soo_recovery(cfg), std::move(meta));
    }
    case Subcommand::robustness: {
      const Dataset d = load_input(c);
      meta.config = data_config(c);
      return make_report(robustness_check(d), std::move(meta));
    }
    case Subcommand::histogram: {
      CommandConfig data = c;
      data.target = c.column.empty() ? c.target : c.column;
      data.characters = std::vector<std::string>{};
      const Dataset d = load_input(data);
      meta.config = data_config(data);
      meta.config["bin_width"] = c.bin_width;
      meta.config["origin"] = c.origin;
      meta.config["bins"] = c.bins ? json(*c.bins) : json(nullptr);
      return make_report(histogram(d.target().values(), c.bin_width, c.origin, c.bins),
                         std::move(meta));
    }
    case Subcommand::generate:
      break;
  }
  throw InvalidArgument("subcommand does not produce a report");
}

inline void emit(const CommandConfig& c, std::ostream& out,
                 const std::function<void(std::ostream&)>& writer) {
  if (c.output.empty() || c.output == "-") {
    writer(out);
    return;
  }
  std::ofstream file(c.output, std::ios::binary);
  if (!file) throw DataError("cannot open '" + c.output + "' for writing");
  writer(file);
  file.flush();
  if (!file) throw DataError("failed writing '" + c.output + "'");
}

}  // namespace detail

/// Executes one configured workflow.
inline int run(const CommandConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.subcommand == Subcommand::generate) {
      const Dataset d = generate_exam_like(config.questions, config.population,
                                           config.difficulty_spread, config.seed);
      detail::emit(config, out, [&](std::ostream& os) { write_csv(os, d, "score", config.delimiter); });
      return kOk;
    }
    const ReportDocument doc = detail::build_report(config);
    detail::emit(config, out, [&](std::ostream& os) { write_report(doc, config.format, os); });
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::invalid_argument: return kUsage;
      case ErrorKind::data: return kData;
      case ErrorKind::degenerate: return kDegenerate;
    }
    return kData;
  }
}

namespace detail {

inline char parse_delimiter(const std::string& text) {
  if (text == "," || text == "comma") return ',';
  if (text == ";" || text == "semicolon") return ';';
  if (text == "\\t" || text == "\t" || text == "tab") return '\t';
  throw CLI::ValidationError("--delimiter", "expected comma, semicolon or tab");
}

}  // namespace detail

/// Parses argv and runs; argv[0] is the program name.
inline int main(int argc, const char* const* argv, std::ostream& out = std::cout,
                std::ostream& err = std::cerr) {
  CLI::App app{"Variance decomposition over qualitative characters with stepwise optimal ordering"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  CommandConfig cfg;
  std::vector<std::string> characters;
  std::vector<std::string> order;
  std::vector<double> coefficients;
  std::size_t max_steps = 0;
  std::size_t trials = 0;
  std::size_t bins = 0;
  double max_target = 0.0;
  std::string delimiter = ",";
  std::string missing = "reject";
  std::string format = "table";

  const std::map<std::string, OutputFormat> formats{
      {"json", OutputFormat::json}, {"table", OutputFormat::table}, {"csv", OutputFormat::csv}};

  auto add_output = [&](CLI::App* sub) {
    sub->add_option("--format", format, "json, table or csv")
        ->check(CLI::IsMember({"json", "table", "csv"}));
    sub->add_option("-o,--output", cfg.output, "output file (default: standard output)");
  };
  std::vector<CLI::Option*> char_opts, max_target_opts;
  auto add_data = [&](CLI::App* sub, bool need_target) {
    sub->add_option("-i,--input", cfg.input, "delimited text file with a header row")->required();
    auto* t = sub->add_option("-t,--target", cfg.target, "numeric target column");
    if (need_target) t->required();
    char_opts.push_back(sub->add_option("-c,--characters", characters,
                                        "comma-separated character columns (default: all others)")
                            ->delimiter(','));
    sub->add_option("--missing", missing, "reject or as_category")
        ->check(CLI::IsMember({"reject", "as_category"}));
    sub->add_option("--delimiter", delimiter, "comma, semicolon or tab");
    max_target_opts.push_back(
        sub->add_option("--max-target", max_target, "drop rows whose target exceeds this value"));
    add_output(sub);
  };

  auto* rank = app.add_subcommand("rank", "greedy stepwise optimal ordering of the characters");
  add_data(rank, true);
  auto* max_steps_opt = rank->add_option("--max-steps", max_steps, "number of greedy steps");

  auto* decompose = app.add_subcommand("decompose", "variance decomposition for a given order");
  add_data(decompose, true);
  auto* order_opt =
      decompose->add_option("--order", order, "comma-separated character order")->delimiter(',');

  auto* baseline = app.add_subcommand("baseline", "compare SOO against random character subsets");
  add_data(baseline, true);
  baseline->add_option("-k,--k", cfg.subset_size, "subset size")->capture_default_str();
  auto* baseline_trials = baseline->add_option("--trials", trials, "random subsets (default 300)");
  baseline->add_option("--seed", cfg.seed, "master seed")->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "SOO recovery on simulated Bernoulli data");
  simulate->add_option("--num-characters", cfg.num_characters)->capture_default_str();
  simulate->add_option("--population", cfg.population)->capture_default_str();
  auto* coef_opt = simulate
                       ->add_option("--coefficients", coefficients,
                                    "comma-separated (default: n/n, (n-1)/n, ..., 1/n)")
                       ->delimiter(',');
  simulate->add_option("--noise-sd", cfg.noise_sd)->capture_default_str();
  simulate->add_option("--p", cfg.bernoulli_p, "Bernoulli parameter")->capture_default_str();
  auto* simulate_trials = simulate->add_option("--trials", trials, "trials (default 20)");
  simulate->add_option("--seed", cfg.seed, "master seed")->capture_default_str();
  add_output(simulate);

  auto* robustness = app.add_subcommand("robustness", "leave-one-character-out ranking check");
  add_data(robustness, true);

  auto* hist = app.add_subcommand("histogram", "histogram of a numeric column");
  add_data(hist, false);
  hist->add_option("--column", cfg.column, "numeric column (default: --target)");
  hist->add_option("--bin-width", cfg.bin_width)->capture_default_str();
  hist->add_option("--origin", cfg.origin)->capture_default_str();
  auto* bins_opt = hist->add_option("--bins", bins, "fixed number of bins");

  auto* generate = app.add_subcommand("generate", "write a synthetic multiple-choice exam CSV");
  generate->add_option("--questions", cfg.questions)->capture_default_str();
  generate->add_option("--population", cfg.population, "number of students (default 2451)");
  generate->add_option("--difficulty-spread", cfg.difficulty_spread)->capture_default_str();
  generate->add_option("--seed", cfg.seed, "seed")->capture_default_str();
  generate->add_option("--delimiter", delimiter, "comma, semicolon or tab");
  generate->add_option("-o,--output", cfg.output, "output file (default: standard output)");

  try {
    app.parse(argc, argv);
    cfg.delimiter = detail::parse_delimiter(delimiter);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  const std::map<CLI::App*, Subcommand> which{
      {rank, Subcommand::rank},         {decompose, Subcommand::decompose},
      {baseline, Subcommand::baseline}, {simulate, Subcommand::simulate},
      {robustness, Subcommand::robustness}, {hist, Subcommand::histogram},
      {generate, Subcommand::generate}};
  for (const auto& [sub, kind] : which) {
    if (sub->parsed()) cfg.subcommand = kind;
  }
  if (cfg.subcommand == Subcommand::generate && generate->count("--population") == 0) {
    cfg.population = 2451;
  }
  cfg.format = formats.at(format);
  cfg.missing = missing == "reject" ? MissingPolicy::reject : MissingPolicy::as_category;
  for (auto* o : char_opts) {
    if (o->count() > 0) cfg.characters = characters;
  }
  for (auto* o : max_target_opts) {
    if (o->count() > 0) cfg.max_target = max_target;
  }
  if (max_steps_opt->count() > 0) cfg.max_steps = max_steps;
  if (order_opt->count() > 0) cfg.order = order;
  if (baseline_trials->count() > 0 || simulate_trials->count() > 0) cfg.trials = trials;
  if (coef_opt->count() > 0) cfg.coefficients = coefficients;
  if (bins_opt->count() > 0) cfg.bins = bins;

  return run(cfg, out, err);
}

}  // namespace vdec::cli
