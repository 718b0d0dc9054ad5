#include "corrfolio/cli.hpp"

#include "corrfolio/io.hpp"
#include "corrfolio/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <map>
#include <ostream>

namespace corrfolio {

namespace {

std::uint64_t parse_seed(std::string_view text) {
  std::uint64_t v = 0;
  const auto t = io::trim(text);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError("invalid seed '" + std::string(text) + "'");
  }
  return v;
}

Date parse_config_date(std::string_view text) {
  try {
    return parse_date(io::trim(text));
  } catch (const Error&) {
    throw ConfigError("invalid date '" + std::string(text) + "'");
  }
}

void apply(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "prices") c.prices = value;
  else if (key == "fundamentals") c.fundamentals = value;
  else if (key == "benchmarks") c.benchmarks = value;
  else if (key == "riskfree") c.riskfree = value;
  else if (key == "synth-config" || key == "synth_config") c.synth_config = value;
  else if (key == "from") c.from = parse_config_date(value);
  else if (key == "to") c.to = parse_config_date(value);
  else if (key == "strategies") c.strategies = value;
  else if (key == "fields") c.fields = value;
  else if (key == "adaptive") c.adaptive = value;
  else if (key == "out") c.out = value;
  else if (key == "seed") c.seed = parse_seed(value);
  else if (key == "weights") c.weights = value == "true" || value == "1";
  else throw ConfigError("unknown config key '" + key + "'");
}

AdaptiveMode parse_adaptive(const std::string& text) {
  if (text == "auto") return AdaptiveMode::Auto;
  if (text == "off") return AdaptiveMode::ForceOff;
  if (text == "on") return AdaptiveMode::ForceOn;
  throw ConfigError("adaptive must be auto, off or on, got '" + text + "'");
}

std::vector<Strategy> parse_strategies(const std::string& text) {
  if (io::trim(text).empty()) return {kAllStrategies.begin(), kAllStrategies.end()};
  std::vector<Strategy> out;
  for (const auto& token : io::split(text, ',')) {
    const Strategy s = parse_strategy(io::trim(token));
    if (std::find(out.begin(), out.end(), s) != out.end()) {
      throw ConfigError("strategy listed twice: " + strategy_name(s));
    }
    out.push_back(s);
  }
  return out;
}

void require_out(const RunConfig& c) {
  if (c.out.empty()) throw ConfigError("--out is required");
}

}  // namespace

RunConfig parse_run_config(const std::string& text, RunConfig base) {
  std::size_t line_no = 0;
  for (const auto& raw : io::split(text, '\n')) {
    ++line_no;
    const auto line = io::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    apply(base, std::string(io::trim(line.substr(0, eq))), std::string(io::trim(line.substr(eq + 1))));
  }
  return base;
}

PanelData load_run_panel(const RunConfig& c) {
  const bool files = !c.prices.empty() || !c.benchmarks.empty() || !c.riskfree.empty();
  if (!c.synth_config.empty()) {
    if (files) throw ConfigError("give either --synth-config or data files, not both");
    if (!c.seed) throw ConfigError("--seed is required with --synth-config");
    return generate_synthetic_panel(load_synth_config(c.synth_config), *c.seed);
  }
  if (c.prices.empty() || c.benchmarks.empty() || c.riskfree.empty()) {
    throw ConfigError("--prices, --benchmarks and --riskfree are required (or --synth-config)");
  }
  return load_panel(PanelFiles{c.prices, c.fundamentals, c.benchmarks, c.riskfree});
}

void cmd_synth(const RunConfig& c) {
  require_out(c);
  if (c.synth_config.empty()) throw ConfigError("synth: --synth-config is required");
  if (!c.seed) throw ConfigError("synth: --seed is required");
  write_panel(generate_synthetic_panel(load_synth_config(c.synth_config), *c.seed), c.out);
}

void cmd_study(const RunConfig& c) {
  require_out(c);
  const PanelData panel = load_run_panel(c);
  const FieldSpec spec = c.fields.empty() ? FieldSpec::full_study() : FieldSpec::parse(c.fields);

  DayRange a;
  if (c.from && c.to) {
    if (*c.from > *c.to) throw ConfigError("study: --from after --to");
    a = panel.range(*c.from, *c.to);
  } else {
    const Index begin = c.from ? std::max<Index>(panel.calendar().lower_bound(*c.from), 1) : 1;
    a = {begin, begin + kTradingYear};
  }
  const DayRange b{a.end, a.end + a.length()};
  if (a.length() < kMinFieldWindow || b.end > panel.days()) {
    throw DataError("study: panel does not hold two adjacent windows of " + std::to_string(a.length()) +
                    " days starting at day " + std::to_string(a.begin));
  }
  const CorrelationReport report = correlation_study(panel, a, b, spec);
  io::commit_files(c.out, {{"study_contemporary.csv", study_csv(report, StudyLeg::Contemporary)},
                           {"study_lagged.csv", study_csv(report, StudyLeg::Lagged)},
                           {"study.json", study_json(report, panel)}});
}

void cmd_backtest(const RunConfig& c) {
  require_out(c);
  BacktestOptions options;
  options.strategies = parse_strategies(c.strategies);
  if (!c.fields.empty()) options.fields = FieldSpec::parse(c.fields);
  options.adaptive = parse_adaptive(c.adaptive);
  if (c.from && c.to && *c.from > *c.to) throw ConfigError("backtest: --from after --to");

  const PanelData panel = load_run_panel(c);
  const auto& cal = panel.calendar();
  if (cal.size() <= kLookbackDays + 1) throw DataError("backtest: panel shorter than the lookback");
  const Date from = c.from ? *c.from : cal[kLookbackDays + 1];
  const Date to = c.to ? *c.to : cal[cal.size() - 1];

  const BacktestResult result = run_backtest(panel, from, to, options);
  const BacktestReport report = make_report(result);
  io::FileSet files{{"curves.csv", curves_csv(result)},
                    {"report.csv", report_csv(report)},
                    {"report.json", report_json(report, result)},
                    {"diagnostics.json", diagnostics_json(result, panel)}};
  if (c.weights) files.emplace("weights.csv", weights_csv(result, panel));
  io::commit_files(c.out, files);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Explanatory-field studies and monthly long-only allocation backtests", "corrfolio"};
  app.require_subcommand(1);

  std::map<std::string, std::string> given;
  std::string config_path;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "flat key = value file; flags override it");
    static const std::vector<std::pair<const char*, const char*>> options = {
        {"prices", "prices CSV (date,asset_id,close)"},
        {"fundamentals", "fundamentals CSV (optional)"},
        {"benchmarks", "benchmark levels CSV"},
        {"riskfree", "risk-free yield CSV"},
        {"synth-config", "generate the panel from this synthetic config instead of CSV inputs"},
        {"from", "first date, YYYY-MM-DD"},
        {"to", "last date, YYYY-MM-DD"},
        {"strategies", "comma list of EW,EF,RC,MIX,RC* (backtest)"},
        {"fields", "comma list of field ids"},
        {"adaptive", "auto, off or on (backtest)"},
        {"out", "output directory"},
        {"seed", "generator seed for --synth-config"}};
    for (const auto& [key, help] : options) sub->add_option(std::string("--") + key, given[key], help);
    sub->add_flag("--weights", "also write weights.csv (backtest)");
  };
  CLI::App* synth = app.add_subcommand("synth", "write a synthetic panel as CSV files");
  CLI::App* study = app.add_subcommand("study", "contemporary and lagged field correlations");
  CLI::App* backtest = app.add_subcommand("backtest", "monthly backtest of EW, EF, RC, MIX and RC*");
  for (CLI::App* sub : {synth, study, backtest}) add_common(sub);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  CLI::App* sub = synth->parsed() ? synth : study->parsed() ? study : backtest;
  const std::string module = sub->get_name();
  try {
    RunConfig config;
    if (!config_path.empty()) config = parse_run_config(io::read_text(config_path));
    for (const auto& [key, value] : given) {
      if (sub->count(std::string("--") + key) > 0) apply(config, key, value);
    }
    if (sub->count("--weights") > 0) config.weights = true;
    if (sub == synth) cmd_synth(config);
    else if (sub == study) cmd_study(config);
    else cmd_backtest(config);
  } catch (const DataError& e) {
    err << "corrfolio " << module << ": data error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericalError& e) {
    err << "corrfolio " << module << ": numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ConfigError& e) {
    err << "corrfolio " << module << ": config error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace corrfolio
