#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "evstud/csv.hpp"
#include "evstud/report.hpp"

namespace {

using namespace evstud;

struct DataPaths {
  std::string returns;
  std::string factors;
  std::string events;
  std::string characteristics;
};

struct CommonOptions {
  DataPaths paths;
  std::string benchmark = "ff3";
  std::string estimator = "ols";
  int window = 1;
  int curve_window = 5;
  double cap_floor_usd = 3.0e8;
  std::string range_start;
  std::string range_end;
  std::string limited_start;
  std::string limited_end;
  int min_obs = 100;
  bool iterate_sur = false;
  bool robust = false;
  int threads = 0;  // 0 = EVSTUD_THREADS or 1
  std::string output_dir = ".";
};

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("EVSTUD_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

RunSettings make_settings(const CommonOptions& opt, bool widen_for_curves) {
  RunSettings s;
  s.benchmark = parse_benchmark(opt.benchmark);
  s.estimator = parse_estimator(opt.estimator);
  s.car_window = EventWindow{opt.window, opt.window};
  s.dummy_window = widen_for_curves ? EventWindow{opt.curve_window, opt.curve_window}
                                    : s.car_window;
  s.filters.window = s.car_window;
  s.filters.cap_floor_usd = opt.cap_floor_usd;
  if (!opt.range_start.empty()) s.filters.range_start = parse_date(opt.range_start);
  if (!opt.range_end.empty()) s.filters.range_end = parse_date(opt.range_end);
  if (!opt.limited_start.empty()) s.limited_start = parse_date(opt.limited_start);
  if (!opt.limited_end.empty()) s.limited_end = parse_date(opt.limited_end);
  s.regression.min_obs = opt.min_obs;
  s.iterate_sur = opt.iterate_sur;
  s.threads = resolve_threads(opt.threads);
  return s;
}

void add_data_options(CLI::App* cmd, CommonOptions& opt, bool need_events = true) {
  cmd->add_option("--returns", opt.paths.returns, "returns.csv path")->required();
  cmd->add_option("--factors", opt.paths.factors, "factors.csv path")->required();
  auto* ev = cmd->add_option("--events", opt.paths.events, "events.csv path");
  if (need_events) ev->required();
  cmd->add_option("--characteristics", opt.paths.characteristics,
                  "characteristics.csv path");
}

void add_run_options(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--benchmark", opt.benchmark, "ff3 or zero")
      ->check(CLI::IsMember({"ff3", "zero"}));
  cmd->add_option("--estimator", opt.estimator, "ols, ols_limited or sur")
      ->check(CLI::IsMember({"ols", "ols_limited", "sur"}));
  cmd->add_option("--window", opt.window, "CAR half-window in trading days");
  cmd->add_option("--curve-window", opt.curve_window, "AAR/CAAR half-window");
  cmd->add_option("--cap-floor", opt.cap_floor_usd, "market-cap floor in USD");
  cmd->add_option("--range-start", opt.range_start, "sample start date (YYYY-MM-DD)");
  cmd->add_option("--range-end", opt.range_end, "sample end date");
  cmd->add_option("--limited-start", opt.limited_start, "limited-sample start date");
  cmd->add_option("--limited-end", opt.limited_end, "limited-sample end date");
  cmd->add_option("--min-obs", opt.min_obs, "minimum estimation observations per firm");
  cmd->add_flag("--iterate-sur", opt.iterate_sur, "iterate FGLS to convergence");
  cmd->add_flag("--robust", opt.robust, "HC1 standard errors in determinant tables");
  cmd->add_option("--threads", opt.threads,
                  "worker threads (default: EVSTUD_THREADS or 1)");
  cmd->add_option("--output-dir", opt.output_dir, "directory for output files");
}

struct LoadedData {
  ReturnPanel panel;
  FactorSeries factors;
  std::vector<EventRecord> events;
  std::vector<FirmCharacteristics> characteristics;
  std::vector<std::string> warnings;
};

LoadedData load_data(const DataPaths& paths) {
  auto [panel, factors] = load_panel(paths.returns, paths.factors);
  LoadedData d{std::move(panel), std::move(factors), {}, {}, {}};
  if (!paths.events.empty()) d.events = load_events(paths.events, &d.warnings);
  if (!paths.characteristics.empty())
    d.characteristics = load_characteristics(paths.characteristics);
  return d;
}

template <typename Emit>
void write_file(const std::filesystem::path& dir, const char* name, Emit&& emit) {
  std::filesystem::create_directories(dir);
  std::filesystem::path path = dir / name;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::ConfigError, "cannot write " + path.string());
  emit(os);
  if (!os) throw Error(ErrorCode::ConfigError, "write failed for " + path.string());
}

CarTable make_car_table(const LoadedData& data, const EstimationOutput& run,
                        const EventWindow& window) {
  CarTable table = build_car_table(run.estimates, run.scored_events, window);
  if (!data.characteristics.empty()) join_characteristics(table, data.characteristics);
  return table;
}

void emit_estimate_outputs(const CommonOptions& opt, const RunSettings& settings,
                           const LoadedData& data, const EstimationOutput& run) {
  CarTable table = make_car_table(data, run, settings.car_window);
  write_file(opt.output_dir, "car_table.tsv",
             [&](std::ostream& os) { write_car_table_tsv(os, table); });
  write_file(opt.output_dir, "stat_report.json", [&](std::ostream& os) {
    os << stat_report_json(run.report) << '\n';
  });
  write_file(opt.output_dir, "table1.tsv", [&](std::ostream& os) {
    write_table1_tsv(os, {{settings.estimator, settings.benchmark, run.report}});
  });
}

struct DeterminantTable {
  const char* file;
  std::string title;
  PanelSpec spec;
  std::vector<std::string> warnings;
};

DeterminantTable make_determinant_table(const std::string& which, int model,
                                        const CarTable& table) {
  DeterminantTable out;
  if (which == "years") {
    out.file = "table2.tsv";
    out.title = "Incident year";
    out.spec = build_spec_years(table, &out.warnings);
  } else if (which == "type_sector") {
    out.file = "table3.tsv";
    out.title = model == 2 ? "Incident type and sector" : "Incident type";
    out.spec = build_spec_type_sector(table, model, &out.warnings);
  } else if (which == "characteristics") {
    out.file = "table4.tsv";
    out.title = "Firm characteristics";
    out.spec = build_spec_characteristics(table, /*drop_empty_columns=*/true,
                                          &out.warnings);
  } else if (which == "source") {
    out.file = "table5.tsv";
    out.title = "News source";
    out.spec = build_spec_source(table, &out.warnings);
  } else {
    throw Error(ErrorCode::ConfigError, "unknown determinants table '" + which + "'");
  }
  return out;
}

void emit_determinant_table(const CommonOptions& opt, const CarTable& table,
                            const std::string& which, int model) {
  DeterminantTable t = make_determinant_table(which, model, table);
  PanelResult result = run_panel(table, t.spec, opt.robust);
  result.warnings.insert(result.warnings.begin(), t.warnings.begin(),
                         t.warnings.end());
  write_file(opt.output_dir, t.file,
             [&](std::ostream& os) { write_panel_tsv(os, t.title, result); });
}

int cmd_ingest_check(const CommonOptions& opt) {
  LoadedData data = load_data(opt.paths);
  std::cout << "{\"firms\": " << data.panel.firm_ids.size()
            << ", \"days\": " << data.panel.calendar.size()
            << ", \"events\": " << data.events.size()
            << ", \"characteristics\": " << data.characteristics.size()
            << ", \"warnings\": [";
  for (std::size_t i = 0; i < data.warnings.size(); ++i)
    std::cout << (i ? ", " : "") << "\"" << data.warnings[i] << "\"";
  std::cout << "]}" << std::endl;
  return 0;
}

int cmd_estimate(const CommonOptions& opt) {
  LoadedData data = load_data(opt.paths);
  RunSettings settings = make_settings(opt, /*widen_for_curves=*/false);
  EstimationOutput run = run_estimation(data.panel, data.factors, data.events, settings);
  emit_estimate_outputs(opt, settings, data, run);
  return 0;
}

int cmd_curves(const CommonOptions& opt) {
  LoadedData data = load_data(opt.paths);
  RunSettings settings = make_settings(opt, /*widen_for_curves=*/true);
  EstimationOutput run = run_estimation(data.panel, data.factors, data.events, settings);
  AarCurve curve = aar_caar(run.estimates, run.scored_events, settings.dummy_window);
  write_file(opt.output_dir, "aar_curve.tsv",
             [&](std::ostream& os) { write_aar_curve_tsv(os, curve); });
  return 0;
}

int cmd_determinants(const CommonOptions& opt, const std::string& which, int model) {
  LoadedData data = load_data(opt.paths);
  RunSettings settings = make_settings(opt, /*widen_for_curves=*/false);
  EstimationOutput run = run_estimation(data.panel, data.factors, data.events, settings);
  CarTable table = make_car_table(data, run, settings.car_window);
  emit_determinant_table(opt, table, which, model);
  return 0;
}

int cmd_report(const CommonOptions& opt) {
  LoadedData data = load_data(opt.paths);
  RunSettings settings = make_settings(opt, /*widen_for_curves=*/true);
  EstimationOutput run = run_estimation(data.panel, data.factors, data.events, settings);
  emit_estimate_outputs(opt, settings, data, run);
  CarTable table = make_car_table(data, run, settings.car_window);
  AarCurve curve = aar_caar(run.estimates, run.scored_events, settings.dummy_window);
  write_file(opt.output_dir, "aar_curve.tsv",
             [&](std::ostream& os) { write_aar_curve_tsv(os, curve); });
  emit_determinant_table(opt, table, "years", 1);
  emit_determinant_table(opt, table, "type_sector", 2);
  if (!data.characteristics.empty())
    emit_determinant_table(opt, table, "characteristics", 1);
  emit_determinant_table(opt, table, "source", 1);
  return 0;
}

struct SimulateOptions {
  SimConfig config;
  int dump_rep = -1;
  int threads = 0;
  std::string output_dir = ".";
  std::string benchmark = "ff3";
  bool scattered = false;
};

int cmd_simulate(SimulateOptions& opt) {
  opt.config.model = parse_benchmark(opt.benchmark);
  opt.config.events_clustered = !opt.scattered;
  if (opt.dump_rep >= 0) {
    SimulatedRep rep = simulate_panel(opt.config, opt.dump_rep);
    write_fixture_csvs(opt.output_dir, rep);
    return 0;
  }
  SizePowerReport report = run_size_power(opt.config, resolve_threads(opt.threads));
  write_file(opt.output_dir, "size_power.json", [&](std::ostream& os) {
    os << size_power_json(report) << '\n';
  });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-study toolkit for abnormal returns around cyber incidents"};
  app.require_subcommand(1);

  CommonOptions opt;
  std::string det_table = "years";
  int det_model = 1;
  SimulateOptions sim;

  auto* ingest = app.add_subcommand("ingest-check", "Validate input CSV files");
  add_data_options(ingest, opt, /*need_events=*/false);

  auto* estimate =
      app.add_subcommand("estimate", "Estimate ARs and cross-sectional statistics");
  add_data_options(estimate, opt);
  add_run_options(estimate, opt);

  auto* curves = app.add_subcommand("curves", "Emit the AAR/CAAR curve");
  add_data_options(curves, opt);
  add_run_options(curves, opt);

  auto* determinants =
      app.add_subcommand("determinants", "Cross-sectional determinant regressions");
  add_data_options(determinants, opt);
  add_run_options(determinants, opt);
  determinants->add_option("--table", det_table, "years, type_sector, characteristics or source")
      ->check(CLI::IsMember({"years", "type_sector", "characteristics", "source"}));
  determinants->add_option("--model", det_model, "type_sector model (1 or 2)")
      ->check(CLI::IsMember({1, 2}));

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo size/power harness");
  simulate->add_option("--n-firms", sim.config.n_firms, "firm count");
  simulate->add_option("--n-days", sim.config.n_days, "trading-day count");
  simulate->add_option("--n-events", sim.config.n_events, "event count");
  simulate->add_option("--rho", sim.config.rho, "residual cross-correlation");
  simulate->add_option("--multiplier", sim.config.event_var_multiplier,
                       "event-window variance multiplier");
  simulate->add_option("--injected-car", sim.config.injected_car,
                       "true CAR injected per event (decimal)");
  simulate->add_option("--seed", sim.config.seed, "RNG seed");
  simulate->add_option("--reps", sim.config.n_reps, "replication count");
  simulate->add_option("--benchmark", sim.benchmark, "ff3 or zero")
      ->check(CLI::IsMember({"ff3", "zero"}));
  simulate->add_flag("--scattered", sim.scattered,
                     "scatter events instead of clustering them");
  simulate->add_option("--dump-rep", sim.dump_rep,
                       "write one replication as fixture CSVs and exit");
  simulate->add_option("--threads", sim.threads,
                       "worker threads (default: EVSTUD_THREADS or 1)");
  simulate->add_option("--output-dir", sim.output_dir, "directory for output files");

  auto* report =
      app.add_subcommand("report", "Emit all tables and curves for one run");
  add_data_options(report, opt);
  add_run_options(report, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (ingest->parsed()) return cmd_ingest_check(opt);
    if (estimate->parsed()) return cmd_estimate(opt);
    if (curves->parsed()) return cmd_curves(opt);
    if (determinants->parsed()) return cmd_determinants(opt, det_table, det_model);
    if (simulate->parsed()) return cmd_simulate(sim);
    if (report->parsed()) return cmd_report(opt);
  } catch (const Error& e) {
    std::cerr << error_json(e) << std::endl;
    return error_exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << error_json(Error(ErrorCode::ContractError, e.what())) << std::endl;
    return 2;
  }
  return 0;
}
