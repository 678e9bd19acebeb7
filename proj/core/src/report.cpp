#include "evstud/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>

#include <json.hpp>

#include "evstud/errors.hpp"

namespace evstud {

namespace {

using nlohmann::json;

std::string printf_fmt(const char* fmt, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

// Shortest representation that parses back to the same double.
std::string format_exact(double v) {
  for (int prec = 15; prec <= 17; ++prec) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return printf_fmt("%.17g", v);
}

std::string map_one(const std::string& column) {
  static const std::map<std::string, std::string, std::less<>> fixed = {
      {"const", "Constant"},
      {"type_other", "Other incident types"},
      {"ln_size", "Firm size (ln)"},
      {"ln_age", "Firm age (ln)"},
      {"btm", "Book-to-market"},
      {"pe", "Price-to-earnings"},
      {"type:DataBreach", "Data breach"},
      {"type:SoftwareBreach", "Software breach"},
      {"type:CyberBreach", "Cyber breach"},
      {"type:SocialBreach", "Social breach"},
      {"type:Ransomware", "Ransomware"},
      {"type:Shutdown", "Shutdown"},
      {"type:TwitterBreach", "Twitter breach"},
      {"type:FacebookBreach", "Facebook breach"},
      {"type:StolenFunds", "Stolen funds"},
      {"type:Mitigation", "Mitigation"},
      {"type:Other", "Other type"},
      {"sector:Technology", "Technology"},
      {"sector:ConsumerProducts", "Consumer products"},
      {"sector:Financials", "Financials"},
      {"sector:Healthcare", "Healthcare"},
      {"sector:Industrials", "Industrials"},
      {"sector:Other", "Other sector"},
      {"source:Reuters", "Reuters"},
      {"source:Twitter", "Twitter"},
      {"source:Other", "Other source"},
  };
  if (auto it = fixed.find(column); it != fixed.end()) return it->second;
  if (column.rfind("year:", 0) == 0) return column.substr(5);
  return column;
}

json rates_json(const RejectionRates& r) {
  return json{{"at_10", r.at_10}, {"at_5", r.at_5}, {"at_1", r.at_1}};
}

}  // namespace

std::string format_g6(double v) { return printf_fmt("%.6g", v); }

std::string display_name(const std::string& column) {
  std::size_t sep = column.find(" * ");
  if (sep == std::string::npos) return map_one(column);
  return map_one(column.substr(0, sep)) + " * " + map_one(column.substr(sep + 3));
}

void write_car_table_tsv(std::ostream& os, const CarTable& table) {
  os << "event_id\tfirm_id\tdate\tcar\tloss_usd\tincident_type\tsector\t"
        "news_source\tyear\n";
  for (const auto& row : table.rows) {
    os << row.event_id << '\t' << row.firm_id << '\t' << to_string(row.date) << '\t'
       << format_g6(row.car * 100.0) << '\t'
       << (row.loss_usd ? format_g6(*row.loss_usd) : std::string()) << '\t'
       << to_string(row.incident_type) << '\t' << to_string(row.sector) << '\t'
       << to_string(row.news_source) << '\t' << row.date.year << '\n';
  }
}

void write_aar_curve_tsv(std::ostream& os, const AarCurve& curve) {
  os << "offset\taar\tcaar\n";
  for (std::size_t i = 0; i < curve.offsets.size(); ++i)
    os << curve.offsets[i] << '\t' << format_g6(curve.aar[i] * 100.0) << '\t'
       << format_g6(curve.caar[i] * 100.0) << '\n';
}

void write_table1_tsv(std::ostream& os, const std::vector<Table1Row>& rows) {
  os << "model\tbenchmark\tmean_car_pct\tt_unadj\tt_adj_patell\tt_adj_bmp\t"
        "n_incidents\tn_days\n";
  for (const auto& row : rows) {
    const StatReport& r = row.report;
    os << to_string(row.estimator) << '\t' << to_string(row.benchmark) << '\t'
       << format_g6(r.mean_car * 100.0) << '\t' << format_g6(r.t_unadjusted) << '\t'
       << format_g6(r.t_adj_patell) << '\t' << format_g6(r.t_adj_bmp) << '\t' << r.n
       << '\t' << r.m << '\n';
  }
}

void write_panel_tsv(std::ostream& os, const std::string& title,
                     const PanelResult& result) {
  os << title << "\tCAR (%)\n";
  for (const auto& c : result.coefficients) {
    os << display_name(c.name) << '\t' << format_g6(c.estimate) << '\n';
    os << '\t' << '[' << format_g6(c.t_stat) << "]\n";
  }
  os << "Observations\t" << result.n_obs << '\n';
  os << "R-squared\t" << format_g6(result.r_squared) << '\n';
  if (result.dropped_rows > 0)
    os << "Dropped (missing covariates)\t" << result.dropped_rows << '\n';
  for (const auto& w : result.warnings) os << "# " << w << '\n';
}

std::string stat_report_json(const StatReport& r) {
  json j{{"mean_car", r.mean_car},
         {"n", r.n},
         {"n_firms", r.n_firms},
         {"r_bar", r.r_bar},
         {"s2", r.s2},
         {"sA2", r.sA2},
         {"t_unadjusted", r.t_unadjusted},
         {"t_adj_patell", r.t_adj_patell},
         {"t_adj_bmp", r.t_adj_bmp},
         {"m", r.m},
         {"p", r.p}};
  return j.dump(2);
}

std::string size_power_json(const SizePowerReport& r) {
  json j{{"unadjusted", rates_json(r.unadjusted)},
         {"adj_patell", rates_json(r.adj_patell)},
         {"adj_bmp", rates_json(r.adj_bmp)},
         {"mean_r_bar", r.mean_r_bar},
         {"mean_car", r.mean_car},
         {"n_reps", r.n_reps},
         {"failed_reps", r.failed_reps}};
  return j.dump(2);
}

std::string error_json(const Error& error) {
  json j{{"code", std::string(error.code_name())},
         {"message", error.what()},
         {"context", error.context()}};
  return j.dump();
}

void write_fixture_csvs(const std::filesystem::path& dir, const SimulatedRep& rep) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream os(dir / name, std::ios::binary);
    if (!os)
      throw Error(ErrorCode::ConfigError,
                  "cannot write " + (dir / name).string());
    return os;
  };

  {
    std::ofstream os = open("factors.csv");
    os << "date,mkt_rf,smb,hml,rf\n";
    for (std::size_t t = 0; t < rep.panel.calendar.size(); ++t) {
      auto tt = static_cast<Eigen::Index>(t);
      os << to_string(rep.panel.calendar[t]) << ','
         << format_exact(rep.factors.mkt_excess(tt)) << ','
         << format_exact(rep.factors.smb(tt)) << ','
         << format_exact(rep.factors.hml(tt)) << ','
         << format_exact(rep.factors.rf(tt)) << '\n';
    }
  }
  {
    // rf is zero in simulated panels, so excess returns are raw returns.
    std::ofstream os = open("returns.csv");
    os << "date,firm_id,ret\n";
    for (std::size_t t = 0; t < rep.panel.calendar.size(); ++t)
      for (std::size_t i = 0; i < rep.panel.firm_ids.size(); ++i) {
        double v = rep.panel.excess_returns(static_cast<Eigen::Index>(i),
                                            static_cast<Eigen::Index>(t));
        if (std::isnan(v)) continue;
        os << to_string(rep.panel.calendar[t]) << ',' << rep.panel.firm_ids[i] << ','
           << format_exact(v + rep.factors.rf(static_cast<Eigen::Index>(t))) << '\n';
      }
  }
  {
    std::ofstream os = open("events.csv");
    os << "event_id,firm_id,date,incident_type,sector,news_source,market_cap_usd\n";
    for (const auto& ev : rep.events) {
      os << ev.event_id << ',' << ev.firm_id << ',' << to_string(ev.event_date) << ','
         << to_string(ev.incident_type) << ',' << to_string(ev.sector) << ','
         << to_string(ev.news_source) << ','
         << (ev.market_cap_usd ? format_exact(*ev.market_cap_usd) : std::string())
         << '\n';
    }
  }
  {
    std::ofstream os = open("characteristics.csv");
    os << "firm_id,asof_date,ln_size,ln_age,btm,pe\n";
    auto opt = [](const std::optional<double>& v) {
      return v ? format_exact(*v) : std::string();
    };
    for (const auto& c : rep.characteristics) {
      os << c.firm_id << ',' << to_string(c.asof_date) << ',' << opt(c.ln_size) << ','
         << opt(c.ln_age) << ',' << opt(c.book_to_market) << ','
         << opt(c.price_to_earnings) << '\n';
    }
  }
}

}  // namespace evstud
