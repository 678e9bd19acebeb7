#include "evstud/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "evstud/errors.hpp"

namespace evstud {

namespace {

struct CsvReader {
  std::filesystem::path path;
  std::ifstream stream;
  std::size_t line_number = 0;

  explicit CsvReader(const std::filesystem::path& p) : path(p), stream(p) {
    if (!stream)
      throw Error(ErrorCode::ConfigError, "cannot open " + p.string());
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::ParseError,
                path.string() + ":" + std::to_string(line_number) + ": " + what);
  }

  bool next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(stream, line)) {
      ++line_number;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      fields.clear();
      std::size_t start = 0;
      while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
          fields.push_back(line.substr(start));
          break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
      }
      return true;
    }
    return false;
  }

  void expect_header(const std::vector<std::string>& expected) {
    std::vector<std::string> fields;
    if (!next(fields)) fail("missing header");
    if (fields != expected) {
      std::ostringstream want;
      for (std::size_t i = 0; i < expected.size(); ++i)
        want << (i ? "," : "") << expected[i];
      fail("bad header, expected '" + want.str() + "'");
    }
  }

  double parse_double(const std::string& field) const {
    double v;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size())
      fail("bad numeric field '" + field + "'");
    return v;
  }

  std::optional<double> parse_optional_double(const std::string& field) const {
    if (field.empty()) return std::nullopt;
    return parse_double(field);
  }

  Date parse_date_field(const std::string& field) const {
    try {
      return parse_date(field);
    } catch (const Error& e) {
      fail(e.what());
    }
  }
};

}  // namespace

std::pair<ReturnPanel, FactorSeries> load_panel(
    const std::filesystem::path& returns_csv, const std::filesystem::path& factors_csv) {
  struct FactorRow {
    double mkt, smb, hml, rf;
  };
  std::map<Date, FactorRow> factors;
  {
    CsvReader r(factors_csv);
    r.expect_header({"date", "mkt_rf", "smb", "hml", "rf"});
    std::vector<std::string> f;
    while (r.next(f)) {
      if (f.size() != 5) r.fail("expected 5 fields");
      Date d = r.parse_date_field(f[0]);
      factors[d] = {r.parse_double(f[1]), r.parse_double(f[2]), r.parse_double(f[3]),
                    r.parse_double(f[4])};
    }
    if (factors.empty()) r.fail("no factor rows");
  }

  std::map<Date, std::map<std::string, double>> returns;
  {
    CsvReader r(returns_csv);
    r.expect_header({"date", "firm_id", "ret"});
    std::vector<std::string> f;
    while (r.next(f)) {
      if (f.size() != 3) r.fail("expected 3 fields");
      Date d = r.parse_date_field(f[0]);
      if (f[1].empty()) r.fail("empty firm_id");
      double v = r.parse_double(f[2]);
      if (!returns[d].emplace(f[1], v).second)
        r.fail("duplicate return for firm " + f[1] + " on " + to_string(d));
    }
    if (returns.empty()) r.fail("no return rows");
  }

  std::vector<Date> days;
  days.reserve(returns.size());
  for (const auto& [d, _] : returns) {
    if (!factors.count(d))
      throw Error(ErrorCode::CoverageError,
                  "factors file has no row for trading day " + to_string(d));
    days.push_back(d);
  }

  std::vector<std::string> firm_ids;
  for (const auto& [_, by_firm] : returns)
    for (const auto& [firm, __] : by_firm)
      if (std::find(firm_ids.begin(), firm_ids.end(), firm) == firm_ids.end())
        firm_ids.push_back(firm);
  std::sort(firm_ids.begin(), firm_ids.end());

  ReturnPanel panel{firm_ids, TradingCalendar(days),
                    Eigen::MatrixXd::Constant(
                        static_cast<Eigen::Index>(firm_ids.size()),
                        static_cast<Eigen::Index>(days.size()),
                        std::numeric_limits<double>::quiet_NaN())};
  FactorSeries fs{panel.calendar,
                  Eigen::VectorXd(static_cast<Eigen::Index>(days.size())),
                  Eigen::VectorXd(static_cast<Eigen::Index>(days.size())),
                  Eigen::VectorXd(static_cast<Eigen::Index>(days.size())),
                  Eigen::VectorXd(static_cast<Eigen::Index>(days.size()))};

  for (std::size_t j = 0; j < days.size(); ++j) {
    const FactorRow& fr = factors.at(days[j]);
    auto jj = static_cast<Eigen::Index>(j);
    fs.mkt_excess(jj) = fr.mkt;
    fs.smb(jj) = fr.smb;
    fs.hml(jj) = fr.hml;
    fs.rf(jj) = fr.rf;
    for (const auto& [firm, raw] : returns.at(days[j])) {
      auto fi = static_cast<Eigen::Index>(
          std::lower_bound(firm_ids.begin(), firm_ids.end(), firm) - firm_ids.begin());
      panel.excess_returns(fi, jj) = raw - fr.rf;
    }
  }

  panel.validate();
  fs.validate();
  return {std::move(panel), std::move(fs)};
}

std::vector<EventRecord> load_events(const std::filesystem::path& events_csv,
                                     std::vector<std::string>* warnings) {
  CsvReader r(events_csv);
  r.expect_header({"event_id", "firm_id", "date", "incident_type", "sector",
                   "news_source", "market_cap_usd"});
  std::vector<EventRecord> events;
  std::vector<std::string> f;
  while (r.next(f)) {
    if (f.size() != 7) r.fail("expected 7 fields");
    EventRecord ev;
    ev.event_id = f[0];
    ev.firm_id = f[1];
    if (ev.event_id.empty() || ev.firm_id.empty()) r.fail("empty id field");
    ev.event_date = r.parse_date_field(f[2]);
    try {
      ev.incident_type = parse_incident_type(f[3]);
      ev.news_source = parse_news_source(f[5]);
    } catch (const Error& e) {
      r.fail(e.what());
    }
    try {
      ev.sector = parse_sector(f[4]);
    } catch (const Error&) {
      ev.sector = Sector::Other;
      if (warnings)
        warnings->push_back("event " + ev.event_id + ": unknown sector '" + f[4] +
                            "' mapped to Other");
    }
    ev.market_cap_usd = r.parse_optional_double(f[6]);
    if (ev.market_cap_usd && *ev.market_cap_usd < 0.0)
      r.fail("negative market_cap_usd");
    events.push_back(std::move(ev));
  }
  return events;
}

std::vector<FirmCharacteristics> load_characteristics(
    const std::filesystem::path& characteristics_csv) {
  CsvReader r(characteristics_csv);
  r.expect_header({"firm_id", "asof_date", "ln_size", "ln_age", "btm", "pe"});
  std::vector<FirmCharacteristics> rows;
  std::vector<std::string> f;
  while (r.next(f)) {
    if (f.size() != 6) r.fail("expected 6 fields");
    FirmCharacteristics c;
    c.firm_id = f[0];
    if (c.firm_id.empty()) r.fail("empty firm_id");
    c.asof_date = r.parse_date_field(f[1]);
    c.ln_size = r.parse_optional_double(f[2]);
    c.ln_age = r.parse_optional_double(f[3]);
    c.book_to_market = r.parse_optional_double(f[4]);
    c.price_to_earnings = r.parse_optional_double(f[5]);
    rows.push_back(std::move(c));
  }
  return rows;
}

}  // namespace evstud
