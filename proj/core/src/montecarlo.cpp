#include "evstud/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

#include "evstud/errors.hpp"
#include "evstud/parallel.hpp"
#include "evstud/regression.hpp"

namespace evstud {

void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& body) {
  if (threads < 1) threads = 1;
  if (threads == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  int n_workers = std::min<int>(threads, static_cast<int>(n));
  pool.reserve(static_cast<std::size_t>(n_workers));
  for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 rep_stream(std::uint64_t seed, int rep_index) {
  return std::mt19937_64(
      splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(rep_index))));
}

constexpr int kClusterBlockGap = 20;
constexpr int kScatterMinSpacing = 12;

}  // namespace

void SimConfig::validate() const {
  if (rho < 0.0 || rho > 0.9)
    throw Error(ErrorCode::ConfigError,
                "rho must be in [0, 0.9], got " + std::to_string(rho));
  if (event_var_multiplier < 1.0)
    throw Error(ErrorCode::ConfigError, "event_var_multiplier must be >= 1");
  if (n_reps < 1)
    throw Error(ErrorCode::ConfigError, "n_reps must be >= 1");
  if (n_firms < 1 || n_days < 10 || n_events < 1)
    throw Error(ErrorCode::ConfigError, "simulation dimensions too small");
  int margin = window.pre_days + window.post_days + 2;
  int blocks = (n_events + n_firms - 1) / n_firms;
  if (events_clustered && n_days / 2 + blocks * kClusterBlockGap + margin >= n_days)
    throw Error(ErrorCode::ConfigError, "too many clustered events for n_days");
}

SimulatedRep simulate_panel(const SimConfig& config, int rep_index) {
  config.validate();
  std::mt19937_64 rng = rep_stream(config.seed, rep_index);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const int nf = config.n_firms;
  const int nd = config.n_days;

  // Per-firm loadings, drawn once per rep.
  std::vector<double> beta_mkt(nf), beta_smb(nf), beta_hml(nf);
  for (int i = 0; i < nf; ++i) {
    beta_mkt[i] = 0.5 + unit(rng);
    beta_smb[i] = unit(rng) - 0.5;
    beta_hml[i] = unit(rng) - 0.5;
  }

  TradingCalendar calendar =
      make_weekday_calendar(config.calendar_start, static_cast<std::size_t>(nd));
  FactorSeries factors{calendar, Eigen::VectorXd(nd), Eigen::VectorXd(nd),
                       Eigen::VectorXd(nd), Eigen::VectorXd::Zero(nd)};
  for (int t = 0; t < nd; ++t) {
    factors.mkt_excess(t) = config.mkt_vol * gauss(rng);
    factors.smb(t) = config.smb_vol * gauss(rng);
    factors.hml(t) = config.hml_vol * gauss(rng);
  }

  // Equicorrelated residuals from a common factor.
  Eigen::MatrixXd resid(nf, nd);
  const double w_common = std::sqrt(config.rho);
  const double w_idio = std::sqrt(1.0 - config.rho);
  for (int t = 0; t < nd; ++t) {
    double z = gauss(rng);
    for (int i = 0; i < nf; ++i)
      resid(i, t) = config.resid_vol * (w_common * z + w_idio * gauss(rng));
  }

  // Event placement.
  struct Placement {
    int firm;
    int day;
  };
  std::vector<Placement> placements;
  placements.reserve(static_cast<std::size_t>(config.n_events));
  const int margin = config.window.pre_days + config.window.post_days + 2;
  if (config.events_clustered) {
    const int base = nd / 2;
    for (int e = 0; e < config.n_events; ++e)
      placements.push_back({e % nf, base + (e / nf) * kClusterBlockGap});
  } else {
    std::vector<std::vector<int>> firm_days(static_cast<std::size_t>(nf));
    std::uniform_int_distribution<int> day_dist(margin, nd - 1 - margin);
    for (int e = 0; e < config.n_events; ++e) {
      int firm = e % nf;
      int day = 0;
      for (int attempt = 0;; ++attempt) {
        day = day_dist(rng);
        bool ok = true;
        for (int d : firm_days[static_cast<std::size_t>(firm)])
          if (std::abs(d - day) < kScatterMinSpacing) {
            ok = false;
            break;
          }
        if (ok) break;
        if (attempt > 10000)
          throw Error(ErrorCode::ConfigError,
                      "cannot place scattered events without overlap");
      }
      firm_days[static_cast<std::size_t>(firm)].push_back(day);
      placements.push_back({firm, day});
    }
  }

  // Event-window effects: mean shift plus variance inflation.
  const double per_day_shift =
      config.injected_car / static_cast<double>(config.window.length());
  const double vol_scale = std::sqrt(config.event_var_multiplier);
  for (const auto& p : placements)
    for (int off = -config.window.pre_days; off <= config.window.post_days; ++off) {
      int day = p.day + off;
      resid(p.firm, day) = resid(p.firm, day) * vol_scale + per_day_shift;
    }

  SimulatedRep rep{ReturnPanel{{}, calendar, Eigen::MatrixXd(nf, nd)},
                   std::move(factors),
                   {},
                   {}};
  for (int i = 0; i < nf; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "F%03d", i);
    rep.panel.firm_ids.emplace_back(buf);
  }
  for (int i = 0; i < nf; ++i)
    for (int t = 0; t < nd; ++t)
      rep.panel.excess_returns(i, t) = beta_mkt[static_cast<std::size_t>(i)] *
                                           rep.factors.mkt_excess(t) +
                                       beta_smb[static_cast<std::size_t>(i)] *
                                           rep.factors.smb(t) +
                                       beta_hml[static_cast<std::size_t>(i)] *
                                           rep.factors.hml(t) +
                                       resid(i, t);

  std::uniform_real_distribution<double> cap_dist(5.0e8, 5.0e10);
  for (int e = 0; e < config.n_events; ++e) {
    const auto& p = placements[static_cast<std::size_t>(e)];
    EventRecord ev;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "ev%04d", e);
    ev.event_id = buf;
    ev.firm_id = rep.panel.firm_ids[static_cast<std::size_t>(p.firm)];
    ev.event_date = calendar[static_cast<std::size_t>(p.day)];
    ev.incident_type = static_cast<IncidentType>(e % kIncidentTypeCount);
    ev.sector = static_cast<Sector>(e % kSectorCount);
    ev.news_source = static_cast<NewsSource>(e % kNewsSourceCount);
    ev.market_cap_usd = cap_dist(rng);
    rep.events.push_back(std::move(ev));
  }

  for (int i = 0; i < nf; ++i) {
    FirmCharacteristics c;
    c.firm_id = rep.panel.firm_ids[static_cast<std::size_t>(i)];
    c.asof_date = config.calendar_start;
    c.ln_size = 20.0 + 6.0 * unit(rng);
    c.ln_age = 0.5 + 3.5 * unit(rng);
    c.book_to_market = 0.2 + 1.3 * unit(rng);
    if (unit(rng) < 0.9)
      c.price_to_earnings = 5.0 + 35.0 * unit(rng);
    rep.characteristics.push_back(std::move(c));
  }
  return rep;
}

SizePowerReport run_size_power(const SimConfig& config, int threads) {
  config.validate();

  struct RepOutcome {
    bool failed = false;
    double r_bar = 0.0;
    double mean_car = 0.0;
    double t_unadjusted = 0.0;
    double t_adj_patell = 0.0;
    double t_adj_bmp = 0.0;
  };
  std::vector<RepOutcome> outcomes(static_cast<std::size_t>(config.n_reps));

  RegressionConfig reg;
  reg.min_obs = std::min(100, config.n_days / 2);
  reg.require_balanced = true;
  reg.min_overlap = std::max(2, std::min(60, config.n_days / 2));

  parallel_for(static_cast<std::size_t>(config.n_reps), threads, [&](std::size_t r) {
    RepOutcome& out = outcomes[r];
    try {
      SimulatedRep rep = simulate_panel(config, static_cast<int>(r));
      auto resolved = resolve_events(rep.events, rep.panel.calendar);
      std::vector<ArEstimate> estimates;
      estimates.reserve(rep.panel.firm_ids.size());
      for (const auto& firm : rep.panel.firm_ids) {
        DesignMatrix d = build_design(firm, rep.panel, rep.factors, resolved,
                                      config.window, config.model, reg);
        estimates.push_back(fit_ols(d, reg));
      }
      ResidualCorrelation corr =
          residual_correlation(estimates, CorrelationMode::Balanced, reg.min_overlap);
      StatReport stat = stat_report(estimates, resolved, corr.mean_offdiag,
                                    config.window, config.n_days);
      out.r_bar = stat.r_bar;
      out.mean_car = stat.mean_car;
      out.t_unadjusted = stat.t_unadjusted;
      out.t_adj_patell = stat.t_adj_patell;
      out.t_adj_bmp = stat.t_adj_bmp;
    } catch (const Error&) {
      out.failed = true;
    }
  });

  SizePowerReport report;
  report.n_reps = config.n_reps;
  auto tally = [](RejectionRates& rates, double t) {
    if (std::abs(t) > 1.6448536269514722) rates.at_10 += 1.0;
    if (std::abs(t) > 1.9599639845400545) rates.at_5 += 1.0;
    if (std::abs(t) > 2.5758293035489004) rates.at_1 += 1.0;
  };
  int ok = 0;
  for (const auto& out : outcomes) {
    if (out.failed) {
      ++report.failed_reps;
      continue;
    }
    ++ok;
    tally(report.unadjusted, out.t_unadjusted);
    tally(report.adj_patell, out.t_adj_patell);
    tally(report.adj_bmp, out.t_adj_bmp);
    report.mean_r_bar += out.r_bar;
    report.mean_car += out.mean_car;
  }
  if (report.failed_reps > config.n_reps / 100)
    throw Error(ErrorCode::NumericalError,
                std::to_string(report.failed_reps) + " of " +
                    std::to_string(config.n_reps) + " replications failed");
  if (ok > 0) {
    double denom = static_cast<double>(ok);
    for (RejectionRates* rates :
         {&report.unadjusted, &report.adj_patell, &report.adj_bmp}) {
      rates->at_10 /= denom;
      rates->at_5 /= denom;
      rates->at_1 /= denom;
    }
    report.mean_r_bar /= denom;
    report.mean_car /= denom;
  }
  return report;
}

}  // namespace evstud
