#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "evstud/car.hpp"
#include "evstud/errors.hpp"
#include "evstud/determinants.hpp"
#include "evstud/montecarlo.hpp"
#include "evstud/pipeline.hpp"

namespace evstud {

/// Stable 6-significant-digit formatting shared by every TSV emitter.
std::string format_g6(double v);

/// Human-readable labels for panel regressor columns ("type:DataBreach" ->
/// "Data breach", "ln_size" -> "Firm size (ln)", ...).
std::string display_name(const std::string& column);

struct Table1Row {
  EstimatorKind estimator = EstimatorKind::Ols;
  BenchmarkModel benchmark = BenchmarkModel::FF3;
  StatReport report;
};

// TSV emitters. CARs and coefficients are scaled to percent here and nowhere
// else; JSON emitters keep decimals.
void write_car_table_tsv(std::ostream& os, const CarTable& table);
void write_aar_curve_tsv(std::ostream& os, const AarCurve& curve);
void write_table1_tsv(std::ostream& os, const std::vector<Table1Row>& rows);
void write_panel_tsv(std::ostream& os, const std::string& title,
                     const PanelResult& result);

// JSON emitters; full precision.
std::string stat_report_json(const StatReport& report);
std::string size_power_json(const SizePowerReport& report);
std::string error_json(const Error& error);

/// Writes returns.csv, factors.csv, events.csv and characteristics.csv for one
/// simulated replication, in the loader schemas, with round-trip precision.
void write_fixture_csvs(const std::filesystem::path& dir, const SimulatedRep& rep);

}  // namespace evstud
