#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "causalmon/harness.hpp"

namespace causalmon {

struct SummaryRow {
  std::string cell;
  std::string monitor;
  double final_rate = 0.0;  // Type-I for null cells, power otherwise
  std::optional<double> median_delay_batches;
  std::size_t replicates = 0;
  std::size_t errors = 0;
};

std::vector<SummaryRow> summarize(const GridResult& grid);

std::vector<PowerCurve> cell_power_curves(const CellResult& cell);

/// Batch that contains the change time (1-based), or 0 without a shift.
std::size_t change_batch(const CellResult& cell);

void write_power_csv(std::ostream& out, const std::string& cell, std::span<const PowerCurve> curves,
                     std::size_t batch_size);
void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);
void write_alarms_csv(std::ostream& out, const GridResult& grid);

std::string render_power_svg(const std::string& cell, std::span<const PowerCurve> curves, std::size_t batch_size,
                             std::int64_t horizon, std::optional<std::int64_t> change_time);

/// power_<cell>.csv per cell, summary.csv, alarms.csv, cells.csv and, when
/// requested, plot_<cell>.svg.
void write_reports(const GridResult& grid, const std::filesystem::path& dir, bool svg = true);

struct CellMeta {
  std::int64_t horizon = 0;
  std::size_t batch_size = 0;
  std::optional<std::int64_t> change_time;
};

struct LoadedReport {
  std::vector<SummaryRow> summary;
  std::map<std::string, CellMeta> cells;
  std::map<std::string, std::vector<PowerCurve>> curves;
};

LoadedReport read_report(const std::filesystem::path& dir);
void print_summary_table(std::ostream& out, std::span<const SummaryRow> rows);

}  // namespace causalmon
