#include "causalmon/reports.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "causalmon/errors.hpp"
#include "causalmon/kv_format.hpp"

namespace causalmon {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  return in;
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

std::string optional_number(const std::optional<double>& v) { return v ? format_double(*v) : "NA"; }

constexpr std::array<const char*, 10> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

std::size_t change_batch(const CellResult& cell) {
  if (!cell.change_time) return 0;
  return static_cast<std::size_t>((*cell.change_time + static_cast<std::int64_t>(cell.batch_size) - 1) /
                                  static_cast<std::int64_t>(cell.batch_size));
}

std::vector<PowerCurve> cell_power_curves(const CellResult& cell) {
  std::vector<PowerCurve> curves;
  for (const auto& m : cell.monitors) curves.push_back(power_curve(m.label, m.alarms(), cell.batch_count()));
  return curves;
}

std::vector<SummaryRow> summarize(const GridResult& grid) {
  std::vector<SummaryRow> rows;
  for (const auto& cell : grid.cells) {
    const auto offset = static_cast<double>(change_batch(cell));
    for (const auto& m : cell.monitors) {
      const auto alarms = m.alarms();
      SummaryRow row;
      row.cell = cell.cell;
      row.monitor = m.label;
      row.final_rate = estimate_power(alarms, cell.batch_count());
      if (auto median = median_alarm_batch(alarms)) row.median_delay_batches = *median - offset;
      row.replicates = alarms.size();
      row.errors = m.error_count();
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_power_csv(std::ostream& out, const std::string& cell, std::span<const PowerCurve> curves,
                     std::size_t batch_size) {
  out << "cell,monitor,batch,t_end_of_batch,power,mc_se\n";
  for (const auto& c : curves) {
    for (std::size_t b = 0; b < c.power.size(); ++b) {
      out << cell << ',' << c.monitor << ',' << (b + 1) << ',' << (b + 1) * batch_size << ','
          << format_double(c.power[b]) << ',' << format_double(c.mc_se[b]) << '\n';
    }
  }
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows) {
  out << "cell,monitor,type_i_or_power_final,median_delay_batches\n";
  for (const auto& r : rows) {
    out << r.cell << ',' << r.monitor << ',' << format_double(r.final_rate) << ','
        << optional_number(r.median_delay_batches) << '\n';
  }
}

void write_alarms_csv(std::ostream& out, const GridResult& grid) {
  out << "cell,monitor,replicate,alarm_batch,error\n";
  for (const auto& cell : grid.cells) {
    for (const auto& m : cell.monitors) {
      for (std::size_t r = 0; r < m.replicates.size(); ++r) {
        const auto& o = m.replicates[r];
        std::string error = o.error;
        std::replace(error.begin(), error.end(), ',', ';');
        std::replace(error.begin(), error.end(), '\n', ' ');
        out << cell.cell << ',' << m.label << ',' << r << ',';
        if (o.alarm_batch) out << *o.alarm_batch;
        out << ',' << error << '\n';
      }
    }
  }
}

std::string render_power_svg(const std::string& cell, std::span<const PowerCurve> curves, std::size_t batch_size,
                             std::int64_t horizon, std::optional<std::int64_t> change_time) {
  constexpr double width = 640, height = 400, left = 60, right = 130, top = 40, bottom = 50;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  const double t_max = static_cast<double>(std::max<std::int64_t>(horizon, 1));
  auto sx = [&](double t) { return left + plot_w * t / t_max; };
  auto sy = [&](double p) { return top + plot_h * (1.0 - p); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  svg << "<text x=\"" << left << "\" y=\"22\" font-size=\"14\">" << cell << "</text>\n";
  // Axes and grid.
  for (int i = 0; i <= 4; ++i) {
    const double p = i / 4.0;
    svg << "<line x1=\"" << left << "\" y1=\"" << fixed(sy(p), 2) << "\" x2=\"" << left + plot_w << "\" y2=\""
        << fixed(sy(p), 2) << "\" stroke=\"#e0e0e0\"/>\n";
    svg << "<text x=\"" << left - 8 << "\" y=\"" << fixed(sy(p) + 4, 2) << "\" text-anchor=\"end\">" << fixed(p, 2)
        << "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double t = t_max * i / 4.0;
    svg << "<text x=\"" << fixed(sx(t), 2) << "\" y=\"" << top + plot_h + 18 << "\" text-anchor=\"middle\">"
        << static_cast<long long>(std::llround(t)) << "</text>\n";
  }
  svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">time</text>\n";
  svg << "<text x=\"16\" y=\"" << top + plot_h / 2 << "\" transform=\"rotate(-90 16 " << top + plot_h / 2
      << ")\" text-anchor=\"middle\">proportion alarmed</text>\n";
  if (change_time) {
    const double x = sx(static_cast<double>(*change_time));
    svg << "<line x1=\"" << fixed(x, 2) << "\" y1=\"" << top << "\" x2=\"" << fixed(x, 2) << "\" y2=\""
        << top + plot_h << "\" stroke=\"black\" stroke-dasharray=\"6,4\"/>\n";
  }
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const char* color = kPalette[k % kPalette.size()];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"" << fixed(sx(0), 2)
        << ',' << fixed(sy(0), 2);
    for (std::size_t b = 0; b < curves[k].power.size(); ++b) {
      const double t = static_cast<double>((b + 1) * batch_size);
      svg << ' ' << fixed(sx(t), 2) << ',' << fixed(sy(curves[k].power[b]), 2);
    }
    svg << "\"/>\n";
    const double ly = top + 14 + 18.0 * static_cast<double>(k);
    svg << "<line x1=\"" << left + plot_w + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + plot_w + 34 << "\" y2=\""
        << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << left + plot_w + 40 << "\" y=\"" << ly + 4 << "\">" << curves[k].monitor << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_reports(const GridResult& grid, const std::filesystem::path& dir, bool svg) {
  std::filesystem::create_directories(dir);
  for (const auto& cell : grid.cells) {
    const auto curves = cell_power_curves(cell);
    auto out = open_out(dir / ("power_" + cell.cell + ".csv"));
    write_power_csv(out, cell.cell, curves, cell.batch_size);
    if (svg) {
      auto plot = open_out(dir / ("plot_" + cell.cell + ".svg"));
      plot << render_power_svg(cell.cell, curves, cell.batch_size, cell.horizon, cell.change_time);
    }
  }
  const auto rows = summarize(grid);
  {
    auto out = open_out(dir / "summary.csv");
    write_summary_csv(out, rows);
  }
  {
    auto out = open_out(dir / "alarms.csv");
    write_alarms_csv(out, grid);
  }
  {
    auto out = open_out(dir / "cells.csv");
    out << "cell,horizon,batch_size,change_time\n";
    for (const auto& cell : grid.cells) {
      out << cell.cell << ',' << cell.horizon << ',' << cell.batch_size << ',';
      if (cell.change_time) out << *cell.change_time;
      out << '\n';
    }
  }
}

LoadedReport read_report(const std::filesystem::path& dir) {
  LoadedReport report;
  std::string line;
  {
    auto in = open_in(dir / "cells.csv");
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto f = split(line);
      if (f.size() != 4) throw InputError("cells.csv: malformed row");
      CellMeta meta;
      meta.horizon = static_cast<std::int64_t>(parse_double(f[1]));
      meta.batch_size = static_cast<std::size_t>(parse_double(f[2]));
      if (!f[3].empty()) meta.change_time = static_cast<std::int64_t>(parse_double(f[3]));
      report.cells[f[0]] = meta;
    }
  }
  {
    auto in = open_in(dir / "summary.csv");
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto f = split(line);
      if (f.size() != 4) throw InputError("summary.csv: malformed row");
      SummaryRow row;
      row.cell = f[0];
      row.monitor = f[1];
      row.final_rate = parse_double(f[2]);
      if (f[3] != "NA") row.median_delay_batches = parse_double(f[3]);
      report.summary.push_back(std::move(row));
    }
  }
  for (const auto& [cell, meta] : report.cells) {
    auto in = open_in(dir / ("power_" + cell + ".csv"));
    std::getline(in, line);
    auto& curves = report.curves[cell];
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto f = split(line);
      if (f.size() != 6) throw InputError("power csv: malformed row");
      if (curves.empty() || curves.back().monitor != f[1]) curves.push_back(PowerCurve{f[1], {}, {}});
      curves.back().power.push_back(parse_double(f[4]));
      curves.back().mc_se.push_back(parse_double(f[5]));
    }
  }
  return report;
}

void print_summary_table(std::ostream& out, std::span<const SummaryRow> rows) {
  std::size_t cell_w = 4;
  for (const auto& r : rows) cell_w = std::max(cell_w, r.cell.size());
  out << std::left << std::setw(static_cast<int>(cell_w + 2)) << "cell" << std::setw(9) << "monitor" << std::right
      << std::setw(12) << "final_rate" << std::setw(14) << "median_delay" << '\n';
  for (const auto& r : rows) {
    out << std::left << std::setw(static_cast<int>(cell_w + 2)) << r.cell << std::setw(9) << r.monitor << std::right
        << std::setw(12) << fixed(r.final_rate, 3) << std::setw(14)
        << (r.median_delay_batches ? fixed(*r.median_delay_batches, 1) : std::string("NA")) << '\n';
  }
}

}  // namespace causalmon
