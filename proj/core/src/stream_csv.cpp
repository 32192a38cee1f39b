#include <istream>
#include <ostream>
#include <sstream>

#include "causalmon/errors.hpp"
#include "causalmon/kv_format.hpp"
#include "causalmon/simulator.hpp"

namespace causalmon {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

int parse_binary(const std::string& text, const char* column) {
  if (text == "0") return 0;
  if (text == "1") return 1;
  throw InputError(std::string("stream csv: column ") + column + " must be 0 or 1, got '" + text + "'");
}

}  // namespace

void write_stream_csv(std::ostream& out, std::span<const ObservationRecord> records) {
  const std::size_t d = records.empty() ? kCovariateDimension : records.front().x.size();
  out << "t";
  for (std::size_t j = 1; j <= d; ++j) out << ",x" << j;
  out << ",a,y_obs,y0,y1,f0,f1,propensity_used\n";
  for (const auto& r : records) {
    if (r.x.size() != d) throw InputError("stream csv: ragged covariate vectors");
    out << r.t;
    for (double v : r.x) out << ',' << format_double(v);
    out << ',' << r.a << ',' << r.y_obs << ',' << r.y0 << ',' << r.y1 << ',' << format_double(r.f0) << ','
        << format_double(r.f1) << ',' << format_double(r.propensity_used) << '\n';
  }
}

std::vector<ObservationRecord> read_stream_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("stream csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv(line);
  if (header.size() < 9 || header.front() != "t") throw InputError("stream csv: bad header");
  const std::size_t d = header.size() - 8;
  for (std::size_t j = 1; j <= d; ++j) {
    if (header[j] != "x" + std::to_string(j)) throw InputError("stream csv: bad covariate column " + header[j]);
  }
  const char* tail[] = {"a", "y_obs", "y0", "y1", "f0", "f1", "propensity_used"};
  for (std::size_t k = 0; k < 7; ++k) {
    if (header[d + 1 + k] != tail[k]) throw InputError("stream csv: expected column " + std::string(tail[k]));
  }

  std::vector<ObservationRecord> records;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != header.size()) throw InputError("stream csv: wrong field count in row " + f.front());
    ObservationRecord r;
    r.t = static_cast<std::int64_t>(parse_double(f[0]));
    r.x.resize(d);
    for (std::size_t j = 0; j < d; ++j) r.x[j] = parse_double(f[1 + j]);
    r.a = parse_binary(f[d + 1], "a");
    r.y_obs = parse_binary(f[d + 2], "y_obs");
    r.y0 = parse_binary(f[d + 3], "y0");
    r.y1 = parse_binary(f[d + 4], "y1");
    r.f0 = parse_double(f[d + 5]);
    r.f1 = parse_double(f[d + 6]);
    r.propensity_used = parse_double(f[d + 7]);
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace causalmon
