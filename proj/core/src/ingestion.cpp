#include "loadseg/ingestion.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "loadseg/errors.hpp"
#include "loadseg/io.hpp"
#include "loadseg/timestamp.hpp"

namespace loadseg {

namespace fs = std::filesystem;

double apparent_power(double p_kw, double q_kvar) {
  if (!std::isfinite(p_kw) || !std::isfinite(q_kvar))
    throw DataError("apparent power: non-finite P or Q");
  const double magnitude = std::hypot(p_kw, q_kvar);
  return p_kw < 0.0 ? -magnitude : magnitude;
}

double apparent_power_vi(double volts, double amps, double scale) {
  if (!std::isfinite(volts) || !std::isfinite(amps))
    throw DataError("apparent power: non-finite V or I");
  if (amps < 0.0) throw DataError("apparent power: negative current");
  return std::sqrt(3.0) * volts * amps * scale;
}

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

enum Column { kTimestamp, kP, kQ, kV, kI, kS, kB, kLabel, kNumColumns };
constexpr const char* kColumnNames[kNumColumns] = {
    "timestamp", "P", "Q", "V", "I", "S", "B", "label"};

std::string trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return std::string(s);
}

double parse_number(std::string_view cell, std::size_t row, const char* col) {
  const auto text = trim(cell);
  if (text.empty()) return kMissing;
  double v = 0.0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size() || !std::isfinite(v))
    throw DataError("unparseable " + std::string(col) + " value '" + text +
                    "' at row " + std::to_string(row));
  return v;
}

}  // namespace

StationSeries parse_station_csv(std::string_view text, std::string station_id,
                                const LoadOptions& options) {
  StationSeries st;
  st.station_id = std::move(station_id);
  bool declared_signed = false;

  std::istringstream in{std::string(text)};
  std::string line;
  std::array<int, kNumColumns> index{};
  index.fill(-1);
  bool have_header = false;
  std::size_t row = 0;

  while (std::getline(in, line)) {
    const auto stripped = trim(line);
    if (stripped.empty()) continue;
    if (!have_header && stripped.front() == '#') {
      auto body = trim(std::string_view(stripped).substr(1));
      if (body == "signed" || body == "signed=true" || body == "signed=1")
        declared_signed = true;
      continue;
    }
    const auto cells = split_csv_line(stripped);
    if (!have_header) {
      if (cells.size() != kNumColumns)
        throw DataError("station '" + st.station_id +
                        "': header must contain timestamp,P,Q,V,I,S,B,label");
      for (std::size_t c = 0; c < cells.size(); ++c) {
        const auto name = trim(cells[c]);
        bool found = false;
        for (int k = 0; k < kNumColumns; ++k) {
          if (name == kColumnNames[k] && index[k] < 0) {
            index[k] = static_cast<int>(c);
            found = true;
          }
        }
        if (!found)
          throw DataError("station '" + st.station_id +
                          "': unexpected header column '" + name + "'");
      }
      have_header = true;
      continue;
    }

    ++row;
    if (cells.size() != kNumColumns)
      throw DataError("station '" + st.station_id + "': wrong column count at row " +
                      std::to_string(row));
    auto cell = [&](Column c) { return cells[static_cast<std::size_t>(index[c])]; };

    try {
      st.timestamps.push_back(parse_timestamp(trim(cell(kTimestamp))));
    } catch (const DataError&) {
      throw DataError("station '" + st.station_id + "': bad timestamp at row " +
                      std::to_string(row));
    }

    const double p = parse_number(cell(kP), row, "P");
    const double q = parse_number(cell(kQ), row, "Q");
    const double v = parse_number(cell(kV), row, "V");
    const double i = parse_number(cell(kI), row, "I");
    const double s = parse_number(cell(kS), row, "S");
    const double b = parse_number(cell(kB), row, "B");

    double apparent = kMissing;
    if (!std::isnan(s)) {
      apparent = s;
    } else if (!std::isnan(p) && !std::isnan(q)) {
      apparent = apparent_power(p, q);
    } else if (!std::isnan(v) && !std::isnan(i)) {
      if (i < 0.0)
        throw DataError("station '" + st.station_id +
                        "': negative current at row " + std::to_string(row));
      apparent = apparent_power_vi(v, i, options.vi_scale);
    }
    st.s.push_back(apparent);
    st.b.push_back(b);

    const auto label_text = trim(cell(kLabel));
    if (label_text.empty() && !options.require_labels) {
      st.labels.push_back(Label::Normal);
      continue;
    }
    long label_value = -1;
    auto [ptr, ec] = std::from_chars(
        label_text.data(), label_text.data() + label_text.size(), label_value);
    const auto label = (ec == std::errc() &&
                        ptr == label_text.data() + label_text.size())
                           ? label_from_int(label_value)
                           : std::nullopt;
    if (!label)
      throw DataError("station '" + st.station_id + "': invalid label at row " +
                      std::to_string(row));
    st.labels.push_back(*label);
  }
  if (!have_header)
    throw DataError("station '" + st.station_id + "': missing header");

  st.sign_capable = declared_signed;
  for (double x : st.s)
    if (x < 0.0) st.sign_capable = true;
  st.validate();
  return st;
}

StationSeries load_station(const fs::path& path, const LoadOptions& options) {
  return parse_station_csv(read_file(path), path.stem().string(), options);
}

std::string station_to_csv(const StationSeries& st) {
  std::string out;
  out.reserve(st.size() * 48);
  if (st.sign_capable) out += "# signed\n";
  out += "timestamp,P,Q,V,I,S,B,label\n";
  for (std::size_t i = 0; i < st.size(); ++i) {
    out += format_timestamp(st.timestamps[i]);
    out += ",,,,,";
    out += format_double(st.s[i]);
    out += ',';
    out += format_double(st.b[i]);
    out += ',';
    out += std::to_string(to_int(st.labels[i]));
    out += '\n';
  }
  return out;
}

void write_station(const fs::path& path, const StationSeries& station) {
  write_file_atomic(path, station_to_csv(station));
}

std::vector<StationSeries> load_stations(const fs::path& dir,
                                         const LoadOptions& options) {
  std::vector<StationSeries> out;
  for (const auto& f : list_station_files(dir))
    out.push_back(load_station(f, options));
  return out;
}

std::string_view to_string(Split s) {
  switch (s) {
    case Split::Train:
      return "train";
    case Split::Validation:
      return "validation";
    case Split::Test:
      return "test";
  }
  return "?";
}

Split split_from_string(std::string_view s) {
  if (s == "train") return Split::Train;
  if (s == "validation") return Split::Validation;
  if (s == "test") return Split::Test;
  throw DataError("unknown split '" + std::string(s) + "'");
}

std::string split_to_csv(const SplitAssignment& split) {
  std::string out = "station_id,split\n";
  for (const auto& [id, s] : split) {
    out += id;
    out += ',';
    out += to_string(s);
    out += '\n';
  }
  return out;
}

SplitAssignment parse_split_csv(std::string_view text) {
  SplitAssignment out;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto cells = split_csv_line(t);
    if (header) {
      if (cells.size() != 2 || trim(cells[0]) != "station_id" ||
          trim(cells[1]) != "split")
        throw DataError("split file header must be station_id,split");
      header = false;
      continue;
    }
    if (cells.size() != 2) throw DataError("malformed split row '" + t + "'");
    const auto id = trim(cells[0]);
    if (!out.emplace(id, split_from_string(trim(cells[1]))).second)
      throw DataError("station '" + id + "' appears twice in split file");
  }
  return out;
}

SplitAssignment load_split(const fs::path& path) {
  return parse_split_csv(read_file(path));
}

}  // namespace loadseg
