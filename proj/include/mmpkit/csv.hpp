#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "mmpkit/dataset.hpp"
#include "mmpkit/error.hpp"

namespace mmpkit {

namespace detail {

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(trim(std::string_view(line).substr(start)));
      break;
    }
    fields.push_back(trim(std::string_view(line).substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

inline double parse_cell(const std::string& text, std::size_t row,
                         const char* column) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ParseError("row " + std::to_string(row) + ", column " + column +
                     ": cannot parse '" + text + "' as a finite number");
  }
  return value;
}

/// Shortest decimal representation that round-trips the double.
inline std::string format_double(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace detail

/// Reads a canonical-format databank CSV.
///
/// The header must name the six columns in order:
///   tcm,volatile,intermediate,mwc7plus,temperature,mmp
/// Inputs outside the reference databank ranges are reported through
/// `warnings` (when given) but accepted; the reference bounds describe a
/// sample, not the population.
inline Dataset load_csv(const std::string& path, Warnings* warnings = nullptr) {
  std::ifstream in(path);
  if (!in) {
    throw ArgumentError("cannot open file: " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw SchemaError(path + ": empty file, expected header row");
  }
  if (!line.empty() && line.front() == '\xEF') {
    // strip UTF-8 BOM
    if (line.size() >= 3 && line[1] == '\xBB' && line[2] == '\xBF') {
      line.erase(0, 3);
    }
  }
  const auto header = detail::split_line(line);
  for (int c = 0; c < kColumnCount; ++c) {
    if (static_cast<std::size_t>(c) >= header.size() ||
        header[c] != kColumnNames[c]) {
      throw SchemaError(path + ": header missing column '" +
                        std::string(kColumnNames[c]) + "' at position " +
                        std::to_string(c + 1));
    }
  }
  if (header.size() > static_cast<std::size_t>(kColumnCount)) {
    throw SchemaError(path + ": header has " + std::to_string(header.size()) +
                      " columns, expected " + std::to_string(kColumnCount));
  }

  std::vector<Sample> samples;
  std::size_t row = 1;  // header was row 1
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_line(line);
    if (fields.size() != static_cast<std::size_t>(kColumnCount)) {
      throw ParseError("row " + std::to_string(row) + ": expected " +
                       std::to_string(kColumnCount) + " fields, found " +
                       std::to_string(fields.size()));
    }
    std::array<double, kColumnCount> values{};
    for (int c = 0; c < kColumnCount; ++c) {
      values[c] = detail::parse_cell(fields[c], row, kColumnNames[c]);
    }
    Sample s;
    s.features = FeatureVector{values[0], values[1], values[2], values[3],
                               values[4]};
    s.mmp = values[5];
    try {
      s.validate("row " + std::to_string(row));
    } catch (const ArgumentError& e) {
      throw ParseError(e.what());
    }
    if (warnings != nullptr) {
      for (int c = 0; c < kColumnCount; ++c) {
        if (values[c] < ReferenceStats::kMin[c] ||
            values[c] > ReferenceStats::kMax[c]) {
          std::ostringstream os;
          os << "row " << row << ", column " << kColumnNames[c] << ": value "
             << values[c] << " outside reference range ["
             << ReferenceStats::kMin[c] << ", " << ReferenceStats::kMax[c]
             << "]";
          warnings->push_back(os.str());
        }
      }
    }
    samples.push_back(s);
  }
  if (samples.empty()) {
    throw EmptyDatasetError(path + ": no data rows");
  }
  return Dataset::from_samples(samples);
}

/// Writes a dataset in canonical CSV format. Values use the shortest
/// representation that round-trips, so load_csv(save_csv(d)) == d exactly.
inline void save_csv(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) {
    throw ArgumentError("cannot open file for writing: " + path);
  }
  for (int c = 0; c < kColumnCount; ++c) {
    out << kColumnNames[c] << (c + 1 < kColumnCount ? ',' : '\n');
  }
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (int c = 0; c < kFeatureCount; ++c) {
      out << detail::format_double(data.inputs()(i, c)) << ',';
    }
    out << detail::format_double(data.targets()[i]) << '\n';
  }
}

}  // namespace mmpkit
