#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ialm/error.hpp"
#include "ialm/linalg.hpp"

namespace ialm {

struct LibsvmData {
  Matrix features;
  Vector labels;  // 0 where a line carries no label
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_real(std::string_view tok, std::size_t line) {
  // strtod accepts the leading '+' that labels commonly carry.
  const std::string s(tok);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
    throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

inline long long parse_index(std::string_view tok, std::size_t line) {
  long long v = 0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && tok.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (tok.empty() || ec != std::errc() || ptr != last)
    throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": bad index '" + std::string(tok) + "'");
  return v;
}

}  // namespace detail

// Reads LIBSVM text: optional label, then 1-based ascending index:value pairs.
// With a fixed width, indices beyond it are rejected; otherwise the width is
// the largest index seen.
inline LibsvmData parse_libsvm_stream(std::istream& in, std::optional<std::size_t> width = {}) {
  struct Row {
    double label = 0.0;
    std::vector<std::pair<std::size_t, double>> entries;
  };
  std::vector<Row> rows;
  std::size_t max_index = 0;
  std::string raw;
  for (std::size_t line = 1; std::getline(in, raw); ++line) {
    std::string_view text = raw;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = detail::trim(text);
    if (text.empty()) continue;
    Row row;
    long long prev = 0;
    bool first = true;
    std::size_t pos = 0;
    while (pos < text.size()) {
      const auto stop = text.find_first_of(" \t", pos);
      const std::string_view tok = text.substr(pos, stop == std::string_view::npos ? text.npos : stop - pos);
      pos = stop == std::string_view::npos ? text.size() : text.find_first_not_of(" \t", stop);
      if (pos == std::string_view::npos) pos = text.size();
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) {
        if (!first) throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": token without ':'");
        row.label = detail::parse_real(tok, line);
        first = false;
        continue;
      }
      first = false;
      const long long idx = detail::parse_index(tok.substr(0, colon), line);
      if (idx <= 0) throw Error(ErrorKind::Index, "line " + std::to_string(line) + ": non-positive index");
      if (width && static_cast<unsigned long long>(idx) > *width)
        throw Error(ErrorKind::Index, "line " + std::to_string(line) + ": index exceeds width");
      if (idx <= prev) throw Error(ErrorKind::Parse, "line " + std::to_string(line) + ": indices not ascending");
      prev = idx;
      row.entries.emplace_back(static_cast<std::size_t>(idx), detail::parse_real(tok.substr(colon + 1), line));
      max_index = std::max(max_index, static_cast<std::size_t>(idx));
    }
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), ErrorKind::Parse, "no instances in LIBSVM input");
  const std::size_t cols = width.value_or(max_index);
  require(cols > 0, ErrorKind::Parse, "no features in LIBSVM input");
  LibsvmData data{Matrix(rows.size(), cols), Vector(rows.size())};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    data.labels[i] = rows[i].label;
    for (const auto& [j, v] : rows[i].entries) data.features(i, j - 1) = v;
  }
  return data;
}

inline LibsvmData parse_libsvm_text(const std::string& text, std::optional<std::size_t> width = {}) {
  std::istringstream in(text);
  return parse_libsvm_stream(in, width);
}

inline LibsvmData parse_libsvm(const std::string& path, std::optional<std::size_t> width = {}) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::Io, "cannot open " + path);
  return parse_libsvm_stream(in, width);
}

inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Nonzero entries only, except that the last column is always written so
// the width survives a round trip.
inline std::string serialize_libsvm(const LibsvmData& data) {
  std::string out;
  for (std::size_t i = 0; i < data.features.rows(); ++i) {
    out += format_real(data.labels[i]);
    for (std::size_t j = 0; j < data.features.cols(); ++j) {
      const double v = data.features(i, j);
      if (v == 0.0 && j + 1 != data.features.cols()) continue;
      out += ' ';
      out += std::to_string(j + 1);
      out += ':';
      out += format_real(v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace ialm
