#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "ialm/error.hpp"
#include "ialm/experiments/libsvm.hpp"
#include "ialm/outer_loop.hpp"

namespace ialm {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  template <class... Cells>
  void add(const Cells&... cells) {
    rows.push_back({cell(cells)...});
  }

  static std::string cell(double v) { return format_real(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }
};

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string to_csv(const CsvTable& t) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(cells[i]);
    }
    out += '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) {
    require(r.size() == t.header.size(), ErrorKind::DimensionMismatch, "csv row width");
    line(r);
  }
  return out;
}

inline void write_csv(const std::string& path, const CsvTable& t) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorKind::Io, "cannot write " + path);
  out << to_csv(t);
  require(out.good(), ErrorKind::Io, "write failed for " + path);
}

inline CsvTable trace_table() {
  return {{"run_id", "outer_iter", "primal_res", "dual_res", "combined_res", "eta_k", "inner_iters"}, {}};
}

inline void append_trace(CsvTable& t, const std::string& run_id, const SolveTrace& trace) {
  for (const auto& r : trace.records)
    t.add(run_id, r.k, r.residuals.primal, r.residuals.dual, r.residuals.combined, r.eta, r.inner_iterations);
}

inline CsvTable aggregate_table(const std::vector<AggregateRow>& rows) {
  CsvTable t{{"outer_iter", "count", "combined_mean", "combined_min", "combined_q1", "combined_median",
              "combined_q3", "combined_max", "inner_iters_mean", "inner_iters_max"},
             {}};
  for (const auto& r : rows)
    t.add(r.k, r.count, r.combined.mean, r.combined.min, r.combined.q1, r.combined.median, r.combined.q3,
          r.combined.max, r.inner_iterations.mean, r.inner_iterations.max);
  return t;
}

}  // namespace ialm
