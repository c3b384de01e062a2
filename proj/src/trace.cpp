#include "acgap/trace.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace acgap {

namespace {
std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

void TrainingTrace::add_row(std::vector<double> row) {
  if (row.size() != columns.size())
    throw std::invalid_argument("TrainingTrace::add_row: width mismatch");
  rows.push_back(std::move(row));
}

int TrainingTrace::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

std::vector<double> TrainingTrace::column(const std::string& name) const {
  const int idx = column_index(name);
  if (idx < 0) throw std::invalid_argument("TrainingTrace: no column named " + name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row[static_cast<std::size_t>(idx)]);
  return out;
}

void TrainingTrace::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);  // binary keeps line endings stable
  if (!out) throw std::runtime_error("TrainingTrace: cannot open " + path.string());
  for (std::size_t i = 0; i < columns.size(); ++i)
    out << columns[i] << (i + 1 < columns.size() ? "," : "\n");
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << format_value(row[i]) << (i + 1 < row.size() ? "," : "\n");
  }
}

TrainingTrace TrainingTrace::read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("TrainingTrace: cannot open " + path.string());
  TrainingTrace trace;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("TrainingTrace: empty file");
  std::stringstream header(line);
  std::string cell;
  while (std::getline(header, cell, ',')) trace.columns.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != trace.columns.size())
      throw std::runtime_error("TrainingTrace: ragged row in " + path.string());
    trace.rows.push_back(std::move(row));
  }
  return trace;
}

TrainingTrace aggregate_traces(const std::vector<TrainingTrace>& traces,
                               const std::string& index_column) {
  if (traces.empty()) throw std::invalid_argument("aggregate_traces: no traces");
  const auto& first = traces.front();
  const int index = first.column_index(index_column);
  if (index < 0) throw std::invalid_argument("aggregate_traces: missing index column");
  for (const auto& t : traces)
    if (t.columns != first.columns || t.rows.size() != first.rows.size())
      throw std::invalid_argument("aggregate_traces: schema or length mismatch");

  TrainingTrace out;
  out.columns.push_back(index_column);
  for (std::size_t c = 0; c < first.columns.size(); ++c) {
    if (static_cast<int>(c) == index) continue;
    out.columns.push_back("mean_" + first.columns[c]);
    out.columns.push_back("std_" + first.columns[c]);
  }
  const double n = static_cast<double>(traces.size());
  for (std::size_t r = 0; r < first.rows.size(); ++r) {
    std::vector<double> row;
    row.push_back(first.rows[r][static_cast<std::size_t>(index)]);
    for (std::size_t c = 0; c < first.columns.size(); ++c) {
      if (static_cast<int>(c) == index) continue;
      double mean = 0.0;
      for (const auto& t : traces) mean += t.rows[r][c];
      mean /= n;
      double var = 0.0;
      for (const auto& t : traces) var += (t.rows[r][c] - mean) * (t.rows[r][c] - mean);
      var = traces.size() > 1 ? var / (n - 1.0) : 0.0;
      row.push_back(mean);
      row.push_back(std::sqrt(var));
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace acgap
