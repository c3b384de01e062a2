#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace acgap {

// Column-oriented training trace. CSV round-trips are byte-exact: values are
// written with 17 significant digits, which is lossless for doubles.
struct TrainingTrace {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
  int column_index(const std::string& name) const;  // -1 if absent
  std::vector<double> column(const std::string& name) const;

  void write_csv(const std::filesystem::path& path) const;
  static TrainingTrace read_csv(const std::filesystem::path& path);
};

// Mean and sample standard deviation (ddof = 1) of every non-index column,
// row-aligned across traces. All traces must share the schema and length.
// Output columns: index, then mean_<col> and std_<col> per remaining column.
TrainingTrace aggregate_traces(const std::vector<TrainingTrace>& traces,
                               const std::string& index_column);

}  // namespace acgap
