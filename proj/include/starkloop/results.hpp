#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "starkloop/config.hpp"

namespace starkloop {

// One column-labeled numeric table; complex series are stored as paired
// re/im columns.
struct DataTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  DataTable() = default;
  DataTable(std::string table_name, std::vector<std::string> column_names)
      : name(std::move(table_name)), columns(std::move(column_names)) {}

  void add_row(std::initializer_list<double> values);
  void add_row(std::vector<double> values);
};

struct Provenance {
  std::string version;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  int n_max = 0;
  double epsilon_n = 0.0;  // truncation error achieved at the production order
};

struct ResultBundle {
  ExperimentConfig config;
  std::vector<DataTable> tables;
  Provenance provenance;

  // Writes one CSV per table plus a JSON manifest into dir (creating it),
  // write-temp-then-rename. Returns the written file paths.
  std::vector<std::string> write(const std::string& dir) const;
};

// Full round-trip formatting (17 significant digits).
std::string format_full(double v);

std::string render_csv(const DataTable& table);

}  // namespace starkloop
