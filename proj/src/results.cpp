#include "starkloop/results.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "starkloop/errors.hpp"

namespace starkloop {

namespace fs = std::filesystem;

void DataTable::add_row(std::initializer_list<double> values) {
  add_row(std::vector<double>(values));
}

void DataTable::add_row(std::vector<double> values) {
  if (values.size() != columns.size())
    throw DimensionError("table '" + name + "': row width " + std::to_string(values.size()) +
                         " does not match " + std::to_string(columns.size()) + " columns");
  rows.push_back(std::move(values));
}

std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string render_csv(const DataTable& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += table.columns[c];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_full(row[c]);
    }
    out += '\n';
  }
  return out;
}

namespace {

void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << content;
  }
  fs::rename(tmp, path);
}

}  // namespace

std::vector<std::string> ResultBundle::write(const std::string& dir) const {
  if (!config.experiment) throw Error("result bundle has an unbound config");
  fs::create_directories(dir);
  const std::string prefix = experiment_name(*config.experiment);

  std::vector<std::string> written;
  nlohmann::json manifest;
  manifest["experiment"] = prefix;
  manifest["version"] = provenance.version;
  manifest["seed"] = provenance.seed;
  manifest["n_max"] = provenance.n_max;
  manifest["epsilon_n"] = provenance.epsilon_n;
  manifest["wall_clock_seconds"] = provenance.wall_seconds;
  manifest["config_echo"] = serialize_config(config);
  manifest["tables"] = nlohmann::json::array();

  for (const DataTable& table : tables) {
    const std::string filename = std::string(prefix) + "_" + table.name + ".csv";
    write_atomic(fs::path(dir) / filename, render_csv(table));
    written.push_back((fs::path(dir) / filename).string());
    manifest["tables"].push_back(
        {{"name", table.name}, {"file", filename}, {"columns", table.columns}});
  }

  const fs::path manifest_path = fs::path(dir) / (std::string(prefix) + "_manifest.json");
  write_atomic(manifest_path, manifest.dump(2) + "\n");
  written.push_back(manifest_path.string());
  return written;
}

}  // namespace starkloop
