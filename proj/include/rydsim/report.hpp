#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace rydsim {

// Stamp embedded in every emitted file.
struct FileMeta {
  std::string version;
  std::string config_hash;
  std::uint64_t seed = 0;
};

std::string format_double(double v);  // %.12g, locale-independent

// CSV with two leading comment lines (metadata, column names). Rows are
// written with a stable numeric format so identical runs produce identical
// bytes.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const FileMeta& meta,
            const std::vector<std::string>& columns);

  void row(std::span<const double> values);
  void row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
  std::size_t n_columns_;
};

// JSON with the metadata injected under "meta".
void write_json_file(const std::filesystem::path& path, nlohmann::json payload,
                     const FileMeta& meta);

}  // namespace rydsim
