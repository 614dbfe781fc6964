#include "rydsim/report.hpp"

#include <cstdio>
#include <stdexcept>

namespace rydsim {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const FileMeta& meta,
                     const std::vector<std::string>& columns)
    : out_(path), n_columns_(columns.size()) {
  if (!out_) throw std::runtime_error("cannot open " + path.string());
  out_ << "# version=" << meta.version << " config_hash=" << meta.config_hash
       << " seed=" << meta.seed << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i)
    out_ << (i ? "," : "") << columns[i];
  out_ << "\n";
}

void CsvWriter::row(std::span<const double> values) {
  if (values.size() != n_columns_)
    throw std::invalid_argument("CsvWriter: column count mismatch");
  for (std::size_t i = 0; i < values.size(); ++i)
    out_ << (i ? "," : "") << format_double(values[i]);
  out_ << "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != n_columns_)
    throw std::invalid_argument("CsvWriter: column count mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i)
    out_ << (i ? "," : "") << cells[i];
  out_ << "\n";
}

void write_json_file(const std::filesystem::path& path, nlohmann::json payload,
                     const FileMeta& meta) {
  payload["meta"] = {{"version", meta.version},
                     {"config_hash", meta.config_hash},
                     {"seed", meta.seed}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << payload.dump(2) << "\n";
}

}  // namespace rydsim
