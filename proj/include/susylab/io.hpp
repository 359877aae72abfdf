#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace susylab {

// 17 significant digits, so every double reads back exactly.
std::string fmt17(double v);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}
  CsvTable& cell(double v);
  CsvTable& cell(std::int64_t v);
  CsvTable& cell(std::uint64_t v);
  CsvTable& cell(int v) { return cell(static_cast<std::int64_t>(v)); }
  CsvTable& cell(const std::string& v);
  CsvTable& cell(const char* v) { return cell(std::string(v)); }
  void end_row();
  std::size_t rows() const { return rows_.size(); }
  // "# config_hash: <hex>" then header and rows
  std::string render(const std::string& hash_hex) const;
  void write(const std::string& path, const std::string& hash_hex) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::string> current_;
};

void write_text(const std::string& path, const std::string& text);

}  // namespace susylab
