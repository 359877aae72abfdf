#include "susylab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "susylab/errors.hpp"

namespace susylab {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvTable& CsvTable::cell(double v) { return cell(fmt17(v)); }
CsvTable& CsvTable::cell(std::int64_t v) { return cell(std::to_string(v)); }
CsvTable& CsvTable::cell(std::uint64_t v) { return cell(std::to_string(v)); }

CsvTable& CsvTable::cell(const std::string& v) {
  if (v.find_first_of(",\"\n") != std::string::npos) throw InvalidInput("CSV cell needs quoting: '" + v + "'");
  current_.push_back(v);
  return *this;
}

void CsvTable::end_row() {
  if (current_.size() != columns_.size())
    throw InvalidInput("CSV row has " + std::to_string(current_.size()) + " cells, expected " +
                       std::to_string(columns_.size()));
  rows_.push_back(std::move(current_));
  current_.clear();
}

std::string CsvTable::render(const std::string& hash_hex) const {
  std::ostringstream o;
  o << "# config_hash: " << hash_hex << "\n";
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t k = 0; k < r.size(); ++k) o << (k ? "," : "") << r[k];
    o << "\n";
  };
  line(columns_);
  for (const auto& r : rows_) line(r);
  return o.str();
}

void CsvTable::write(const std::string& path, const std::string& hash_hex) const {
  write_text(path, render(hash_hex));
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << text;
  if (!out) throw InvalidInput("write failed for '" + path + "'");
}

}  // namespace susylab
