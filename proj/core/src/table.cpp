#include "stew/table.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace stew {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  return fmt::format("{:.9g}", x);
}

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size()) {
    throw std::invalid_argument(fmt::format("row has {} cells, header has {}", row.size(),
                                            header_.size()));
  }
  rows_.push_back(std::move(row));
}

void Table::write(std::ostream& out) const {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
}

std::string Table::str() const {
  std::ostringstream ss;
  write(ss);
  return ss.str();
}

void Table::save(const std::filesystem::path& path) const { write_text(path, str()); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace stew
