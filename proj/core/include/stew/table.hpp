#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace stew {

/// Number formatting shared by every export: 9 significant digits, "nan" for NaN.
std::string format_number(double x);

/// Small comma-separated table. Cells are written verbatim; callers format numbers with
/// format_number so files diff cleanly between runs.
class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> row);
  const std::vector<std::string>& header() const noexcept { return header_; }
  const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }

  void write(std::ostream& out) const;
  std::string str() const;
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes `text` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace stew
