#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace mata::cli {

/// A numeric CSV table with leading '#' comment lines. Numbers are written
/// with 17 significant digits, so parse(write(t)) reproduces t exactly and a
/// parse/write cycle of an emitted file is byte-identical.
struct CsvTable {
  std::vector<std::string> comments;  // without the leading "# "
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column_index(const std::string& name) const;  // throws InputError
  std::vector<double> column(const std::string& name) const;

  void write(std::ostream& os) const;
  std::string to_string() const;
  /// Writes to a temporary sibling and renames it into place.
  void save(const std::filesystem::path& path) const;

  static CsvTable parse(std::istream& is);
  static CsvTable load(const std::filesystem::path& path);
};

std::string format_double(double v);

/// Throws InputError unless `path` can be created or overwritten.
void ensure_writable(const std::filesystem::path& path);

}  // namespace mata::cli
