#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace binbo::csv
{
  /// Shortest text that round-trips the double exactly.
  std::string format_double(double v);

  struct Table
  {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index by name; throws IoError if absent.
    std::size_t column(const std::string& name) const;
  };

  /// Fields never contain commas or quotes here (names are validated), so
  /// this is plain split-on-comma CSV with a header row.
  Table read(const std::filesystem::path& path);
  void write(const std::filesystem::path& path, const Table& table);
  std::string to_string(const Table& table);
}
