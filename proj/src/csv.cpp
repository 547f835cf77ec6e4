#include "binbo/csv.hpp"

#include "binbo/errors.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>

namespace binbo::csv
{
  std::string format_double(double v)
  {
    // fmt's default formatting is the shortest round-trip representation.
    return fmt::format("{}", v);
  }

  std::size_t Table::column(const std::string& name) const
  {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name)
        return i;
    throw IoError("CSV column '" + name + "' not found");
  }

  namespace
  {
    std::vector<std::string> split(const std::string& line)
    {
      std::vector<std::string> out;
      std::string field;
      std::istringstream in(line);
      while (std::getline(in, field, ','))
        out.push_back(field);
      if (!line.empty() && line.back() == ',')
        out.emplace_back();
      return out;
    }

    void append_row(std::string& out, const std::vector<std::string>& row)
    {
      for (std::size_t i = 0; i < row.size(); ++i)
      {
        if (i)
          out += ',';
        out += row[i];
      }
      out += '\n';
    }
  }

  Table read(const std::filesystem::path& path)
  {
    std::ifstream in(path);
    if (!in)
      throw IoError("cannot open " + path.string());
    Table t;
    std::string line;
    if (!std::getline(in, line))
      throw IoError(path.string() + " is empty");
    t.header = split(line);
    while (std::getline(in, line))
    {
      if (line.empty())
        continue;
      auto row = split(line);
      if (row.size() != t.header.size())
        throw IoError(path.string() + ": row with " + std::to_string(row.size())
                      + " fields, header has " + std::to_string(t.header.size()));
      t.rows.push_back(std::move(row));
    }
    return t;
  }

  std::string to_string(const Table& table)
  {
    std::string out;
    append_row(out, table.header);
    for (const auto& row : table.rows)
      append_row(out, row);
    return out;
  }

  void write(const std::filesystem::path& path, const Table& table)
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
      throw IoError("cannot write " + path.string());
    out << to_string(table);
    if (!out)
      throw IoError("write failed for " + path.string());
  }
}
