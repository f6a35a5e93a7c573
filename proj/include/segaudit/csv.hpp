#ifndef SEGAUDIT_CSV_HPP
#define SEGAUDIT_CSV_HPP

#include <string>
#include <vector>

namespace segaudit {

// Minimal RFC-4180-ish CSV. Quoted fields with embedded commas/quotes are
// handled on read; writes quote only when needed. LF line endings on write,
// CRLF tolerated on read.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a column name, -1 if absent.
  int column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text);
void write_csv(const CsvTable& table, const std::string& path);
std::string format_csv(const CsvTable& table);

}  // namespace segaudit

#endif
