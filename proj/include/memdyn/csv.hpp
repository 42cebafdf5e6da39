#ifndef MEMDYN_CSV_HPP_
#define MEMDYN_CSV_HPP_

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <ios>
#include <string>
#include <vector>

namespace memdyn
{

/// Shortest-safe round-trip text for a double.
inline std::string fmt(double x)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/**
 * @brief Comma-separated writer with a header row; numbers at round-trip precision.
 */
class CsvWriter
{
public:
  CsvWriter(const std::string & path, const std::vector<std::string> & header)
  : out_(path), path_(path)
  {
    if (!out_) {
      throw std::ios_base::failure("cannot open '" + path + "' for writing");
    }
    write_row_text(header);
  }

  void row(const std::vector<double> & values)
  {
    std::vector<std::string> text;
    text.reserve(values.size());
    for (const double v : values) {
      text.push_back(fmt(v));
    }
    write_row_text(text);
  }

  void row_text(const std::vector<std::string> & cells) { write_row_text(cells); }

  const std::string & path() const noexcept { return path_; }

private:
  void write_row_text(const std::vector<std::string> & cells)
  {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) {
        out_ << ',';
      }
      out_ << cells[k];
    }
    out_ << '\n';
    if (!out_) {
      throw std::ios_base::failure("write failed on '" + path_ + "'");
    }
  }

  std::ofstream out_;
  std::string path_;
};

}  // namespace memdyn

#endif  // MEMDYN_CSV_HPP_
