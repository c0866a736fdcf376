#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pesel/errors.hpp"
#include "pesel/matrix.hpp"

namespace pesel {
namespace {

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

bool blank(std::string_view line) { return trim(line).empty(); }

}  // namespace

DataMatrix load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open '" + path.string() + "'");

  std::vector<double> cells;
  std::size_t width = 0;
  std::size_t data_rows = 0;
  std::size_t line_no = 0;
  bool header_pending = options.has_header;
  std::string line;

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    if (blank(view)) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }

    std::size_t column = 0;
    std::size_t start = 0;
    while (true) {
      const auto stop = view.find(options.delimiter, start);
      const auto raw = view.substr(start, stop == std::string_view::npos ? std::string_view::npos : stop - start);
      const auto cell = trim(raw);
      ++column;

      double value = 0.0;
      const auto* first = cell.data();
      const auto* last = cell.data() + cell.size();
      if (!cell.empty() && *first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, last, value);
      if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
        std::ostringstream msg;
        msg << path.string() << ": row " << line_no << ", column " << column << ": cannot parse '" << cell
            << "' as a finite number";
        throw ParseError(msg.str(), line_no, column);
      }
      cells.push_back(value);

      if (stop == std::string_view::npos) break;
      start = stop + 1;
    }

    if (data_rows == 0) {
      width = column;
    } else if (column != width) {
      std::ostringstream msg;
      msg << path.string() << ": row " << line_no << " has " << column << " fields, expected " << width;
      throw IngestError(msg.str());
    }
    ++data_rows;
  }

  if (data_rows == 0) throw IngestError(path.string() + ": no data rows");

  Matrix values(static_cast<Index>(data_rows), static_cast<Index>(width));
  for (std::size_t i = 0; i < data_rows; ++i)
    for (std::size_t j = 0; j < width; ++j)
      values(static_cast<Index>(i), static_cast<Index>(j)) = cells[i * width + j];
  return DataMatrix(std::move(values));
}

void write_csv(const std::filesystem::path& path, const Matrix& values) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << std::setprecision(17);
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j) {
      if (j) out << ',';
      out << values(i, j);
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace pesel
