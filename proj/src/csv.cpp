#include "sparsecov/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include "sparsecov/errors.hpp"

namespace sparsecov {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return cells;
}

std::optional<double> parse_number(std::string_view cell) {
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
  return v;
}

}  // namespace

DataTable read_csv(std::istream& in) {
  DataTable table;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (line_no == 1 && view.size() >= 3 && view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
    if (trim(view).empty()) continue;

    const auto cells = split_commas(view);
    std::vector<double> row;
    row.reserve(cells.size());
    bool numeric = true;
    for (const auto cell : cells) {
      const auto v = parse_number(cell);
      if (!v) {
        numeric = false;
        break;
      }
      row.push_back(*v);
    }

    if (!numeric) {
      if (rows.empty() && table.header.empty()) {
        for (const auto cell : cells) table.header.emplace_back(cell);
        width = cells.size();
        continue;
      }
      throw InvalidInput("line " + std::to_string(line_no) + ": non-numeric value");
    }
    for (const double v : row) {
      if (!std::isfinite(v)) throw InvalidInput("line " + std::to_string(line_no) + ": non-finite value");
    }
    if (width == 0) width = row.size();
    if (row.size() != width) {
      throw InvalidInput("line " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                         " fields, found " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }

  if (rows.empty()) throw InvalidInput("CSV contains no data rows");
  table.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return table;
}

DataTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  return read_csv(in);
}

void write_csv(std::ostream& out, const Eigen::MatrixXd& values, const std::vector<std::string>& header) {
  if (!header.empty()) {
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
  }
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      if (c) out << ",";
      out << std::setprecision(17) << values(r, c);
    }
    out << "\n";
  }
}

}  // namespace sparsecov
