#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

namespace sparsecov {

struct DataTable {
  std::vector<std::string> header;  // empty when the file has no header row
  Eigen::MatrixXd values;           // n x p, one observation per row
};

/// Parses comma-delimited numeric data. A first row containing any
/// non-numeric cell is taken as a header. Errors name the 1-based line.
DataTable read_csv(std::istream& in);
DataTable read_csv_file(const std::string& path);

void write_csv(std::ostream& out, const Eigen::MatrixXd& values,
               const std::vector<std::string>& header = {});

}  // namespace sparsecov
