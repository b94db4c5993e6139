#pragma once

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace spinchain::cli {

class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Cell = std::variant<long long, double, std::string>;

// One command result: a metadata line (version, variant, grid parameters —
// never anything run-dependent, so identical configurations yield
// byte-identical files) plus a column-ordered table.
struct Table {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

// 17 significant digits; '.' decimal separator regardless of locale.
std::string format_number(double x);

std::string to_csv(const Table& table);
std::string to_json(const Table& table);

// Writes to the path, or to stdout when the path is empty. Throws io_error.
void write_output(const std::string& path, const std::string& payload);

}  // namespace spinchain::cli
