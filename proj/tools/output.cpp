#include "output.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace spinchain::cli {

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

std::string format_cell(const Cell& cell) {
  if (const auto* i = std::get_if<long long>(&cell)) {
    return std::to_string(*i);
  }
  if (const auto* d = std::get_if<double>(&cell)) {
    return format_number(*d);
  }
  return std::get<std::string>(cell);
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
    }
    out += c;
  }
  return out;
}

std::string format_cell_json(const Cell& cell) {
  if (std::holds_alternative<std::string>(cell)) {
    return "\"" + json_escape(std::get<std::string>(cell)) + "\"";
  }
  return format_cell(cell);
}

}  // namespace

std::string to_csv(const Table& table) {
  std::ostringstream out;
  out << "#";
  for (const auto& [key, value] : table.meta) {
    out << " " << key << "=" << value;
  }
  out << "\n";
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out << (c ? "," : "") << table.columns[c];
  }
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << (c ? "," : "") << format_cell(row[c]);
    }
    out << "\n";
  }
  return out.str();
}

std::string to_json(const Table& table) {
  std::ostringstream out;
  out << "{\n  \"meta\": {";
  for (std::size_t i = 0; i < table.meta.size(); ++i) {
    out << (i ? ", " : "") << "\"" << json_escape(table.meta[i].first)
        << "\": \"" << json_escape(table.meta[i].second) << "\"";
  }
  out << "},\n  \"columns\": [";
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out << (c ? ", " : "") << "\"" << json_escape(table.columns[c]) << "\"";
  }
  out << "],\n  \"rows\": [";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out << (r ? ",\n    " : "\n    ") << "[";
    for (std::size_t c = 0; c < table.rows[r].size(); ++c) {
      out << (c ? ", " : "") << format_cell_json(table.rows[r][c]);
    }
    out << "]";
  }
  if (!table.rows.empty()) out << "\n  ";
  out << "]\n}\n";
  return out.str();
}

void write_output(const std::string& path, const std::string& payload) {
  if (path.empty()) {
    std::cout << payload;
    std::cout.flush();
    if (!std::cout) {
      throw io_error("failed to write to standard output");
    }
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw io_error("cannot open output file: " + path);
  }
  file << payload;
  file.flush();
  if (!file) {
    throw io_error("failed writing output file: " + path);
  }
}

}  // namespace spinchain::cli
