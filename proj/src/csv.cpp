#include "rpid/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace rpid {
namespace csv {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(field);
      field.clear();
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  out.push_back(field);
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

ColumnTable read(const std::string& path, const std::set<std::string>& text_columns) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::SchemaMismatch, path + ": missing header row");
  const std::vector<std::string> header = split_line(line);
  const std::size_t ncol = header.size();

  std::vector<bool> is_text(ncol);
  for (std::size_t c = 0; c < ncol; ++c) is_text[c] = text_columns.count(header[c]) > 0;

  std::vector<std::vector<double>> nums(ncol);
  std::vector<std::vector<std::string>> texts(ncol);
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_line(line);
    if (fields.size() != ncol) {
      throw Error(ErrorCode::SchemaMismatch,
                  path + ": row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                      " fields, expected " + std::to_string(ncol));
    }
    for (std::size_t c = 0; c < ncol; ++c) {
      if (fields[c].empty()) {
        throw Error(ErrorCode::SchemaMismatch,
                    path + ": empty value in column " + header[c] + " row " + std::to_string(row));
      }
      if (is_text[c]) {
        texts[c].push_back(fields[c]);
      } else {
        char* end = nullptr;
        const double v = std::strtod(fields[c].c_str(), &end);
        if (end == fields[c].c_str() || *end != '\0') {
          throw Error(ErrorCode::SchemaMismatch,
                      path + ": non-numeric value '" + fields[c] + "' in column " + header[c] +
                          " row " + std::to_string(row));
        }
        nums[c].push_back(v);
      }
    }
  }

  ColumnTable table;
  for (std::size_t c = 0; c < ncol; ++c) {
    if (is_text[c]) {
      table.add_text(header[c], std::move(texts[c]));
    } else {
      table.add_numeric(header[c], Eigen::Map<const VectorXd>(nums[c].data(),
                                                              static_cast<Index>(nums[c].size())));
    }
  }
  return table;
}

void write(const std::string& path, const ColumnTable& table) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);

  const std::vector<std::string>& names = table.names();
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (c > 0) out << ',';
    out << names[c];
  }
  out << '\n';
  for (Index r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < names.size(); ++c) {
      if (c > 0) out << ',';
      if (table.is_numeric(names[c])) {
        out << format_double(table.numeric(names[c])[r]);
      } else {
        out << table.text(names[c])[static_cast<std::size_t>(r)];
      }
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed: " + path);
}

}  // namespace csv
}  // namespace rpid
