#pragma once

#include <set>
#include <string>

#include "rpid/column_table.hpp"

namespace rpid {
namespace csv {

/// Reads a UTF-8 comma-separated file with a header row. Columns listed in
/// `text_columns` are kept as strings; all others must parse as doubles.
/// Empty cells are an error (missing values unsupported).
ColumnTable read(const std::string& path, const std::set<std::string>& text_columns = {});

/// Writes with a header row; doubles serialized with 17 significant digits
/// so that read-back is value-exact.
void write(const std::string& path, const ColumnTable& table);

std::string format_double(double v);

}  // namespace csv
}  // namespace rpid
