#include "rpid/column_table.hpp"

#include <algorithm>

namespace rpid {

bool ColumnTable::has(const std::string& name) const {
  return std::find(order_.begin(), order_.end(), name) != order_.end();
}

bool ColumnTable::is_numeric(const std::string& name) const { return find(name).numeric; }

const ColumnTable::Column& ColumnTable::find(const std::string& name) const {
  for (std::size_t i = 0; i < order_.size(); ++i) {
    if (order_[i] == name) return columns_[i];
  }
  throw Error(ErrorCode::SchemaMismatch, "column not found: " + name);
}

ColumnTable::Column& ColumnTable::find_mut(const std::string& name) {
  return const_cast<Column&>(static_cast<const ColumnTable*>(this)->find(name));
}

void ColumnTable::check_rows(Index n, const std::string& name) {
  if (has_rows_ && n != rows_) {
    throw Error(ErrorCode::SchemaMismatch,
                "column " + name + " has " + std::to_string(n) + " rows, table has " +
                    std::to_string(rows_));
  }
  rows_ = n;
  has_rows_ = true;
}

void ColumnTable::add_numeric(const std::string& name, VectorXd values) {
  if (has(name)) throw Error(ErrorCode::SchemaMismatch, "duplicate column: " + name);
  check_rows(values.size(), name);
  order_.push_back(name);
  Column c;
  c.numeric = true;
  c.values = std::move(values);
  columns_.push_back(std::move(c));
}

void ColumnTable::add_text(const std::string& name, std::vector<std::string> values) {
  if (has(name)) throw Error(ErrorCode::SchemaMismatch, "duplicate column: " + name);
  check_rows(static_cast<Index>(values.size()), name);
  order_.push_back(name);
  Column c;
  c.numeric = false;
  c.labels = std::move(values);
  columns_.push_back(std::move(c));
}

const VectorXd& ColumnTable::numeric(const std::string& name) const {
  const Column& c = find(name);
  if (!c.numeric) throw Error(ErrorCode::SchemaMismatch, "column is not numeric: " + name);
  return c.values;
}

const std::vector<std::string>& ColumnTable::text(const std::string& name) const {
  const Column& c = find(name);
  if (c.numeric) throw Error(ErrorCode::SchemaMismatch, "column is not text: " + name);
  return c.labels;
}

void ColumnTable::set_numeric(const std::string& name, VectorXd values) {
  Column& c = find_mut(name);
  if (!c.numeric) throw Error(ErrorCode::SchemaMismatch, "column is not numeric: " + name);
  if (values.size() != rows_) throw Error(ErrorCode::SchemaMismatch, "row count mismatch in set_numeric");
  c.values = std::move(values);
}

ColumnTable ColumnTable::select_rows(const std::vector<Index>& idx) const {
  ColumnTable out;
  for (std::size_t i = 0; i < order_.size(); ++i) {
    const Column& c = columns_[i];
    if (c.numeric) {
      VectorXd v(static_cast<Index>(idx.size()));
      for (std::size_t k = 0; k < idx.size(); ++k) v[static_cast<Index>(k)] = c.values[idx[k]];
      out.add_numeric(order_[i], std::move(v));
    } else {
      std::vector<std::string> v;
      v.reserve(idx.size());
      for (Index j : idx) v.push_back(c.labels[static_cast<std::size_t>(j)]);
      out.add_text(order_[i], std::move(v));
    }
  }
  return out;
}

std::vector<Index> ColumnTable::rows_where(const std::string& name, const std::string& label) const {
  const std::vector<std::string>& col = text(name);
  std::vector<Index> idx;
  for (std::size_t i = 0; i < col.size(); ++i) {
    if (col[i] == label) idx.push_back(static_cast<Index>(i));
  }
  return idx;
}

std::vector<std::string> ColumnTable::distinct(const std::string& name) const {
  const std::vector<std::string>& col = text(name);
  std::vector<std::string> out;
  for (const std::string& v : col) {
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  return out;
}

}  // namespace rpid
