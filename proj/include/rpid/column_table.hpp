#pragma once

#include <string>
#include <vector>

#include "rpid/errors.hpp"
#include "rpid/types.hpp"

namespace rpid {

/// Columnar dataset: named columns, each either numeric (double) or text.
/// Text columns hold group labels; everything else is numeric. Missing
/// values are not representable.
class ColumnTable {
 public:
  ColumnTable() = default;

  Index rows() const { return rows_; }
  Index cols() const { return static_cast<Index>(columns_.size()); }
  bool empty() const { return columns_.empty(); }

  bool has(const std::string& name) const;
  bool is_numeric(const std::string& name) const;

  void add_numeric(const std::string& name, VectorXd values);
  void add_text(const std::string& name, std::vector<std::string> values);

  const VectorXd& numeric(const std::string& name) const;
  const std::vector<std::string>& text(const std::string& name) const;

  /// Replaces an existing numeric column, keeping its position.
  void set_numeric(const std::string& name, VectorXd values);

  /// Column names in insertion order.
  const std::vector<std::string>& names() const { return order_; }

  ColumnTable select_rows(const std::vector<Index>& idx) const;

  /// Indices of rows whose text column `name` equals `label`.
  std::vector<Index> rows_where(const std::string& name, const std::string& label) const;

  /// Distinct values of a text column, in first-appearance order.
  std::vector<std::string> distinct(const std::string& name) const;

 private:
  struct Column {
    bool numeric = true;
    VectorXd values;
    std::vector<std::string> labels;
  };

  const Column& find(const std::string& name) const;
  Column& find_mut(const std::string& name);
  void check_rows(Index n, const std::string& name);

  std::vector<std::string> order_;
  std::vector<Column> columns_;
  Index rows_ = 0;
  bool has_rows_ = false;
};

}  // namespace rpid
