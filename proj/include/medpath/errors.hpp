#pragma once

#include <stdexcept>
#include <string>

namespace medpath {

struct DimensionMismatch : std::runtime_error {
  explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct ConstantColumn : std::runtime_error {
  ConstantColumn(const std::string& block, int index)
      : std::runtime_error("constant column " + std::to_string(index) + " in block " + block),
        block(block), index(index) {}
  std::string block;
  int index;
};

struct NotStandardized : std::runtime_error {
  NotStandardized() : std::runtime_error("dataset must be standardized before fitting") {}
};

struct SingularMatrix : std::runtime_error {
  explicit SingularMatrix(const std::string& what) : std::runtime_error(what) {}
};

struct MaxIterations : std::runtime_error {
  explicit MaxIterations(const std::string& what) : std::runtime_error(what) {}
};

struct InfeasibleSparsity : std::runtime_error {
  explicit InfeasibleSparsity(const std::string& what) : std::runtime_error(what) {}
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& file, long row, long col, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(row) + ":" + std::to_string(col) + ": " + what),
        file(file), row(row), col(col) {}
  std::string file;
  long row;
  long col;
};

struct NonNumericCell : std::runtime_error {
  NonNumericCell(const std::string& file, long row, long col)
      : std::runtime_error("non-numeric cell at " + file + ":" + std::to_string(row) + ":" +
                           std::to_string(col)),
        file(file), row(row), col(col) {}
  std::string file;
  long row;
  long col;
};

struct RowCountMismatch : std::runtime_error {
  explicit RowCountMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace medpath
