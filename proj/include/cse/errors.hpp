#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cse {

/// Invalid or degenerate input data. CLI exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical breakdown in a solver. CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MissingColumn : DataError {
  std::string column;
  explicit MissingColumn(std::string name)
      : DataError("missing column '" + name + "'"), column(std::move(name)) {}
};

struct NonPositiveTime : DataError {
  std::size_t row;  // 1-based data row
  explicit NonPositiveTime(std::size_t r)
      : DataError("row " + std::to_string(r) + ": time must be a positive finite number"),
        row(r) {}
};

struct NonBinaryIndicator : DataError {
  std::size_t row;
  std::string column;
  NonBinaryIndicator(std::size_t r, std::string col)
      : DataError("row " + std::to_string(r) + ", column '" + col + "': indicator must be 0 or 1"),
        row(r),
        column(std::move(col)) {}
};

struct NonFiniteCovariate : DataError {
  std::size_t row;
  std::string column;
  NonFiniteCovariate(std::size_t r, std::string col)
      : DataError("row " + std::to_string(r) + ", column '" + col + "': covariate is not finite"),
        row(r),
        column(std::move(col)) {}
};

struct EmptyInput : DataError {
  EmptyInput() : DataError("empty input") {}
  explicit EmptyInput(const std::string& what_arg) : DataError(what_arg) {}
};

struct EmptyArm : DataError {
  int arm;
  explicit EmptyArm(int which)
      : DataError("arm " + std::to_string(which) + " has no observations"), arm(which) {}
};

struct LengthMismatch : DataError {
  LengthMismatch(std::size_t a, std::size_t b)
      : DataError("length mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

struct DegenerateCensoring : DataError {
  DegenerateCensoring() : DataError("every observation is censored; all weights are zero") {}
};

struct AllPointsIdentical : DataError {
  AllPointsIdentical()
      : DataError("median pairwise distance is zero; bandwidth would be degenerate") {}
};

struct DimensionMismatch : DataError {
  DimensionMismatch(std::size_t a, std::size_t b)
      : DataError("point dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

struct DegenerateRange : DataError {
  DegenerateRange() : DataError("all values are equal; grid range is degenerate") {}
};

struct SingularSystem : NumericError {
  explicit SingularSystem(double residual)
      : NumericError("linear solve broke down (residual " + std::to_string(residual) + ")") {}
};

}  // namespace cse
