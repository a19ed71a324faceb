#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vinerisk {

/// Bad user input: malformed files, out-of-range parameters. The CLI maps
/// these to exit status 2.
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A record in a text file violates its format or type invariants.
class ParseError : public InputError {
public:
  ParseError(std::string source, std::size_t row, std::string column,
             std::string value, const std::string& what)
      : InputError(source + ": row " + std::to_string(row) +
                   (column.empty() ? "" : ", column '" + column + "'") +
                   (value.empty() ? "" : ", value '" + value + "'") + ": " +
                   what),
        source_(std::move(source)), row_(row), column_(std::move(column)),
        value_(std::move(value)) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }
  const std::string& value() const noexcept { return value_; }

private:
  std::string source_;
  std::size_t row_;
  std::string column_;
  std::string value_;
};

/// Lookup outside the covered extent.
class RangeError : public InputError {
public:
  using InputError::InputError;
};

/// Elevation lookup hit a nodata cell.
class NodataError : public InputError {
public:
  using InputError::InputError;
};

/// Inconsistent internal state across stages, e.g. an aggregated area that
/// is missing from the prediction catalog.
class IntegrityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace vinerisk
