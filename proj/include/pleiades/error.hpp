#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pleiades {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad argument or violated precondition.
class DomainError : public Error {
public:
    using Error::Error;
};

// Numerical breakdown that regularization could not repair.
class NumericError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t row, std::string column, const std::string& what);
    // Malformed document without a row position.
    explicit ParseError(const std::string& what) : Error(what), row_(0) {}

    // 1-based data row (header excluded); 0 for header problems.
    std::size_t row() const noexcept { return row_; }
    const std::string& column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::string column_;
};

}  // namespace pleiades
