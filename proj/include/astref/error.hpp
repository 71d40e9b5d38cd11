#pragma once

#include <stdexcept>
#include <string>

namespace astref {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class LexError : public Error {
public:
    LexError(int line, int col, const std::string& what)
        : Error("lex error at " + std::to_string(line) + ":" + std::to_string(col) + ": " + what),
          line_(line), col_(col) {}
    int line() const { return line_; }
    int col() const { return col_; }

private:
    int line_;
    int col_;
};

class ParseError : public Error {
public:
    ParseError(int line, int col, const std::string& expected)
        : Error("parse error at " + std::to_string(line) + ":" + std::to_string(col) +
                ": expected " + expected),
          line_(line), col_(col), expected_(expected) {}
    int line() const { return line_; }
    int col() const { return col_; }
    const std::string& expected() const { return expected_; }

private:
    int line_;
    int col_;
    std::string expected_;
};

/// Malformed interchange document (AST, graph, manifest, checkpoint).
class SchemaError : public Error {
public:
    explicit SchemaError(const std::string& what) : Error("schema error: " + what) {}
};

class SplitError : public Error {
public:
    explicit SplitError(const std::string& what) : Error("split error: " + what) {}
};

class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& what) : Error("dimension mismatch: " + what) {}
};

/// Dataset-level failures: EmptyDataset, SingleClass, TooSmall, NoPositives, ...
class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error("io error: " + what) {}
};

} // namespace astref
