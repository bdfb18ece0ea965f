#ifndef ERSEARCH_ERROR_H_
#define ERSEARCH_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ersearch {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input record. line is 1-based; 0 when not line oriented.
class ParseError : public Error {
 public:
  ParseError(const std::string &source, std::size_t line,
             const std::string &what)
      : Error(source + (line ? ":" + std::to_string(line) : "") + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Input that parses but violates a data invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Lookup of a key that is not in an index.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

}  // namespace ersearch

#endif  // ERSEARCH_ERROR_H_
