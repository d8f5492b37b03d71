#ifndef SERIATE_ERRORS_HPP
#define SERIATE_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace seriate {

// Base of all library errors. Carries a message that callers may extend with
// context (e.g. the index set a recursive step was working on) before
// rethrowing; the dynamic type is preserved when rethrowing the caught object.
class error : public std::runtime_error {
public:
  explicit error(std::string message)
      : std::runtime_error(""), message_(std::move(message)) {}

  const char* what() const noexcept override { return message_.c_str(); }

  void add_context(const std::string& context) {
    message_ += " [" + context + "]";
  }

private:
  std::string message_;
};

// Tree construction violates properness (arity floors, duplicate leaf labels).
class structural_error : public error {
public:
  using error::error;
};

// A permutation count does not fit in 64 bits.
class overflow_error : public error {
public:
  using error::error;
};

// Enumeration was requested for a tree whose permutation count exceeds the cap.
class size_error : public error {
public:
  size_error(std::string message, std::uint64_t count)
      : error(std::move(message)), count_(count) {}
  std::uint64_t count() const noexcept { return count_; }

private:
  std::uint64_t count_;
};

// An index or node path does not address anything.
class addressing_error : public error {
public:
  using error::error;
};

class dimension_error : public error {
public:
  using error::error;
};

class symmetry_error : public error {
public:
  using error::error;
};

// A Laplacian turned out to belong to a disconnected graph.
class reducibility_error : public error {
public:
  using error::error;
};

class convergence_error : public error {
public:
  convergence_error(std::string message, long iterations)
      : error(std::move(message)), iterations_(iterations) {}
  long iterations() const noexcept { return iterations_; }

private:
  long iterations_;
};

// A documented precondition was violated by the caller.
class contract_error : public error {
public:
  using error::error;
};

// File or document could not be parsed; position() is a line number for text
// formats and a byte offset for JSON.
class parse_error : public error {
public:
  parse_error(std::string message, std::size_t position)
      : error(std::move(message)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

private:
  std::size_t position_;
};

// Bad command-line or format-tag usage.
class usage_error : public error {
public:
  using error::error;
};

}  // namespace seriate

#endif  // SERIATE_ERRORS_HPP
