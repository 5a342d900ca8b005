#pragma once

#include <stdexcept>
#include <string>

namespace mlgate {

/// Failure categories raised by the numerical kernels.
enum class MathErrc {
  Pole,
  Domain,
  Overflow,
  Nonconvergence,
  Singularity,
  UnsupportedParameter,
};

const char* to_string(MathErrc code) noexcept;

class MathError : public std::runtime_error {
 public:
  MathError(MathErrc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + " error: " + what), code_(code) {}

  MathErrc code() const noexcept { return code_; }

 private:
  MathErrc code_;
};

enum class DataErrc {
  Io,
  BadMagic,
  Truncated,
  CountMismatch,
  Shape,
};

const char* to_string(DataErrc code) noexcept;

class DataError : public std::runtime_error {
 public:
  DataError(DataErrc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  DataErrc code() const noexcept { return code_; }

 private:
  DataErrc code_;
};

/// Tensor shape violations inside the training stack.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace mlgate
