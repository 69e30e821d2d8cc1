#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tdgl_ring {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A material with a nonpositive length or diffusion coefficient.
class InvalidMaterial : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

/// A closed-form expression was evaluated outside the region where it is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

class InvalidGeometry : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// The field left the finite / bounded region during time stepping.
class NumericalBlowup : public Error {
 public:
  NumericalBlowup(std::uint64_t step, const std::string& what)
      : Error("numerical blowup at step " + std::to_string(step) + ": " + what), step_(step) {}

  std::uint64_t step() const noexcept { return step_; }

 private:
  std::uint64_t step_;
};

}  // namespace tdgl_ring
