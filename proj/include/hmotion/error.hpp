#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hmotion {

enum class ErrorKind {
  InvalidArgument,
  DegenerateTriple,
  SeparationViolation,
  InfinitePuncture,
  ParseError,
  OutsideDomain,
  CollisionAtParameter,
  ValidationFailure,
  NotBasepointPreserving,
  RangeEscape,
  OffTrack,
  CollisionDetected,
  StepUnderflow,
  NotClosed,
  TooClose,
  DegenerateCrossing,
  NontrivialMonodromy,
  TubeCollapse,
  FlowBlowup,
  InvalidNewPoint,
  NoStrandFound,
  NontrivialExtendedMonodromy,
  Diverged,
  StageFailure,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library is an Error; the kind is the
// machine-readable cause that reports and exit codes are keyed on.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class SeparationViolation : public Error {
 public:
  SeparationViolation(std::size_t i, std::size_t j, double distance);
  std::size_t first() const noexcept { return i_; }
  std::size_t second() const noexcept { return j_; }

 private:
  std::size_t i_, j_;
};

// Two strands (or a strand and a fixed puncture) meet. Used both for a
// parameter-space witness (CollisionAtParameter) and for a path-time witness
// (CollisionDetected).
class CollisionError : public Error {
 public:
  CollisionError(ErrorKind kind, std::size_t i, std::size_t j,
                 std::complex<double> parameter, double time,
                 double distance);
  std::size_t first() const noexcept { return i_; }
  std::size_t second() const noexcept { return j_; }
  std::complex<double> parameter() const noexcept { return parameter_; }
  double time() const noexcept { return time_; }

 private:
  std::size_t i_, j_;
  std::complex<double> parameter_;
  double time_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what);
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_, column_;
  std::string detail_;
};

class ValidationFailure : public Error {
 public:
  ValidationFailure(std::string axiom, std::complex<double> witness,
                    const std::string& what);
  const std::string& axiom() const noexcept { return axiom_; }
  std::complex<double> witness() const noexcept { return witness_; }

 private:
  std::string axiom_;
  std::complex<double> witness_;
};

class NontrivialMonodromy : public Error {
 public:
  NontrivialMonodromy(ErrorKind kind, std::size_t generator, std::string word);
  std::size_t generator() const noexcept { return generator_; }
  const std::string& word() const noexcept { return word_; }

 private:
  std::size_t generator_;
  std::string word_;
};

class NoStrandFound : public Error {
 public:
  NoStrandFound(int degree, double best_margin);
  int degree() const noexcept { return degree_; }
  double best_margin() const noexcept { return best_margin_; }

 private:
  int degree_;
  double best_margin_;
};

class Diverged : public Error {
 public:
  explicit Diverged(int iterations);
  int iterations() const noexcept { return iterations_; }

 private:
  int iterations_;
};

class StageFailure : public Error {
 public:
  StageFailure(std::size_t stage, ErrorKind cause, const std::string& detail);
  std::size_t stage() const noexcept { return stage_; }
  ErrorKind cause() const noexcept { return cause_; }

 private:
  std::size_t stage_;
  ErrorKind cause_;
};

}  // namespace hmotion
