#include "hmotion/error.hpp"

#include <sstream>

namespace hmotion {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DegenerateTriple: return "DegenerateTriple";
    case ErrorKind::SeparationViolation: return "SeparationViolation";
    case ErrorKind::InfinitePuncture: return "InfinitePuncture";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::OutsideDomain: return "OutsideDomain";
    case ErrorKind::CollisionAtParameter: return "CollisionAtParameter";
    case ErrorKind::ValidationFailure: return "ValidationFailure";
    case ErrorKind::NotBasepointPreserving: return "NotBasepointPreserving";
    case ErrorKind::RangeEscape: return "RangeEscape";
    case ErrorKind::OffTrack: return "OffTrack";
    case ErrorKind::CollisionDetected: return "CollisionDetected";
    case ErrorKind::StepUnderflow: return "StepUnderflow";
    case ErrorKind::NotClosed: return "NotClosed";
    case ErrorKind::TooClose: return "TooClose";
    case ErrorKind::DegenerateCrossing: return "DegenerateCrossing";
    case ErrorKind::NontrivialMonodromy: return "NontrivialMonodromy";
    case ErrorKind::TubeCollapse: return "TubeCollapse";
    case ErrorKind::FlowBlowup: return "FlowBlowup";
    case ErrorKind::InvalidNewPoint: return "InvalidNewPoint";
    case ErrorKind::NoStrandFound: return "NoStrandFound";
    case ErrorKind::NontrivialExtendedMonodromy:
      return "NontrivialExtendedMonodromy";
    case ErrorKind::Diverged: return "Diverged";
    case ErrorKind::StageFailure: return "StageFailure";
  }
  return "Unknown";
}

namespace {

std::string describe_pair(const char* head, std::size_t i, std::size_t j,
                          double distance) {
  std::ostringstream os;
  os << head << "(" << i << ", " << j << "): distance " << distance;
  return os.str();
}

}  // namespace

SeparationViolation::SeparationViolation(std::size_t i, std::size_t j,
                                         double distance)
    : Error(ErrorKind::SeparationViolation,
            describe_pair("SeparationViolation", i, j, distance)),
      i_(i),
      j_(j) {}

CollisionError::CollisionError(ErrorKind kind, std::size_t i, std::size_t j,
                               std::complex<double> parameter, double time,
                               double distance)
    : Error(kind, [&] {
        std::ostringstream os;
        os << to_string(kind) << "(" << i << ", " << j << ") at parameter "
           << parameter << ", t = " << time << ", distance " << distance;
        return os.str();
      }()),
      i_(i),
      j_(j),
      parameter_(parameter),
      time_(time) {}

ParseError::ParseError(std::size_t line, std::size_t column,
                       const std::string& what)
    : Error(ErrorKind::ParseError,
            "line " + std::to_string(line) + ", column " +
                std::to_string(column) + ": " + what),
      line_(line),
      column_(column),
      detail_(what) {}

ValidationFailure::ValidationFailure(std::string axiom,
                                     std::complex<double> witness,
                                     const std::string& what)
    : Error(ErrorKind::ValidationFailure, what),
      axiom_(std::move(axiom)),
      witness_(witness) {}

NontrivialMonodromy::NontrivialMonodromy(ErrorKind kind, std::size_t generator,
                                         std::string word)
    : Error(kind, std::string(to_string(kind)) + " at generator " +
                      std::to_string(generator) + ": [" + word + "]"),
      generator_(generator),
      word_(std::move(word)) {}

NoStrandFound::NoStrandFound(int degree, double best_margin)
    : Error(ErrorKind::NoStrandFound,
            "no strand found at degree " + std::to_string(degree) +
                " (best margin " + std::to_string(best_margin) + ")"),
      degree_(degree),
      best_margin_(best_margin) {}

Diverged::Diverged(int iterations)
    : Error(ErrorKind::Diverged, "fixed-point iteration diverged after " +
                                     std::to_string(iterations) +
                                     " iterations"),
      iterations_(iterations) {}

StageFailure::StageFailure(std::size_t stage, ErrorKind cause,
                           const std::string& detail)
    : Error(ErrorKind::StageFailure,
            "stage " + std::to_string(stage) + " failed: " + detail),
      stage_(stage),
      cause_(cause) {}

}  // namespace hmotion
