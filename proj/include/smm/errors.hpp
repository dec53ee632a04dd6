#pragma once

#include <stdexcept>
#include <string>

namespace smm {

// Domain errors map to CLI exit code 2, solver failures to 4.
enum class ErrorKind { Domain, Solver };

class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& what, ErrorKind kind = ErrorKind::Domain)
      : std::runtime_error(what), name_(std::move(name)), kind_(kind) {}

  const std::string& name() const noexcept { return name_; }
  ErrorKind kind() const noexcept { return kind_; }

 private:
  std::string name_;
  ErrorKind kind_;
};

#define SMM_DEFINE_ERROR(Type, Kind)                                    \
  class Type : public Error {                                           \
   public:                                                              \
    explicit Type(const std::string& what) : Error(#Type, what, Kind) {} \
  }

/// tan pole at a lattice site: alpha.n + theta is 1/2 mod 1 to working precision.
SMM_DEFINE_ERROR(PhaseSingularity, ErrorKind::Domain);
/// Spectral parameter too close to the branch points w = +-2 of a fiber.
SMM_DEFINE_ERROR(BranchPoint, ErrorKind::Domain);
/// Measured contraction norm is not below one.
SMM_DEFINE_ERROR(SeriesDiverges, ErrorKind::Domain);
SMM_DEFINE_ERROR(UnwrapFailure, ErrorKind::Domain);
SMM_DEFINE_ERROR(PrecisionExhausted, ErrorKind::Domain);
SMM_DEFINE_ERROR(RationalTermination, ErrorKind::Domain);
SMM_DEFINE_ERROR(OverflowBudget, ErrorKind::Domain);
SMM_DEFINE_ERROR(NoQualifyingIndex, ErrorKind::Domain);
SMM_DEFINE_ERROR(InvalidArgument, ErrorKind::Domain);
SMM_DEFINE_ERROR(SolverFailure, ErrorKind::Solver);

#undef SMM_DEFINE_ERROR

}  // namespace smm
