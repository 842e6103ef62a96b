#pragma once

#include <stdexcept>
#include <string>

namespace orlicz {

/// Error taxonomy shared by all modules. `kind()` is stable and is what the
/// CLI maps to exit codes (invalid input vs numerical failure).
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define ORLICZ_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : Error(#Name, what) {}  \
  }

ORLICZ_DEFINE_ERROR(DomainError);        // argument outside mathematical domain or table hull
ORLICZ_DEFINE_ERROR(ConvergenceError);   // iterative scheme failed to reach tolerance
ORLICZ_DEFINE_ERROR(OverflowGuardError); // modular/bracket could not be established in double range
ORLICZ_DEFINE_ERROR(QuadratureError);    // integral diverged or quadrature failed
ORLICZ_DEFINE_ERROR(PreconditionError);  // operation's mathematical precondition violated
ORLICZ_DEFINE_ERROR(GridError);          // grid too coarse / malformed for the requested stencil
ORLICZ_DEFINE_ERROR(AlignmentError);     // reflection plane not aligned with a cell interface
ORLICZ_DEFINE_ERROR(EllipticityError);   // coefficient matrix not uniformly elliptic
ORLICZ_DEFINE_ERROR(SolverError);        // linear solver breakdown or non-convergence
ORLICZ_DEFINE_ERROR(DivergenceError);    // fixed-point iteration increments grow
ORLICZ_DEFINE_ERROR(ConfigError);        // malformed configuration / CLI input
ORLICZ_DEFINE_ERROR(SingularityError);   // kernel evaluated at its singular point
ORLICZ_DEFINE_ERROR(MaskError);          // interior mask too close to the boundary
ORLICZ_DEFINE_ERROR(GeometryError);      // ball/cutoff geometry does not fit the grid

#undef ORLICZ_DEFINE_ERROR

}  // namespace orlicz
