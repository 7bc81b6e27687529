#pragma once

#include <stdexcept>
#include <string>

namespace trilevel {

/// Base class for all trilevel errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Level energies not in ascending order.
struct OrderingViolation : Error {
  using Error::Error;
};

/// A coupling excluded by the configuration is nonzero.
struct ForbiddenCoupling : Error {
  using Error::Error;
};

struct NonPositiveAtoms : Error {
  using Error::Error;
};

/// NaN or infinity fed to a numerical routine.
struct NonFiniteInput : Error {
  using Error::Error;
};

/// A separatrix formula would divide by a vanishing level gap.
struct DegenerateGap : Error {
  using Error::Error;
};

/// The variational minimizer failed to reach the gradient tolerance.
struct NoConvergence : Error {
  NoConvergence(double best_energy_, double grad_norm_)
      : Error("minimizer did not converge: best energy " +
              std::to_string(best_energy_) + ", gradient norm " +
              std::to_string(grad_norm_)),
        best_energy(best_energy_),
        grad_norm(grad_norm_) {}
  double best_energy;
  double grad_norm;
};

/// classify_order was handed a segment that never crosses the separatrix.
struct NoCrossing : Error {
  using Error::Error;
};

/// The order-parameter jump sits too close to the decision threshold.
struct AmbiguousClassification : Error {
  explicit AmbiguousClassification(double jump_)
      : Error("transition order ambiguous: order-parameter jump " +
              std::to_string(jump_) + " is within a decade of the threshold"),
        jump(jump_) {}
  double jump;
};

/// Dense eigensolver did not converge.
struct EigenFailure : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

/// Sector label outside the domain of an analytic formula.
struct InvalidSector : Error {
  using Error::Error;
};

/// A scan grid with failed or missing points was handed to a grid consumer.
struct IncompleteGrid : Error {
  using Error::Error;
};

}  // namespace trilevel
