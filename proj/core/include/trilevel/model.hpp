#pragma once

#include <array>
#include <string>
#include <string_view>

#include "trilevel/errors.hpp"

namespace trilevel {

/// Which two of the three level pairs are dipole-coupled.
///
/// Xi:     1-2 and 2-3 (mu13 = 0)
/// Lambda: 1-3 and 2-3 (mu12 = 0)
/// V:      1-2 and 1-3 (mu23 = 0)
enum class Configuration { Xi, Lambda, V };

const char* to_string(Configuration config);

/// Parses "xi" / "lambda" / "v" (case-insensitive). Throws Error on anything else.
Configuration configuration_from_string(std::string_view text);

/// Integer weights of the conserved total-excitation operator
/// M = field_weight * a'a + sum_k level_weights[k] * A_kk.
struct ExcitationWeights {
  int field_weight = 1;
  std::array<int, 3> level_weights{};  // levels 1, 2, 3
};

/// Weights per configuration: Xi -> (0,1,2), Lambda -> (0,0,1), V -> (0,1,1).
ExcitationWeights excitation_weights(Configuration config);

/// Physical parameters, all in units of the field frequency (Omega == 1).
///
/// Couplings may be negative; every downstream formula depends only on their
/// magnitudes, but the raw sign is kept.
struct ModelParams {
  double omega1 = 0.0;
  double omega2 = 1.0;
  double omega3 = 2.0;
  double mu12 = 0.0;
  double mu13 = 0.0;
  double mu23 = 0.0;
  Configuration config = Configuration::Xi;
  int n_atoms = 1;

  double gap21() const { return omega2 - omega1; }
  double gap31() const { return omega3 - omega1; }
  double gap32() const { return omega3 - omega2; }

  double coupling(std::string_view name) const;
  void set_coupling(std::string_view name, double value);
};

/// Names of the two couplings allowed by a configuration, e.g. {"mu12","mu23"}.
std::array<std::string, 2> allowed_couplings(Configuration config);

/// Name of the coupling the configuration forces to zero.
std::string forbidden_coupling(Configuration config);

/// Checks all ModelParams invariants and returns the parameters unchanged.
///
/// Throws OrderingViolation if the level energies are not ascending,
/// ForbiddenCoupling if the coupling excluded by the configuration is nonzero,
/// NonPositiveAtoms if n_atoms < 1.
ModelParams validate(const ModelParams& params);

}  // namespace trilevel
