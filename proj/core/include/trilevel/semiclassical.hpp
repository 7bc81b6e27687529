#pragma once

#include <array>
#include <vector>

#include "trilevel/model.hpp"

namespace trilevel::semiclassical {

/// Reduced coherent-state coordinates after the phases have been minimized
/// out: rho_bar is the field amplitude per sqrt(N_a), rho2 drives the level-3
/// population and rho3 the level-2 population.
struct VariationalPoint {
  double rho_bar = 0.0;
  double rho2 = 0.0;
  double rho3 = 0.0;
};

enum class Phase { Normal, Collective };

struct SemiclassicalResult {
  double energy_per_atom = 0.0;
  VariationalPoint point;
  double m_per_atom = 0.0;
  std::array<double, 3> populations{1.0, 0.0, 0.0};
  double photon_density = 0.0;
  Phase phase = Phase::Normal;
  bool degenerate = false;  // two minima tied at the winning energy
  double grad_norm = 0.0;
};

struct MinimizeOptions {
  double grad_tol = 1e-9;    // projected-gradient norm at the reported minimum
  double origin_tol = 1e-6;  // below this every coordinate counts as zero
  double jump_tol = 1e-3;    // order-parameter jump threshold for classify_order
  int grid_n = 64;           // coarse multistart grid per axis
  int n_starts = 5;          // refined starts taken from the best grid cells
  int max_iter = 400;
  double tie_tol = 1e-12;
  double jump_delta0 = 1e-2;  // largest offset from the crossing point
  int jump_levels = 6;        // offsets shrink by 4x per level
};

/// Intensive energy surface
///   E = rho_bar^2 + (w1 + w2 rho3^2 + w3 rho2^2)/D - 2 rho_bar B / D
/// with D = 1 + rho2^2 + rho3^2 and
/// B = |mu12| rho3 + |mu13| rho2 + |mu23| rho2 rho3. Throws NonFiniteInput.
double energy_surface(const VariationalPoint& point, const ModelParams& params);

/// Analytic partial derivatives of energy_surface in (rho_bar, rho2, rho3).
std::array<double, 3> energy_gradient(const VariationalPoint& point,
                                      const ModelParams& params);

/// Stationary field amplitude at fixed (rho2, rho3): the unique minimizer of
/// the surface in rho_bar.
double optimal_field_amplitude(double rho2, double rho3,
                               const ModelParams& params);

/// Global minimum of the energy surface over the quadrant rho >= 0, found by
/// a coarse multistart grid plus local quasi-Newton refinement.
/// Throws NoConvergence when the winning candidate misses the gradient
/// tolerance.
SemiclassicalResult minimize(const ModelParams& params,
                             const MinimizeOptions& opts = {});

enum class TransitionOrder { First, Second };

const char* to_string(TransitionOrder order);

/// Sampling window for the separatrix parameter (mu23 for Xi/Lambda, mu12
/// for V).
struct CouplingRange {
  double min = 0.0;
  double max = 3.0;
  int steps = 121;
};

struct SeparatrixSegment {
  TransitionOrder order = TransitionOrder::Second;
  std::vector<std::array<double, 2>> points;  // (mu_x, mu_y)
};

struct SeparatrixCurve {
  Configuration config = Configuration::Xi;
  std::vector<SeparatrixSegment> segments;
};

/// Boundary locus of the normal -> collective transition in the coupling
/// plane. Axes: Xi (mu12, mu23), Lambda (mu13, mu23), V (mu12, mu13).
/// Throws DegenerateGap when a required level gap vanishes.
SeparatrixCurve separatrix(Configuration config, const ModelParams& params,
                           const CouplingRange& range);

/// Closed form solved for the remaining coupling: Xi and Lambda take
/// t = mu23 and return mu12 (mu13); V takes t = mu12 and returns mu13.
/// NaN when no boundary exists at this t.
double separatrix_boundary_value(Configuration config,
                                 const ModelParams& params, double t);

/// Signed boundary relation: negative inside the normal region, zero on the
/// separatrix, positive outside. Arguments follow the axis convention of
/// separatrix().
double separatrix_residual(Configuration config, const ModelParams& params,
                           double mu_x, double mu_y);

/// Straight segment in the configuration's coupling plane.
struct CouplingSegment {
  std::array<double, 2> from{};
  std::array<double, 2> to{};
};

/// Classifies the transition crossed by the segment: the order parameter
/// rho_bar is sampled on both sides of the crossing at shrinking offsets;
/// a persistent jump above jump_tol means first order. Throws NoCrossing or
/// AmbiguousClassification.
TransitionOrder classify_order(const ModelParams& params,
                               const CouplingSegment& crossing,
                               const MinimizeOptions& opts = {});

namespace detail {

/// Energy and gradient of the two-variable surface with rho_bar eliminated.
struct ReducedPoint {
  double energy = 0.0;
  double g2 = 0.0;
  double g3 = 0.0;
  double rho_bar = 0.0;
};

ReducedPoint reduced_energy(double rho2, double rho3, const ModelParams& params);

/// One quasi-Newton descent over the quadrant from the given start.
struct LocalMinimum {
  double rho2 = 0.0;
  double rho3 = 0.0;
  double energy = 0.0;
  double grad_norm = 0.0;
  bool converged = false;
  int iterations = 0;
};

LocalMinimum local_minimum(double rho2_start, double rho3_start,
                           const ModelParams& params,
                           const MinimizeOptions& opts);

}  // namespace detail

}  // namespace trilevel::semiclassical
