#pragma once

#include <array>
#include <string>
#include <vector>

#include "trilevel/model.hpp"
#include "trilevel/quantum.hpp"
#include "trilevel/semiclassical.hpp"

namespace trilevel::scan {

enum class Engine { Semiclassical, Quantum, Both };

const char* to_string(Engine engine);
Engine engine_from_string(const std::string& name);

struct AxisSpec {
  std::string coupling;  // "mu12", "mu13" or "mu23"
  double min = 0.0;
  double max = 3.0;
  int steps = 61;

  double value(int i) const {
    return min + (max - min) * i / (steps - 1);
  }
};

struct ScanSpec {
  ModelParams base;  // config, frequencies and atom number; axis couplings
                     // are overwritten at every grid point
  Engine engine = Engine::Semiclassical;
  AxisSpec x;
  AxisSpec y;
  quantum::SearchOptions search;
  semiclassical::MinimizeOptions minimize;
  int threads = 0;  // <= 0: TRILEVEL_THREADS, then hardware concurrency

  /// Throws unless the two axes are exactly the configuration's allowed
  /// couplings, each axis has steps >= 2 and min <= max, and base validates.
  void validate() const;
};

struct ScanPoint {
  double mu_x = 0.0;
  double mu_y = 0.0;
  double energy = 0.0;   // per atom for both engines
  double m_value = 0.0;  // excitation per atom (semiclassical) or M* (quantum)
  std::string label;     // "Normal"/"Collective" or "M=<k>"
  std::string error;     // empty on success
};

struct ScanTable {
  Engine engine = Engine::Semiclassical;  // never Both
  AxisSpec x;
  AxisSpec y;
  std::vector<ScanPoint> points;  // row-major: index = iy * x.steps + ix

  const ScanPoint& at(int ix, int iy) const {
    return points[static_cast<std::size_t>(iy) * x.steps + ix];
  }
};

struct ScanResult {
  std::vector<ScanTable> tables;  // one per engine; semiclassical first
  int failed_points = 0;
};

/// Evaluates the requested engine(s) on the full grid. Points are computed
/// by a worker pool but stored in row-major grid order, so the output is
/// independent of the parallelism degree. Per-point engine failures go into
/// the error column and the scan continues.
ScanResult run_scan(const ScanSpec& spec);

struct CrossoverPolyline {
  std::string label_from;
  std::string label_to;
  std::vector<std::array<double, 2>> points;  // (mu_x, mu_y) vertices
};

using CrossoverSet = std::vector<CrossoverPolyline>;

/// Walks every grid edge and drops a vertex at the midpoint of each edge
/// whose endpoint labels differ, then chains vertices with matching label
/// pairs into polylines. Throws IncompleteGrid when the table holds errors.
CrossoverSet extract_crossovers(const ScanTable& table);

/// Same boundary extraction, but each crossing edge is bisected with fresh
/// engine evaluations until the bracket is shorter than tol (coupling units).
CrossoverSet extract_crossovers(const ScanTable& table, const ScanSpec& spec,
                                double tol);

struct ConvergenceCurve {
  int n_atoms = 0;
  std::vector<double> boundary;  // x-coupling of the M*=0 edge per abscissa
};

struct ConvergenceStudy {
  std::vector<double> abscissae;  // shared y-coupling samples
  std::vector<ConvergenceCurve> curves;
  std::vector<double> separatrix;  // analytic boundary, clamped to x.min
};

/// For each atom count, locates the quantum M*=0 boundary along every grid
/// row by scan plus bisection to tol, and aligns all curves with the
/// analytic separatrix on the shared abscissae. Rows whose first grid point
/// already has M* != 0 clamp to x.min; rows with no change give NaN.
ConvergenceStudy convergence_study(const ModelParams& base,
                                   const std::vector<int>& atom_counts,
                                   const AxisSpec& x, const AxisSpec& y,
                                   const quantum::SearchOptions& search = {},
                                   double tol = 1e-4);

/// Parallelism degree actually used: TRILEVEL_THREADS when set to a positive
/// integer, otherwise `requested` when positive, otherwise the hardware
/// concurrency (at least 1).
int resolve_threads(int requested);

}  // namespace trilevel::scan
