#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "trilevel/model.hpp"
#include "trilevel/quantum.hpp"
#include "trilevel/scan.hpp"
#include "trilevel/semiclassical.hpp"

namespace trilevel::io {

/// Every float we emit goes through this: 12 significant digits, which
/// round-trips exactly through a double and back.
std::string format_g12(double value);

/// CSV with header mu_x,mu_y,energy,m_value,label,error; fields containing
/// separators are quoted. Reading then writing reproduces the bytes.
void write_scan_csv(std::ostream& out, const std::vector<scan::ScanPoint>& points);
void write_scan_csv(std::ostream& out, const scan::ScanTable& table);
std::vector<scan::ScanPoint> read_scan_csv(std::istream& in);

/// One JSON object per line, same fields and float formatting as the CSV;
/// non-finite numbers serialize as null.
void write_scan_jsonl(std::ostream& out, const std::vector<scan::ScanPoint>& points);
void write_scan_jsonl(std::ostream& out, const scan::ScanTable& table);
std::vector<scan::ScanPoint> read_scan_jsonl(std::istream& in);

/// Gnuplot nonuniform-matrix layout of the energy column, for
/// `plot ... nonuniform matrix with image`.
void write_gnuplot_matrix(std::ostream& out, const scan::ScanTable& table);

/// CSV columns mu_x,mu_y,order; one row per curve point.
void write_separatrix_csv(std::ostream& out,
                          const semiclassical::SeparatrixCurve& curve);
void write_separatrix_json(std::ostream& out,
                           const semiclassical::SeparatrixCurve& curve);

/// CSV columns mu_x,mu_y,label_from,label_to,polyline (polyline = index).
void write_crossovers_csv(std::ostream& out, const scan::CrossoverSet& set);
void write_crossovers_json(std::ostream& out, const scan::CrossoverSet& set);

void write_minimize_csv(std::ostream& out,
                        const semiclassical::SemiclassicalResult& result);
void write_minimize_json(std::ostream& out,
                         const semiclassical::SemiclassicalResult& result);

/// CSV of the scanned sector energies (columns m,energy,is_ground).
void write_ground_csv(std::ostream& out,
                      const quantum::GroundStateResult& result);
/// JSON document with energy, m_star, sector energies and the ten largest
/// amplitudes labelled by their basis states.
void write_ground_json(std::ostream& out,
                       const quantum::GroundStateResult& result,
                       const quantum::SectorBasis& basis);

/// Aligned table: abscissa, one boundary column per atom count, separatrix.
void write_convergence_csv(std::ostream& out,
                           const scan::ConvergenceStudy& study);
void write_convergence_json(std::ostream& out,
                            const scan::ConvergenceStudy& study);

/// Flat key-value parameter file. Keys: config, omega1, omega2, omega3,
/// mu12, mu13, mu23, n_atoms; one `key = value` (or `key value`) per line,
/// '#' starts a comment. Unknown keys throw; the result is validated.
ModelParams read_params_kv(std::istream& in);

}  // namespace trilevel::io
