#pragma once

#include <Eigen/Dense>
#include <map>
#include <vector>

#include "trilevel/model.hpp"

namespace trilevel::quantum {

/// One occupation state of the symmetric irrep: atoms per level plus photons.
struct BasisState {
  int n1 = 0;
  int n2 = 0;
  int n3 = 0;
  int photons = 0;
};

/// Basis of one (n_atoms, m_total) block, ordered lexicographically in (n3, n2).
struct SectorBasis {
  Configuration config = Configuration::Xi;
  int n_atoms = 1;
  int m_total = 0;
  std::vector<BasisState> states;

  int dimension() const { return static_cast<int>(states.size()); }
};

/// Enumerates every state with n1+n2+n3 = n_atoms and
/// photons + w2*n2 + w3*n3 = m_total. Empty only when m_total < 0.
SectorBasis enumerate_sector(Configuration config, int n_atoms, int m_total);

/// Hamiltonian restricted to one sector, as a dense real symmetric matrix.
///
/// Diagonal entries are photons + sum_k omega_k n_k; each allowed coupling
/// (i<j) contributes -(mu_ij/sqrt(N_a)) * sqrt(n_j (n_i+1)) * sqrt(photons+1)
/// between states related by lowering one atom j->i and creating a photon.
/// Throws DimensionMismatch if the basis is empty or does not match params.
Eigen::MatrixXd build_hamiltonian(const SectorBasis& basis,
                                  const ModelParams& params);

struct EigenPair {
  double value = 0.0;
  Eigen::VectorXd vector;
};

/// Lowest eigenpair of the sector Hamiltonian. The eigenvector is normalized
/// and its largest-magnitude amplitude is made positive.
EigenPair sector_ground(const SectorBasis& basis, const ModelParams& params);

struct SearchOptions {
  int window = 20;     // stop after this many non-improving sectors
  int hard_cap = 500;  // absolute bound on the explored M
  double tie_tol = 1e-12;
};

struct GroundStateResult {
  double energy = 0.0;   // total, not per atom
  int m_star = 0;        // sector of the global minimum
  Eigen::VectorXd amplitudes;  // over enumerate_sector(config, n_atoms, m_star)
  double m_expectation = 0.0;  // equals m_star; M is conserved
  std::map<int, double> sector_energies;
  bool converged = true;  // false when hard_cap was hit while still improving
};

/// Scans sectors M = 0, 1, 2, ... and returns the global minimum. On ties
/// within tie_tol the smaller M wins.
GroundStateResult global_ground(const ModelParams& params,
                                const SearchOptions& search = {});

/// Closed-form lowest sector energy for one Xi atom at resonance
/// (omega = (0,1,2)): M - sqrt(M mu12^2 + (M-1) mu23^2), valid for M >= 1.
/// Throws InvalidSector for M < 1.
double analytic_one_atom_xi(int m_total, double mu12, double mu23);

/// Applies every Hamiltonian term to every state of the sectors
/// sample_m - 1, sample_m, sample_m + 1 without assuming conservation, and
/// returns the largest matrix-element magnitude that lands outside the
/// source sector. Must be exactly zero.
double commutant_check(const ModelParams& params, int n_atoms, int sample_m);

}  // namespace trilevel::quantum
