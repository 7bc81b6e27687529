#include "trilevel/quantum.hpp"

#include <cmath>
#include <limits>

namespace trilevel::quantum {

namespace {

// Index of a basis state inside its sector, keyed by (n2, n3); n1 and the
// photon number are determined by the sector constraints.
class SectorIndex {
 public:
  explicit SectorIndex(const SectorBasis& basis)
      : stride_(basis.n_atoms + 1), index_(stride_ * stride_, -1) {
    for (int k = 0; k < basis.dimension(); ++k) {
      const BasisState& s = basis.states[k];
      index_[s.n3 * stride_ + s.n2] = k;
    }
  }

  int find(int n2, int n3) const {
    if (n2 < 0 || n3 < 0 || n2 >= stride_ || n3 >= stride_) return -1;
    return index_[n3 * stride_ + n2];
  }

 private:
  int stride_;
  std::vector<int> index_;
};

struct CouplingTerm {
  int lower;   // level i of the pair (i < j)
  int upper;   // level j
  double mu;
};

std::array<CouplingTerm, 3> coupling_terms(const ModelParams& params) {
  return {{{1, 2, params.mu12}, {1, 3, params.mu13}, {2, 3, params.mu23}}};
}

int occupation(const BasisState& s, int level) {
  return level == 1 ? s.n1 : (level == 2 ? s.n2 : s.n3);
}

BasisState with_move(const BasisState& s, int from, int to, int photon_delta) {
  BasisState t = s;
  (from == 1 ? t.n1 : from == 2 ? t.n2 : t.n3) -= 1;
  (to == 1 ? t.n1 : to == 2 ? t.n2 : t.n3) += 1;
  t.photons += photon_delta;
  return t;
}

}  // namespace

SectorBasis enumerate_sector(Configuration config, int n_atoms, int m_total) {
  if (n_atoms < 1) throw NonPositiveAtoms("n_atoms must be >= 1");
  SectorBasis basis{config, n_atoms, m_total, {}};
  const auto w = excitation_weights(config).level_weights;
  for (int n3 = 0; n3 <= n_atoms; ++n3) {
    for (int n2 = 0; n2 + n3 <= n_atoms; ++n2) {
      const long long nu =
          static_cast<long long>(m_total) - w[1] * n2 - w[2] * n3;
      if (nu < 0) continue;
      basis.states.push_back(
          {n_atoms - n2 - n3, n2, n3, static_cast<int>(nu)});
    }
  }
  return basis;
}

Eigen::MatrixXd build_hamiltonian(const SectorBasis& basis,
                                  const ModelParams& params) {
  validate(params);
  if (basis.states.empty()) {
    throw DimensionMismatch("sector basis is empty");
  }
  if (basis.config != params.config || basis.n_atoms != params.n_atoms) {
    throw DimensionMismatch("basis does not match the model parameters");
  }
  const int dim = basis.dimension();
  const double inv_sqrt_na = 1.0 / std::sqrt(static_cast<double>(basis.n_atoms));
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  const SectorIndex index(basis);

  for (int s = 0; s < dim; ++s) {
    const BasisState& state = basis.states[s];
    h(s, s) = state.photons + params.omega1 * state.n1 +
              params.omega2 * state.n2 + params.omega3 * state.n3;
    // a' A_ij with i < j: lower one atom j -> i and create a photon. Each
    // unordered pair of states is visited once, from its lower-photon member.
    for (const CouplingTerm& term : coupling_terms(params)) {
      if (term.mu == 0.0) continue;
      const int nj = occupation(state, term.upper);
      if (nj < 1) continue;
      const int ni = occupation(state, term.lower);
      const BasisState target = with_move(state, term.upper, term.lower, +1);
      const int t = index.find(target.n2, target.n3);
      // Images outside the sector have zero overlap with every basis state.
      if (t < 0 || basis.states[t].photons != target.photons) continue;
      const double value = -(term.mu * inv_sqrt_na) *
                           std::sqrt(static_cast<double>(nj) * (ni + 1)) *
                           std::sqrt(static_cast<double>(state.photons) + 1.0);
      h(t, s) = value;
      h(s, t) = value;
    }
  }
  return h;
}

namespace {

double lowest_eigenvalue(const SectorBasis& basis, const ModelParams& params) {
  const Eigen::MatrixXd h = build_hamiltonian(basis, params);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h,
                                                        Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw EigenFailure("eigensolver failed on sector M=" +
                       std::to_string(basis.m_total));
  }
  return solver.eigenvalues()(0);
}

}  // namespace

EigenPair sector_ground(const SectorBasis& basis, const ModelParams& params) {
  const Eigen::MatrixXd h = build_hamiltonian(basis, params);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  if (solver.info() != Eigen::Success) {
    throw EigenFailure("eigensolver failed on sector M=" +
                       std::to_string(basis.m_total) + " (dimension " +
                       std::to_string(basis.dimension()) + ")");
  }
  EigenPair pair{solver.eigenvalues()(0), solver.eigenvectors().col(0)};
  const double residual = (h * pair.vector - pair.value * pair.vector).norm();
  if (!(residual <= 1e-10 * std::max(1.0, std::abs(pair.value)))) {
    throw EigenFailure("eigenpair residual " + std::to_string(residual) +
                       " too large on sector M=" + std::to_string(basis.m_total));
  }
  // Sign convention: largest-magnitude amplitude positive.
  int arg = 0;
  double best = std::abs(pair.vector(0));
  for (int k = 1; k < pair.vector.size(); ++k) {
    if (std::abs(pair.vector(k)) > best) {
      best = std::abs(pair.vector(k));
      arg = k;
    }
  }
  if (pair.vector(arg) < 0.0) pair.vector = -pair.vector;
  return pair;
}

GroundStateResult global_ground(const ModelParams& params,
                                const SearchOptions& search) {
  validate(params);
  GroundStateResult result;
  result.energy = std::numeric_limits<double>::infinity();
  result.m_star = -1;
  int since_improvement = 0;
  bool converged = false;

  for (int m = 0; m <= search.hard_cap; ++m) {
    const SectorBasis basis = enumerate_sector(params.config, params.n_atoms, m);
    const double e = lowest_eigenvalue(basis, params);
    result.sector_energies[m] = e;
    if (e < result.energy - search.tie_tol) {
      result.energy = e;
      result.m_star = m;
      since_improvement = 0;
    } else {
      ++since_improvement;
      if (since_improvement >= search.window) {
        converged = true;
        break;
      }
    }
  }

  result.converged = converged;
  const SectorBasis winner =
      enumerate_sector(params.config, params.n_atoms, result.m_star);
  const EigenPair pair = sector_ground(winner, params);
  result.energy = pair.value;
  result.amplitudes = pair.vector;
  result.m_expectation = result.m_star;
  return result;
}

double analytic_one_atom_xi(int m_total, double mu12, double mu23) {
  if (m_total < 1) {
    throw InvalidSector("the closed form requires M >= 1; M=0 has energy omega1");
  }
  return m_total -
         std::sqrt(m_total * mu12 * mu12 + (m_total - 1) * mu23 * mu23);
}

double commutant_check(const ModelParams& params, int n_atoms, int sample_m) {
  const auto w = excitation_weights(params.config).level_weights;
  const double inv_sqrt_na = 1.0 / std::sqrt(static_cast<double>(n_atoms));
  const auto m_of = [&](const BasisState& s) {
    return s.photons + w[1] * s.n2 + w[2] * s.n3;
  };

  double worst = 0.0;
  for (int m : {sample_m - 1, sample_m, sample_m + 1}) {
    if (m < 0) continue;
    const SectorBasis basis = enumerate_sector(params.config, n_atoms, m);
    for (const BasisState& state : basis.states) {
      for (const CouplingTerm& term : coupling_terms(params)) {
        // a A_ji: raise one atom i -> j, destroy a photon.
        if (occupation(state, term.lower) >= 1 && state.photons >= 1) {
          const BasisState target =
              with_move(state, term.lower, term.upper, -1);
          const double amp =
              -(term.mu * inv_sqrt_na) *
              std::sqrt(static_cast<double>(occupation(state, term.lower)) *
                        (occupation(state, term.upper) + 1)) *
              std::sqrt(static_cast<double>(state.photons));
          if (m_of(target) != m) worst = std::max(worst, std::abs(amp));
        }
        // a' A_ij: lower one atom j -> i, create a photon.
        if (occupation(state, term.upper) >= 1) {
          const BasisState target =
              with_move(state, term.upper, term.lower, +1);
          const double amp =
              -(term.mu * inv_sqrt_na) *
              std::sqrt(static_cast<double>(occupation(state, term.upper)) *
                        (occupation(state, term.lower) + 1)) *
              std::sqrt(static_cast<double>(state.photons) + 1.0);
          if (m_of(target) != m) worst = std::max(worst, std::abs(amp));
        }
      }
    }
  }
  return worst;
}

}  // namespace trilevel::quantum
