#include "trilevel/semiclassical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "trilevel/errors.hpp"

namespace trilevel::semiclassical {

namespace {

struct Couplings {
  double m12;
  double m13;
  double m23;
};

// Only coupling magnitudes enter the minimized surface: the optimal phases
// absorb every sign.
Couplings magnitudes(const ModelParams& params) {
  return {std::abs(params.mu12), std::abs(params.mu13), std::abs(params.mu23)};
}

void require_finite(const VariationalPoint& point) {
  if (!std::isfinite(point.rho_bar) || !std::isfinite(point.rho2) ||
      !std::isfinite(point.rho3)) {
    throw NonFiniteInput("variational point has a non-finite coordinate");
  }
}

void require_gaps(const ModelParams& params) {
  if (!(params.gap21() > 0.0) || !(params.gap31() > 0.0)) {
    throw DegenerateGap("level gaps above the lowest level must be positive");
  }
}

double sq(double x) { return x * x; }

}  // namespace

double energy_surface(const VariationalPoint& point, const ModelParams& params) {
  require_finite(point);
  const auto [m12, m13, m23] = magnitudes(params);
  const double r2 = point.rho2;
  const double r3 = point.rho3;
  const double d = 1.0 + r2 * r2 + r3 * r3;
  const double a = params.omega1 + params.omega2 * r3 * r3 +
                   params.omega3 * r2 * r2;
  const double b = m12 * r3 + m13 * r2 + m23 * r2 * r3;
  return point.rho_bar * point.rho_bar + a / d - 2.0 * point.rho_bar * b / d;
}

std::array<double, 3> energy_gradient(const VariationalPoint& point,
                                      const ModelParams& params) {
  require_finite(point);
  const auto [m12, m13, m23] = magnitudes(params);
  const double rb = point.rho_bar;
  const double r2 = point.rho2;
  const double r3 = point.rho3;
  const double d = 1.0 + r2 * r2 + r3 * r3;
  const double a = params.omega1 + params.omega2 * r3 * r3 +
                   params.omega3 * r2 * r2;
  const double b = m12 * r3 + m13 * r2 + m23 * r2 * r3;

  const double da2 = 2.0 * params.omega3 * r2;
  const double da3 = 2.0 * params.omega2 * r3;
  const double db2 = m13 + m23 * r3;
  const double db3 = m12 + m23 * r2;

  const double g_bar = 2.0 * rb - 2.0 * b / d;
  // Quotient rule for a/d and b/d; d'(rho_k) = 2 rho_k.
  const double g2 = (da2 * d - 2.0 * r2 * a) / (d * d) -
                    2.0 * rb * (db2 * d - 2.0 * r2 * b) / (d * d);
  const double g3 = (da3 * d - 2.0 * r3 * a) / (d * d) -
                    2.0 * rb * (db3 * d - 2.0 * r3 * b) / (d * d);
  return {g_bar, g2, g3};
}

double optimal_field_amplitude(double rho2, double rho3,
                               const ModelParams& params) {
  VariationalPoint point{0.0, rho2, rho3};
  require_finite(point);
  const auto [m12, m13, m23] = magnitudes(params);
  const double d = 1.0 + rho2 * rho2 + rho3 * rho3;
  return (m12 * rho3 + m13 * rho2 + m23 * rho2 * rho3) / d;
}

namespace detail {

ReducedPoint reduced_energy(double rho2, double rho3,
                            const ModelParams& params) {
  const auto [m12, m13, m23] = magnitudes(params);
  const double r2 = rho2;
  const double r3 = rho3;
  const double d = 1.0 + r2 * r2 + r3 * r3;
  const double a = params.omega1 + params.omega2 * r3 * r3 +
                   params.omega3 * r2 * r2;
  const double b = m12 * r3 + m13 * r2 + m23 * r2 * r3;
  const double rb = b / d;

  ReducedPoint out;
  out.rho_bar = rb;
  out.energy = a / d - rb * rb;

  // Envelope theorem: at the stationary rho_bar the inner derivative drops
  // out, so the reduced gradient equals the partial gradient at rho_bar = rb.
  const double da2 = 2.0 * params.omega3 * r2;
  const double da3 = 2.0 * params.omega2 * r3;
  const double db2 = m13 + m23 * r3;
  const double db3 = m12 + m23 * r2;
  out.g2 = (da2 * d - 2.0 * r2 * a) / (d * d) -
           2.0 * rb * (db2 * d - 2.0 * r2 * b) / (d * d);
  out.g3 = (da3 * d - 2.0 * r3 * a) / (d * d) -
           2.0 * rb * (db3 * d - 2.0 * r3 * b) / (d * d);
  return out;
}

namespace {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
double norm(Vec2 v) { return std::sqrt(dot(v, v)); }

Vec2 clamp_quadrant(Vec2 v) { return {std::max(v.x, 0.0), std::max(v.y, 0.0)}; }

// Gradient with descent components blocked by an active bound removed.
Vec2 projected_gradient(Vec2 x, Vec2 g) {
  Vec2 pg = g;
  if (x.x <= 0.0 && g.x > 0.0) pg.x = 0.0;
  if (x.y <= 0.0 && g.y > 0.0) pg.y = 0.0;
  return pg;
}

}  // namespace

LocalMinimum local_minimum(double rho2_start, double rho3_start,
                           const ModelParams& params,
                           const MinimizeOptions& opts) {
  Vec2 x = clamp_quadrant({rho2_start, rho3_start});
  ReducedPoint e = reduced_energy(x.x, x.y, params);

  // Inverse-Hessian estimate for the BFGS update.
  double h11 = 1.0, h12 = 0.0, h22 = 1.0;
  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    const Vec2 g{e.g2, e.g3};
    const Vec2 pg = projected_gradient(x, g);
    if (norm(pg) <= opts.grad_tol) {
      return {x.x, x.y, e.energy, norm(pg), true, iter};
    }

    Vec2 dir{-(h11 * g.x + h12 * g.y), -(h12 * g.x + h22 * g.y)};
    if (x.x <= 0.0 && dir.x < 0.0) dir.x = 0.0;
    if (x.y <= 0.0 && dir.y < 0.0) dir.y = 0.0;
    if (dot(dir, pg) >= 0.0) {
      dir = -1.0 * pg;
      h11 = 1.0;
      h12 = 0.0;
      h22 = 1.0;
    }

    // Backtracking line search with projection onto the quadrant.
    double step = 1.0;
    bool accepted = false;
    Vec2 xn;
    ReducedPoint en;
    for (int ls = 0; ls < 60; ++ls) {
      xn = clamp_quadrant(x + step * dir);
      const Vec2 s = xn - x;
      if (norm(s) == 0.0) {
        step *= 0.5;
        continue;
      }
      en = reduced_energy(xn.x, xn.y, params);
      const double slope = dot(g, s);
      // The sufficient-decrease test needs a noise floor: near the minimum
      // the true decrease of a full quasi-Newton step is smaller than one
      // ulp of the energy, yet taking the step still contracts the gradient.
      const double noise = 16.0 * std::numeric_limits<double>::epsilon() *
                           std::max(1.0, std::abs(e.energy));
      if (en.energy <= e.energy + 1e-4 * std::min(slope, 0.0) + noise) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // stalled; report whatever accuracy was reached

    const Vec2 s = xn - x;
    const Vec2 yv{en.g2 - e.g2, en.g3 - e.g3};
    const double sy = dot(s, yv);
    if (sy > 1e-12 * norm(s) * norm(yv)) {
      // Standard inverse BFGS update, written out for the 2x2 case.
      const double rho = 1.0 / sy;
      const double hy1 = h11 * yv.x + h12 * yv.y;
      const double hy2 = h12 * yv.x + h22 * yv.y;
      const double yhy = yv.x * hy1 + yv.y * hy2;
      const double c = (1.0 + rho * yhy) * rho;
      h11 += c * s.x * s.x - rho * (s.x * hy1 + hy1 * s.x);
      h12 += c * s.x * s.y - rho * (s.x * hy2 + hy1 * s.y);
      h22 += c * s.y * s.y - rho * (s.y * hy2 + hy2 * s.y);
    } else {
      h11 = 1.0;
      h12 = 0.0;
      h22 = 1.0;
    }
    x = xn;
    e = en;
  }

  const Vec2 pg = projected_gradient(x, {e.g2, e.g3});
  return {x.x, x.y, e.energy, norm(pg), norm(pg) <= opts.grad_tol, iter};
}

}  // namespace detail

namespace {

struct Candidate {
  detail::LocalMinimum minimum;
  bool is_origin = false;
};

double radius_sq(const detail::LocalMinimum& m) {
  return m.rho2 * m.rho2 + m.rho3 * m.rho3;
}

}  // namespace

SemiclassicalResult minimize(const ModelParams& params,
                             const MinimizeOptions& opts) {
  validate(params);
  if (opts.grid_n < 2 || opts.n_starts < 1) {
    throw Error("minimize needs grid_n >= 2 and n_starts >= 1");
  }

  // The origin is always a candidate: it is the exact normal-phase minimum
  // and a grid start converging elsewhere must beat it outright.
  std::vector<Candidate> candidates;
  {
    detail::LocalMinimum origin;
    origin.energy = detail::reduced_energy(0.0, 0.0, params).energy;
    origin.converged = true;
    candidates.push_back({origin, true});
  }

  // Coarse scan over the compactified quadrant x = rho^2 / (1 + rho^2),
  // which covers rho in [0, inf) with a uniform grid on [0, 1).
  struct Cell {
    double energy;
    double r2;
    double r3;
  };
  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(opts.grid_n) * opts.grid_n);
  const int n = opts.grid_n;
  for (int i = 0; i < n; ++i) {
    const double u = static_cast<double>(i) / n;
    const double r2 = std::sqrt(u / (1.0 - u));
    for (int j = 0; j < n; ++j) {
      const double v = static_cast<double>(j) / n;
      const double r3 = std::sqrt(v / (1.0 - v));
      cells.push_back({detail::reduced_energy(r2, r3, params).energy, r2, r3});
    }
  }
  const int starts = std::min<int>(opts.n_starts, static_cast<int>(cells.size()));
  std::partial_sort(cells.begin(), cells.begin() + starts, cells.end(),
                    [](const Cell& a, const Cell& b) { return a.energy < b.energy; });
  for (int k = 0; k < starts; ++k) {
    candidates.push_back(
        {detail::local_minimum(cells[k].r2, cells[k].r3, params, opts), false});
  }

  // Pick the lowest energy; break ties toward the origin / smaller radius.
  std::size_t best = 0;
  for (std::size_t k = 1; k < candidates.size(); ++k) {
    const auto& cur = candidates[k].minimum;
    const auto& win = candidates[best].minimum;
    if (cur.energy < win.energy - opts.tie_tol) {
      best = k;
    } else if (cur.energy <= win.energy + opts.tie_tol &&
               radius_sq(cur) < radius_sq(win)) {
      best = k;
    }
  }
  const auto& winner = candidates[best].minimum;
  if (!winner.converged) {
    throw NoConvergence(winner.energy, winner.grad_norm);
  }

  // A distinct minimum at the same energy marks a degenerate ground state.
  bool degenerate = false;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (k == best) continue;
    const auto& other = candidates[k].minimum;
    const double dr2 = other.rho2 - winner.rho2;
    const double dr3 = other.rho3 - winner.rho3;
    if (std::abs(other.energy - winner.energy) <= opts.tie_tol &&
        dr2 * dr2 + dr3 * dr3 > sq(opts.origin_tol)) {
      degenerate = true;
      break;
    }
  }

  SemiclassicalResult out;
  out.degenerate = degenerate;
  out.grad_norm = winner.grad_norm;

  double r2 = winner.rho2;
  double r3 = winner.rho3;
  double rb = optimal_field_amplitude(r2, r3, params);
  if (r2 < opts.origin_tol && r3 < opts.origin_tol && rb < opts.origin_tol) {
    r2 = 0.0;
    r3 = 0.0;
    rb = 0.0;
    out.phase = Phase::Normal;
    out.energy_per_atom = params.omega1;
    out.grad_norm = 0.0;
  } else {
    out.phase = Phase::Collective;
    out.energy_per_atom = winner.energy;
  }
  out.point = {rb, r2, r3};

  const double d = 1.0 + r2 * r2 + r3 * r3;
  out.populations = {1.0 / d, r3 * r3 / d, r2 * r2 / d};
  out.photon_density = rb * rb;
  const auto weights = excitation_weights(params.config);
  out.m_per_atom = rb * rb +
                   (weights.level_weights[1] * r3 * r3 +
                    weights.level_weights[2] * r2 * r2) /
                       d;
  return out;
}

const char* to_string(TransitionOrder order) {
  return order == TransitionOrder::First ? "First" : "Second";
}

double separatrix_boundary_value(Configuration config,
                                 const ModelParams& params, double t) {
  require_gaps(params);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  switch (config) {
    case Configuration::Xi: {
      const double excess = std::abs(t) - std::sqrt(params.gap31());
      const double rad =
          params.gap21() - (excess > 0.0 ? excess * excess : 0.0);
      return rad >= 0.0 ? std::sqrt(rad) : nan;
    }
    case Configuration::Lambda: {
      const double excess = std::abs(t) - std::sqrt(params.gap21());
      const double rad =
          params.gap31() - (excess > 0.0 ? excess * excess : 0.0);
      return rad >= 0.0 ? std::sqrt(rad) : nan;
    }
    case Configuration::V: {
      const double rad = params.gap31() * (1.0 - t * t / params.gap21());
      return rad >= 0.0 ? std::sqrt(rad) : nan;
    }
  }
  return nan;
}

double separatrix_residual(Configuration config, const ModelParams& params,
                           double mu_x, double mu_y) {
  require_gaps(params);
  switch (config) {
    case Configuration::Xi: {
      const double excess = std::abs(mu_y) - std::sqrt(params.gap31());
      return mu_x * mu_x + (excess > 0.0 ? excess * excess : 0.0) -
             params.gap21();
    }
    case Configuration::Lambda: {
      const double excess = std::abs(mu_y) - std::sqrt(params.gap21());
      return mu_x * mu_x + (excess > 0.0 ? excess * excess : 0.0) -
             params.gap31();
    }
    case Configuration::V:
      return mu_x * mu_x / params.gap21() + mu_y * mu_y / params.gap31() - 1.0;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

SeparatrixCurve separatrix(Configuration config, const ModelParams& params,
                           const CouplingRange& range) {
  require_gaps(params);
  if (range.steps < 2 || !(range.min <= range.max)) {
    throw Error("separatrix range needs steps >= 2 and min <= max");
  }

  // Uniform samples plus the exact kink / endpoint parameters, so segment
  // boundaries land on the curve instead of between grid points. The special
  // points carry their closed-form values, immune to the cancellation the
  // general formula suffers right at the endpoints.
  std::vector<double> ts;
  ts.reserve(static_cast<std::size_t>(range.steps) + 4);
  for (int i = 0; i < range.steps; ++i) {
    ts.push_back(range.min + (range.max - range.min) * i / (range.steps - 1));
  }
  std::vector<std::array<double, 2>> specials;  // (t, exact boundary value)
  switch (config) {
    case Configuration::Xi:
      specials = {{std::sqrt(params.gap31()), std::sqrt(params.gap21())},
                  {std::sqrt(params.gap31()) + std::sqrt(params.gap21()), 0.0}};
      break;
    case Configuration::Lambda:
      specials = {{std::sqrt(params.gap21()), std::sqrt(params.gap31())},
                  {std::sqrt(params.gap21()) + std::sqrt(params.gap31()), 0.0}};
      break;
    case Configuration::V:
      specials = {{std::sqrt(params.gap21()), 0.0}};
      break;
  }
  const auto special_value = [&](double t) {
    for (const auto& [s, value] : specials) {
      if (t == s || t == -s) return value;
    }
    return std::numeric_limits<double>::quiet_NaN();
  };
  for (const auto& [s, value] : specials) {
    for (double signed_s : {s, -s}) {
      if (signed_s >= range.min && signed_s <= range.max) {
        ts.push_back(signed_s);
      }
    }
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  // The straight part of the Xi/Lambda curve owns its endpoint; beyond it
  // the boundary bends into the first-order arc.
  const auto order_at = [&](double t) {
    switch (config) {
      case Configuration::Xi:
        return std::abs(t) <= std::sqrt(params.gap31())
                   ? TransitionOrder::Second
                   : TransitionOrder::First;
      case Configuration::Lambda:
        return std::abs(t) <= std::sqrt(params.gap21())
                   ? TransitionOrder::Second
                   : TransitionOrder::First;
      case Configuration::V:
        return TransitionOrder::Second;
    }
    return TransitionOrder::Second;
  };

  SeparatrixCurve curve;
  curve.config = config;
  for (double t : ts) {
    double value = special_value(t);
    if (!std::isfinite(value)) {
      value = separatrix_boundary_value(config, params, t);
    }
    if (!std::isfinite(value)) continue;
    const std::array<double, 2> point =
        config == Configuration::V ? std::array<double, 2>{t, value}
                                   : std::array<double, 2>{value, t};
    const TransitionOrder order = order_at(t);
    if (curve.segments.empty() || curve.segments.back().order != order) {
      curve.segments.push_back({order, {}});
    }
    curve.segments.back().points.push_back(point);
  }
  return curve;
}

TransitionOrder classify_order(const ModelParams& params,
                               const CouplingSegment& crossing,
                               const MinimizeOptions& opts) {
  validate(params);
  if (opts.jump_levels < 4) {
    throw Error("classify_order needs jump_levels >= 4");
  }
  const auto names = allowed_couplings(params.config);

  const auto at = [&](std::array<double, 2> q) {
    ModelParams p = params;
    p.set_coupling(names[0], q[0]);
    p.set_coupling(names[1], q[1]);
    return p;
  };
  const auto residual = [&](std::array<double, 2> q) {
    return separatrix_residual(params.config, params, q[0], q[1]);
  };
  const auto lerp = [&](double t) -> std::array<double, 2> {
    return {crossing.from[0] + t * (crossing.to[0] - crossing.from[0]),
            crossing.from[1] + t * (crossing.to[1] - crossing.from[1])};
  };

  // Bracket the sign change of the boundary relation along the segment.
  constexpr int kScan = 256;
  double lo = 0.0, hi = -1.0;
  double h_lo = residual(lerp(0.0));
  for (int i = 1; i <= kScan; ++i) {
    const double t = static_cast<double>(i) / kScan;
    const double h = residual(lerp(t));
    if (h_lo == 0.0 || (h_lo < 0.0) != (h < 0.0)) {
      lo = (static_cast<double>(i) - 1.0) / kScan;
      hi = t;
      break;
    }
    lo = t;
    h_lo = h;
  }
  if (hi < 0.0) {
    throw NoCrossing("segment does not cross the separatrix");
  }
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double h = residual(lerp(mid));
    if ((h < 0.0) == (h_lo < 0.0)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double t_star = 0.5 * (lo + hi);

  // Unit direction along the segment pointing from the normal side (negative
  // residual) to the collective side.
  double dx = crossing.to[0] - crossing.from[0];
  double dy = crossing.to[1] - crossing.from[1];
  const double len = std::hypot(dx, dy);
  if (!(len > 0.0)) {
    throw NoCrossing("degenerate segment");
  }
  dx /= len;
  dy /= len;
  if (residual(crossing.from) > residual(crossing.to)) {
    dx = -dx;
    dy = -dy;
  }
  const std::array<double, 2> cross = lerp(t_star);

  // Order-parameter jump across the boundary at geometrically shrinking
  // offsets: a second-order transition decays with the offset, a first-order
  // one saturates.
  std::vector<double> jumps;
  double delta = opts.jump_delta0;
  for (int level = 0; level < opts.jump_levels; ++level, delta *= 0.25) {
    const std::array<double, 2> inside{cross[0] - delta * dx,
                                       cross[1] - delta * dy};
    const std::array<double, 2> outside{cross[0] + delta * dx,
                                        cross[1] + delta * dy};
    const double rb_in = minimize(at(inside), opts).point.rho_bar;
    const double rb_out = minimize(at(outside), opts).point.rho_bar;
    jumps.push_back(std::abs(rb_out - rb_in));
  }

  int decaying = 0;
  for (std::size_t k = jumps.size() - 3; k < jumps.size(); ++k) {
    if (jumps[k] < 0.8 * jumps[k - 1]) ++decaying;
  }
  if (decaying == 3) return TransitionOrder::Second;

  const double jump = jumps.back();
  if (jump >= 10.0 * opts.jump_tol) return TransitionOrder::First;
  if (jump <= 0.1 * opts.jump_tol) return TransitionOrder::Second;
  throw AmbiguousClassification(jump);
}

}  // namespace trilevel::semiclassical
