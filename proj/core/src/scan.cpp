#include "trilevel/scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <thread>

#include "trilevel/errors.hpp"

namespace trilevel::scan {

const char* to_string(Engine engine) {
  switch (engine) {
    case Engine::Semiclassical:
      return "semiclassical";
    case Engine::Quantum:
      return "quantum";
    case Engine::Both:
      return "both";
  }
  return "?";
}

Engine engine_from_string(const std::string& name) {
  if (name == "semiclassical") return Engine::Semiclassical;
  if (name == "quantum") return Engine::Quantum;
  if (name == "both") return Engine::Both;
  throw Error("unknown engine '" + name +
              "' (expected semiclassical, quantum or both)");
}

void ScanSpec::validate() const {
  trilevel::validate(base);
  const auto allowed = allowed_couplings(base.config);
  const bool straight = x.coupling == allowed[0] && y.coupling == allowed[1];
  const bool swapped = x.coupling == allowed[1] && y.coupling == allowed[0];
  if (!straight && !swapped) {
    throw Error("scan axes must be the couplings " + allowed[0] + " and " +
                allowed[1] + " for configuration " +
                std::string(trilevel::to_string(base.config)));
  }
  for (const AxisSpec* axis : {&x, &y}) {
    if (axis->steps < 2) {
      throw Error("axis " + axis->coupling + " needs steps >= 2");
    }
    if (!(axis->min <= axis->max)) {
      throw Error("axis " + axis->coupling + " needs min <= max");
    }
  }
}

int resolve_threads(int requested) {
  if (const char* env = std::getenv("TRILEVEL_THREADS")) {
    char* end = nullptr;
    const long parsed = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && parsed > 0) {
      return static_cast<int>(parsed);
    }
  }
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

// Runs body(0..count-1) on a pool; every index writes only its own slot, so
// the result is identical for any thread count.
void parallel_for(int count, int threads,
                  const std::function<void(int)>& body) {
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (int k = 0; k < count; ++k) body(k);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int k = next.fetch_add(1); k < count; k = next.fetch_add(1)) {
        body(k);
      }
    });
  }
  for (auto& worker : pool) worker.join();
}

void evaluate_point(Engine engine, const ModelParams& params,
                    const ScanSpec& spec, ScanPoint& point) {
  if (engine == Engine::Semiclassical) {
    const auto result = semiclassical::minimize(params, spec.minimize);
    point.energy = result.energy_per_atom;
    point.m_value = result.m_per_atom;
    point.label = result.phase == semiclassical::Phase::Normal
                      ? "Normal"
                      : "Collective";
  } else {
    const auto result = quantum::global_ground(params, spec.search);
    point.energy = result.energy / params.n_atoms;
    point.m_value = result.m_star;
    point.label = "M=" + std::to_string(result.m_star);
    if (!result.converged) point.error = "cap_reached";
  }
}

std::string evaluate_label(Engine engine, const ModelParams& params,
                           const ScanSpec& spec) {
  ScanPoint point;
  evaluate_point(engine, params, spec, point);
  return point.label;
}

}  // namespace

ScanResult run_scan(const ScanSpec& spec) {
  spec.validate();
  std::vector<Engine> engines;
  if (spec.engine == Engine::Both) {
    engines = {Engine::Semiclassical, Engine::Quantum};
  } else {
    engines = {spec.engine};
  }

  const int sx = spec.x.steps;
  const int sy = spec.y.steps;
  const int threads = resolve_threads(spec.threads);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  ScanResult out;
  std::atomic<int> failures{0};
  for (const Engine engine : engines) {
    ScanTable table;
    table.engine = engine;
    table.x = spec.x;
    table.y = spec.y;
    table.points.resize(static_cast<std::size_t>(sx) * sy);
    parallel_for(sx * sy, threads, [&](int k) {
      ScanPoint& point = table.points[static_cast<std::size_t>(k)];
      point.mu_x = spec.x.value(k % sx);
      point.mu_y = spec.y.value(k / sx);
      try {
        ModelParams params = spec.base;
        params.set_coupling(spec.x.coupling, point.mu_x);
        params.set_coupling(spec.y.coupling, point.mu_y);
        evaluate_point(engine, params, spec, point);
      } catch (const std::exception& failure) {
        point.energy = nan;
        point.m_value = nan;
        point.label.clear();
        point.error = failure.what();
      }
      if (!point.error.empty()) failures.fetch_add(1);
    });
    out.tables.push_back(std::move(table));
  }
  out.failed_points = failures.load();
  return out;
}

namespace {

struct EdgeVertex {
  double x;
  double y;
  std::string from;
  std::string to;
};

int label_rank(const std::string& label) {
  // "M=<k>" sorts by k; "Normal" precedes "Collective"; anything else last.
  if (label.rfind("M=", 0) == 0) return std::atoi(label.c_str() + 2);
  if (label == "Normal") return -2;
  if (label == "Collective") return -1;
  return std::numeric_limits<int>::max();
}

void normalize_pair(std::string& from, std::string& to) {
  const int ra = label_rank(from);
  const int rb = label_rank(to);
  if (rb < ra || (rb == ra && to < from)) std::swap(from, to);
}

void require_complete(const ScanTable& table) {
  const std::size_t expected =
      static_cast<std::size_t>(table.x.steps) * table.y.steps;
  if (table.points.size() != expected) {
    throw IncompleteGrid("scan table holds " +
                         std::to_string(table.points.size()) + " of " +
                         std::to_string(expected) + " points");
  }
  for (const ScanPoint& point : table.points) {
    if (!point.error.empty()) {
      throw IncompleteGrid("scan point (" + std::to_string(point.mu_x) + ", " +
                           std::to_string(point.mu_y) +
                           ") failed: " + point.error);
    }
  }
}

// Chains vertices sharing a label pair into polylines by nearest-neighbour
// walks; starting order and tie-breaks are fixed, so the output is
// deterministic.
CrossoverSet chain_vertices(std::vector<EdgeVertex> vertices,
                            double link_limit) {
  std::stable_sort(vertices.begin(), vertices.end(),
                   [](const EdgeVertex& a, const EdgeVertex& b) {
                     if (a.from != b.from) return a.from < b.from;
                     if (a.to != b.to) return a.to < b.to;
                     if (a.y != b.y) return a.y < b.y;
                     return a.x < b.x;
                   });
  std::vector<bool> used(vertices.size(), false);
  const auto dist = [&](std::size_t i, std::size_t j) {
    return std::hypot(vertices[i].x - vertices[j].x,
                      vertices[i].y - vertices[j].y);
  };
  const auto same_pair = [&](std::size_t i, std::size_t j) {
    return vertices[i].from == vertices[j].from &&
           vertices[i].to == vertices[j].to;
  };

  CrossoverSet set;
  for (std::size_t start = 0; start < vertices.size(); ++start) {
    if (used[start]) continue;
    std::vector<std::size_t> line{start};
    used[start] = true;
    // Extend at the back, then flip once and extend what was the front.
    for (int pass = 0; pass < 2; ++pass) {
      while (true) {
        const std::size_t tail = line.back();
        std::size_t best = vertices.size();
        double best_dist = link_limit;
        for (std::size_t j = 0; j < vertices.size(); ++j) {
          if (used[j] || !same_pair(start, j)) continue;
          const double d = dist(tail, j);
          if (d < best_dist) {
            best_dist = d;
            best = j;
          }
        }
        if (best == vertices.size()) break;
        used[best] = true;
        line.push_back(best);
      }
      std::reverse(line.begin(), line.end());
    }
    CrossoverPolyline polyline;
    polyline.label_from = vertices[start].from;
    polyline.label_to = vertices[start].to;
    for (const std::size_t k : line) {
      polyline.points.push_back({vertices[k].x, vertices[k].y});
    }
    set.push_back(std::move(polyline));
  }
  return set;
}

using VertexPlacer = std::function<std::array<double, 2>(
    const ScanPoint& a, const ScanPoint& b)>;

CrossoverSet extract_with_placer(const ScanTable& table,
                                 const VertexPlacer& place) {
  require_complete(table);
  const int sx = table.x.steps;
  const int sy = table.y.steps;
  std::vector<EdgeVertex> vertices;
  const auto visit = [&](const ScanPoint& a, const ScanPoint& b) {
    if (a.label == b.label) return;
    const auto pos = place(a, b);
    EdgeVertex vertex{pos[0], pos[1], a.label, b.label};
    normalize_pair(vertex.from, vertex.to);
    vertices.push_back(std::move(vertex));
  };
  for (int iy = 0; iy < sy; ++iy) {
    for (int ix = 0; ix + 1 < sx; ++ix) visit(table.at(ix, iy), table.at(ix + 1, iy));
  }
  for (int iy = 0; iy + 1 < sy; ++iy) {
    for (int ix = 0; ix < sx; ++ix) visit(table.at(ix, iy), table.at(ix, iy + 1));
  }

  const double dx = table.x.steps > 1
                        ? (table.x.max - table.x.min) / (table.x.steps - 1)
                        : 0.0;
  const double dy = table.y.steps > 1
                        ? (table.y.max - table.y.min) / (table.y.steps - 1)
                        : 0.0;
  return chain_vertices(std::move(vertices), 1.2 * std::hypot(dx, dy));
}

}  // namespace

CrossoverSet extract_crossovers(const ScanTable& table) {
  return extract_with_placer(table, [](const ScanPoint& a, const ScanPoint& b) {
    return std::array<double, 2>{0.5 * (a.mu_x + b.mu_x),
                                 0.5 * (a.mu_y + b.mu_y)};
  });
}

CrossoverSet extract_crossovers(const ScanTable& table, const ScanSpec& spec,
                                double tol) {
  if (!(tol > 0.0)) throw Error("refinement tolerance must be positive");
  const Engine engine = table.engine;
  const auto label_at = [&](double mu_x, double mu_y) {
    ModelParams params = spec.base;
    params.set_coupling(spec.x.coupling, mu_x);
    params.set_coupling(spec.y.coupling, mu_y);
    return evaluate_label(engine, params, spec);
  };
  return extract_with_placer(table, [&](const ScanPoint& a, const ScanPoint& b) {
    double lo = 0.0, hi = 1.0;
    const double length = std::hypot(b.mu_x - a.mu_x, b.mu_y - a.mu_y);
    while (length * (hi - lo) > tol) {
      const double mid = 0.5 * (lo + hi);
      const std::string label = label_at(a.mu_x + mid * (b.mu_x - a.mu_x),
                                         a.mu_y + mid * (b.mu_y - a.mu_y));
      (label == a.label ? lo : hi) = mid;
    }
    const double t = 0.5 * (lo + hi);
    return std::array<double, 2>{a.mu_x + t * (b.mu_x - a.mu_x),
                                 a.mu_y + t * (b.mu_y - a.mu_y)};
  });
}

ConvergenceStudy convergence_study(const ModelParams& base,
                                   const std::vector<int>& atom_counts,
                                   const AxisSpec& x, const AxisSpec& y,
                                   const quantum::SearchOptions& search,
                                   double tol) {
  if (atom_counts.empty() ||
      !std::is_sorted(atom_counts.begin(), atom_counts.end())) {
    throw Error("atom counts must be nonempty and ascending");
  }
  if (x.steps < 2 || y.steps < 2) throw Error("grid needs steps >= 2");
  if (!(tol > 0.0)) throw Error("refinement tolerance must be positive");
  const double nan = std::numeric_limits<double>::quiet_NaN();

  ConvergenceStudy study;
  study.abscissae.reserve(static_cast<std::size_t>(y.steps));
  for (int iy = 0; iy < y.steps; ++iy) study.abscissae.push_back(y.value(iy));

  for (const int n_atoms : atom_counts) {
    ModelParams params = base;
    params.n_atoms = n_atoms;
    trilevel::validate(params);

    ConvergenceCurve curve;
    curve.n_atoms = n_atoms;
    for (const double mu_y : study.abscissae) {
      // Collective minima sit near sector M = N * m, so the stop window must
      // outlast the climb to the row's deepest excitation density; size it
      // from the semiclassical value at the strong-coupling end of the row.
      ModelParams probe = params;
      probe.set_coupling(x.coupling, x.max);
      probe.set_coupling(y.coupling, mu_y);
      const double m_row = semiclassical::minimize(probe).m_per_atom;
      quantum::SearchOptions row_search = search;
      row_search.window = std::max(
          search.window,
          static_cast<int>(std::ceil(2.0 * n_atoms * (m_row + 1.0))));
      const auto in_zero_sector = [&](double mu_x, double this_mu_y) {
        ModelParams point = params;
        point.set_coupling(x.coupling, mu_x);
        point.set_coupling(y.coupling, this_mu_y);
        return quantum::global_ground(point, row_search).m_star == 0;
      };

      if (!in_zero_sector(x.value(0), mu_y)) {
        // The vacuum already lost at the left edge of the window.
        curve.boundary.push_back(x.min);
        continue;
      }
      double lo = x.value(0);
      double hi = nan;
      for (int ix = 1; ix < x.steps; ++ix) {
        const double mu_x = x.value(ix);
        if (!in_zero_sector(mu_x, mu_y)) {
          hi = mu_x;
          break;
        }
        lo = mu_x;
      }
      if (!std::isfinite(hi)) {
        curve.boundary.push_back(nan);
        continue;
      }
      while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (in_zero_sector(mid, mu_y) ? lo : hi) = mid;
      }
      curve.boundary.push_back(0.5 * (lo + hi));
    }
    study.curves.push_back(std::move(curve));
  }

  study.separatrix.reserve(study.abscissae.size());
  for (const double mu_y : study.abscissae) {
    const double value =
        semiclassical::separatrix_boundary_value(base.config, base, mu_y);
    study.separatrix.push_back(std::isfinite(value) ? value : x.min);
  }
  return study;
}

}  // namespace trilevel::scan
