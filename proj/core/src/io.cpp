#include "trilevel/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include <json.hpp>

#include "trilevel/errors.hpp"

namespace trilevel::io {

namespace {

constexpr const char* kScanHeader = "mu_x,mu_y,energy,m_value,label,error";

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string quoted = "\"";
  for (const char c : text) {
    if (c == '"') quoted += "\"\"";
    else quoted += c;
  }
  quoted += '"';
  return quoted;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

std::string trim(const std::string& text) {
  std::size_t first = 0;
  std::size_t last = text.size();
  while (first < last && std::isspace(static_cast<unsigned char>(text[first]))) ++first;
  while (last > first && std::isspace(static_cast<unsigned char>(text[last - 1]))) --last;
  return text.substr(first, last - first);
}

double parse_double(const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw Error("cannot parse number '" + text + "'");
  }
  return value;
}

int parse_int(const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const long value = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0') {
    throw Error("cannot parse integer '" + text + "'");
  }
  return static_cast<int>(value);
}

std::string json_number(double value) {
  return std::isfinite(value) ? format_g12(value) : "null";
}

std::string json_string(const std::string& text) {
  return nlohmann::json(text).dump();
}

double json_to_double(const nlohmann::json& value) {
  if (value.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return value.get<double>();
}

const char* phase_name(semiclassical::Phase phase) {
  return phase == semiclassical::Phase::Normal ? "Normal" : "Collective";
}

}  // namespace

std::string format_g12(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.12g", value);
  return buffer;
}

void write_scan_csv(std::ostream& out,
                    const std::vector<scan::ScanPoint>& points) {
  out << kScanHeader << '\n';
  for (const auto& p : points) {
    out << format_g12(p.mu_x) << ',' << format_g12(p.mu_y) << ','
        << format_g12(p.energy) << ',' << format_g12(p.m_value) << ','
        << csv_field(p.label) << ',' << csv_field(p.error) << '\n';
  }
}

void write_scan_csv(std::ostream& out, const scan::ScanTable& table) {
  write_scan_csv(out, table.points);
}

std::vector<scan::ScanPoint> read_scan_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kScanHeader) {
    throw Error("scan CSV must start with header '" + std::string(kScanHeader) +
                "'");
  }
  std::vector<scan::ScanPoint> points;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 6) {
      throw Error("scan CSV row has " + std::to_string(fields.size()) +
                  " fields, expected 6");
    }
    scan::ScanPoint p;
    p.mu_x = parse_double(fields[0]);
    p.mu_y = parse_double(fields[1]);
    p.energy = parse_double(fields[2]);
    p.m_value = parse_double(fields[3]);
    p.label = fields[4];
    p.error = fields[5];
    points.push_back(std::move(p));
  }
  return points;
}

void write_scan_jsonl(std::ostream& out,
                      const std::vector<scan::ScanPoint>& points) {
  for (const auto& p : points) {
    out << "{\"mu_x\":" << json_number(p.mu_x)
        << ",\"mu_y\":" << json_number(p.mu_y)
        << ",\"energy\":" << json_number(p.energy)
        << ",\"m_value\":" << json_number(p.m_value)
        << ",\"label\":" << json_string(p.label)
        << ",\"error\":" << json_string(p.error) << "}\n";
  }
}

void write_scan_jsonl(std::ostream& out, const scan::ScanTable& table) {
  write_scan_jsonl(out, table.points);
}

std::vector<scan::ScanPoint> read_scan_jsonl(std::istream& in) {
  std::vector<scan::ScanPoint> points;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
      scan::ScanPoint p;
      p.mu_x = json_to_double(record.at("mu_x"));
      p.mu_y = json_to_double(record.at("mu_y"));
      p.energy = json_to_double(record.at("energy"));
      p.m_value = json_to_double(record.at("m_value"));
      p.label = record.at("label").get<std::string>();
      p.error = record.at("error").get<std::string>();
      points.push_back(std::move(p));
    } catch (const nlohmann::json::exception& failure) {
      throw Error(std::string("bad scan JSON line: ") + failure.what());
    }
  }
  return points;
}

void write_gnuplot_matrix(std::ostream& out, const scan::ScanTable& table) {
  const int sx = table.x.steps;
  const int sy = table.y.steps;
  out << sx;
  for (int ix = 0; ix < sx; ++ix) out << ' ' << format_g12(table.x.value(ix));
  out << '\n';
  for (int iy = 0; iy < sy; ++iy) {
    out << format_g12(table.y.value(iy));
    for (int ix = 0; ix < sx; ++ix) {
      out << ' ' << format_g12(table.at(ix, iy).energy);
    }
    out << '\n';
  }
}

void write_separatrix_csv(std::ostream& out,
                          const semiclassical::SeparatrixCurve& curve) {
  out << "mu_x,mu_y,order\n";
  for (const auto& segment : curve.segments) {
    for (const auto& point : segment.points) {
      out << format_g12(point[0]) << ',' << format_g12(point[1]) << ','
          << semiclassical::to_string(segment.order) << '\n';
    }
  }
}

void write_separatrix_json(std::ostream& out,
                           const semiclassical::SeparatrixCurve& curve) {
  out << "{\"config\":\"" << to_string(curve.config) << "\",\"segments\":[";
  for (std::size_t s = 0; s < curve.segments.size(); ++s) {
    const auto& segment = curve.segments[s];
    if (s) out << ',';
    out << "{\"order\":\"" << semiclassical::to_string(segment.order)
        << "\",\"points\":[";
    for (std::size_t k = 0; k < segment.points.size(); ++k) {
      if (k) out << ',';
      out << '[' << json_number(segment.points[k][0]) << ','
          << json_number(segment.points[k][1]) << ']';
    }
    out << "]}";
  }
  out << "]}\n";
}

void write_crossovers_csv(std::ostream& out, const scan::CrossoverSet& set) {
  out << "mu_x,mu_y,label_from,label_to,polyline\n";
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (const auto& point : set[i].points) {
      out << format_g12(point[0]) << ',' << format_g12(point[1]) << ','
          << csv_field(set[i].label_from) << ',' << csv_field(set[i].label_to)
          << ',' << i << '\n';
    }
  }
}

void write_crossovers_json(std::ostream& out, const scan::CrossoverSet& set) {
  out << '[';
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (i) out << ',';
    out << "{\"label_from\":" << json_string(set[i].label_from)
        << ",\"label_to\":" << json_string(set[i].label_to) << ",\"points\":[";
    for (std::size_t k = 0; k < set[i].points.size(); ++k) {
      if (k) out << ',';
      out << '[' << json_number(set[i].points[k][0]) << ','
          << json_number(set[i].points[k][1]) << ']';
    }
    out << "]}";
  }
  out << "]\n";
}

void write_minimize_csv(std::ostream& out,
                        const semiclassical::SemiclassicalResult& result) {
  out << "energy_per_atom,rho_bar,rho2,rho3,m_per_atom,pop1,pop2,pop3,"
         "photon_density,phase,degenerate,grad_norm\n";
  out << format_g12(result.energy_per_atom) << ','
      << format_g12(result.point.rho_bar) << ',' << format_g12(result.point.rho2)
      << ',' << format_g12(result.point.rho3) << ','
      << format_g12(result.m_per_atom) << ',' << format_g12(result.populations[0])
      << ',' << format_g12(result.populations[1]) << ','
      << format_g12(result.populations[2]) << ','
      << format_g12(result.photon_density) << ',' << phase_name(result.phase)
      << ',' << (result.degenerate ? "true" : "false") << ','
      << format_g12(result.grad_norm) << '\n';
}

void write_minimize_json(std::ostream& out,
                         const semiclassical::SemiclassicalResult& result) {
  out << "{\"energy_per_atom\":" << json_number(result.energy_per_atom)
      << ",\"rho_bar\":" << json_number(result.point.rho_bar)
      << ",\"rho2\":" << json_number(result.point.rho2)
      << ",\"rho3\":" << json_number(result.point.rho3)
      << ",\"m_per_atom\":" << json_number(result.m_per_atom)
      << ",\"populations\":[" << json_number(result.populations[0]) << ','
      << json_number(result.populations[1]) << ','
      << json_number(result.populations[2]) << ']'
      << ",\"photon_density\":" << json_number(result.photon_density)
      << ",\"phase\":\"" << phase_name(result.phase) << '"'
      << ",\"degenerate\":" << (result.degenerate ? "true" : "false")
      << ",\"grad_norm\":" << json_number(result.grad_norm) << "}\n";
}

void write_ground_csv(std::ostream& out,
                      const quantum::GroundStateResult& result) {
  out << "m,energy,is_ground\n";
  for (const auto& [m, energy] : result.sector_energies) {
    out << m << ',' << format_g12(energy) << ','
        << (m == result.m_star ? "true" : "false") << '\n';
  }
}

void write_ground_json(std::ostream& out,
                       const quantum::GroundStateResult& result,
                       const quantum::SectorBasis& basis) {
  if (basis.dimension() != static_cast<int>(result.amplitudes.size())) {
    throw DimensionMismatch("amplitude vector does not match the basis");
  }
  out << "{\"energy\":" << json_number(result.energy)
      << ",\"m_star\":" << result.m_star
      << ",\"m_expectation\":" << json_number(result.m_expectation)
      << ",\"converged\":" << (result.converged ? "true" : "false")
      << ",\"sector_energies\":[";
  bool first = true;
  for (const auto& [m, energy] : result.sector_energies) {
    if (!first) out << ',';
    first = false;
    out << '[' << m << ',' << json_number(energy) << ']';
  }
  out << "],\"amplitudes\":[";

  std::vector<int> order(static_cast<std::size_t>(basis.dimension()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(result.amplitudes[a]) > std::abs(result.amplitudes[b]);
  });
  const std::size_t count = std::min<std::size_t>(order.size(), 10);
  for (std::size_t k = 0; k < count; ++k) {
    const int idx = order[k];
    const auto& state = basis.states[static_cast<std::size_t>(idx)];
    if (k) out << ',';
    out << "{\"state\":\"|" << state.n1 << ',' << state.n2 << ',' << state.n3
        << ';' << state.photons << ">\",\"amplitude\":"
        << json_number(result.amplitudes[idx]) << '}';
  }
  out << "]}\n";
}

void write_convergence_csv(std::ostream& out,
                           const scan::ConvergenceStudy& study) {
  out << "mu_y";
  for (const auto& curve : study.curves) out << ",boundary_n" << curve.n_atoms;
  out << ",separatrix\n";
  for (std::size_t k = 0; k < study.abscissae.size(); ++k) {
    out << format_g12(study.abscissae[k]);
    for (const auto& curve : study.curves) {
      out << ',' << format_g12(curve.boundary[k]);
    }
    out << ',' << format_g12(study.separatrix[k]) << '\n';
  }
}

void write_convergence_json(std::ostream& out,
                            const scan::ConvergenceStudy& study) {
  const auto array = [&](const std::vector<double>& values) {
    std::string text = "[";
    for (std::size_t k = 0; k < values.size(); ++k) {
      if (k) text += ',';
      text += json_number(values[k]);
    }
    text += ']';
    return text;
  };
  out << "{\"abscissae\":" << array(study.abscissae) << ",\"curves\":[";
  for (std::size_t c = 0; c < study.curves.size(); ++c) {
    if (c) out << ',';
    out << "{\"n_atoms\":" << study.curves[c].n_atoms
        << ",\"boundary\":" << array(study.curves[c].boundary) << '}';
  }
  out << "],\"separatrix\":" << array(study.separatrix) << "}\n";
}

ModelParams read_params_kv(std::istream& in) {
  ModelParams params;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::size_t comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;

    std::string key, value;
    const std::size_t equals = line.find('=');
    if (equals != std::string::npos) {
      key = trim(line.substr(0, equals));
      value = trim(line.substr(equals + 1));
    } else {
      const std::size_t space = line.find_first_of(" \t");
      if (space == std::string::npos) {
        throw Error("line " + std::to_string(line_number) +
                    ": expected 'key = value'");
      }
      key = trim(line.substr(0, space));
      value = trim(line.substr(space + 1));
    }
    if (key.empty() || value.empty()) {
      throw Error("line " + std::to_string(line_number) +
                  ": expected 'key = value'");
    }

    if (key == "config") {
      params.config = configuration_from_string(value);
    } else if (key == "omega1") {
      params.omega1 = parse_double(value);
    } else if (key == "omega2") {
      params.omega2 = parse_double(value);
    } else if (key == "omega3") {
      params.omega3 = parse_double(value);
    } else if (key == "mu12" || key == "mu13" || key == "mu23") {
      params.set_coupling(key, parse_double(value));
    } else if (key == "n_atoms") {
      params.n_atoms = parse_int(value);
    } else {
      throw Error("line " + std::to_string(line_number) +
                  ": unknown parameter key '" + key + "'");
    }
  }
  return validate(params);
}

}  // namespace trilevel::io
