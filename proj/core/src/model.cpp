#include "trilevel/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace trilevel {

const char* to_string(Configuration config) {
  switch (config) {
    case Configuration::Xi:
      return "xi";
    case Configuration::Lambda:
      return "lambda";
    case Configuration::V:
      return "v";
  }
  return "?";
}

Configuration configuration_from_string(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "xi") return Configuration::Xi;
  if (lower == "lambda") return Configuration::Lambda;
  if (lower == "v") return Configuration::V;
  throw Error("unknown configuration '" + std::string(text) +
              "' (expected xi, lambda or v)");
}

ExcitationWeights excitation_weights(Configuration config) {
  switch (config) {
    case Configuration::Xi:
      return {1, {0, 1, 2}};
    case Configuration::Lambda:
      return {1, {0, 0, 1}};
    case Configuration::V:
      return {1, {0, 1, 1}};
  }
  throw Error("invalid configuration tag");
}

double ModelParams::coupling(std::string_view name) const {
  if (name == "mu12") return mu12;
  if (name == "mu13") return mu13;
  if (name == "mu23") return mu23;
  throw Error("unknown coupling '" + std::string(name) + "'");
}

void ModelParams::set_coupling(std::string_view name, double value) {
  if (name == "mu12") {
    mu12 = value;
  } else if (name == "mu13") {
    mu13 = value;
  } else if (name == "mu23") {
    mu23 = value;
  } else {
    throw Error("unknown coupling '" + std::string(name) + "'");
  }
}

std::array<std::string, 2> allowed_couplings(Configuration config) {
  switch (config) {
    case Configuration::Xi:
      return {"mu12", "mu23"};
    case Configuration::Lambda:
      return {"mu13", "mu23"};
    case Configuration::V:
      return {"mu12", "mu13"};
  }
  throw Error("invalid configuration tag");
}

std::string forbidden_coupling(Configuration config) {
  switch (config) {
    case Configuration::Xi:
      return "mu13";
    case Configuration::Lambda:
      return "mu12";
    case Configuration::V:
      return "mu23";
  }
  throw Error("invalid configuration tag");
}

ModelParams validate(const ModelParams& params) {
  for (double v : {params.omega1, params.omega2, params.omega3, params.mu12,
                   params.mu13, params.mu23}) {
    if (!std::isfinite(v)) throw NonFiniteInput("parameter is not finite");
  }
  if (!(params.omega1 <= params.omega2 && params.omega2 <= params.omega3)) {
    throw OrderingViolation("level energies must satisfy omega1 <= omega2 <= omega3");
  }
  const std::string forbidden = forbidden_coupling(params.config);
  if (params.coupling(forbidden) != 0.0) {
    throw ForbiddenCoupling(std::string(to_string(params.config)) +
                            " configuration requires " + forbidden + " = 0");
  }
  if (params.n_atoms < 1) {
    throw NonPositiveAtoms("n_atoms must be >= 1");
  }
  return params;
}

}  // namespace trilevel
