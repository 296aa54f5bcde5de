#include "rectfree/measure_io.hpp"

#include <fstream>
#include <limits>

#include "rectfree/error.hpp"

namespace rectfree {

namespace {

std::vector<double> numbers(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) throw ParseError(std::string("measure file: missing array '") + key + "'");
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) throw ParseError(std::string("measure file: '") + key + "' must contain numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

double bound(const nlohmann::json& v) {
  if (v.is_null()) return std::numeric_limits<double>::infinity();
  if (!v.is_number()) throw ParseError("measure file: interval bounds must be numbers or null");
  return v.get<double>();
}

nlohmann::json bound_json(double v) { return std::isinf(v) ? nlohmann::json() : nlohmann::json(v); }

}  // namespace

SymmetricMeasure measure_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
    throw ParseError("measure file: expected an object with a string 'type'");
  const auto type = j.at("type").get<std::string>();
  if (type == "atomic") {
    if (!j.contains("atoms") || !j.at("atoms").is_array()) throw ParseError("measure file: missing 'atoms'");
    std::vector<Atom> atoms;
    for (const auto& a : j.at("atoms")) {
      if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number())
        throw ParseError("measure file: atoms are [location, weight] pairs");
      atoms.push_back({a[0].get<double>(), a[1].get<double>()});
    }
    return SymmetricMeasure::atomic(std::move(atoms));
  }
  if (type == "grid") {
    GridDensity g;
    if (!j.contains("support") || !j.at("support").is_array()) throw ParseError("measure file: missing 'support'");
    for (const auto& iv : j.at("support")) {
      if (!iv.is_array() || iv.size() != 2) throw ParseError("measure file: support intervals are [lo, hi] pairs");
      g.support.push_back({bound(iv[0]), bound(iv[1])});
    }
    g.x = numbers(j, "x");
    g.density = numbers(j, "density");
    g.atom0 = j.value("atom0", 0.0);
    if (j.contains("weights")) {
      g.weights = numbers(j, "weights");
    } else {
      g.weights.assign(g.x.size(), 0.0);
      for (std::size_t i = 0; i + 1 < g.x.size(); ++i) {
        const double h = (g.x[i + 1] - g.x[i]) / 2;
        g.weights[i] += h;
        g.weights[i + 1] += h;
      }
    }
    return SymmetricMeasure::grid(std::move(g));
  }
  if (type == "moments") {
    const double r = j.contains("support_radius") ? bound(j.at("support_radius")) : std::numeric_limits<double>::infinity();
    return SymmetricMeasure::from_moments(numbers(j, "moments"), r);
  }
  throw ParseError("measure file: unknown type '" + type + "'");
}

nlohmann::json measure_to_json(const SymmetricMeasure& mu) {
  const auto& rep = mu.representation();
  if (const auto* a = std::get_if<AtomicLaw>(&rep)) {
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& atom : a->atoms) atoms.push_back({atom.location, atom.weight});
    return {{"type", "atomic"}, {"atoms", atoms}};
  }
  if (const auto* g = std::get_if<GridDensity>(&rep)) {
    nlohmann::json support = nlohmann::json::array();
    for (const auto& iv : g->support) support.push_back({bound_json(iv.lo), bound_json(iv.hi)});
    return {{"type", "grid"}, {"support", support}, {"x", g->x},
            {"density", g->density}, {"weights", g->weights}, {"atom0", g->atom0}};
  }
  const auto& m = std::get<MomentSeq>(rep);
  return {{"type", "moments"}, {"moments", m.even_moments}, {"support_radius", bound_json(m.support_radius)}};
}

SymmetricMeasure load_measure(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open measure file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("measure file " + path.string() + ": " + e.what());
  }
  return measure_from_json(j);
}

}  // namespace rectfree
