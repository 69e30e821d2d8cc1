#include "tdgl_ring/units.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "tdgl_ring/error.hpp"

namespace tdgl_ring {

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

void validate(const MaterialProps& m) {
  if (!positive_finite(m.xi) || !positive_finite(m.lambda) || !positive_finite(m.diffusion)) {
    throw InvalidMaterial("material '" + m.name + "': xi, lambda and diffusion must be positive and finite");
  }
}

double flux_quantum(const PhysicalConstants& c) { return std::numbers::pi * c.hbar / c.elementary_charge; }

double time_to_normalized(double t_si, const MaterialProps& m) {
  validate(m);
  return t_si * m.diffusion / (m.xi * m.xi);
}

double time_from_normalized(double t_norm, const MaterialProps& m) {
  validate(m);
  return t_norm * m.xi * m.xi / m.diffusion;
}

double length_to_normalized(double x_si, const MaterialProps& m) {
  validate(m);
  return x_si / m.lambda;
}

double length_from_normalized(double x_norm, const MaterialProps& m) {
  validate(m);
  return x_norm * m.lambda;
}

double flux_to_normalized(double flux_si, const PhysicalConstants& c) { return flux_si / flux_quantum(c); }

double flux_from_normalized(double flux_norm, const PhysicalConstants& c) { return flux_norm * flux_quantum(c); }

UnitSystem::UnitSystem(MaterialProps material, PhysicalConstants constants)
    : material_(std::move(material)), constants_(constants) {
  validate(material_);
}

double UnitSystem::time_to_normalized(double t_si) const { return tdgl_ring::time_to_normalized(t_si, material_); }
double UnitSystem::time_from_normalized(double t) const { return tdgl_ring::time_from_normalized(t, material_); }
double UnitSystem::length_to_normalized(double x) const { return tdgl_ring::length_to_normalized(x, material_); }
double UnitSystem::length_from_normalized(double x) const { return tdgl_ring::length_from_normalized(x, material_); }
double UnitSystem::flux_to_normalized(double f) const { return tdgl_ring::flux_to_normalized(f, constants_); }
double UnitSystem::flux_from_normalized(double f) const { return tdgl_ring::flux_from_normalized(f, constants_); }

const std::vector<MaterialProps>& builtin_materials() {
  // Niobium: xi ~ lambda ~ 40 nm; D ~ 1e-4 m^2/s for impure samples, up to
  // ~1e-1 m^2/s for clean ones.
  static const std::vector<MaterialProps> table = {
      {"niobium-impure", 4e-8, 4e-8, 1e-4},
      {"niobium-pure", 4e-8, 4e-8, 1e-1},
  };
  return table;
}

MaterialProps find_material(std::string_view name, const std::vector<MaterialProps>& extra) {
  for (const auto& m : extra) {
    if (m.name == name) return m;
  }
  for (const auto& m : builtin_materials()) {
    if (m.name == name) return m;
  }
  throw NotFound("unknown material '" + std::string(name) + "'");
}

std::vector<MaterialProps> parse_materials_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(std::string("materials JSON: ") + e.what());
  }
  if (!doc.is_array()) throw InvalidArgument("materials JSON must be an array of objects");

  std::vector<MaterialProps> out;
  for (const auto& entry : doc) {
    try {
      MaterialProps m{entry.at("name").get<std::string>(), entry.at("xi_m").get<double>(),
                      entry.at("lambda_m").get<double>(), entry.at("diffusion_m2s").get<double>()};
      validate(m);
      out.push_back(std::move(m));
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument(std::string("materials JSON entry: ") + e.what());
    }
  }
  return out;
}

std::vector<MaterialProps> load_materials_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot open materials file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_materials_json(buf.str());
}

}  // namespace tdgl_ring
