#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace tdgl_ring {

/// CODATA 2018 values (SI).
struct PhysicalConstants {
  double hbar = 1.054571817e-34;             // J s
  double elementary_charge = 1.602176634e-19;  // C
  double speed_of_light = 299792458.0;       // m/s
};

inline constexpr PhysicalConstants kCodata{};

/// Material parameters entering the normalization: coherence length xi,
/// penetration depth lambda and electron diffusion coefficient D.
struct MaterialProps {
  std::string name;
  double xi = 0.0;         // m
  double lambda = 0.0;     // m
  double diffusion = 0.0;  // m^2/s

  double kappa() const { return lambda / xi; }
  /// xi^2 / D, the unit of normalized time, in seconds.
  double time_unit() const { return xi * xi / diffusion; }
};

/// Throws InvalidMaterial unless every field is finite and strictly positive.
void validate(const MaterialProps& material);

/// Flux quantum pi*hbar/e in Wb.
double flux_quantum(const PhysicalConstants& constants = kCodata);

double time_to_normalized(double t_si, const MaterialProps& material);
double time_from_normalized(double t_norm, const MaterialProps& material);
double length_to_normalized(double x_si, const MaterialProps& material);
double length_from_normalized(double x_norm, const MaterialProps& material);
double flux_to_normalized(double flux_si, const PhysicalConstants& constants = kCodata);
double flux_from_normalized(double flux_norm, const PhysicalConstants& constants = kCodata);

/// Bundles a material with the constants so callers can convert without
/// threading both through every call.
class UnitSystem {
 public:
  explicit UnitSystem(MaterialProps material, PhysicalConstants constants = kCodata);

  const MaterialProps& material() const { return material_; }
  const PhysicalConstants& constants() const { return constants_; }

  double time_to_normalized(double t_si) const;
  double time_from_normalized(double t_norm) const;
  double length_to_normalized(double x_si) const;
  double length_from_normalized(double x_norm) const;
  double flux_to_normalized(double flux_si) const;
  double flux_from_normalized(double flux_norm) const;

 private:
  MaterialProps material_;
  PhysicalConstants constants_;
};

/// Built-in presets: "niobium-impure" and "niobium-pure".
const std::vector<MaterialProps>& builtin_materials();

/// Looks `name` up in `extra` first, then in the built-in table.
/// Throws NotFound when absent.
MaterialProps find_material(std::string_view name, const std::vector<MaterialProps>& extra = {});

/// Reads a JSON array of {name, xi_m, lambda_m, diffusion_m2s} objects.
std::vector<MaterialProps> load_materials_json(const std::filesystem::path& path);
std::vector<MaterialProps> parse_materials_json(std::string_view text);

}  // namespace tdgl_ring
