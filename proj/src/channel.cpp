#include "fsocast/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fsocast {

double slant_attenuation(double thickness_km, double elevation_rad, double specific_db_per_km) {
  if (!(elevation_rad > 0.0) || elevation_rad > std::numbers::pi / 2.0 + 1e-12)
    throw std::domain_error("slant_attenuation: elevation must be in (0, pi/2]");
  if (thickness_km < 0.0) throw std::domain_error("slant_attenuation: negative thickness");
  return specific_db_per_km * thickness_km / std::sin(elevation_rad);
}

double fso_observed_attenuation(double raw_db, const BandCoefficients& band) {
  if (raw_db < 0.0) throw std::domain_error("fso_observed_attenuation: negative attenuation");
  return std::min(raw_db, band.fso_detector_cap_db);
}

double itu_specific_attenuation(const DielectricParams& p) {
  if (!(p.eps_imag > 0.0)) throw std::domain_error("itu_specific_attenuation: eps'' must be > 0");
  if (p.frequency_ghz < 0.0) throw std::domain_error("itu_specific_attenuation: negative frequency");
  const double eta = (2.0 + p.eps_real) / p.eps_imag;
  return 0.819 * p.frequency_ghz / (p.eps_imag * (1.0 + eta * eta));
}

double itu_cloud_attenuation(double liquid_kg_m2, double k_l, double elevation_rad) {
  if (!(elevation_rad > 0.0) || elevation_rad > std::numbers::pi / 2.0 + 1e-12)
    throw std::domain_error("itu_cloud_attenuation: elevation must be in (0, pi/2]");
  if (liquid_kg_m2 < 0.0) throw std::domain_error("itu_cloud_attenuation: negative liquid content");
  return liquid_kg_m2 * k_l / std::sin(elevation_rad);
}

double kim_particle_size_exponent(double visibility_km) {
  if (!(visibility_km > 0.0)) throw std::domain_error("kim: visibility must be > 0");
  if (visibility_km > 50.0) return 1.6;
  if (visibility_km >= 6.0) return 1.3;  // V = 6 km handled by the average-visibility branch
  return 0.585 * std::cbrt(visibility_km);
}

double kim_attenuation_coefficient(const VisibilityParams& p) {
  if (!(p.wavelength_nm > 0.0)) throw std::domain_error("kim: wavelength must be > 0");
  const double x = kim_particle_size_exponent(p.visibility_km);
  return 3.91 / p.visibility_km * std::pow(p.wavelength_nm / 550.0, -x);
}

}  // namespace fsocast
