#pragma once

namespace fsocast {

// Fixed through-cloud specific attenuations used by the ray-trace simulation,
// plus the receiver's measurement ceiling.
struct BandCoefficients {
  double rf_db_per_km = 3.0;
  double fso_db_per_km = 300.0;
  double fso_detector_cap_db = 100.0;
};

struct DielectricParams {
  double frequency_ghz = 0.0;
  double eps_real = 0.0;  // real part of the water permittivity
  double eps_imag = 0.0;  // imaginary part, > 0
};

struct VisibilityParams {
  double visibility_km = 0.0;
  double wavelength_nm = 0.0;
};

// Attenuation of a straight path through a horizontal layer of the given
// vertical thickness: specific * thickness / sin(elevation).
// elevation must lie in (0, pi/2].
double slant_attenuation(double thickness_km, double elevation_rad, double specific_db_per_km);

// Receiver-side saturation: min(raw, detector cap).
double fso_observed_attenuation(double raw_db, const BandCoefficients& band);

// Cloud liquid specific attenuation coefficient [(dB/km)/(g/m^3)]:
//   eta = (2 + eps') / eps'',  k_l = 0.819 f / (eps'' (1 + eta^2))
double itu_specific_attenuation(const DielectricParams& p);

// Statistical cloud attenuation A_c = L k_l / sin(elevation) [dB] for a total
// column liquid content L [kg/m^2].
double itu_cloud_attenuation(double liquid_kg_m2, double k_l, double elevation_rad);

// Particle size exponent from the visibility range [km].
double kim_particle_size_exponent(double visibility_km);

// Fog/cloud optical attenuation coefficient [dB/km]:
//   omega = (3.91 / V) (lambda / 550)^-x
double kim_attenuation_coefficient(const VisibilityParams& p);

}  // namespace fsocast
