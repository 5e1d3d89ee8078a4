#include "fsocast/orbits.hpp"

#include <Eigen/Geometry>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fsocast/rng.hpp"

namespace fsocast {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double wrap_to_two_pi(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;  // guard against fmod rounding
  return r;
}

double wrap_to_pi(double a) {
  return wrap_to_two_pi(a + std::numbers::pi) - std::numbers::pi;
}

double orbital_speed(double orbit_radius_km, const PhysicalConstants& c) {
  if (orbit_radius_km <= 0.0) throw std::domain_error("orbital_speed: radius must be positive");
  if (orbit_radius_km <= c.earth_radius_km)
    throw std::domain_error("orbital_speed: radius at or below the surface");
  return std::sqrt(c.mu_km3_s2 / orbit_radius_km);
}

SatelliteState propagate(const OrbitalElements& el, double t_s, const PhysicalConstants& c) {
  const double r = c.earth_radius_km + el.altitude_km;
  const double v = orbital_speed(r, c);
  const double phase = el.phase0_rad + el.direction * (v / r) * t_s;

  const double cp = std::cos(phase), sp = std::sin(phase);
  const Eigen::Vector3d pos_plane(r * cp, r * sp, 0.0);
  const Eigen::Vector3d vel_plane(-el.direction * v * sp, el.direction * v * cp, 0.0);

  // Rz(raan) * Rx(inclination)
  const double ci = std::cos(el.inclination_rad), si = std::sin(el.inclination_rad);
  const double co = std::cos(el.raan_rad), so = std::sin(el.raan_rad);
  Eigen::Matrix3d rot;
  rot << co, -so * ci, so * si,
         so, co * ci, -co * si,
         0.0, si, ci;

  SatelliteState s;
  s.sat_id = el.sat_id;
  s.time_s = t_s;
  s.position_km = rot * pos_plane;
  s.velocity_km_s = rot * vel_plane;
  return s;
}

LocalFrame LocalFrame::at(const Eigen::Vector3d& surface_point_km) {
  LocalFrame f;
  f.origin_km = surface_point_km;
  f.up = surface_point_km.normalized();
  Eigen::Vector3d e = Eigen::Vector3d::UnitZ().cross(f.up);
  if (e.norm() < 1e-12) e = Eigen::Vector3d::UnitY();  // polar site: pick an arbitrary east
  f.east = e.normalized();
  f.north = f.up.cross(f.east);
  return f;
}

Eigen::Vector3d LocalFrame::to_enu_km(const Eigen::Vector3d& p) const {
  const Eigen::Vector3d d = p - origin_km;
  return {east.dot(d), north.dot(d), up.dot(d)};
}

Eigen::Vector3d LocalFrame::from_enu_km(const Eigen::Vector3d& enu) const {
  return origin_km + enu.x() * east + enu.y() * north + enu.z() * up;
}

Topocentric topocentric(const Eigen::Vector3d& sat_position_km, const GroundSite& site) {
  const LocalFrame f = LocalFrame::at(site.position_km);
  const Eigen::Vector3d enu = f.to_enu_km(sat_position_km);

  Topocentric t;
  t.range_km = enu.norm();
  if (t.range_km <= 0.0) throw std::invalid_argument("topocentric: satellite coincides with site");
  t.elevation_rad = std::atan2(enu.z(), std::hypot(enu.x(), enu.y()));
  t.azimuth_rad = wrap_to_two_pi(std::atan2(enu.x(), enu.y()));  // east of north
  return t;
}

Eigen::Vector3d surface_position(double lat_rad, double lon_rad, const PhysicalConstants& c) {
  return c.earth_radius_km * Eigen::Vector3d(std::cos(lat_rad) * std::cos(lon_rad),
                                             std::cos(lat_rad) * std::sin(lon_rad),
                                             std::sin(lat_rad));
}

std::vector<OrbitalElements> generate_constellation(int n, double alt_lo_km, double alt_hi_km,
                                                    std::uint64_t seed, const PhysicalConstants&) {
  if (n < 1) throw std::invalid_argument("generate_constellation: need at least one satellite");
  if (!(alt_lo_km > 0.0) || !(alt_hi_km >= alt_lo_km))
    throw std::invalid_argument("generate_constellation: invalid altitude range");

  Rng rng(seed);
  std::vector<OrbitalElements> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    OrbitalElements& el = out[static_cast<std::size_t>(i)];
    el.sat_id = i;
    el.altitude_km = rng.uniform(alt_lo_km, alt_hi_km);
    el.inclination_rad = rng.uniform(0.0, std::numbers::pi);
    el.raan_rad = rng.uniform(0.0, kTwoPi);
    el.phase0_rad = rng.uniform(0.0, kTwoPi);
    el.direction = rng.below(2) == 0 ? +1 : -1;
  }
  return out;
}

}  // namespace fsocast
