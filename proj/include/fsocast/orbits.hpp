#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace fsocast {

struct PhysicalConstants {
  double mu_km3_s2 = 398600.4418;  // Earth GM [km^3/s^2]
  double earth_radius_km = 6371.0;
};

// One satellite on a circular orbit around a spherical non-rotating Earth.
struct OrbitalElements {
  int sat_id = 0;
  double altitude_km = 0.0;
  double inclination_rad = 0.0;  // [0, pi]
  double raan_rad = 0.0;         // right ascension of ascending node [0, 2pi)
  double phase0_rad = 0.0;       // argument along the orbit at t = 0 [0, 2pi)
  int direction = +1;            // +1 / -1 along-track sign
};

struct SatelliteState {
  int sat_id = 0;
  double time_s = 0.0;
  Eigen::Vector3d position_km = Eigen::Vector3d::Zero();   // Earth-centered
  Eigen::Vector3d velocity_km_s = Eigen::Vector3d::Zero();
};

enum class SiteKind { FsoStation, RfBeacon };

struct GroundSite {
  int site_id = 0;
  SiteKind kind = SiteKind::RfBeacon;
  Eigen::Vector3d position_km = Eigen::Vector3d::Zero();  // on the sphere surface
};

struct Topocentric {
  double range_km = 0.0;
  double azimuth_rad = 0.0;    // clockwise from local north [0, 2pi)
  double elevation_rad = 0.0;  // above the local horizon [-pi/2, pi/2]
};

// East-north-up basis at a point on the sphere surface.
struct LocalFrame {
  Eigen::Vector3d origin_km, east, north, up;
  static LocalFrame at(const Eigen::Vector3d& surface_point_km);
  Eigen::Vector3d to_enu_km(const Eigen::Vector3d& point_km) const;
  Eigen::Vector3d from_enu_km(const Eigen::Vector3d& enu_km) const;
};

// sqrt(mu / r) [km/s]. Throws std::domain_error for a non-positive or
// sub-surface radius.
double orbital_speed(double orbit_radius_km, const PhysicalConstants& c = {});

// Circular Keplerian motion; velocity is the exact time derivative of the
// position.
SatelliteState propagate(const OrbitalElements& el, double t_s, const PhysicalConstants& c = {});

Topocentric topocentric(const Eigen::Vector3d& sat_position_km, const GroundSite& site);

Eigen::Vector3d surface_position(double lat_rad, double lon_rad, const PhysicalConstants& c = {});

// n satellites: altitude uniform in [alt_lo, alt_hi], inclination uniform in
// [0, pi], raan and phase uniform in [0, 2pi), direction uniform in {+1, -1}.
// Deterministic for a fixed seed.
std::vector<OrbitalElements> generate_constellation(int n, double alt_lo_km, double alt_hi_km,
                                                    std::uint64_t seed,
                                                    const PhysicalConstants& c = {});

// Angle helpers.
double wrap_to_two_pi(double angle_rad);  // [0, 2pi)
double wrap_to_pi(double angle_rad);      // [-pi, pi)

}  // namespace fsocast
