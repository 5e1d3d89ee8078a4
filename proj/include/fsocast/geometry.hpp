#pragma once

#include <Eigen/Core>
#include <vector>

#include "fsocast/orbits.hpp"

namespace fsocast {

// RF beacons on a circle around the FSO station, equally spaced starting due
// north and proceeding clockwise.
struct BeaconRing {
  GroundSite center;
  double radius_m = 0.0;
  int count = 0;
  std::vector<GroundSite> sites;
};

// Where a ground-site -> satellite line pierces the cloud layer, expressed in
// the layer plane, meters east/north of the point above the FSO station.
struct CloudIntercept {
  double grid_x_m = 0.0;
  double grid_y_m = 0.0;
  double elevation_at_site_rad = 0.0;
};

// Seconds between a satellite crossing the beacon->cloud line and crossing
// the station->cloud line for a ground separation x_g:
//   tau = (h_s - h_c) x_g / (v h_c)
double lookahead_time_s(double sat_alt_km, double cloud_alt_km, double separation_km,
                        double speed_km_s);

// Straight-line intersection with the plane at cloud_alt_km over the FSO
// station's local tangent plane. Throws std::domain_error when the satellite
// is below the site horizon or below the layer.
CloudIntercept los_cloud_intersection(const LocalFrame& station_frame, const GroundSite& site,
                                      const Eigen::Vector3d& sat_position_km, double cloud_alt_km);

// Sites are laid out on the tangent plane at the center and projected back to
// the sphere; site ids run first_site_id .. first_site_id + count - 1.
BeaconRing build_beacon_ring(const GroundSite& center, double radius_m, int count,
                             int first_site_id = 1, const PhysicalConstants& c = {});

}  // namespace fsocast
