#include "fsocast/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fsocast {

double lookahead_time_s(double sat_alt_km, double cloud_alt_km, double separation_km,
                        double speed_km_s) {
  if (!(cloud_alt_km > 0.0)) throw std::domain_error("lookahead_time_s: cloud altitude must be > 0");
  if (sat_alt_km < cloud_alt_km)
    throw std::domain_error("lookahead_time_s: satellite below the cloud layer");
  if (!(speed_km_s > 0.0)) throw std::domain_error("lookahead_time_s: speed must be > 0");
  if (separation_km < 0.0) throw std::domain_error("lookahead_time_s: negative separation");
  return (sat_alt_km - cloud_alt_km) * separation_km / (speed_km_s * cloud_alt_km);
}

CloudIntercept los_cloud_intersection(const LocalFrame& station_frame, const GroundSite& site,
                                      const Eigen::Vector3d& sat_position_km, double cloud_alt_km) {
  const Topocentric topo = topocentric(sat_position_km, site);
  if (!(topo.elevation_rad > 0.0))
    throw std::domain_error("los_cloud_intersection: satellite below the site horizon");

  const Eigen::Vector3d site_enu = station_frame.to_enu_km(site.position_km);
  const Eigen::Vector3d sat_enu = station_frame.to_enu_km(sat_position_km);
  if (sat_enu.z() <= cloud_alt_km)
    throw std::domain_error("los_cloud_intersection: satellite below the cloud layer");

  const Eigen::Vector3d d = sat_enu - site_enu;
  const double s = (cloud_alt_km - site_enu.z()) / d.z();

  CloudIntercept ci;
  ci.grid_x_m = (site_enu.x() + s * d.x()) * 1000.0;
  ci.grid_y_m = (site_enu.y() + s * d.y()) * 1000.0;
  ci.elevation_at_site_rad = topo.elevation_rad;
  return ci;
}

BeaconRing build_beacon_ring(const GroundSite& center, double radius_m, int count,
                             int first_site_id, const PhysicalConstants& c) {
  if (!(radius_m > 0.0)) throw std::invalid_argument("build_beacon_ring: radius must be > 0");
  if (count < 1) throw std::invalid_argument("build_beacon_ring: count must be >= 1");

  const LocalFrame f = LocalFrame::at(center.position_km);
  BeaconRing ring;
  ring.center = center;
  ring.radius_m = radius_m;
  ring.count = count;
  ring.sites.reserve(static_cast<std::size_t>(count));

  const double radius_km = radius_m / 1000.0;
  for (int k = 0; k < count; ++k) {
    const double ang = 2.0 * std::numbers::pi * k / count;  // from north toward east
    const Eigen::Vector3d offset = radius_km * (std::cos(ang) * f.north + std::sin(ang) * f.east);
    GroundSite site;
    site.site_id = first_site_id + k;
    site.kind = SiteKind::RfBeacon;
    site.position_km = (center.position_km + offset).normalized() * c.earth_radius_km;
    ring.sites.push_back(site);
  }
  return ring;
}

}  // namespace fsocast
