#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Geometry>
#include <cmath>
#include <numbers>
#include <set>

#include "fsocast/orbits.hpp"
#include "fsocast/rng.hpp"

using namespace fsocast;

namespace {
const PhysicalConstants kConst;
constexpr double kPi = std::numbers::pi;
}  // namespace

TEST_CASE("orbital speed matches hand-evaluated values") {
  // sqrt(398600.4418 / 6771) and sqrt(398600.4418 / 8371)
  CHECK(std::abs(orbital_speed(6771.0) - 7.6727) < 1e-3);
  CHECK(std::abs(orbital_speed(8371.0) - 6.9006) < 1e-3);
}

TEST_CASE("orbital speed inverse-square-root scaling is exact") {
  for (double r : {6771.0, 6921.0, 7460.5, 8371.0})
    CHECK(orbital_speed(4.0 * r) == orbital_speed(r) / 2.0);
}

TEST_CASE("orbital speed rejects invalid radii") {
  CHECK_THROWS_AS(orbital_speed(0.0), std::domain_error);
  CHECK_THROWS_AS(orbital_speed(-10.0), std::domain_error);
  CHECK_THROWS_AS(orbital_speed(6000.0), std::domain_error);  // below the surface
}

TEST_CASE("propagate starts at phase0 and circles the orbit plane") {
  OrbitalElements el;
  el.altitude_km = 400.0;
  el.inclination_rad = 0.7;
  el.raan_rad = 1.3;
  el.phase0_rad = 0.4;
  el.direction = +1;
  const double r = kConst.earth_radius_km + el.altitude_km;

  const SatelliteState s0 = propagate(el, 0.0);
  CHECK(s0.position_km.norm() == doctest::Approx(r).epsilon(1e-12));

  // t = 0 position equals the rotated in-plane point at phase0
  const double ci = std::cos(el.inclination_rad), si = std::sin(el.inclination_rad);
  const double co = std::cos(el.raan_rad), so = std::sin(el.raan_rad);
  Eigen::Matrix3d rot;
  rot << co, -so * ci, so * si, so, co * ci, -co * si, 0.0, si, ci;
  const Eigen::Vector3d expect =
      rot * Eigen::Vector3d(r * std::cos(el.phase0_rad), r * std::sin(el.phase0_rad), 0.0);
  CHECK((s0.position_km - expect).norm() < 1e-9);

  // a quarter period later the position is 90 degrees around the circle
  const double period = 2.0 * kPi * r / orbital_speed(r);
  CHECK(std::abs(period - 5544.9) < 1.0);  // altitude 400 km
  const SatelliteState sq = propagate(el, period / 4.0);
  CHECK(std::abs(s0.position_km.dot(sq.position_km)) / (r * r) < 1e-9);
  CHECK(sq.position_km.norm() == doctest::Approx(r).epsilon(1e-12));
}

TEST_CASE("propagated states stay circular with consistent speed") {
  Rng rng(77);
  for (int trial = 0; trial < 10000; ++trial) {
    OrbitalElements el;
    el.altitude_km = rng.uniform(400.0, 2000.0);
    el.inclination_rad = rng.uniform(0.0, kPi);
    el.raan_rad = rng.uniform(0.0, 2.0 * kPi);
    el.phase0_rad = rng.uniform(0.0, 2.0 * kPi);
    el.direction = rng.below(2) == 0 ? 1 : -1;
    const double t = rng.uniform(0.0, 40000.0);
    const double r = kConst.earth_radius_km + el.altitude_km;

    const SatelliteState s = propagate(el, t);
    CHECK(std::abs(s.position_km.norm() - r) / r < 1e-6);
    const double v = orbital_speed(r);
    CHECK(std::abs(s.velocity_km_s.norm() - v) / v < 1e-9);
    CHECK(std::abs(s.velocity_km_s.dot(s.position_km)) / (v * r) < 1e-9);
  }
}

TEST_CASE("topocentric zenith, horizon, and east-45 cases") {
  GroundSite site;
  site.position_km = surface_position(0.0, 0.0);
  const LocalFrame f = LocalFrame::at(site.position_km);

  SUBCASE("zenith") {
    const Topocentric t = topocentric(site.position_km + 550.0 * f.up, site);
    CHECK(t.elevation_rad == doctest::Approx(kPi / 2).epsilon(1e-12));
    CHECK(t.range_km == doctest::Approx(550.0).epsilon(1e-12));
  }
  SUBCASE("horizon") {
    const Topocentric t = topocentric(site.position_km + 900.0 * f.north, site);
    CHECK(std::abs(t.elevation_rad) < 1e-12);
    CHECK(std::abs(t.azimuth_rad) < 1e-12);
  }
  SUBCASE("east at 45 degrees") {
    const Eigen::Vector3d sat =
        site.position_km + 700.0 * (std::cos(kPi / 4) * f.east + std::sin(kPi / 4) * f.up);
    const Topocentric t = topocentric(sat, site);
    CHECK(std::abs(t.azimuth_rad - kPi / 2) < 1e-6);
    CHECK(std::abs(t.elevation_rad - kPi / 4) < 1e-6);
  }
}

TEST_CASE("topocentric range and elevation are rotation invariant") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    GroundSite site;
    site.position_km =
        surface_position(rng.uniform(-1.2, 1.2), rng.uniform(-kPi, kPi));
    const LocalFrame f = LocalFrame::at(site.position_km);
    const Eigen::Vector3d sat = site.position_km +
                                rng.uniform(200.0, 2000.0) * (std::cos(rng.uniform(0, 1.3)) * f.east +
                                                              std::sin(rng.uniform(0, 1.3)) * f.up);
    const Topocentric a = topocentric(sat, site);

    const Eigen::Vector3d axis = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal()).normalized();
    const Eigen::Matrix3d rot = Eigen::AngleAxisd(rng.uniform(0.0, 2 * kPi), axis).toRotationMatrix();
    GroundSite rsite = site;
    rsite.position_km = rot * site.position_km;
    const Topocentric b = topocentric(rot * sat, rsite);

    CHECK(std::abs(a.range_km - b.range_km) / a.range_km < 1e-9);
    CHECK(std::abs(a.elevation_rad - b.elevation_rad) < 1e-9);
  }
}

TEST_CASE("constellation sampling honors ranges and is seed deterministic") {
  const auto sats = generate_constellation(1000, 400.0, 2000.0, 42);
  REQUIRE(sats.size() == 1000);
  for (const OrbitalElements& el : sats) {
    CHECK(el.altitude_km >= 400.0);
    CHECK(el.altitude_km <= 2000.0);
    CHECK(el.inclination_rad >= 0.0);
    CHECK(el.inclination_rad <= kPi);
    CHECK(el.raan_rad >= 0.0);
    CHECK(el.raan_rad < 2.0 * kPi);
    CHECK(el.phase0_rad >= 0.0);
    CHECK(el.phase0_rad < 2.0 * kPi);
    CHECK((el.direction == 1 || el.direction == -1));
  }

  const auto again = generate_constellation(1000, 400.0, 2000.0, 42);
  bool identical = true;
  for (std::size_t i = 0; i < sats.size(); ++i)
    identical = identical && sats[i].altitude_km == again[i].altitude_km &&
                sats[i].inclination_rad == again[i].inclination_rad &&
                sats[i].raan_rad == again[i].raan_rad &&
                sats[i].phase0_rad == again[i].phase0_rad &&
                sats[i].direction == again[i].direction;
  CHECK(identical);

  CHECK(generate_constellation(1, 400.0, 2000.0, 7).size() == 1);
  CHECK_THROWS_AS(generate_constellation(0, 400.0, 2000.0, 7), std::invalid_argument);
  CHECK_THROWS_AS(generate_constellation(10, 2000.0, 400.0, 7), std::invalid_argument);
}

TEST_CASE("elevation gating produces the same pass set on repeated runs") {
  GroundSite station;
  station.kind = SiteKind::FsoStation;
  station.position_km = surface_position(0.0, 0.0);
  const double gate = 30.0 * kPi / 180.0;

  const auto pass_set = [&](std::uint64_t seed) {
    const auto sats = generate_constellation(40, 400.0, 2000.0, seed);
    std::set<std::pair<int, long>> above;
    for (const OrbitalElements& el : sats)
      for (long t = 0; t < 3000; ++t)
        if (topocentric(propagate(el, static_cast<double>(t)).position_km, station).elevation_rad >=
            gate)
          above.insert({el.sat_id, t});
    return above;
  };

  CHECK(pass_set(5) == pass_set(5));
}
