// Geographic modality: languages as speaker distributions over the sphere,
// compared with an exact Earth Mover's distance under great-circle ground
// cost and normalized by the antipodal distance.
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lingdist/transport.hpp"

namespace lingdist {

// Mean Earth radius in km; the satellite-era IUGG value.
inline constexpr double kEarthRadiusKm = 6371.0088;

// Geodesic distance between antipodes, the normalization bound for geo
// distances.
inline constexpr double kMaxGeodesicKm =
    3.14159265358979323846 * kEarthRadiusKm;

// A point on the sphere in degrees. Canonical form: lon in (-180, 180], and
// lon pinned to 0 at the poles so equal physical points compare equal.
struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  // Validates ranges and canonicalizes. Throws InvalidCoordinate.
  GeoPoint(double lat_deg, double lon_deg);

  friend bool operator==(const GeoPoint& a, const GeoPoint& b) {
    return a.lat == b.lat && a.lon == b.lon;
  }
  friend auto operator<=>(const GeoPoint& a, const GeoPoint& b) {
    if (auto c = a.lat <=> b.lat; c != 0) return c;
    return a.lon <=> b.lon;
  }
};

struct WeightedPoint {
  GeoPoint point;
  double weight;
};

// Discrete probability distribution over locations. Construction drops
// zero-weight entries, merges duplicate points, sorts the support by
// (lat, lon) and renormalizes when |sum - 1| <= 1e-6 (rejects otherwise).
class GeoDistribution {
 public:
  explicit GeoDistribution(std::vector<WeightedPoint> support);

  const std::vector<WeightedPoint>& support() const { return support_; }
  std::size_t size() const { return support_.size(); }

 private:
  std::vector<WeightedPoint> support_;
};

struct TransportPlan {
  // (source index into a.support(), target index into b.support(), mass > 0)
  std::vector<transport::FlowEntry> entries;
};

struct EmdResult {
  double cost_km = 0.0;
  TransportPlan plan;
};

// Great-circle distance in km on the mean-radius sphere, evaluated with the
// arctangent form which stays stable near coincident and antipodal points.
double geodesic_distance(const GeoPoint& p, const GeoPoint& q);

struct SpeakerCount {
  GeoPoint point;
  std::uint64_t count;
};

// Normalizes raw speaker counts into a distribution; duplicate locations are
// merged by count before dividing, so ratios stay exact.
// Throws EmptyInput / AllZeroCounts.
GeoDistribution normalize_speaker_counts(const std::vector<SpeakerCount>& rows);

// Exact Earth Mover's distance with geodesic ground cost, plus an optimal
// plan. Symmetric bit-for-bit: arguments are ordered canonically before
// solving, and the plan is transposed back.
EmdResult emd(const GeoDistribution& a, const GeoDistribution& b);

// EMD cost divided by the antipodal distance; in [0, 1].
double geo_distance(const GeoDistribution& a, const GeoDistribution& b);

}  // namespace lingdist
