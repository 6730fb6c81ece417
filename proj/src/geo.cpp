#include "lingdist/geo.hpp"

#include <algorithm>
#include <cmath>

#include "lingdist/errors.hpp"

namespace lingdist {
namespace {

constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
constexpr double kWeightSumTol = 1e-6;

bool support_less(const std::vector<WeightedPoint>& a,
                  const std::vector<WeightedPoint>& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].point != b[i].point) return a[i].point < b[i].point;
    if (a[i].weight != b[i].weight) return a[i].weight < b[i].weight;
  }
  return a.size() < b.size();
}

}  // namespace

GeoPoint::GeoPoint(double lat_deg, double lon_deg) : lat(lat_deg), lon(lon_deg) {
  if (!(lat >= -90.0 && lat <= 90.0)) {
    throw InvalidCoordinate("latitude out of [-90, 90]: " + std::to_string(lat));
  }
  if (!(lon >= -180.0 && lon <= 180.0)) {
    throw InvalidCoordinate("longitude out of [-180, 180]: " +
                            std::to_string(lon));
  }
  if (lon == -180.0) lon = 180.0;
  if (lat == 90.0 || lat == -90.0) lon = 0.0;  // poles have no longitude
}

double geodesic_distance(const GeoPoint& p, const GeoPoint& q) {
  if (p == q) return 0.0;
  // The arctangent form is symmetric only up to rounding; a canonical
  // argument order makes the symmetry bit-exact.
  if (q < p) return geodesic_distance(q, p);
  // Exact antipodes hit the normalization bound by definition.
  if (p.lat == -q.lat &&
      ((std::abs(p.lat) == 90.0) || std::abs(p.lon - q.lon) == 180.0)) {
    return kMaxGeodesicKm;
  }
  const double phi1 = p.lat * kDegToRad;
  const double phi2 = q.lat * kDegToRad;
  const double dlon = (q.lon - p.lon) * kDegToRad;
  const double cos_phi1 = std::cos(phi1);
  const double sin_phi1 = std::sin(phi1);
  const double cos_phi2 = std::cos(phi2);
  const double sin_phi2 = std::sin(phi2);
  const double cos_dlon = std::cos(dlon);
  const double y = std::hypot(cos_phi2 * std::sin(dlon),
                              cos_phi1 * sin_phi2 - sin_phi1 * cos_phi2 * cos_dlon);
  const double x = sin_phi1 * sin_phi2 + cos_phi1 * cos_phi2 * cos_dlon;
  return kEarthRadiusKm * std::atan2(y, x);
}

GeoDistribution::GeoDistribution(std::vector<WeightedPoint> support) {
  for (const auto& [point, weight] : support) {
    if (weight < 0.0 || !std::isfinite(weight)) {
      throw InvalidDistribution("negative or non-finite weight");
    }
  }
  std::sort(support.begin(), support.end(),
            [](const WeightedPoint& a, const WeightedPoint& b) {
              return a.point < b.point;
            });
  for (const auto& entry : support) {
    if (entry.weight == 0.0) continue;
    if (!support_.empty() && support_.back().point == entry.point) {
      support_.back().weight += entry.weight;
    } else {
      support_.push_back(entry);
    }
  }
  if (support_.empty()) throw EmptyInput("distribution has empty support");
  double total = 0.0;
  for (const auto& entry : support_) total += entry.weight;
  if (std::abs(total - 1.0) > kWeightSumTol) {
    throw InvalidDistribution("weights sum to " + std::to_string(total));
  }
  for (auto& entry : support_) entry.weight /= total;
}

GeoDistribution normalize_speaker_counts(
    const std::vector<SpeakerCount>& rows) {
  if (rows.empty()) throw EmptyInput("no speaker rows");
  // Merge duplicate locations in integer counts so the ratios stay exact.
  std::vector<SpeakerCount> merged(rows);
  std::sort(merged.begin(), merged.end(),
            [](const SpeakerCount& a, const SpeakerCount& b) {
              return a.point < b.point;
            });
  std::vector<SpeakerCount> unique;
  for (const auto& row : merged) {
    if (!unique.empty() && unique.back().point == row.point) {
      unique.back().count += row.count;
    } else {
      unique.push_back(row);
    }
  }
  std::uint64_t total = 0;
  for (const auto& row : unique) total += row.count;
  if (total == 0) throw AllZeroCounts("all speaker counts are zero");
  std::vector<WeightedPoint> support;
  support.reserve(unique.size());
  for (const auto& row : unique) {
    if (row.count == 0) continue;
    support.push_back({row.point, static_cast<double>(row.count) /
                                      static_cast<double>(total)});
  }
  return GeoDistribution(std::move(support));
}

EmdResult emd(const GeoDistribution& a, const GeoDistribution& b) {
  // Canonical argument order makes emd(a, b) and emd(b, a) run the identical
  // computation, so symmetry holds bit-for-bit.
  if (support_less(b.support(), a.support())) {
    EmdResult swapped = emd(b, a);
    for (auto& entry : swapped.plan.entries) {
      std::swap(entry.source, entry.target);
    }
    std::sort(swapped.plan.entries.begin(), swapped.plan.entries.end(),
              [](const transport::FlowEntry& x, const transport::FlowEntry& y) {
                if (x.source != y.source) return x.source < y.source;
                return x.target < y.target;
              });
    return swapped;
  }

  const auto& sa = a.support();
  const auto& sb = b.support();
  const int m = static_cast<int>(sa.size());
  const int n = static_cast<int>(sb.size());

  EmdResult result;
  if (m == 1 || n == 1) {
    // One side is a point mass: the product plan is the only feasible plan.
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) {
        const double mass = sa[i].weight * sb[j].weight;
        result.cost_km += mass * geodesic_distance(sa[i].point, sb[j].point);
        result.plan.entries.push_back({i, j, mass});
      }
    }
    return result;
  }

  Eigen::VectorXd supply(m);
  Eigen::VectorXd demand(n);
  Eigen::MatrixXd cost(m, n);
  for (int i = 0; i < m; ++i) supply[i] = sa[i].weight;
  for (int j = 0; j < n; ++j) demand[j] = sb[j].weight;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      cost(i, j) = geodesic_distance(sa[i].point, sb[j].point);
    }
  }
  transport::Solution solution = transport::solve(supply, demand, cost);
  result.cost_km = solution.cost;
  result.plan.entries = std::move(solution.flows);
  return result;
}

double geo_distance(const GeoDistribution& a, const GeoDistribution& b) {
  return emd(a, b).cost_km / kMaxGeodesicKm;
}

}  // namespace lingdist
