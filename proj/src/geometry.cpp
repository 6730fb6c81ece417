#include "lingdist/geometry.hpp"

#include <cmath>

#include "lingdist/errors.hpp"

namespace lingdist {
namespace {

constexpr double kManifoldTol = 1e-4;

void check_in_ball(VectorRef x) {
  if (x.squaredNorm() >= 1.0) {
    throw PointOutsideBall("point norm >= 1 in the Poincare ball");
  }
}

void check_on_hyperboloid(VectorRef x) {
  const double quad = lorentz_inner(x, x);
  if (std::abs(quad + 1.0) > kManifoldTol || x[0] <= 0.0) {
    throw OffManifold("point violates <x,x>_L = -1, x0 > 0");
  }
}

// sinh(t)/t, series near zero.
double sinhc(double t) {
  if (std::abs(t) < 1e-8) return 1.0 + t * t / 6.0;
  return std::sinh(t) / t;
}

}  // namespace

double poincare_distance(VectorRef u, VectorRef v, double epsilon) {
  check_in_ball(u);
  check_in_ball(v);
  const double alpha = 1.0 - u.squaredNorm();
  const double beta = 1.0 - v.squaredNorm();
  const double gamma =
      std::max(1.0 + 2.0 * (u - v).squaredNorm() / (alpha * beta),
               1.0 + epsilon);
  return std::acosh(gamma);
}

Eigen::VectorXd mobius_add(VectorRef u, VectorRef v, double epsilon) {
  check_in_ball(u);
  check_in_ball(v);
  const double uv = u.dot(v);
  const double nu2 = u.squaredNorm();
  const double nv2 = v.squaredNorm();
  const double denom = std::max(1.0 + 2.0 * uv + nu2 * nv2, epsilon);
  Eigen::VectorXd out =
      ((1.0 + 2.0 * uv + nv2) * u + (1.0 - nu2) * v) / denom;
  const double norm = out.norm();
  if (norm >= 1.0) out *= (1.0 - epsilon) / norm;
  return out;
}

Eigen::VectorXd poincare_rsgd_step(VectorRef x, VectorRef euclidean_grad,
                                   double lr, double epsilon) {
  check_in_ball(x);
  const double scale = 1.0 - x.squaredNorm();
  const Eigen::VectorXd riemannian = (scale * scale / 4.0) * euclidean_grad;
  const double gnorm = riemannian.norm();
  if (gnorm == 0.0) return x;
  const double lambda = 2.0 / scale;  // conformal factor at x
  const double step = std::tanh(lr * lambda * gnorm / 2.0);
  const Eigen::VectorXd direction = (-step / gnorm) * riemannian;
  Eigen::VectorXd out = mobius_add(x, direction, epsilon);
  const double norm = out.norm();
  if (norm > 1.0 - epsilon) out *= (1.0 - epsilon) / norm;
  return out;
}

double lorentz_inner(VectorRef u, VectorRef v) {
  if (u.size() != v.size()) {
    throw DimensionMismatch("Lorentz inner product on mismatched dimensions");
  }
  return -u[0] * v[0] + u.tail(u.size() - 1).dot(v.tail(v.size() - 1));
}

double hyperboloid_distance(VectorRef u, VectorRef v, double epsilon) {
  check_on_hyperboloid(u);
  check_on_hyperboloid(v);
  const double chi = std::max(-lorentz_inner(u, v), 1.0 + epsilon);
  return std::acosh(chi);
}

Eigen::VectorXd hyperboloid_lift(VectorRef spatial) {
  Eigen::VectorXd out(spatial.size() + 1);
  out[0] = std::sqrt(spatial.squaredNorm() + 1.0);
  out.tail(spatial.size()) = spatial;
  return out;
}

Eigen::VectorXd hyperboloid_rsgd_step(VectorRef x, VectorRef euclidean_grad,
                                      double lr, double grad_clip,
                                      double spatial_clip) {
  const Eigen::Index n = x.size();
  // 1. Tangent projection: negate the time-like coordinate, then remove the
  //    component along x.
  Eigen::VectorXd g = euclidean_grad;
  g[0] = -g[0];
  Eigen::VectorXd riemannian = g + lorentz_inner(x, g) * x;
  // 2. Clip by the Lorentz norm of the tangent vector.
  const double quad = std::max(lorentz_inner(riemannian, riemannian), 0.0);
  const double gnorm = std::sqrt(quad);
  if (gnorm > grad_clip) riemannian *= grad_clip / gnorm;
  // 3. Exponential map along -lr * riemannian.
  const Eigen::VectorXd tangent = -lr * riemannian;
  const double tnorm =
      std::sqrt(std::max(lorentz_inner(tangent, tangent), 0.0));
  Eigen::VectorXd moved = std::cosh(tnorm) * x + sinhc(tnorm) * tangent;
  // 4. Project back: cap the spatial norm, recompute the time coordinate.
  Eigen::VectorXd spatial = moved.tail(n - 1);
  const double snorm = spatial.norm();
  if (snorm > spatial_clip) spatial *= spatial_clip / snorm;
  Eigen::VectorXd out(n);
  out[0] = std::sqrt(spatial.squaredNorm() + 1.0);
  out.tail(n - 1) = spatial;
  return out;
}

double euclidean_distance(VectorRef u, VectorRef v) {
  if (u.size() != v.size()) {
    throw DimensionMismatch("Euclidean distance on mismatched dimensions");
  }
  return (u - v).norm();
}

Eigen::VectorXd euclidean_sgd_step(VectorRef x, VectorRef euclidean_grad,
                                   double lr) {
  return x - lr * euclidean_grad;
}

double geometry_distance(Geometry geometry, VectorRef u, VectorRef v,
                         double epsilon) {
  switch (geometry) {
    case Geometry::poincare:
      return poincare_distance(u, v, epsilon);
    case Geometry::hyperboloid:
      return hyperboloid_distance(u, v, epsilon);
    case Geometry::euclidean:
      return euclidean_distance(u, v);
  }
  throw Error("unreachable geometry");
}

double geometry_distance_grad(Geometry geometry, VectorRef u, VectorRef v,
                              double epsilon, Eigen::VectorXd& grad_u,
                              Eigen::VectorXd& grad_v) {
  grad_u = Eigen::VectorXd::Zero(u.size());
  grad_v = Eigen::VectorXd::Zero(v.size());
  switch (geometry) {
    case Geometry::poincare: {
      const double alpha = 1.0 - u.squaredNorm();
      const double beta = 1.0 - v.squaredNorm();
      const Eigen::VectorXd diff = u - v;
      const double gamma = 1.0 + 2.0 * diff.squaredNorm() / (alpha * beta);
      if (gamma <= 1.0 + epsilon) return std::acosh(1.0 + epsilon);
      const double dacosh = 1.0 / std::sqrt(gamma * gamma - 1.0);
      const double n2 = diff.squaredNorm();
      grad_u = dacosh * (4.0 / (alpha * beta) * diff +
                         4.0 * n2 / (alpha * alpha * beta) * u);
      grad_v = dacosh * (-4.0 / (alpha * beta) * diff +
                         4.0 * n2 / (alpha * beta * beta) * v);
      return std::acosh(gamma);
    }
    case Geometry::hyperboloid: {
      const double chi = -lorentz_inner(u, v);
      if (chi <= 1.0 + epsilon) return std::acosh(1.0 + epsilon);
      const double dacosh = 1.0 / std::sqrt(chi * chi - 1.0);
      // d chi / d u = (v0, -v1, ..., -vd), and symmetrically for v.
      grad_u = -dacosh * v;
      grad_u[0] = dacosh * v[0];
      grad_v = -dacosh * u;
      grad_v[0] = dacosh * u[0];
      return std::acosh(chi);
    }
    case Geometry::euclidean: {
      const Eigen::VectorXd diff = u - v;
      const double dist = diff.norm();
      if (dist > 0.0) {
        grad_u = diff / dist;
        grad_v = -grad_u;
      }
      return dist;
    }
  }
  throw Error("unreachable geometry");
}

Eigen::VectorXd geometry_step(Geometry geometry, VectorRef x,
                              VectorRef euclidean_grad, double lr,
                              double epsilon, double grad_clip,
                              double spatial_clip) {
  switch (geometry) {
    case Geometry::poincare:
      return poincare_rsgd_step(x, euclidean_grad, lr, epsilon);
    case Geometry::hyperboloid:
      return hyperboloid_rsgd_step(x, euclidean_grad, lr, grad_clip,
                                   spatial_clip);
    case Geometry::euclidean:
      return euclidean_sgd_step(x, euclidean_grad, lr);
  }
  throw Error("unreachable geometry");
}

}  // namespace lingdist
