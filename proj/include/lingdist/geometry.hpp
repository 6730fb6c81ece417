// Point operations for the three embedding geometries: the Poincare ball,
// the hyperboloid (Lorentz) model, and the Euclidean baseline. Distances,
// Mobius translation, and the Riemannian SGD update steps live here as free
// functions over Eigen vectors; the training loop composes them.
#pragma once

#include <Eigen/Dense>

namespace lingdist {

using VectorRef = Eigen::Ref<const Eigen::VectorXd>;

enum class Geometry { poincare, hyperboloid, euclidean };

// ---- Poincare ball --------------------------------------------------------

// arcosh(1 + 2|u-v|^2 / ((1-|u|^2)(1-|v|^2))), argument clamped to >= 1+eps.
// Throws PointOutsideBall when a norm reaches 1.
double poincare_distance(VectorRef u, VectorRef v, double epsilon);

// Mobius addition u (+) v with the denominator clamped to >= eps; the result
// is rescaled into the ball if it lands on or outside the boundary.
Eigen::VectorXd mobius_add(VectorRef u, VectorRef v, double epsilon);

// One RSGD update: scale the Euclidean gradient by (1-|x|^2)^2/4, move along
// the geodesic via the tanh step, rescale to norm <= 1-eps if needed.
Eigen::VectorXd poincare_rsgd_step(VectorRef x, VectorRef euclidean_grad,
                                   double lr, double epsilon);

// ---- Hyperboloid (Lorentz) model ------------------------------------------

// <u, v>_L = -u0*v0 + sum_i ui*vi. Throws DimensionMismatch.
double lorentz_inner(VectorRef u, VectorRef v);

// arcosh(-<u,v>_L) with the argument clamped to >= 1+eps. Throws OffManifold
// when |<x,x>_L + 1| > 1e-4 for either input.
double hyperboloid_distance(VectorRef u, VectorRef v, double epsilon);

// Lift a spatial vector onto the hyperboloid: x0 = sqrt(|sp|^2 + 1).
Eigen::VectorXd hyperboloid_lift(VectorRef spatial);

// One RSGD update: tangent projection of the gradient, Lorentz-norm clipping
// at grad_clip, exponential map, and final projection back to the manifold
// with the spatial norm capped at spatial_clip.
Eigen::VectorXd hyperboloid_rsgd_step(VectorRef x, VectorRef euclidean_grad,
                                      double lr, double grad_clip,
                                      double spatial_clip);

// ---- Euclidean baseline ----------------------------------------------------

double euclidean_distance(VectorRef u, VectorRef v);

// Plain SGD; kept beside the hyperbolic steps so training can switch on
// geometry uniformly.
Eigen::VectorXd euclidean_sgd_step(VectorRef x, VectorRef euclidean_grad,
                                   double lr);

// ---- Dispatch helpers ------------------------------------------------------

double geometry_distance(Geometry geometry, VectorRef u, VectorRef v,
                         double epsilon);

// Euclidean (ambient-coordinate) gradients of geometry_distance with respect
// to both arguments. Returns the distance; gradients are zero in the clamped
// regions.
double geometry_distance_grad(Geometry geometry, VectorRef u, VectorRef v,
                              double epsilon, Eigen::VectorXd& grad_u,
                              Eigen::VectorXd& grad_v);

Eigen::VectorXd geometry_step(Geometry geometry, VectorRef x,
                              VectorRef euclidean_grad, double lr,
                              double epsilon, double grad_clip,
                              double spatial_clip);

}  // namespace lingdist
