#ifndef VTON_TPS_HPP
#define VTON_TPS_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vton/geometry.hpp"
#include "vton/landmarks.hpp"

namespace vton {

/// Fitted thin-plate spline R^2 -> R^2 with kernel phi(r) = r^2 ln r:
///
///   f_d(p) = affine(d,0) + affine(d,1) p.x + affine(d,2) p.y
///            + sum_j rbf_coeffs(j,d) * phi(|p - control_points[j]|)
///
/// Every fit satisfies the side conditions sum_j c_j = 0,
/// sum_j c_j r_j.x = 0, sum_j c_j r_j.y = 0 per output dimension,
/// which make the bending energy finite.
struct TpsTransform {
    Eigen::Matrix<double, 2, 3> affine;
    Eigen::MatrixX2d rbf_coeffs;
    std::vector<Vec2> control_points;
    double lambda = 0.0;
};

inline constexpr double kDefaultTpsLambda = 0.01;

/// phi(r) = r^2 ln r, continuously extended with phi(0) = 0.
/// Throws on negative r.
double kernel_phi(double r);

/// Solves the augmented system [[K + lambda*I, P], [P^T, 0]] [c; a] = [t; 0]
/// for both output dimensions, where K_ij = phi(|r_i - r_j|) and P rows are
/// (1, r_j.x, r_j.y). lambda = 0 interpolates the pairs exactly; lambda > 0
/// trades residual for smoothness. Throws std::invalid_argument on N < 3 or
/// lambda < 0, and std::runtime_error (with the reciprocal condition estimate
/// in the message) when the system is numerically singular: collinear control
/// points, or duplicate points with lambda = 0.
TpsTransform fit_tps(const ControlPairs& pairs, double lambda);

Vec2 evaluate_tps(const TpsTransform& t, Vec2 p);

/// Closed-form bending energy: sum over output dimensions of c^T K c.
/// Zero (up to floating error) exactly for affine maps.
double bending_energy(const TpsTransform& t);

/// JSON record of affine matrix, coefficients, control points and lambda,
/// fixed at 6 decimals. parse(serialize(t)) == t up to that rounding.
std::string serialize_tps(const TpsTransform& t);
TpsTransform parse_tps(const std::string& bytes);

} // namespace vton

#endif
