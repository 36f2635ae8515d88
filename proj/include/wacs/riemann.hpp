#pragma once

#include <cstdint>
#include <vector>

#include "wacs/tensor.hpp"

namespace wacs {

/// Metric with its derived symbols. `gamma` holds the Levi-Civita
/// coefficients with the upper slot first: gamma[k][i][j], symmetric in
/// the two lower slots.
struct MetricData {
  TensorField g;      // (0,2)
  TensorField g_inv;  // (2,0)
  TensorField gamma;  // (1,2)
  Expr det;           // det[g_ij]
};

/// Inverts the metric symbolically (cofactor expansion with shared
/// minors; a diagonal fast path avoids the expansion entirely) and
/// assembles the connection coefficients.
MetricData build_metric(const TensorField& g);

/// Curvature with the sign convention R(X,Y)Z = nabla_X nabla_Y Z
/// - nabla_Y nabla_X Z - nabla_[X,Y] Z. Components are
/// riemann[l][i][j][k] = dx^l( R(d_i, d_j) d_k ), and
/// ricci(X,Y) = trace of Z -> R(Z,X)Y, i.e. ricci[j][k] = riemann[l][l][j][k].
struct CurvatureData {
  TensorField riemann;    // (1,3)
  TensorField ricci;      // (0,2)
  TensorField ricci_op;   // (1,1), index raised with g_inv
  Expr scalar;
};

CurvatureData build_curvature(const MetricData& m);

/// Covariant derivative; the new covariant slot comes first, so for a
/// (1,1) field T the result satisfies (nabla_c T)^a_b = out[a][c][b].
TensorField covariant_derivative(const MetricData& m, const TensorField& T);

/// Lie derivative along the (1,0) field V, any valence with
/// rank_up + rank_down <= 4.
TensorField lie_derivative(const TensorField& T, const TensorField& V);

/// Alternating derivative of a (0,p) form, p <= 3:
/// out_{i0..ip} = factor * sum_t (-1)^t d_{i_t} omega_{..without i_t..}.
/// Callers pin the convention through `factor` (1-forms use 1/2 here).
TensorField exterior_derivative(const TensorField& omega, double factor);

/// (eta ^ Phi)_{ijk} = eta_i Phi_{jk} + eta_j Phi_{ki} + eta_k Phi_{ij}
/// for a 1-form eta and a 2-form Phi.
TensorField wedge_1_2(const TensorField& eta, const TensorField& Phi);

TensorField gradient(const MetricData& m, const Expr& v);  // (1,0)
TensorField hessian(const MetricData& m, const Expr& v);   // (0,2)

/// Seeded uniform draws from the chart box, skipping points where
/// |det g| < det_floor so the inverse metric stays well defined.
std::vector<Point> sample_points(const MetricData& m, int count,
                                 std::uint64_t seed,
                                 double det_floor = 1e-12);

}  // namespace wacs
