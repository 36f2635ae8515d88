#pragma once

#include "wacs/weak.hpp"

namespace wacs {

/// Ric*(X,Y) = (1/2) trace( Z -> R(X, fY) fZ ), computed from the
/// curvature tensor. Not symmetric in general; callers decide whether
/// to symmetrize.
TensorField star_ricci_def(const WacsBundle& b);

/// Closed form valid on the beta-Kenmotsu class:
/// Ric*(X,Y) = Ric(X,QY) + beta^2((2n-1) g(X,QY) + eta(X)eta(Y)).
TensorField star_ricci_closed_form(const WacsBundle& b, const Expr& beta);

/// g-trace of star_ricci_def.
Expr star_scalar_def(const WacsBundle& b);

/// r* = trace(Q Ric#) + beta^2(4n^2 + (2n-1) trace(Q - id)).
Expr star_scalar_closed_form(const WacsBundle& b, const Expr& beta);

/// Pointwise solve of Ric* = lambda g + mu eta(x)eta using the (xi,xi)
/// component and the g-trace; `residual` measures how well the rest of
/// the tensor follows, `spread` how constant the coefficients are.
/// `fitted` requires both, since the classification is about constants.
struct StarEtaEinsteinFit {
  bool fitted = false;
  double lambda = 0.0;
  double mu = 0.0;
  double residual = 0.0;
  double spread = 0.0;
};

StarEtaEinsteinFit star_eta_einstein_fit(const WacsBundle& b,
                                         std::span<const Point> points,
                                         double tol);

/// Closed-form equivalences, the two curvature identities relating R
/// and f, the eta-Einstein classification, and the asymmetry
/// diagnostic. Needs constant beta for the curvature identities.
std::vector<CheckResult> star_checks(const WacsBundle& b, const Expr& beta,
                                     std::span<const Point> points, double tol);

}  // namespace wacs
