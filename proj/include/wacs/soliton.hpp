#pragma once

#include <map>

#include "wacs/star.hpp"

namespace wacs {

/// Soliton data attached to a bundle: the potential field V given
/// either directly or as grad(v), plus the two constants of
/// (1/2) L_V g + Ric* = lambda g + mu eta(x)eta.
struct SolitonData {
  std::optional<TensorField> V;  // (1,0)
  std::optional<Expr> potential;
  double lambda = 0.0;
  double mu = 0.0;
};

/// The vector field to use: V when given, otherwise grad(potential).
TensorField soliton_vector(const WacsBundle& b, const SolitonData& s);

/// (L_V nabla) as a symmetric (1,2) field, from the component formula
/// (L_V G)^l_ij = V^m d_m G^l_ij - d_m V^l G^m_ij + G^l_mj d_i V^m
///              + G^l_im d_j V^m + d_i d_j V^l.
TensorField lie_connection(const MetricData& m, const TensorField& V);

/// Same object through the cyclic route
/// 2 g((L_V nabla)(X,Y), Z) = (nabla_X L_V g)(Y,Z) + (nabla_Y L_V g)(Z,X)
///                          - (nabla_Z L_V g)(X,Y).
TensorField lie_connection_cyclic(const MetricData& m, const TensorField& V);

/// (L_V R)(X,Y)Z = (nabla_X L_V nabla)(Y,Z) - (nabla_Y L_V nabla)(X,Z),
/// assembled from lie_connection. The direct route is
/// lie_derivative(curvature().riemann, V).
TensorField lie_curvature_via_connection(const MetricData& m,
                                         const TensorField& V);

/// The defining soliton equation in both its raw and expanded forms,
/// plus the commutator [Ric#, Q] that the expanded form relies on.
std::vector<CheckResult> soliton_checks(const WacsBundle& b,
                                        const SolitonData& s, double beta,
                                        std::span<const Point> points,
                                        double tol);

/// Gradient variant: Hess(v) + Ric* = lambda g + mu eta(x)eta, its
/// operator form, and the Hess(v) = (1/2) L_{grad v} g cross-check.
/// Skips when the data carries no potential.
std::vector<CheckResult> gradient_soliton_checks(const WacsBundle& b,
                                                 const SolitonData& s,
                                                 double beta,
                                                 std::span<const Point> points,
                                                 double tol);

/// Lie-derivative machinery evaluated on V: both connection routes,
/// (L_V nabla)(X,xi), both curvature routes, (L_V R)(X,Y)xi and
/// (L_V R)(X,xi)xi.
std::vector<CheckResult> lie_checks(const WacsBundle& b, const SolitonData& s,
                                    double beta, std::span<const Point> points,
                                    double tol);

/// Scalar consequences: lambda + mu = 0, eta(L_V xi) = 0,
/// (L_V eta)(xi) = 0, (L_V eta)(X) = g(X, L_V xi), and
/// (L_V g)(X,xi) = 2(lambda + mu) eta(X).
std::vector<CheckResult> proposition_checks(const WacsBundle& b,
                                            const SolitonData& s,
                                            std::span<const Point> points,
                                            double tol);

/// Pointwise Einstein and eta-Einstein fits of the Ricci tensor.
/// lambda_e = r/(2n+1); the eta fit solves the (xi,xi) slot and the
/// trace, then compares against lambda = r/(2n) + beta^2,
/// mu = -(r/(2n) + (2n+1) beta^2).
struct EinsteinFit {
  double lambda_e = 0.0;        // midpoint of r/(2n+1)
  double residual = 0.0;        // Ric vs lambda_e g, pointwise fit
  double lambda_spread = 0.0;   // constancy of r/(2n+1) over the samples
  double eta_lambda = 0.0;
  double eta_mu = 0.0;
  double eta_residual = 0.0;    // Ric vs eta-Einstein pointwise fit
  double eta_spread = 0.0;      // constancy of the eta-fit coefficients
  double coeff_residual = 0.0;  // fitted coefficients vs closed form
};

EinsteinFit einstein_fit(const WacsBundle& b, double beta,
                         std::span<const Point> points);

/// Classification entries (skips, never failures, when a fit does not
/// hold) plus the coefficient assertion when the eta fit does hold.
std::vector<CheckResult> einstein_checks(const WacsBundle& b, double beta,
                                         std::span<const Point> points,
                                         double tol);

/// Least-squares test of L_V eta = sigma eta over the samples.
struct ContactTest {
  bool is_contact = false;
  double sigma = 0.0;        // midpoint of the pointwise fits
  double sigma_spread = 0.0;
  double residual = 0.0;
};

ContactTest contact_field_test(const WacsBundle& b, const TensorField& V,
                               std::span<const Point> points, double tol);

/// One theorem: measured hypothesis residuals, measured conclusion
/// residuals, and named scalars read off along the way. A theorem is
/// consistent when its conclusions hold whenever its hypotheses do.
struct TheoremVerdict {
  std::string id;
  std::vector<CheckResult> hypotheses;
  std::vector<CheckResult> conclusions;
  std::map<std::string, double> data;

  bool hypotheses_pass() const;
  bool conclusions_pass() const;
  bool consistent() const { return !hypotheses_pass() || conclusions_pass(); }
};

/// Runs the four implication theorems against the bundle and whatever
/// soliton data is present. Theorems whose inputs are absent come back
/// with skipped hypotheses (vacuously consistent).
std::vector<TheoremVerdict> theorem_harness(const WacsBundle& b,
                                            const std::optional<SolitonData>& s,
                                            double beta,
                                            std::span<const Point> points,
                                            double tol_hyp, double tol_concl);

/// Report form: one "theorem/<id>/consistent" entry per theorem, plus
/// its conclusion entries when the hypotheses hold. Hypothesis
/// residuals travel in the notes; a theorem whose hypotheses fail is
/// vacuously consistent, not a failure.
std::vector<CheckResult> flatten(const std::vector<TheoremVerdict>& verdicts);

}  // namespace wacs
