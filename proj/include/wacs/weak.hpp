#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>

#include "wacs/report.hpp"
#include "wacs/riemann.hpp"

namespace wacs {

/// Raised by f_basis when the structure operator fails to be positive
/// definite on ker(eta) at the requested point.
class IndefiniteOperatorError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A candidate weak almost contact metric structure on one chart:
/// f and Q are (1,1), xi is (1,0), eta is (0,1), g is (0,2).
/// The odd dimension 2n+1 is enforced at construction; whether the
/// axioms actually hold is the job of wacs_axiom_checks.
/// Metric and curvature data are computed lazily, once, and shared
/// across copies of the bundle.
class WacsBundle {
 public:
  WacsBundle(std::string id, TensorField f, TensorField Q, TensorField xi,
             TensorField eta, TensorField g, std::optional<Expr> beta);

  const std::string& id() const { return id_; }
  const ChartPtr& chart() const { return f_.chart(); }
  int dim() const { return f_.dim(); }
  int n() const { return (dim() - 1) / 2; }

  const TensorField& f() const { return f_; }
  const TensorField& Q() const { return Q_; }
  const TensorField& xi() const { return xi_; }
  const TensorField& eta() const { return eta_; }
  const TensorField& g() const { return g_; }
  const std::optional<Expr>& beta() const { return beta_; }

  /// Q - id
  TensorField Q_tilde() const;

  const MetricData& metric() const;
  const CurvatureData& curvature() const;

 private:
  struct Derived {
    std::once_flag metric_once, curv_once;
    std::optional<MetricData> metric;
    std::optional<CurvatureData> curv;
  };

  std::string id_;
  TensorField f_, Q_, xi_, eta_, g_;
  std::optional<Expr> beta_;
  std::shared_ptr<Derived> derived_;
};

/// Evaluates an expression over samples; returns its value if the
/// spread stays within `spread_tol` (normalized), nullopt otherwise.
std::optional<double> constant_value_over(const Expr& e,
                                          std::span<const Point> points,
                                          double spread_tol = 1e-10);

/// The defining axioms plus their standard consequences, each as one
/// residual check, plus a pointwise rank-of-f check.
std::vector<CheckResult> wacs_axiom_checks(const WacsBundle& b,
                                           std::span<const Point> points,
                                           double tol);

struct NijenhuisFields {
  TensorField n1;  // (1,2): [f,f] + 2 d(eta) (x) xi
  TensorField n2;  // (0,2): (L_{fX} eta)(Y) - (L_{fY} eta)(X)
  TensorField n3;  // (1,1): L_xi f
  TensorField n4;  // (0,1): L_xi eta
};

NijenhuisFields nijenhuis_tensors(const WacsBundle& b);

/// Phi(X,Y) = g(X, fY)
TensorField fundamental_form(const WacsBundle& b);

/// Least-squares fit of the 3-form convention factor: the scale kappa
/// minimizing |kappa * (cyclic sum of d Phi) - 2 beta eta ^ Phi| over
/// the samples. Frozen once by the suite on a reference bundle.
double calibrate_three_form_factor(const WacsBundle& b,
                                   std::span<const Point> points);

/// The defining covariant-derivative identity of the structure class
/// plus every derived identity (Reeb derivative, eta and Q derivatives,
/// Lie derivative of g, closedness of eta, the 3-form identity with
/// the supplied kappa, vanishing derivatives along xi, constancy of
/// trace Q, d(beta) ^ eta = 0, nonvanishing beta, and N1 = 0).
std::vector<CheckResult> kenmotsu_checks(const WacsBundle& b,
                                         std::span<const Point> points,
                                         double tol, double kappa);

/// Curvature consequences, valid for constant beta.
std::vector<CheckResult> curvature_checks(const WacsBundle& b, double beta,
                                          std::span<const Point> points,
                                          double tol);

/// Orthogonal frame adapted to f at a point: vectors are ordered
/// e_1, f e_1, ..., e_n, f e_n, xi (chart components); eigenvalues of
/// Q on ker(eta) are descending, one per pair. The e_i are unit, the
/// f e_i have squared length lambda_i.
struct FBasis {
  std::vector<std::vector<double>> vectors;
  std::vector<double> eigenvalues;
};

FBasis f_basis(const WacsBundle& b, const Point& p);

}  // namespace wacs
