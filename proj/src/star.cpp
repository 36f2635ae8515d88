#include "wacs/star.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace wacs {

namespace {

Expr c(double v) { return Expr::constant(v); }

// Phi_{ik} = g(d_i, f d_k)
TensorField lowered_f(const TensorField& g, const TensorField& f) {
  const int d = g.dim();
  TensorField out(g.chart(), 0, 2);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) {
      Expr sum;
      for (int m = 0; m < d; ++m) sum = sum + g.at({i, m}) * f.at({m, k});
      out.at({i, k}) = sum;
    }
  return out;
}

// gQ_{jk} = g(d_j, Q d_k), symmetric when Q is self-adjoint
TensorField lowered_Q(const TensorField& g, const TensorField& Q) {
  return lowered_f(g, Q);
}

template <class... Args>
std::string fmt(const char* f, Args... a) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

}  // namespace

TensorField star_ricci_def(const WacsBundle& b) {
  const int d = b.dim();
  const TensorField& f = b.f();
  const TensorField& R = b.curvature().riemann;
  TensorField out(b.chart(), 0, 2);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Expr sum;
      for (int p = 0; p < d; ++p) {
        const Expr& fpj = f.at({p, j});
        if (fpj.is_constant() && fpj.constant_value() == 0.0) continue;
        for (int q = 0; q < d; ++q)
          for (int k = 0; k < d; ++k)
            sum = sum + fpj * f.at({q, k}) * R.at({k, i, p, q});
      }
      out.at({i, j}) = c(0.5) * sum;
    }
  return out;
}

TensorField star_ricci_closed_form(const WacsBundle& b, const Expr& beta) {
  const int d = b.dim();
  const double n = b.n();
  const TensorField& ric = b.curvature().ricci;
  const TensorField& Q = b.Q();
  const TensorField& g = b.g();
  const TensorField& eta = b.eta();
  Expr b2 = beta * beta;
  TensorField out(b.chart(), 0, 2);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Expr ricQ, gQ;
      for (int m = 0; m < d; ++m) {
        ricQ = ricQ + ric.at({i, m}) * Q.at({m, j});
        gQ = gQ + g.at({i, m}) * Q.at({m, j});
      }
      out.at({i, j}) =
          ricQ + b2 * (c(2.0 * n - 1.0) * gQ + eta.at({i}) * eta.at({j}));
    }
  return out;
}

Expr star_scalar_def(const WacsBundle& b) {
  TensorField rs = star_ricci_def(b);
  const TensorField& g_inv = b.metric().g_inv;
  const int d = b.dim();
  Expr sum;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) sum = sum + g_inv.at({i, j}) * rs.at({i, j});
  return sum;
}

Expr star_scalar_closed_form(const WacsBundle& b, const Expr& beta) {
  const int d = b.dim();
  const double n = b.n();
  const TensorField& Q = b.Q();
  const TensorField& ric_op = b.curvature().ricci_op;
  Expr tr;
  for (int i = 0; i < d; ++i)
    for (int m = 0; m < d; ++m)
      tr = tr + Q.at({i, m}) * ric_op.at({m, i});
  Expr trQ;
  for (int i = 0; i < d; ++i) trQ = trQ + Q.at({i, i});
  Expr trQt = trQ - c(d);
  return tr + beta * beta * (c(4.0 * n * n) + c(2.0 * n - 1.0) * trQt);
}

StarEtaEinsteinFit star_eta_einstein_fit(const WacsBundle& b,
                                         std::span<const Point> points,
                                         double tol) {
  const int d = b.dim();
  const double two_n = 2.0 * b.n();
  TensorField rs = star_ricci_def(b);
  const TensorField& g_inv = b.metric().g_inv;
  StarEtaEinsteinFit fit;
  double num = 0.0, den = 1.0;
  double lam_lo = 0.0, lam_hi = 0.0, mu_lo = 0.0, mu_hi = 0.0;
  bool first = true;
  for (const Point& p : points) {
    Evaluator ev(p);
    EvaluatedTensor ers = tensor_eval(rs, ev);
    EvaluatedTensor eg = tensor_eval(b.g(), ev);
    EvaluatedTensor eginv = tensor_eval(g_inv, ev);
    EvaluatedTensor exi = tensor_eval(b.xi(), ev);
    EvaluatedTensor eeta = tensor_eval(b.eta(), ev);
    double S = 0.0, rstar = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        S += ers.at({i, j}) * exi.at({i}) * exi.at({j});
        rstar += eginv.at({i, j}) * ers.at({i, j});
      }
    double lam = (rstar - S) / two_n;
    double mu = S - lam;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        double rhs = lam * eg.at({i, j}) + mu * eeta.at({i}) * eeta.at({j});
        num = std::max(num, std::abs(ers.at({i, j}) - rhs));
        den = std::max({den, std::abs(ers.at({i, j})), std::abs(rhs)});
      }
    if (first) {
      lam_lo = lam_hi = lam;
      mu_lo = mu_hi = mu;
      first = false;
    } else {
      lam_lo = std::min(lam_lo, lam);
      lam_hi = std::max(lam_hi, lam);
      mu_lo = std::min(mu_lo, mu);
      mu_hi = std::max(mu_hi, mu);
    }
  }
  fit.residual = num / den;
  fit.lambda = 0.5 * (lam_lo + lam_hi);
  fit.mu = 0.5 * (mu_lo + mu_hi);
  double lam_spread =
      (lam_hi - lam_lo) / std::max({1.0, std::abs(lam_hi), std::abs(lam_lo)});
  double mu_spread =
      (mu_hi - mu_lo) / std::max({1.0, std::abs(mu_hi), std::abs(mu_lo)});
  fit.spread = std::max(lam_spread, mu_spread);
  // the classification asks for constants, so a pointwise fit with
  // drifting coefficients does not count
  fit.fitted =
      !points.empty() && fit.residual <= tol && fit.spread <= tol;
  return fit;
}

std::vector<CheckResult> star_checks(const WacsBundle& b, const Expr& beta,
                                     std::span<const Point> points,
                                     double tol) {
  const int d = b.dim();
  const TensorField& f = b.f();
  const TensorField& Q = b.Q();
  const TensorField& g = b.g();
  const TensorField& R = b.curvature().riemann;
  std::vector<CheckResult> out;

  TensorField rs_def = star_ricci_def(b);
  std::optional<double> beta_c = constant_value_over(beta, points);

  const char* kClosedForm =
      "Ric*(X,Y) = Ric(X,QY) + beta^2((2n-1)g(X,QY) + eta(X)eta(Y))";
  const char* kScalarForm =
      "r* = trace(Q Ric#) + beta^2(4n^2 + (2n-1)trace(Q-id))";
  const char* kRfSwap =
      "R(X,Y)fZ - fR(X,Y)Z = beta^2(g(Y,Z)fX - g(X,Z)fY + g(X,fZ)Y - "
      "g(Y,fZ)X)";
  const char* kRffQ =
      "R(fX,fY)Z - R(X,QY)Z = beta^2(g(QZ,Y)X - g(X,Z)QY + g(Z,fX)fY - "
      "g(Z,fY)fX)";

  if (!beta_c) {
    std::string why = "beta is not constant over the samples";
    out.push_back(make_skip("star/closed_form", kClosedForm, why));
    out.push_back(make_skip("star/scalar_form", kScalarForm, why));
    out.push_back(make_skip("star/R_f_swap", kRfSwap, why));
    out.push_back(make_skip("star/R_ff_Q", kRffQ, why));
  } else {
    {
      TensorField rhs = star_ricci_closed_form(b, beta);
      out.push_back(make_check("star/closed_form", kClosedForm,
                               max_residual(rs_def, rhs, points), tol));
    }
    {
      TensorField lhs(b.chart(), 0, 0), rhs(b.chart(), 0, 0);
      lhs.at(std::initializer_list<int>{}) = star_scalar_def(b);
      rhs.at(std::initializer_list<int>{}) = star_scalar_closed_form(b, beta);
      out.push_back(make_check("star/scalar_form", kScalarForm,
                               max_residual(lhs, rhs, points), tol));
    }
    Expr b2 = beta * beta;
    TensorField Phi = lowered_f(g, f);
    {
      TensorField lhs(b.chart(), 1, 3), rhs(b.chart(), 1, 3);
      for (int l = 0; l < d; ++l)
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
              Expr sum;
              for (int m = 0; m < d; ++m)
                sum = sum + R.at({l, i, j, m}) * f.at({m, k}) -
                      f.at({l, m}) * R.at({m, i, j, k});
              lhs.at({l, i, j, k}) = sum;
              Expr r = g.at({j, k}) * f.at({l, i}) - g.at({i, k}) * f.at({l, j});
              if (l == j) r = r + Phi.at({i, k});
              if (l == i) r = r - Phi.at({j, k});
              rhs.at({l, i, j, k}) = b2 * r;
            }
      out.push_back(make_check("star/R_f_swap", kRfSwap,
                               max_residual(lhs, rhs, points), tol));
    }
    {
      TensorField gQ = lowered_Q(g, Q);
      TensorField lhs(b.chart(), 1, 3), rhs(b.chart(), 1, 3);
      for (int l = 0; l < d; ++l)
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
              Expr sum;
              for (int p = 0; p < d; ++p) {
                const Expr& fpi = f.at({p, i});
                if (!(fpi.is_constant() && fpi.constant_value() == 0.0))
                  for (int q = 0; q < d; ++q)
                    sum = sum + fpi * f.at({q, j}) * R.at({l, p, q, k});
              }
              for (int q = 0; q < d; ++q)
                sum = sum - Q.at({q, j}) * R.at({l, i, q, k});
              lhs.at({l, i, j, k}) = sum;
              Expr r = Phi.at({k, i}) * f.at({l, j}) -
                       Phi.at({k, j}) * f.at({l, i}) -
                       g.at({i, k}) * Q.at({l, j});
              if (l == i) r = r + gQ.at({j, k});
              rhs.at({l, i, j, k}) = b2 * r;
            }
      out.push_back(make_check("star/R_ff_Q", kRffQ,
                               max_residual(lhs, rhs, points), tol));
    }
  }

  StarEtaEinsteinFit fit = star_eta_einstein_fit(b, points, tol);
  const char* kEtaFit = "Ric* = lambda g + mu eta(x)eta";
  if (fit.fitted) {
    out.push_back(make_check(
        "star/eta_einstein", kEtaFit, fit.residual, tol,
        fmt("lambda = %.9g, mu = %.9g, coefficient spread = %.2e", fit.lambda,
            fit.mu, fit.spread)));
    // with lambda, mu solved from the (xi,xi) slot and the trace, the
    // constants collapse to lambda = -mu = r*/(2n)
    TensorField rstar(b.chart(), 0, 0);
    rstar.at(std::initializer_list<int>{}) = star_scalar_def(b);
    double num = 0.0, den = 1.0;
    for (const Point& p : points) {
      Evaluator ev(p);
      double r_over = ev.value(rstar.at(std::initializer_list<int>{})) /
                      (2.0 * b.n());
      num = std::max({num, std::abs(fit.lambda - r_over),
                      std::abs(fit.mu + r_over)});
      den = std::max(den, std::abs(r_over));
    }
    out.push_back(make_check("star/corollary", "lambda = -mu = r*/(2n)",
                             num / den, tol * 10.0));
  } else {
    std::string why =
        fmt("not *-eta-Einstein here: best fit residual %.3e, coefficient "
            "spread %.3e",
            fit.residual, fit.spread);
    out.push_back(make_skip("star/eta_einstein", kEtaFit, why));
    out.push_back(make_skip("star/corollary", "lambda = -mu = r*/(2n)",
                            "applies to *-eta-Einstein bundles only"));
  }

  {
    TensorField rs_t(b.chart(), 0, 2);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) rs_t.at({i, j}) = rs_def.at({j, i});
    CheckResult diag;
    diag.name = "star/asymmetry";
    diag.formula = "max |Ric*(X,Y) - Ric*(Y,X)| (diagnostic)";
    diag.max_residual = max_residual(rs_def, rs_t, points);
    diag.tolerance = tol;
    diag.pass = true;
    diag.note = "informational; never symmetrized silently";
    out.push_back(diag);
  }

  return out;
}

}  // namespace wacs
