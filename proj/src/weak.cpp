#include "wacs/weak.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace wacs {

namespace {

void require_shape(const TensorField& t, int r, int s, const char* what) {
  if (t.rank_up() != r || t.rank_down() != s)
    throw std::invalid_argument(std::string(what) + " has wrong valence");
}

TensorField zero_like(const TensorField& t) {
  return TensorField(t.chart(), t.rank_up(), t.rank_down());
}

Expr c(double v) { return Expr::constant(v); }

}  // namespace

WacsBundle::WacsBundle(std::string id, TensorField f, TensorField Q,
                       TensorField xi, TensorField eta, TensorField g,
                       std::optional<Expr> beta)
    : id_(std::move(id)),
      f_(std::move(f)),
      Q_(std::move(Q)),
      xi_(std::move(xi)),
      eta_(std::move(eta)),
      g_(std::move(g)),
      beta_(std::move(beta)),
      derived_(std::make_shared<Derived>()) {
  require_shape(f_, 1, 1, "f");
  require_shape(Q_, 1, 1, "Q");
  require_shape(xi_, 1, 0, "xi");
  require_shape(eta_, 0, 1, "eta");
  require_shape(g_, 0, 2, "g");
  const ChartPtr& ch = f_.chart();
  if (Q_.chart() != ch || xi_.chart() != ch || eta_.chart() != ch ||
      g_.chart() != ch)
    throw std::invalid_argument("bundle fields live on different charts");
  if (dim() < 3 || dim() % 2 == 0)
    throw std::invalid_argument("bundle dimension must be odd and >= 3");
}

TensorField WacsBundle::Q_tilde() const {
  TensorField out = Q_;
  for (int i = 0; i < dim(); ++i)
    out.at({i, i}) = out.at({i, i}) - c(1.0);
  return out;
}

const MetricData& WacsBundle::metric() const {
  std::call_once(derived_->metric_once,
                 [this] { derived_->metric = build_metric(g_); });
  return *derived_->metric;
}

const CurvatureData& WacsBundle::curvature() const {
  std::call_once(derived_->curv_once,
                 [this] { derived_->curv = build_curvature(metric()); });
  return *derived_->curv;
}

std::optional<double> constant_value_over(const Expr& e,
                                          std::span<const Point> points,
                                          double spread_tol) {
  if (points.empty()) return std::nullopt;
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (const Point& p : points) {
    double v = eval(e, p);
    if (first) {
      lo = hi = v;
      first = false;
    } else {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  double spread = (hi - lo) / std::max({1.0, std::abs(hi), std::abs(lo)});
  if (spread > spread_tol) return std::nullopt;
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// structure axioms

std::vector<CheckResult> wacs_axiom_checks(const WacsBundle& b,
                                           std::span<const Point> points,
                                           double tol) {
  const int d = b.dim();
  const TensorField& f = b.f();
  const TensorField& Q = b.Q();
  const TensorField& xi = b.xi();
  const TensorField& eta = b.eta();
  const TensorField& g = b.g();
  std::vector<CheckResult> out;

  {
    TensorField lhs = compose(f, f);
    TensorField rhs(b.chart(), 1, 1);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        rhs.at({i, j}) = -Q.at({i, j}) + xi.at({i}) * eta.at({j});
    out.push_back(make_check("wacs/f_squared", "f^2 = -Q + eta(x)xi",
                             max_residual(lhs, rhs, points), tol));
  }
  {
    TensorField lhs(b.chart(), 0, 0);
    Expr sum = c(0.0);
    for (int m = 0; m < d; ++m) sum = sum + eta.at({m}) * xi.at({m});
    lhs.at(std::initializer_list<int>{}) = sum;
    TensorField rhs(b.chart(), 0, 0);
    rhs.at(std::initializer_list<int>{}) = c(1.0);
    out.push_back(make_check("wacs/eta_xi", "eta(xi) = 1",
                             max_residual(lhs, rhs, points), tol));
  }
  out.push_back(make_check("wacs/Q_xi", "Q xi = xi",
                           max_residual(apply(Q, xi), xi, points), tol));
  {
    TensorField lhs(b.chart(), 0, 2), rhs(b.chart(), 0, 2);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        Expr l = c(0.0);
        for (int m = 0; m < d; ++m)
          for (int l2 = 0; l2 < d; ++l2)
            l = l + g.at({m, l2}) * f.at({m, i}) * f.at({l2, j});
        lhs.at({i, j}) = l;
        Expr r = c(0.0);
        for (int m = 0; m < d; ++m) r = r + g.at({i, m}) * Q.at({m, j});
        rhs.at({i, j}) = r - eta.at({i}) * eta.at({j});
      }
    out.push_back(make_check("wacs/metric_compat",
                             "g(fX,fY) = g(X,QY) - eta(X)eta(Y)",
                             max_residual(lhs, rhs, points), tol));
  }
  {
    TensorField lhs(b.chart(), 0, 2), rhs(b.chart(), 0, 2);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        Expr l = c(0.0), r = c(0.0);
        for (int m = 0; m < d; ++m) {
          l = l + g.at({m, j}) * f.at({m, i});
          r = r + g.at({i, m}) * f.at({m, j});
        }
        lhs.at({i, j}) = l;
        rhs.at({i, j}) = -r;
      }
    out.push_back(make_check("wacs/f_skew", "g(fX,Y) = -g(X,fY)",
                             max_residual(lhs, rhs, points), tol));
  }
  {
    TensorField lhs(b.chart(), 0, 2), rhs(b.chart(), 0, 2);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        Expr l = c(0.0), r = c(0.0);
        for (int m = 0; m < d; ++m) {
          l = l + g.at({m, j}) * Q.at({m, i});
          r = r + g.at({i, m}) * Q.at({m, j});
        }
        lhs.at({i, j}) = l;
        rhs.at({i, j}) = r;
      }
    out.push_back(make_check("wacs/Q_selfadjoint", "g(QX,Y) = g(X,QY)",
                             max_residual(lhs, rhs, points), tol));
  }
  out.push_back(make_check("wacs/f_xi", "f xi = 0",
                           max_residual(apply(f, xi), TensorField(b.chart(), 1, 0), points),
                           tol));
  {
    TensorField lhs(b.chart(), 0, 1);
    for (int j = 0; j < d; ++j) {
      Expr sum = c(0.0);
      for (int m = 0; m < d; ++m) sum = sum + eta.at({m}) * f.at({m, j});
      lhs.at({j}) = sum;
    }
    out.push_back(make_check("wacs/eta_f", "eta o f = 0",
                             max_residual(lhs, zero_like(lhs), points), tol));
  }
  {
    TensorField lhs(b.chart(), 0, 1);
    for (int j = 0; j < d; ++j) {
      Expr sum = c(0.0);
      for (int m = 0; m < d; ++m) sum = sum + eta.at({m}) * Q.at({m, j});
      lhs.at({j}) = sum;
    }
    out.push_back(make_check("wacs/eta_Q", "eta o Q = eta",
                             max_residual(lhs, eta, points), tol));
  }
  out.push_back(make_check("wacs/Qf_commute", "Q f = f Q",
                           max_residual(compose(Q, f), compose(f, Q), points), tol));
  {
    TensorField rhs(b.chart(), 0, 1);
    for (int j = 0; j < d; ++j) {
      Expr sum = c(0.0);
      for (int m = 0; m < d; ++m) sum = sum + g.at({j, m}) * xi.at({m});
      rhs.at({j}) = sum;
    }
    out.push_back(make_check("wacs/eta_dual", "eta(X) = g(X,xi)",
                             max_residual(eta, rhs, points), tol));
  }
  {
    // pointwise numeric rank of f via singular values
    const int expected = b.dim() - 1;
    int worst = 0;
    for (const Point& p : points) {
      EvaluatedTensor fv = tensor_eval(f, p);
      Eigen::MatrixXd M(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) M(i, j) = fv.at({i, j});
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
      const auto& sv = svd.singularValues();
      double cut = 1e-8 * sv(0);
      int rank = 0;
      for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > cut) ++rank;
      worst = std::max(worst, std::abs(rank - expected));
    }
    out.push_back(make_check("wacs/f_rank", "rank f = 2n",
                             static_cast<double>(worst), 0.5,
                             "singular values above 1e-8 * sigma_max"));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Nijenhuis tensors

NijenhuisFields nijenhuis_tensors(const WacsBundle& b) {
  const int d = b.dim();
  const ChartPtr& chart = b.chart();
  const TensorField& f = b.f();
  const TensorField& eta = b.eta();

  // df[m][k][j] = d_m f^k_j
  std::vector<Expr> df(static_cast<std::size_t>(d) * d * d);
  auto df_at = [&](int m, int k, int j) -> Expr& {
    return df[(static_cast<std::size_t>(m) * d + k) * d + j];
  };
  for (int m = 0; m < d; ++m)
    for (int k = 0; k < d; ++k)
      for (int j = 0; j < d; ++j)
        df_at(m, k, j) = diff(f.at({k, j}), chart->coord(m));

  TensorField n1(chart, 1, 2);
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        Expr sum = c(0.0);
        for (int m = 0; m < d; ++m)
          sum = sum + f.at({m, i}) * df_at(m, k, j) -
                f.at({m, j}) * df_at(m, k, i) + f.at({k, m}) * df_at(j, m, i) -
                f.at({k, m}) * df_at(i, m, j);
        // + 2 d(eta)(X,Y) xi with the 1/2 convention folded in
        sum = sum + (diff(eta.at({j}), chart->coord(i)) -
                     diff(eta.at({i}), chart->coord(j))) *
                        b.xi().at({k});
        n1.at({k, i, j}) = sum;
      }

  // n2 via Lie derivatives of eta along the columns of f
  std::vector<TensorField> lie_eta;
  lie_eta.reserve(d);
  for (int i = 0; i < d; ++i) {
    TensorField col(chart, 1, 0);
    for (int m = 0; m < d; ++m) col.at({m}) = f.at({m, i});
    lie_eta.push_back(lie_derivative(eta, col));
  }
  TensorField n2(chart, 0, 2);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      n2.at({i, j}) = lie_eta[i].at({j}) - lie_eta[j].at({i});

  return NijenhuisFields{std::move(n1), std::move(n2),
                         lie_derivative(f, b.xi()),
                         lie_derivative(eta, b.xi())};
}

TensorField fundamental_form(const WacsBundle& b) {
  const int d = b.dim();
  TensorField phi(b.chart(), 0, 2);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Expr sum = c(0.0);
      for (int m = 0; m < d; ++m)
        sum = sum + b.g().at({i, m}) * b.f().at({m, j});
      phi.at({i, j}) = sum;
    }
  return phi;
}

double calibrate_three_form_factor(const WacsBundle& b,
                                   std::span<const Point> points) {
  if (!b.beta())
    throw std::invalid_argument("three-form calibration needs beta");
  TensorField phi = fundamental_form(b);
  TensorField dphi = exterior_derivative(phi, 1.0);
  TensorField target = scale(wedge_1_2(b.eta(), phi), c(2.0) * *b.beta());
  double num = 0.0, den = 0.0;
  for (const Point& p : points) {
    Evaluator ev(p);
    auto a = dphi.components();
    auto t = target.components();
    for (std::size_t i = 0; i < a.size(); ++i) {
      double va = ev.value(a[i]);
      double vt = ev.value(t[i]);
      num += va * vt;
      den += va * va;
    }
  }
  if (den < 1e-30) return 1.0;
  return num / den;
}

// ---------------------------------------------------------------------------
// defining identity of the class plus derived identities

std::vector<CheckResult> kenmotsu_checks(const WacsBundle& b,
                                         std::span<const Point> points,
                                         double tol, double kappa) {
  std::vector<CheckResult> out;
  if (!b.beta()) {
    CheckResult miss;
    miss.name = "kenmotsu/beta_present";
    miss.formula = "nabla f = beta(...) for some beta";
    miss.max_residual = 1.0;
    miss.tolerance = tol;
    miss.pass = false;
    miss.note = "bundle has no beta";
    out.push_back(std::move(miss));
    return out;
  }
  const Expr beta = *b.beta();
  const int d = b.dim();
  const ChartPtr& chart = b.chart();
  const TensorField& f = b.f();
  const TensorField& eta = b.eta();
  const TensorField& xi = b.xi();
  const TensorField& g = b.g();
  const MetricData& m = b.metric();
  const TensorField qt = b.Q_tilde();

  TensorField nf = covariant_derivative(m, f);  // [k][c][j]
  {
    TensorField rhs(chart, 1, 2);
    for (int k = 0; k < d; ++k)
      for (int cc = 0; cc < d; ++cc)
        for (int j = 0; j < d; ++j) {
          Expr gf = c(0.0);  // g(f d_c, d_j)
          for (int mm = 0; mm < d; ++mm)
            gf = gf + f.at({mm, cc}) * g.at({mm, j});
          rhs.at({k, cc, j}) =
              beta * (gf * xi.at({k}) - eta.at({j}) * f.at({k, cc}));
        }
    out.push_back(make_check("kenmotsu/nabla_f",
                             "(nabla_X f)Y = beta(g(fX,Y)xi - eta(Y)fX)",
                             max_residual(nf, rhs, points), tol));
  }
  {
    TensorField nxi = covariant_derivative(m, xi);  // [k][c]
    TensorField rhs(chart, 1, 1);
    for (int k = 0; k < d; ++k)
      for (int cc = 0; cc < d; ++cc) {
        Expr e = -eta.at({cc}) * xi.at({k});
        if (k == cc) e = e + c(1.0);
        rhs.at({k, cc}) = beta * e;
      }
    out.push_back(make_check("kenmotsu/nabla_xi",
                             "nabla_X xi = beta(X - eta(X)xi)",
                             max_residual(nxi, rhs, points), tol));
  }
  {
    TensorField neta = covariant_derivative(m, eta);  // [c][j]
    TensorField rhs(chart, 0, 2);
    for (int cc = 0; cc < d; ++cc)
      for (int j = 0; j < d; ++j)
        rhs.at({cc, j}) = beta * (g.at({cc, j}) - eta.at({cc}) * eta.at({j}));
    out.push_back(make_check("kenmotsu/nabla_eta",
                             "(nabla_X eta)Y = beta(g(X,Y) - eta(X)eta(Y))",
                             max_residual(neta, rhs, points), tol));
  }
  TensorField nQ = covariant_derivative(m, b.Q());  // [k][c][j]
  {
    TensorField rhs(chart, 1, 2);
    for (int k = 0; k < d; ++k)
      for (int cc = 0; cc < d; ++cc)
        for (int j = 0; j < d; ++j) {
          Expr gq = c(0.0);  // g((Q-id)d_c, d_j)
          for (int mm = 0; mm < d; ++mm)
            gq = gq + qt.at({mm, cc}) * g.at({mm, j});
          rhs.at({k, cc, j}) =
              -beta * (eta.at({j}) * qt.at({k, cc}) + gq * xi.at({k}));
        }
    out.push_back(make_check(
        "kenmotsu/nabla_Q",
        "(nabla_X Q)Y = -beta(eta(Y)(Q-id)X + g((Q-id)X,Y)xi)",
        max_residual(nQ, rhs, points), tol));
  }
  {
    TensorField lhs = lie_derivative(g, xi);
    TensorField rhs(chart, 0, 2);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        rhs.at({i, j}) =
            c(2.0) * beta * (g.at({i, j}) - eta.at({i}) * eta.at({j}));
    out.push_back(make_check("kenmotsu/lie_xi_g",
                             "L_xi g = 2 beta (g - eta(x)eta)",
                             max_residual(lhs, rhs, points), tol));
  }
  {
    TensorField deta = exterior_derivative(eta, 0.5);
    out.push_back(make_check("kenmotsu/d_eta", "d eta = 0",
                             max_residual(deta, zero_like(deta), points),
                             tol / 100.0));
  }
  TensorField phi = fundamental_form(b);
  {
    TensorField dphi = exterior_derivative(phi, kappa);
    TensorField rhs = scale(wedge_1_2(eta, phi), c(2.0) * beta);
    out.push_back(make_check("kenmotsu/d_Phi", "d Phi = 2 beta eta ^ Phi",
                             max_residual(dphi, rhs, points), tol));
  }
  {
    TensorField lhs(chart, 1, 1);
    for (int k = 0; k < d; ++k)
      for (int j = 0; j < d; ++j) {
        Expr sum = c(0.0);
        for (int cc = 0; cc < d; ++cc)
          sum = sum + xi.at({cc}) * nf.at({k, cc, j});
        lhs.at({k, j}) = sum;
      }
    out.push_back(make_check("kenmotsu/nabla_xi_f", "nabla_xi f = 0",
                             max_residual(lhs, zero_like(lhs), points), tol));
  }
  {
    TensorField lhs(chart, 1, 1);
    for (int k = 0; k < d; ++k)
      for (int j = 0; j < d; ++j) {
        Expr sum = c(0.0);
        for (int cc = 0; cc < d; ++cc)
          sum = sum + xi.at({cc}) * nQ.at({k, cc, j});
        lhs.at({k, j}) = sum;
      }
    out.push_back(make_check("kenmotsu/nabla_xi_Q", "nabla_xi Q = 0",
                             max_residual(lhs, zero_like(lhs), points), tol));
  }
  {
    Expr tr = c(0.0);
    for (int i = 0; i < d; ++i) tr = tr + b.Q().at({i, i});
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const Point& p : points) {
      double v = eval(tr, p);
      if (first) {
        lo = hi = v;
        first = false;
      } else {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    double spread = (hi - lo) / std::max({1.0, std::abs(hi), std::abs(lo)});
    out.push_back(make_check("kenmotsu/trace_Q_constant", "trace Q = const",
                             spread, tol / 10.0));
  }
  {
    TensorField lhs(chart, 0, 2);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        lhs.at({i, j}) = diff(beta, chart->coord(i)) * eta.at({j}) -
                         diff(beta, chart->coord(j)) * eta.at({i});
    out.push_back(make_check("kenmotsu/dbeta_eta", "d beta ^ eta = 0",
                             max_residual(lhs, zero_like(lhs), points), tol));
  }
  {
    double min_abs = std::numeric_limits<double>::infinity();
    for (const Point& p : points)
      min_abs = std::min(min_abs, std::abs(eval(beta, p)));
    bool ok = min_abs > 1e-12;
    char buf[64];
    std::snprintf(buf, sizeof buf, "min |beta| = %.3e", min_abs);
    std::string note = buf;
    if (!ok) note += "; vanishing rate means almost cosymplectic, not this class";
    out.push_back(make_check("kenmotsu/beta_nonzero", "beta != 0",
                             ok ? 0.0 : 1.0, 0.5, std::move(note)));
  }
  {
    NijenhuisFields nij = nijenhuis_tensors(b);
    out.push_back(make_check("kenmotsu/n1_vanishes", "N1 = 0",
                             max_residual(nij.n1, zero_like(nij.n1), points),
                             tol));
  }
  return out;
}

std::vector<CheckResult> curvature_checks(const WacsBundle& b, double beta,
                                          std::span<const Point> points,
                                          double tol) {
  const int d = b.dim();
  const int n = b.n();
  const ChartPtr& chart = b.chart();
  const TensorField& eta = b.eta();
  const TensorField& xi = b.xi();
  const CurvatureData& cv = b.curvature();
  const double b2 = beta * beta;
  std::vector<CheckResult> out;

  {
    TensorField lhs(chart, 1, 2), rhs(chart, 1, 2);
    for (int k = 0; k < d; ++k)
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          Expr sum = c(0.0);
          for (int mm = 0; mm < d; ++mm)
            sum = sum + cv.riemann.at({k, i, j, mm}) * xi.at({mm});
          lhs.at({k, i, j}) = sum;
          Expr r = c(0.0);
          if (j == k) r = r + c(b2) * eta.at({i});
          if (i == k) r = r - c(b2) * eta.at({j});
          rhs.at({k, i, j}) = r;
        }
    out.push_back(make_check("curv/R_xi",
                             "R(X,Y)xi = beta^2(eta(X)Y - eta(Y)X)",
                             max_residual(lhs, rhs, points), tol));
  }
  {
    TensorField lhs = apply(cv.ricci_op, xi);
    TensorField rhs = scale(xi, c(-2.0 * n * b2));
    out.push_back(make_check("curv/ric_xi", "Ric# xi = -2n beta^2 xi",
                             max_residual(lhs, rhs, points), tol));
  }
  TensorField nric = covariant_derivative(b.metric(), cv.ricci_op);  // [k][c][j]
  {
    TensorField lhs(chart, 1, 1), rhs(chart, 1, 1);
    for (int k = 0; k < d; ++k)
      for (int j = 0; j < d; ++j) {
        Expr sum = c(0.0);
        for (int cc = 0; cc < d; ++cc)
          sum = sum + xi.at({cc}) * nric.at({k, cc, j});
        lhs.at({k, j}) = sum;
        Expr r = c(-2.0 * beta) * cv.ricci_op.at({k, j});
        if (k == j) r = r - c(4.0 * n * b2 * beta);
        rhs.at({k, j}) = r;
      }
    out.push_back(make_check("curv/nabla_xi_ric",
                             "(nabla_xi Ric#)X = -2 beta Ric# X - 4n beta^3 X",
                             max_residual(lhs, rhs, points), tol));
  }
  {
    TensorField lhs(chart, 1, 1), rhs(chart, 1, 1);
    for (int k = 0; k < d; ++k)
      for (int cc = 0; cc < d; ++cc) {
        Expr sum = c(0.0);
        for (int j = 0; j < d; ++j)
          sum = sum + nric.at({k, cc, j}) * xi.at({j});
        lhs.at({k, cc}) = sum;
        Expr r = c(-beta) * cv.ricci_op.at({k, cc});
        if (k == cc) r = r - c(2.0 * n * b2 * beta);
        rhs.at({k, cc}) = r;
      }
    out.push_back(make_check("curv/nabla_ric_xi",
                             "(nabla_X Ric#)xi = -beta Ric# X - 2n beta^3 X",
                             max_residual(lhs, rhs, points), tol));
  }
  {
    TensorField lhs(chart, 0, 0), rhs(chart, 0, 0);
    Expr xr = c(0.0);
    for (int mm = 0; mm < d; ++mm)
      xr = xr + xi.at({mm}) * diff(cv.scalar, chart->coord(mm));
    lhs.at(std::initializer_list<int>{}) = xr;
    rhs.at(std::initializer_list<int>{}) =
        c(-2.0 * beta) * (cv.scalar + c(2.0 * n * (2 * n + 1) * b2));
    out.push_back(make_check("curv/xi_scalar",
                             "xi(r) = -2 beta (r + 2n(2n+1) beta^2)",
                             max_residual(lhs, rhs, points), tol));
  }
  return out;
}

// ---------------------------------------------------------------------------
// f-adapted frame

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// first component of v larger than the cutoff decides the sign
void fix_sign(VectorXd& v) {
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-9) {
      if (v(i) < 0.0) v = -v;
      return;
    }
  }
}

}  // namespace

FBasis f_basis(const WacsBundle& b, const Point& p) {
  const int d = b.dim();
  const int n = b.n();
  Evaluator ev(p);
  EvaluatedTensor gv = tensor_eval(b.g(), ev);
  EvaluatedTensor qv = tensor_eval(b.Q(), ev);
  EvaluatedTensor fv = tensor_eval(b.f(), ev);
  EvaluatedTensor xiv = tensor_eval(b.xi(), ev);
  EvaluatedTensor etav = tensor_eval(b.eta(), ev);

  MatrixXd G(d, d), Qm(d, d), Fm(d, d);
  VectorXd Xi(d), Eta(d);
  for (int i = 0; i < d; ++i) {
    Xi(i) = xiv.at({i});
    Eta(i) = etav.at({i});
    for (int j = 0; j < d; ++j) {
      G(i, j) = gv.at({i, j});
      Qm(i, j) = qv.at({i, j});
      Fm(i, j) = fv.at({i, j});
    }
  }

  // g-orthonormal basis of ker(eta): project the coordinate frame along
  // xi, then Gram-Schmidt with respect to g
  std::vector<VectorXd> frame;
  for (int i = 0; i < d && static_cast<int>(frame.size()) < d - 1; ++i) {
    VectorXd v = VectorXd::Zero(d);
    v(i) = 1.0;
    v -= Eta(i) * Xi;
    for (const auto& u : frame) v -= (u.transpose() * G * v)(0) * u;
    double len2 = (v.transpose() * G * v)(0);
    if (len2 > 1e-16) frame.push_back(v / std::sqrt(len2));
  }
  if (static_cast<int>(frame.size()) != d - 1)
    throw std::runtime_error("could not build a basis of ker(eta)");

  FBasis out;
  out.vectors.reserve(d);
  out.eigenvalues.reserve(n);

  // W: g-orthonormal working basis of the remaining f-invariant subspace
  std::vector<VectorXd> W = std::move(frame);
  for (int step = 0; step < n; ++step) {
    const int w = static_cast<int>(W.size());
    MatrixXd S(w, w);
    for (int a = 0; a < w; ++a)
      for (int bb = 0; bb < w; ++bb)
        S(a, bb) = (W[a].transpose() * G * (Qm * W[bb]))(0);
    S = 0.5 * (S + S.transpose().eval());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(S);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("eigensolver failed on Q restriction");
    double lam_max = es.eigenvalues()(w - 1);
    double lam_min = es.eigenvalues()(0);
    if (lam_min <= 1e-12 * std::max(1.0, std::abs(lam_max)))
      throw IndefiniteOperatorError(
          "structure operator is not positive definite on ker(eta)");

    VectorXd e = VectorXd::Zero(d);
    const VectorXd coef = es.eigenvectors().col(w - 1);
    for (int a = 0; a < w; ++a) e += coef(a) * W[a];
    fix_sign(e);
    VectorXd fe = Fm * e;

    out.eigenvalues.push_back(lam_max);
    out.vectors.emplace_back(e.data(), e.data() + d);
    out.vectors.emplace_back(fe.data(), fe.data() + d);

    // drop span{e, fe} from the working basis
    VectorXd fe_unit = fe / std::sqrt(std::max((fe.transpose() * G * fe)(0), 1e-300));
    std::vector<VectorXd> next;
    for (const auto& u : W) {
      VectorXd v = u;
      v -= (e.transpose() * G * v)(0) * e;
      v -= (fe_unit.transpose() * G * v)(0) * fe_unit;
      for (const auto& q : next) v -= (q.transpose() * G * v)(0) * q;
      double len2 = (v.transpose() * G * v)(0);
      if (len2 > 1e-16) next.push_back(v / std::sqrt(len2));
    }
    if (static_cast<int>(next.size()) != w - 2)
      throw std::runtime_error("f-invariant reduction lost dimensions");
    W = std::move(next);
  }

  out.vectors.emplace_back(Xi.data(), Xi.data() + d);

  for (int i = 1; i < n; ++i)
    if (out.eigenvalues[i] > out.eigenvalues[i - 1] + 1e-8)
      throw std::runtime_error("eigenvalues not descending");
  return out;
}

}  // namespace wacs
