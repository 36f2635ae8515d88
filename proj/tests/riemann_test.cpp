#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "wacs/riemann.hpp"

using namespace wacs;

namespace {

// graph metric of z = (x^2+y^2)/2; Gaussian curvature 1/(1+x^2+y^2)^2
MetricData paraboloid() {
  auto c = Chart::make({"x", "y"});
  const Expr x = Expr::coordinate("x");
  const Expr y = Expr::coordinate("y");
  TensorField g(c, 0, 2);
  g.at({0, 0}) = Expr::constant(1.0) + x * x;
  g.at({0, 1}) = x * y;
  g.at({1, 0}) = x * y;
  g.at({1, 1}) = Expr::constant(1.0) + y * y;
  return build_metric(g);
}

// diag(e^{2bz}, e^{2bz}, 1); the standard hyperbolic-slice example
MetricData exp_slab(double b) {
  auto c = Chart::make({"x", "y", "z"});
  const Expr w = exp(Expr::constant(2.0 * b) * Expr::coordinate("z"));
  TensorField g(c, 0, 2);
  g.at({0, 0}) = w;
  g.at({1, 1}) = w;
  g.at({2, 2}) = Expr::constant(1.0);
  return build_metric(g);
}

MetricData sphere() {
  auto c = Chart::make({"th", "ph"}, {{{0.3, 1.2}}, {{-0.5, 0.5}}});
  TensorField g(c, 0, 2);
  g.at({0, 0}) = Expr::constant(1.0);
  g.at({1, 1}) = sin(Expr::coordinate("th")) * sin(Expr::coordinate("th"));
  return build_metric(g);
}

TensorField zero_like(const TensorField& t) {
  return TensorField(t.chart(), t.rank_up(), t.rank_down());
}

}  // namespace

TEST_CASE("inverse metric really inverts") {
  MetricData m = paraboloid();
  // g^{ik} g_{kj} = delta^i_j
  TensorField prod = contract(tensor_product(m.g_inv, m.g), 1, 0);
  TensorField id(m.g.chart(), 1, 1);
  for (int i = 0; i < 2; ++i) id.at({i, i}) = Expr::constant(1.0);
  auto pts = sample_chart(m.g.chart(), 25, 3);
  CHECK(max_residual(prod, id, pts) <= 1e-13);

  Point p{{{"x", 0.3}, {"y", -0.2}}};
  CHECK(eval(m.det, p) == doctest::Approx(1.0 + 0.09 + 0.04).epsilon(1e-14));
}

TEST_CASE("unit sphere curvature") {
  MetricData m = sphere();
  CurvatureData c = build_curvature(m);
  auto pts = sample_chart(m.g.chart(), 25, 7);
  // Ric = g and scalar = 2 on the unit sphere
  CHECK(max_residual(c.ricci, m.g, pts) <= 1e-10);
  TensorField scal(m.g.chart(), 0, 0);
  scal.at(std::initializer_list<int>{}) = c.scalar;
  TensorField two(m.g.chart(), 0, 0);
  two.at(std::initializer_list<int>{}) = Expr::constant(2.0);
  CHECK(max_residual(scal, two, pts) <= 1e-10);
}

TEST_CASE("paraboloid Ricci equals K g") {
  MetricData m = paraboloid();
  CurvatureData c = build_curvature(m);
  const Expr x = Expr::coordinate("x");
  const Expr y = Expr::coordinate("y");
  Expr den = Expr::constant(1.0) + x * x + y * y;
  Expr K = Expr::constant(1.0) / (den * den);
  TensorField expected = scale(m.g, K);
  auto pts = sample_chart(m.g.chart(), 25, 9);
  CHECK(max_residual(c.ricci, expected, pts) <= 1e-10);
}

TEST_CASE("exponential slab pins sign conventions") {
  const double b = 0.8;
  MetricData m = exp_slab(b);
  CurvatureData c = build_curvature(m);
  auto pts = sample_chart(m.g.chart(), 25, 11);

  // Ric = -2 b^2 g for this metric
  TensorField expected = scale(m.g, Expr::constant(-2.0 * b * b));
  CHECK(max_residual(c.ricci, expected, pts) <= 1e-10);

  // R(X,Y) d_z = b^2 ( dz(X) Y - dz(Y) X ): fixes both the curvature
  // sign and the trace slot of the Ricci convention
  const int d = 3, zi = 2;
  TensorField lhs(m.g.chart(), 1, 2), rhs(m.g.chart(), 1, 2);
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        lhs.at({k, i, j}) = c.riemann.at({k, i, j, zi});
        Expr e = Expr::constant(0.0);
        if (i == zi && j == k) e = e + Expr::constant(b * b);
        if (j == zi && i == k) e = e - Expr::constant(b * b);
        rhs.at({k, i, j}) = e;
      }
  CHECK(max_residual(lhs, rhs, pts) <= 1e-10);

  // scalar curvature -6 b^2
  Point p{{{"x", 0.1}, {"y", 0.2}, {"z", -0.3}}};
  CHECK(eval(c.scalar, p) == doctest::Approx(-6.0 * b * b).epsilon(1e-12));
}

TEST_CASE("metric is parallel") {
  MetricData m = paraboloid();
  TensorField nabla_g = covariant_derivative(m, m.g);
  auto pts = sample_chart(m.g.chart(), 25, 13);
  CHECK(max_residual(nabla_g, zero_like(nabla_g), pts) <= 1e-10);

  MetricData m3 = exp_slab(-0.7);
  TensorField nabla_g3 = covariant_derivative(m3, m3.g);
  auto pts3 = sample_chart(m3.g.chart(), 25, 13);
  CHECK(max_residual(nabla_g3, zero_like(nabla_g3), pts3) <= 1e-10);
}

TEST_CASE("curvature symmetries") {
  MetricData m = paraboloid();
  CurvatureData c = build_curvature(m);
  const int d = 2;
  auto pts = sample_chart(m.g.chart(), 25, 17);

  // lowered tensor antisymmetric in the first pair
  TensorField low(m.g.chart(), 0, 4), low_swapped(m.g.chart(), 0, 4);
  for (int a = 0; a < d; ++a)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
          Expr sum = Expr::constant(0.0);
          for (int l = 0; l < d; ++l)
            sum = sum + m.g.at({a, l}) * c.riemann.at({l, i, j, k});
          low.at({a, i, j, k}) = sum;
        }
  for (int a = 0; a < d; ++a)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k)
          low_swapped.at({a, i, j, k}) = -low.at({k, i, j, a});
  CHECK(max_residual(low, low_swapped, pts) <= 1e-12);

  // first Bianchi identity
  TensorField bianchi(m.g.chart(), 1, 3);
  for (int l = 0; l < d; ++l)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k)
          bianchi.at({l, i, j, k}) = c.riemann.at({l, i, j, k}) +
                                     c.riemann.at({l, j, k, i}) +
                                     c.riemann.at({l, k, i, j});
  CHECK(max_abs_over(bianchi, pts) <= 1e-12);
}

TEST_CASE("differential Bianchi identity") {
  MetricData m = exp_slab(0.6);
  CurvatureData c = build_curvature(m);
  TensorField nabla_r = covariant_derivative(m, c.riemann);  // [l][c][i][j][k]
  const int d = 3;
  TensorField cyc(m.g.chart(), 1, 4);
  for (int l = 0; l < d; ++l)
    for (int a = 0; a < d; ++a)
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          for (int k = 0; k < d; ++k)
            cyc.at({l, a, i, j, k}) = nabla_r.at({l, a, i, j, k}) +
                                      nabla_r.at({l, i, j, a, k}) +
                                      nabla_r.at({l, j, a, i, k});
  auto pts = sample_chart(m.g.chart(), 10, 19);
  CHECK(max_abs_over(cyc, pts) <= 1e-9);
}

TEST_CASE("Lie derivative of the metric matches the covariant route") {
  MetricData m = paraboloid();
  const Expr x = Expr::coordinate("x");
  const Expr y = Expr::coordinate("y");
  TensorField V(m.g.chart(), 1, 0);
  V.at({0}) = sin(x) + y;
  V.at({1}) = x * y;

  TensorField lie_g = lie_derivative(m.g, V);

  TensorField v_flat(m.g.chart(), 0, 1);
  for (int j = 0; j < 2; ++j)
    v_flat.at({j}) = m.g.at({j, 0}) * V.at({0}) + m.g.at({j, 1}) * V.at({1});
  TensorField dvf = covariant_derivative(m, v_flat);  // [c][j]
  TensorField sym(m.g.chart(), 0, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      sym.at({i, j}) = dvf.at({i, j}) + dvf.at({j, i});

  auto pts = sample_chart(m.g.chart(), 25, 23);
  CHECK(max_residual(lie_g, sym, pts) <= 1e-10);
}

TEST_CASE("Lie derivative obeys the Leibniz rule under contraction") {
  auto c = Chart::make({"x", "y"});
  const Expr x = Expr::coordinate("x");
  const Expr y = Expr::coordinate("y");
  TensorField V(c, 1, 0);
  V.at({0}) = x * x - y;
  V.at({1}) = cos(x);
  TensorField W(c, 1, 0);
  W.at({0}) = exp(x * y);
  W.at({1}) = x + y;
  TensorField w(c, 0, 1);
  w.at({0}) = sin(y);
  w.at({1}) = x * y * y;

  // L_V(w(W)) = (L_V w)(W) + w(L_V W)
  TensorField pairing = contract(tensor_product(W, w), 0, 0);  // scalar
  TensorField lhs = lie_derivative(pairing, V);
  TensorField t1 = contract(tensor_product(W, lie_derivative(w, V)), 0, 0);
  TensorField t2 = contract(tensor_product(lie_derivative(W, V), w), 0, 0);
  TensorField rhs = add_scale(t1, t2, 1.0, 1.0);
  auto pts = sample_chart(c, 25, 29);
  CHECK(max_residual(lhs, rhs, pts) <= 1e-11);
}

TEST_CASE("exterior derivative squares to zero") {
  auto c = Chart::make({"x", "y", "z"});
  const Expr x = Expr::coordinate("x");
  const Expr y = Expr::coordinate("y");
  const Expr z = Expr::coordinate("z");
  TensorField w(c, 0, 1);
  w.at({0}) = sin(x * y) + z;
  w.at({1}) = exp(x) * z;
  w.at({2}) = x * x * y;
  TensorField dw = exterior_derivative(w, 0.5);
  TensorField ddw = exterior_derivative(dw, 1.0);
  auto pts = sample_chart(c, 25, 31);
  CHECK(max_abs_over(ddw, pts) <= 1e-10);

  // gradient 1-form of a potential is closed
  Expr v = sin(x) * exp(y) + z * z * x;
  TensorField dv(c, 0, 1);
  for (int i = 0; i < 3; ++i) dv.at({i}) = diff(v, c->coord(i));
  TensorField ddv = exterior_derivative(dv, 0.5);
  CHECK(max_abs_over(ddv, pts) <= 1e-12);
}

TEST_CASE("gradient and hessian") {
  MetricData m = exp_slab(0.5);
  const Expr x = Expr::coordinate("x");
  const Expr y = Expr::coordinate("y");
  const Expr z = Expr::coordinate("z");
  Expr v = sin(x) * exp(y) + z * z;

  // metric duality: g(grad v, d_j) = d_j v
  TensorField gv = gradient(m, v);
  TensorField lowered(m.g.chart(), 0, 1);
  for (int j = 0; j < 3; ++j) {
    Expr sum = Expr::constant(0.0);
    for (int i = 0; i < 3; ++i) sum = sum + m.g.at({j, i}) * gv.at({i});
    lowered.at({j}) = sum;
  }
  TensorField dv(m.g.chart(), 0, 1);
  for (int j = 0; j < 3; ++j) dv.at({j}) = diff(v, m.g.chart()->coord(j));
  auto pts = sample_chart(m.g.chart(), 25, 37);
  CHECK(max_residual(lowered, dv, pts) <= 1e-11);

  // Hess v = (1/2) L_{grad v} g
  TensorField h = hessian(m, v);
  TensorField lie = lie_derivative(m.g, gv);
  TensorField half_lie = add_scale(lie, zero_like(lie), 0.5, 0.0);
  CHECK(max_residual(h, half_lie, pts) <= 1e-10);

  // symmetry
  TensorField ht(m.g.chart(), 0, 2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) ht.at({i, j}) = h.at({j, i});
  CHECK(max_residual(h, ht, pts) == 0.0);
}

TEST_CASE("sampling avoids metric degeneracy") {
  auto c = Chart::make({"x"});
  TensorField g(c, 0, 2);
  g.at({0, 0}) = Expr::coordinate("x") * Expr::coordinate("x");
  MetricData m = build_metric(g);
  auto pts = sample_points(m, 50, 42);
  REQUIRE(pts.size() == 50);
  for (const auto& p : pts) CHECK(p.at("x") * p.at("x") >= 1e-12);

  auto again = sample_points(m, 50, 42);
  for (int i = 0; i < 50; ++i) CHECK(pts[i].values == again[i].values);
}
