#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "wacs/tensor.hpp"

using namespace wacs;

namespace {

ChartPtr chart3() { return Chart::make({"x", "y", "z"}); }

// (1,1) field with distinct nonconstant entries
TensorField sample_11(const ChartPtr& c) {
  TensorField t(c, 1, 1);
  const Expr x = Expr::coordinate("x");
  const Expr y = Expr::coordinate("y");
  const Expr z = Expr::coordinate("z");
  t.at({0, 0}) = x + Expr::constant(2.0);
  t.at({0, 1}) = sin(y);
  t.at({0, 2}) = x * z;
  t.at({1, 0}) = exp(y);
  t.at({1, 1}) = y - z;
  t.at({1, 2}) = Expr::constant(3.0);
  t.at({2, 0}) = cos(x * y);
  t.at({2, 1}) = z * z;
  t.at({2, 2}) = x - y + z;
  return t;
}

TensorField sample_11b(const ChartPtr& c) {
  TensorField t(c, 1, 1);
  const Expr x = Expr::coordinate("x");
  const Expr y = Expr::coordinate("y");
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      t.at({i, j}) = Expr::constant(i + 2.0 * j) + x * Expr::constant(j) - y;
  return t;
}

}  // namespace

TEST_CASE("chart basics") {
  auto c = chart3();
  CHECK(c->dim() == 3);
  CHECK(c->coord_index("y") == 1);
  CHECK(c->coord_index("w") == -1);
  CHECK(c->domain()[0][0] == -0.5);
  CHECK(c->domain()[0][1] == 0.5);

  auto custom = Chart::make({"t", "u"}, {{{0.1, 0.9}}, {{-2.0, -1.0}}});
  CHECK(custom->domain()[1][0] == -2.0);

  CHECK_THROWS_AS(Chart::make({"a", "a"}), std::invalid_argument);
  CHECK_THROWS_AS(Chart::make({"a"}, {{{1.0, 1.0}}}), std::invalid_argument);
}

TEST_CASE("storage order and evaluation") {
  auto c = chart3();
  TensorField t = sample_11(c);
  Point p{{{"x", 0.2}, {"y", -0.3}, {"z", 0.4}}};
  EvaluatedTensor v = tensor_eval(t, p);
  CHECK(v.at({0, 0}) == doctest::Approx(2.2));
  CHECK(v.at({0, 2}) == doctest::Approx(0.08));
  CHECK(v.at({2, 1}) == doctest::Approx(0.16));
  CHECK(v.rank_up() == 1);
  CHECK(v.rank_down() == 1);
}

TEST_CASE("trace of identity") {
  auto c = chart3();
  TensorField id(c, 1, 1);
  for (int i = 0; i < 3; ++i) id.at({i, i}) = Expr::constant(1.0);
  TensorField tr = contract(id, 0, 0);
  CHECK(tr.slots() == 0);
  CHECK(tr.at(std::initializer_list<int>{}).constant_value() == 3.0);
}

TEST_CASE("contraction of a product matches matrix multiplication") {
  auto c = chart3();
  TensorField A = sample_11(c);
  TensorField B = sample_11b(c);
  // product slot order: A-up, B-up, A-low, B-low; contracting B's upper
  // against A's lower leaves (A-up, B-low) = the matrix product A*B.
  TensorField AB = contract(tensor_product(A, B), 1, 0);
  Point p{{{"x", 0.1}, {"y", 0.25}, {"z", -0.4}}};
  EvaluatedTensor va = tensor_eval(A, p);
  EvaluatedTensor vb = tensor_eval(B, p);
  EvaluatedTensor vab = tensor_eval(AB, p);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double expect = 0.0;
      for (int k = 0; k < 3; ++k) expect += va.at({i, k}) * vb.at({k, j});
      CHECK(vab.at({i, j}) == doctest::Approx(expect).epsilon(1e-14));
    }
}

TEST_CASE("contraction is linear") {
  auto c = chart3();
  TensorField A = sample_11(c);
  TensorField B = sample_11b(c);
  const double a = 1.7, b = -2.3;
  TensorField lhs = contract(add_scale(A, B, a, b), 0, 0);
  TensorField rhs = add_scale(contract(A, 0, 0), contract(B, 0, 0), a, b);
  auto pts = sample_chart(c, 20, 11);
  CHECK(max_residual(lhs, rhs, pts) <= 1e-12);
}

TEST_CASE("numeric contraction agrees with symbolic contraction") {
  auto c = chart3();
  TensorField A = sample_11(c);
  TensorField B = sample_11b(c);
  TensorField prod = tensor_product(A, B);  // (2,2)
  Point p{{{"x", -0.2}, {"y", 0.3}, {"z", 0.1}}};
  EvaluatedTensor ev_then = contract(tensor_eval(prod, p), 0, 1);
  EvaluatedTensor then_ev = tensor_eval(contract(prod, 0, 1), p);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(ev_then.at({i, j}) == doctest::Approx(then_ev.at({i, j})).epsilon(1e-14));
}

TEST_CASE("scale by expression") {
  auto c = chart3();
  TensorField A = sample_11(c);
  TensorField sA = scale(A, Expr::coordinate("z"));
  Point p{{{"x", 0.2}, {"y", -0.3}, {"z", 0.4}}};
  EvaluatedTensor va = tensor_eval(A, p);
  EvaluatedTensor vs = tensor_eval(sA, p);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(vs.at({i, j}) == doctest::Approx(0.4 * va.at({i, j})).epsilon(1e-15));
}

TEST_CASE("shape validation") {
  auto c = chart3();
  TensorField A = sample_11(c);
  TensorField w(c, 0, 1);
  CHECK_THROWS_AS(add_scale(A, w, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(contract(w, 0, 0), std::invalid_argument);
  auto other = Chart::make({"p", "q", "r"});
  TensorField B(other, 1, 1);
  CHECK_THROWS_AS(tensor_product(A, B), std::invalid_argument);
}

TEST_CASE("sampler is deterministic and respects the domain") {
  auto c = Chart::make({"u", "v"}, {{{0.0, 1.0}}, {{-3.0, -2.0}}});
  auto p1 = sample_chart(c, 16, 42);
  auto p2 = sample_chart(c, 16, 42);
  auto p3 = sample_chart(c, 16, 43);
  REQUIRE(p1.size() == 16);
  bool identical = true, differs = false;
  for (int i = 0; i < 16; ++i) {
    identical = identical && p1[i].values == p2[i].values;
    differs = differs || p1[i].values != p3[i].values;
    CHECK(p1[i].at("u") >= 0.0);
    CHECK(p1[i].at("u") < 1.0);
    CHECK(p1[i].at("v") >= -3.0);
    CHECK(p1[i].at("v") < -2.0);
  }
  CHECK(identical);
  CHECK(differs);
}

TEST_CASE("residual helpers") {
  auto c = chart3();
  TensorField A = sample_11(c);
  TensorField B = A;
  auto pts = sample_chart(c, 8, 5);
  CHECK(max_residual(A, B, pts) == 0.0);
  TensorField zero(c, 1, 1);
  CHECK(max_abs_over(zero, pts) == 0.0);
  CHECK(max_abs_over(A, pts) > 0.0);
}
