#include "wacs/zoo.hpp"

#include <cmath>
#include <cstdio>

namespace wacs {

namespace {

Expr c(double v) { return Expr::constant(v); }

template <class... Args>
std::string fmt(const char* f, Args... a) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

}  // namespace

ZooInstance kenmotsu_model(int n, double beta, double c_) {
  if (n < 1) throw std::invalid_argument("kenmotsu_model needs n >= 1");
  if (!(1.0 + c_ > 0.0))
    throw std::invalid_argument("kenmotsu_model needs 1 + c > 0");
  const int d = 2 * n + 1;
  std::vector<std::string> coords;
  coords.reserve(d);
  for (int i = 1; i <= 2 * n; ++i) coords.push_back("x" + std::to_string(i));
  coords.push_back("z");
  ChartPtr ch = Chart::make(coords);

  Expr warp = exp(c(2.0 * beta) * Expr::coordinate("z"));
  TensorField g(ch, 0, 2), f(ch, 1, 1), Q(ch, 1, 1);
  TensorField xi(ch, 1, 0), eta(ch, 0, 1);
  for (int i = 0; i < 2 * n; ++i) {
    g.at({i, i}) = warp;
    Q.at({i, i}) = c(1.0 + c_);
  }
  g.at({d - 1, d - 1}) = c(1.0);
  Q.at({d - 1, d - 1}) = c(1.0);
  const double s = std::sqrt(1.0 + c_);
  for (int k = 0; k < n; ++k) {
    f.at({n + k, k}) = c(s);
    f.at({k, n + k}) = c(-s);
  }
  xi.at({d - 1}) = c(1.0);
  eta.at({d - 1}) = c(1.0);

  WacsBundle b(fmt("model(n=%d,beta=%g,c=%g)", n, beta, c_), std::move(f),
               std::move(Q), std::move(xi), std::move(eta), std::move(g),
               c(beta));
  SolitonData sol;
  TensorField V(ch, 1, 0);
  V.at({d - 1}) = c(1.0);
  sol.V = std::move(V);
  sol.lambda = beta - (1.0 + c_) * beta * beta;
  sol.mu = -sol.lambda;
  return {std::move(b), std::move(sol)};
}

FlatBase flat_weak_kaehler(std::vector<double> scales) {
  const int m = static_cast<int>(scales.size());
  if (m < 1) throw std::invalid_argument("flat_weak_kaehler needs a scale");
  for (double s : scales)
    if (s == 0.0)
      throw std::invalid_argument("flat_weak_kaehler scales must be nonzero");
  std::vector<std::string> coords;
  for (int i = 1; i <= 2 * m; ++i) coords.push_back("y" + std::to_string(i));
  ChartPtr ch = Chart::make(coords);
  FlatBase out{ch, TensorField(ch, 0, 2), TensorField(ch, 1, 1), scales};
  for (int i = 0; i < 2 * m; ++i) out.g.at({i, i}) = c(1.0);
  for (int i = 0; i < m; ++i) {
    out.J.at({2 * i + 1, 2 * i}) = c(scales[i]);
    out.J.at({2 * i, 2 * i + 1}) = c(-scales[i]);
  }
  return out;
}

WacsBundle warped_product(const FlatBase& base, const Expr& sigma) {
  const int bd = base.chart->dim();
  for (const std::string& name : base.chart->coords())
    if (depends_on(sigma, name))
      throw std::invalid_argument("warp factor may depend on t only");
  std::vector<std::string> coords{"t"};
  for (const std::string& name : base.chart->coords()) coords.push_back(name);
  ChartPtr ch = Chart::make(coords);

  TensorField g(ch, 0, 2), f(ch, 1, 1), Q(ch, 1, 1);
  TensorField xi(ch, 1, 0), eta(ch, 0, 1);
  g.at({0, 0}) = c(1.0);
  Expr s2 = sigma * sigma;
  for (int i = 0; i < bd; ++i)
    for (int j = 0; j < bd; ++j) {
      g.at({i + 1, j + 1}) = s2 * base.g.at({i, j});
      f.at({i + 1, j + 1}) = base.J.at({i, j});
      Expr q;  // -(J J)^i_j
      for (int k = 0; k < bd; ++k)
        q = q - base.J.at({i, k}) * base.J.at({k, j});
      Q.at({i + 1, j + 1}) = q;
    }
  Q.at({0, 0}) = c(1.0);
  xi.at({0}) = c(1.0);
  eta.at({0}) = c(1.0);

  std::string scales = "[";
  for (std::size_t i = 0; i < base.scales.size(); ++i)
    scales += (i ? "," : "") + fmt("%g", base.scales[i]);
  scales += "]";
  Expr beta = diff(sigma, "t") / sigma;
  return WacsBundle(
      "warped(scales=" + scales + ",sigma=" + to_string(sigma) + ")",
      std::move(f), std::move(Q), std::move(xi), std::move(eta), std::move(g),
      std::move(beta));
}

ZooInstance perturbed_model(int n, double beta, double c_, double eps) {
  ZooInstance base = kenmotsu_model(n, beta, c_);
  TensorField Q = base.bundle.Q();
  Q.at({0, 0}) = Q.at({0, 0}) * c(1.0 + eps);
  WacsBundle b(fmt("perturbed(n=%d,beta=%g,c=%g,eps=%g)", n, beta, c_, eps),
               base.bundle.f(), std::move(Q), base.bundle.xi(),
               base.bundle.eta(), base.bundle.g(), c(beta));
  return {std::move(b), std::nullopt};
}

}  // namespace wacs
