#include "wacs/riemann.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace wacs {

namespace {

bool is_zero_expr(const Expr& e) {
  return e.is_constant() && e.constant_value() == 0.0;
}

bool is_diagonal(const TensorField& g) {
  const int d = g.dim();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (i != j && !is_zero_expr(g.at({i, j}))) return false;
  return true;
}

/// Determinants of all square submatrices reachable while deleting one
/// row and one column, memoized on (row mask, column mask) so cofactor
/// expansion shares its minors across the whole adjugate.
class MinorTable {
 public:
  explicit MinorTable(const TensorField& g) : g_(g), d_(g.dim()) {}

  Expr det(std::uint32_t rows, std::uint32_t cols) {
    if (rows == 0) return Expr::constant(1.0);
    std::uint64_t key = (static_cast<std::uint64_t>(rows) << 16) | cols;
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;

    int r = lowest_bit(rows);
    std::uint32_t rest_rows = rows & (rows - 1);
    Expr sum = Expr::constant(0.0);
    int sign = 1;
    for (int c = 0; c < d_; ++c) {
      if (!(cols & (1u << c))) continue;
      const Expr& entry = g_.at({r, c});
      if (!is_zero_expr(entry)) {
        Expr sub = det(rest_rows, cols & ~(1u << c));
        Expr term = entry * sub;
        sum = (sign > 0) ? sum + term : sum - term;
      }
      sign = -sign;
    }
    memo_.emplace(key, sum);
    return sum;
  }

 private:
  static int lowest_bit(std::uint32_t m) {
    int i = 0;
    while (!(m & 1u)) {
      m >>= 1;
      ++i;
    }
    return i;
  }

  const TensorField& g_;
  int d_;
  std::unordered_map<std::uint64_t, Expr> memo_;
};

}  // namespace

MetricData build_metric(const TensorField& g) {
  if (g.rank_up() != 0 || g.rank_down() != 2)
    throw std::invalid_argument("metric must be a (0,2) field");
  const int d = g.dim();
  if (d > 16) throw std::invalid_argument("metric dimension too large");

  TensorField g_inv(g.chart(), 2, 0);
  Expr det;

  if (is_diagonal(g)) {
    det = Expr::constant(1.0);
    for (int i = 0; i < d; ++i) det = det * g.at({i, i});
    for (int i = 0; i < d; ++i)
      g_inv.at({i, i}) = Expr::constant(1.0) / g.at({i, i});
  } else {
    MinorTable minors(g);
    const std::uint32_t full = (1u << d) - 1;
    det = minors.det(full, full);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        // inverse[i][j] = cofactor_{ji} / det
        Expr minor = minors.det(full & ~(1u << j), full & ~(1u << i));
        Expr cof = ((i + j) % 2 == 0) ? minor : -minor;
        g_inv.at({i, j}) = cof / det;
      }
    }
  }

  // dg[m][i][j] = d_m g_ij, built once and shared below
  std::vector<Expr> dg(static_cast<std::size_t>(d) * d * d);
  auto dg_at = [&](int m, int i, int j) -> Expr& {
    return dg[(static_cast<std::size_t>(m) * d + i) * d + j];
  };
  for (int m = 0; m < d; ++m)
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        Expr e = diff(g.at({i, j}), g.chart()->coord(m));
        dg_at(m, i, j) = e;
        dg_at(m, j, i) = e;
      }

  TensorField gamma(g.chart(), 1, 2);
  const Expr half = Expr::constant(0.5);
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        Expr sum = Expr::constant(0.0);
        for (int m = 0; m < d; ++m) {
          if (is_zero_expr(g_inv.at({k, m}))) continue;
          sum = sum + g_inv.at({k, m}) *
                          (dg_at(i, m, j) + dg_at(j, m, i) - dg_at(m, i, j));
        }
        Expr val = half * sum;
        gamma.at({k, i, j}) = val;
        gamma.at({k, j, i}) = val;
      }

  return MetricData{g, std::move(g_inv), std::move(gamma), std::move(det)};
}

CurvatureData build_curvature(const MetricData& m) {
  const TensorField& gamma = m.gamma;
  const ChartPtr& chart = m.g.chart();
  const int d = m.g.dim();

  // dgamma[i][k][j l] = d_i gamma^k_{jl}
  std::vector<TensorField> dgamma;
  dgamma.reserve(d);
  for (int i = 0; i < d; ++i) {
    TensorField dg(chart, 1, 2);
    for (int k = 0; k < d; ++k)
      for (int j = 0; j < d; ++j)
        for (int l = j; l < d; ++l) {
          Expr e = diff(gamma.at({k, j, l}), chart->coord(i));
          dg.at({k, j, l}) = e;
          dg.at({k, l, j}) = e;
        }
    dgamma.push_back(std::move(dg));
  }

  TensorField riemann(chart, 1, 3);
  for (int l = 0; l < d; ++l)
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j)
        for (int k = 0; k < d; ++k) {
          Expr sum = dgamma[i].at({l, j, k}) - dgamma[j].at({l, i, k});
          for (int mm = 0; mm < d; ++mm)
            sum = sum + gamma.at({l, i, mm}) * gamma.at({mm, j, k}) -
                  gamma.at({l, j, mm}) * gamma.at({mm, i, k});
          riemann.at({l, i, j, k}) = sum;
          riemann.at({l, j, i, k}) = -sum;
        }

  TensorField ricci(chart, 0, 2);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) {
      Expr sum = Expr::constant(0.0);
      for (int l = 0; l < d; ++l) sum = sum + riemann.at({l, l, j, k});
      ricci.at({j, k}) = sum;
    }

  TensorField ricci_op(chart, 1, 1);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Expr sum = Expr::constant(0.0);
      for (int k = 0; k < d; ++k) {
        if (is_zero_expr(m.g_inv.at({i, k}))) continue;
        sum = sum + m.g_inv.at({i, k}) * ricci.at({k, j});
      }
      ricci_op.at({i, j}) = sum;
    }

  Expr scalar = Expr::constant(0.0);
  for (int i = 0; i < d; ++i) scalar = scalar + ricci_op.at({i, i});

  return CurvatureData{std::move(riemann), std::move(ricci),
                       std::move(ricci_op), std::move(scalar)};
}

TensorField covariant_derivative(const MetricData& m, const TensorField& T) {
  const int d = T.dim();
  const int r = T.rank_up();
  const int s = T.rank_down();
  TensorField out(T.chart(), r, s + 1);
  std::vector<int> oidx(r + s + 1), tidx(r + s);
  const std::size_t n = detail::pow_size(d, r + s + 1);
  for (std::size_t f = 0; f < n; ++f) {
    detail::decode_index(f, d, oidx);
    // slot layout of out: uppers, then (direction c, original lowers)
    const int c = oidx[r];
    for (int t = 0; t < r; ++t) tidx[t] = oidx[t];
    for (int t = 0; t < s; ++t) tidx[r + t] = oidx[r + 1 + t];

    Expr sum = diff(T.at(tidx), T.chart()->coord(c));
    for (int t = 0; t < r; ++t) {
      int save = tidx[t];
      for (int mm = 0; mm < d; ++mm) {
        tidx[t] = mm;
        sum = sum + m.gamma.at({save, c, mm}) * T.at(tidx);
      }
      tidx[t] = save;
    }
    for (int t = 0; t < s; ++t) {
      int save = tidx[r + t];
      for (int mm = 0; mm < d; ++mm) {
        tidx[r + t] = mm;
        sum = sum - m.gamma.at({mm, c, save}) * T.at(tidx);
      }
      tidx[r + t] = save;
    }
    out.at(oidx) = sum;
  }
  return out;
}

TensorField lie_derivative(const TensorField& T, const TensorField& V) {
  if (V.rank_up() != 1 || V.rank_down() != 0)
    throw std::invalid_argument("lie_derivative needs a (1,0) direction field");
  if (T.chart() != V.chart())
    throw std::invalid_argument("fields live on different charts");
  if (T.slots() > 4)
    throw std::invalid_argument("lie_derivative supports total rank <= 4");

  const int d = T.dim();
  const int r = T.rank_up();
  const int s = T.rank_down();
  const ChartPtr& chart = T.chart();

  // dV[m][a] = d_m V^a
  std::vector<Expr> dV(static_cast<std::size_t>(d) * d);
  for (int mm = 0; mm < d; ++mm)
    for (int a = 0; a < d; ++a)
      dV[static_cast<std::size_t>(mm) * d + a] = diff(V.at({a}), chart->coord(mm));

  TensorField out(chart, r, s);
  std::vector<int> idx(r + s), tidx(r + s);
  const std::size_t n = detail::pow_size(d, r + s);
  for (std::size_t f = 0; f < n; ++f) {
    detail::decode_index(f, d, idx);
    Expr sum = Expr::constant(0.0);
    for (int mm = 0; mm < d; ++mm)
      sum = sum + V.at({mm}) * diff(T.at(idx), chart->coord(mm));
    tidx = idx;
    for (int t = 0; t < r; ++t) {
      int save = tidx[t];
      for (int mm = 0; mm < d; ++mm) {
        tidx[t] = mm;
        sum = sum - dV[static_cast<std::size_t>(mm) * d + save] * T.at(tidx);
      }
      tidx[t] = save;
    }
    for (int t = 0; t < s; ++t) {
      int save = tidx[r + t];
      for (int mm = 0; mm < d; ++mm) {
        tidx[r + t] = mm;
        sum = sum + dV[static_cast<std::size_t>(save) * d + mm] * T.at(tidx);
      }
      tidx[r + t] = save;
    }
    out.at(idx) = sum;
  }
  return out;
}

TensorField exterior_derivative(const TensorField& omega, double factor) {
  if (omega.rank_up() != 0)
    throw std::invalid_argument("exterior derivative needs a (0,p) form");
  const int p = omega.rank_down();
  if (p < 1 || p > 3)
    throw std::invalid_argument("exterior derivative supports 1 <= p <= 3");
  const int d = omega.dim();
  const ChartPtr& chart = omega.chart();
  const Expr c = Expr::constant(factor);

  TensorField out(chart, 0, p + 1);
  std::vector<int> oidx(p + 1), widx(p);
  const std::size_t n = detail::pow_size(d, p + 1);
  for (std::size_t f = 0; f < n; ++f) {
    detail::decode_index(f, d, oidx);
    Expr sum = Expr::constant(0.0);
    for (int t = 0; t <= p; ++t) {
      int w = 0;
      for (int u = 0; u <= p; ++u)
        if (u != t) widx[w++] = oidx[u];
      Expr term = diff(omega.at(widx), chart->coord(oidx[t]));
      sum = (t % 2 == 0) ? sum + term : sum - term;
    }
    out.at(oidx) = c * sum;
  }
  return out;
}

TensorField wedge_1_2(const TensorField& eta, const TensorField& Phi) {
  if (eta.rank_up() != 0 || eta.rank_down() != 1 || Phi.rank_up() != 0 ||
      Phi.rank_down() != 2)
    throw std::invalid_argument("wedge_1_2 needs a 1-form and a 2-form");
  const int d = eta.dim();
  TensorField out(eta.chart(), 0, 3);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        out.at({i, j, k}) = eta.at({i}) * Phi.at({j, k}) +
                            eta.at({j}) * Phi.at({k, i}) +
                            eta.at({k}) * Phi.at({i, j});
  return out;
}

TensorField gradient(const MetricData& m, const Expr& v) {
  const int d = m.g.dim();
  const ChartPtr& chart = m.g.chart();
  TensorField out(chart, 1, 0);
  std::vector<Expr> dv(d);
  for (int j = 0; j < d; ++j) dv[j] = diff(v, chart->coord(j));
  for (int i = 0; i < d; ++i) {
    Expr sum = Expr::constant(0.0);
    for (int j = 0; j < d; ++j) sum = sum + m.g_inv.at({i, j}) * dv[j];
    out.at({i}) = sum;
  }
  return out;
}

TensorField hessian(const MetricData& m, const Expr& v) {
  const int d = m.g.dim();
  const ChartPtr& chart = m.g.chart();
  TensorField out(chart, 0, 2);
  std::vector<Expr> dv(d);
  for (int j = 0; j < d; ++j) dv[j] = diff(v, chart->coord(j));
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      Expr sum = diff(dv[i], chart->coord(j));
      for (int mm = 0; mm < d; ++mm)
        sum = sum - m.gamma.at({mm, i, j}) * dv[mm];
      out.at({i, j}) = sum;
      out.at({j, i}) = sum;
    }
  return out;
}

std::vector<Point> sample_points(const MetricData& m, int count,
                                 std::uint64_t seed, double det_floor) {
  PointSampler sampler(m.g.chart(), seed);
  std::vector<Point> out;
  out.reserve(count);
  long attempts = 0;
  const long max_attempts = 10000L * std::max(count, 1);
  while (static_cast<int>(out.size()) < count) {
    if (++attempts > max_attempts)
      throw std::runtime_error("could not sample points with nondegenerate metric");
    Point p = sampler.next();
    Evaluator ev(p);
    if (std::abs(ev.value(m.det)) < det_floor) continue;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace wacs
