#include "wacs/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wacs {

Chart::Chart(std::vector<std::string> coords,
             std::vector<std::array<double, 2>> domain)
    : coords_(std::move(coords)), domain_(std::move(domain)) {
  if (coords_.empty()) throw std::invalid_argument("chart needs at least one coordinate");
  if (domain_.size() != coords_.size())
    throw std::invalid_argument("chart domain size must match coordinate count");
  for (const auto& iv : domain_)
    if (!(iv[0] < iv[1])) throw std::invalid_argument("chart interval must have positive length");
  for (std::size_t i = 0; i < coords_.size(); ++i)
    for (std::size_t j = i + 1; j < coords_.size(); ++j)
      if (coords_[i] == coords_[j])
        throw std::invalid_argument("duplicate coordinate name '" + coords_[i] + "'");
}

std::shared_ptr<const Chart> Chart::make(std::vector<std::string> coords) {
  std::vector<std::array<double, 2>> domain(coords.size(), kDefaultInterval);
  return std::make_shared<const Chart>(std::move(coords), std::move(domain));
}

std::shared_ptr<const Chart> Chart::make(
    std::vector<std::string> coords, std::vector<std::array<double, 2>> domain) {
  return std::make_shared<const Chart>(std::move(coords), std::move(domain));
}

int Chart::coord_index(std::string_view name) const {
  for (std::size_t i = 0; i < coords_.size(); ++i)
    if (coords_[i] == name) return static_cast<int>(i);
  return -1;
}

namespace detail {

std::size_t pow_size(int dim, int count) {
  std::size_t n = 1;
  for (int i = 0; i < count; ++i) n *= static_cast<std::size_t>(dim);
  return n;
}

void decode_index(std::size_t flat, int dim, std::span<int> out) {
  for (int i = static_cast<int>(out.size()) - 1; i >= 0; --i) {
    out[i] = static_cast<int>(flat % static_cast<std::size_t>(dim));
    flat /= static_cast<std::size_t>(dim);
  }
}

}  // namespace detail

EvaluatedTensor::EvaluatedTensor(int rank_up, int rank_down, int dim)
    : r_(rank_up), s_(rank_down), dim_(dim),
      comps_(detail::pow_size(dim, rank_up + rank_down), 0.0) {
  if (rank_up < 0 || rank_down < 0 || dim <= 0)
    throw std::invalid_argument("bad tensor shape");
}

double EvaluatedTensor::at(std::span<const int> idx) const {
  return comps_[detail::flat_index(idx, dim_)];
}

double& EvaluatedTensor::at(std::span<const int> idx) {
  return comps_[detail::flat_index(idx, dim_)];
}

double EvaluatedTensor::max_abs() const {
  double m = 0.0;
  for (double v : comps_) m = std::max(m, std::abs(v));
  return m;
}

TensorField::TensorField(ChartPtr chart, int rank_up, int rank_down)
    : chart_(std::move(chart)), r_(rank_up), s_(rank_down) {
  if (!chart_) throw std::invalid_argument("tensor field needs a chart");
  if (rank_up < 0 || rank_down < 0)
    throw std::invalid_argument("bad tensor valence");
  comps_.assign(detail::pow_size(chart_->dim(), r_ + s_), Expr());
}

const Expr& TensorField::at(std::span<const int> idx) const {
  if (static_cast<int>(idx.size()) != slots())
    throw std::invalid_argument("index count does not match tensor valence");
  return comps_[detail::flat_index(idx, dim())];
}

Expr& TensorField::at(std::span<const int> idx) {
  if (static_cast<int>(idx.size()) != slots())
    throw std::invalid_argument("index count does not match tensor valence");
  return comps_[detail::flat_index(idx, dim())];
}

EvaluatedTensor tensor_eval(const TensorField& t, Evaluator& ev) {
  EvaluatedTensor out(t.rank_up(), t.rank_down(), t.dim());
  auto src = t.components();
  auto dst = out.components();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = ev.value(src[i]);
  return out;
}

EvaluatedTensor tensor_eval(const TensorField& t, const Point& p,
                            const ParamMap& params) {
  Evaluator ev(p, params);
  return tensor_eval(t, ev);
}

namespace {

void check_contraction_slots(int r, int s, int upper_slot, int lower_slot) {
  if (upper_slot < 0 || upper_slot >= r || lower_slot < 0 || lower_slot >= s)
    throw std::invalid_argument("contraction slot out of range");
}

}  // namespace

TensorField contract(const TensorField& t, int upper_slot, int lower_slot) {
  check_contraction_slots(t.rank_up(), t.rank_down(), upper_slot, lower_slot);
  const int d = t.dim();
  const int rs = t.slots();
  TensorField out(t.chart(), t.rank_up() - 1, t.rank_down() - 1);
  std::vector<int> oidx(rs - 2), idx(rs);
  const std::size_t n = detail::pow_size(d, rs - 2);
  const int low_pos = t.rank_up() + lower_slot;
  for (std::size_t f = 0; f < n; ++f) {
    detail::decode_index(f, d, oidx);
    Expr sum;
    for (int k = 0; k < d; ++k) {
      int src = 0;
      for (int slot = 0; slot < rs; ++slot) {
        if (slot == upper_slot || slot == low_pos) {
          idx[slot] = k;
        } else {
          idx[slot] = oidx[src++];
        }
      }
      sum = sum + t.at(idx);
    }
    if (!oidx.empty())
      out.at(oidx) = sum;
    else
      out.at(std::span<const int>{}) = sum;
  }
  return out;
}

EvaluatedTensor contract(const EvaluatedTensor& t, int upper_slot, int lower_slot) {
  check_contraction_slots(t.rank_up(), t.rank_down(), upper_slot, lower_slot);
  const int d = t.dim();
  const int rs = t.rank_up() + t.rank_down();
  EvaluatedTensor out(t.rank_up() - 1, t.rank_down() - 1, d);
  std::vector<int> oidx(rs - 2), idx(rs);
  const std::size_t n = detail::pow_size(d, rs - 2);
  const int low_pos = t.rank_up() + lower_slot;
  for (std::size_t f = 0; f < n; ++f) {
    detail::decode_index(f, d, oidx);
    double sum = 0.0;
    for (int k = 0; k < d; ++k) {
      int src = 0;
      for (int slot = 0; slot < rs; ++slot) {
        if (slot == upper_slot || slot == low_pos) {
          idx[slot] = k;
        } else {
          idx[slot] = oidx[src++];
        }
      }
      sum += t.at(idx);
    }
    out.at(oidx) = sum;
  }
  return out;
}

namespace {

void check_same_shape(const TensorField& A, const TensorField& B) {
  if (A.chart() != B.chart())
    throw std::invalid_argument("tensor fields live on different charts");
  if (A.rank_up() != B.rank_up() || A.rank_down() != B.rank_down())
    throw std::invalid_argument("tensor fields have different valence");
}

}  // namespace

TensorField add_scale(const TensorField& A, const TensorField& B, double a,
                      double b) {
  check_same_shape(A, B);
  TensorField out(A.chart(), A.rank_up(), A.rank_down());
  const Expr ea = Expr::constant(a);
  const Expr eb = Expr::constant(b);
  auto ca = A.components();
  auto cb = B.components();
  auto co = out.components();
  for (std::size_t i = 0; i < co.size(); ++i) co[i] = ea * ca[i] + eb * cb[i];
  return out;
}

TensorField tensor_product(const TensorField& A, const TensorField& B) {
  if (A.chart() != B.chart())
    throw std::invalid_argument("tensor fields live on different charts");
  const int d = A.dim();
  TensorField out(A.chart(), A.rank_up() + B.rank_up(),
                  A.rank_down() + B.rank_down());
  std::vector<int> oidx(out.slots()), aidx(A.slots()), bidx(B.slots());
  const std::size_t n = detail::pow_size(d, out.slots());
  for (std::size_t f = 0; f < n; ++f) {
    detail::decode_index(f, d, oidx);
    int p = 0;
    for (int i = 0; i < A.rank_up(); ++i) aidx[i] = oidx[p++];
    for (int i = 0; i < B.rank_up(); ++i) bidx[i] = oidx[p++];
    for (int i = 0; i < A.rank_down(); ++i) aidx[A.rank_up() + i] = oidx[p++];
    for (int i = 0; i < B.rank_down(); ++i) bidx[B.rank_up() + i] = oidx[p++];
    out.at(oidx) = A.at(aidx) * B.at(bidx);
  }
  return out;
}

TensorField scale(const TensorField& A, const Expr& c) {
  TensorField out(A.chart(), A.rank_up(), A.rank_down());
  auto ca = A.components();
  auto co = out.components();
  for (std::size_t i = 0; i < co.size(); ++i) co[i] = c * ca[i];
  return out;
}

TensorField compose(const TensorField& A, const TensorField& B) {
  if (A.rank_up() != 1 || A.rank_down() != 1 || B.rank_up() != 1 ||
      B.rank_down() != 1 || A.chart() != B.chart())
    throw std::invalid_argument("compose needs two (1,1) fields on one chart");
  const int d = A.dim();
  TensorField out(A.chart(), 1, 1);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Expr sum = Expr::constant(0.0);
      for (int m = 0; m < d; ++m) sum = sum + A.at({i, m}) * B.at({m, j});
      out.at({i, j}) = sum;
    }
  return out;
}

TensorField apply(const TensorField& A, const TensorField& v) {
  if (A.rank_up() != 1 || A.rank_down() != 1 || v.rank_up() != 1 ||
      v.rank_down() != 0 || A.chart() != v.chart())
    throw std::invalid_argument("apply needs a (1,1) field and a (1,0) field");
  const int d = A.dim();
  TensorField out(A.chart(), 1, 0);
  for (int i = 0; i < d; ++i) {
    Expr sum = Expr::constant(0.0);
    for (int m = 0; m < d; ++m) sum = sum + A.at({i, m}) * v.at({m});
    out.at({i}) = sum;
  }
  return out;
}

PointSampler::PointSampler(ChartPtr chart, std::uint64_t seed)
    : chart_(std::move(chart)), rng_(seed) {}

Point PointSampler::next() {
  Point p;
  for (int i = 0; i < chart_->dim(); ++i) {
    const auto& iv = chart_->domain()[i];
    // canonical 53-bit uniform in [0,1); identical on every platform
    double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    p.values[chart_->coord(i)] = iv[0] + u * (iv[1] - iv[0]);
  }
  return p;
}

std::vector<Point> sample_chart(const ChartPtr& chart, int count,
                                std::uint64_t seed) {
  PointSampler s(chart, seed);
  std::vector<Point> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(s.next());
  return out;
}

double max_residual(const TensorField& A, const TensorField& B,
                    std::span<const Point> points, const ParamMap& params) {
  check_same_shape(A, B);
  double num = 0.0, den = 1.0;
  for (const Point& p : points) {
    Evaluator ev(p, params);
    auto ca = A.components();
    auto cb = B.components();
    for (std::size_t i = 0; i < ca.size(); ++i) {
      double va = ev.value(ca[i]);
      double vb = ev.value(cb[i]);
      num = std::max(num, std::abs(va - vb));
      den = std::max({den, std::abs(va), std::abs(vb)});
    }
  }
  return num / den;
}

double max_abs_over(const TensorField& A, std::span<const Point> points,
                    const ParamMap& params) {
  double m = 0.0;
  for (const Point& p : points) {
    Evaluator ev(p, params);
    for (const Expr& e : A.components()) m = std::max(m, std::abs(ev.value(e)));
  }
  return m;
}

}  // namespace wacs
