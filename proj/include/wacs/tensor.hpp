#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "wacs/expr.hpp"

namespace wacs {

/// A coordinate chart: ordered coordinate names plus a box domain,
/// one closed interval per coordinate. Charts are shared immutably.
class Chart {
 public:
  static constexpr std::array<double, 2> kDefaultInterval{-0.5, 0.5};

  static std::shared_ptr<const Chart> make(std::vector<std::string> coords);
  static std::shared_ptr<const Chart> make(
      std::vector<std::string> coords,
      std::vector<std::array<double, 2>> domain);

  int dim() const { return static_cast<int>(coords_.size()); }
  const std::vector<std::string>& coords() const { return coords_; }
  const std::string& coord(int i) const { return coords_.at(i); }
  const std::vector<std::array<double, 2>>& domain() const { return domain_; }

  /// Index of a coordinate name; -1 if absent.
  int coord_index(std::string_view name) const;

  Chart(std::vector<std::string> coords,
        std::vector<std::array<double, 2>> domain);

 private:
  std::vector<std::string> coords_;
  std::vector<std::array<double, 2>> domain_;
};

using ChartPtr = std::shared_ptr<const Chart>;

namespace detail {

std::size_t pow_size(int dim, int count);

inline std::size_t flat_index(std::span<const int> idx, int dim) {
  std::size_t f = 0;
  for (int i : idx) f = f * static_cast<std::size_t>(dim) + static_cast<std::size_t>(i);
  return f;
}

void decode_index(std::size_t flat, int dim, std::span<int> out);

}  // namespace detail

/// Numeric value of a tensor field at one point. Components are stored
/// row-major with all upper (contravariant) slots first, then all lower
/// (covariant) slots.
class EvaluatedTensor {
 public:
  EvaluatedTensor(int rank_up, int rank_down, int dim);

  int rank_up() const { return r_; }
  int rank_down() const { return s_; }
  int dim() const { return dim_; }

  double at(std::span<const int> idx) const;
  double& at(std::span<const int> idx);
  double at(std::initializer_list<int> idx) const { return at(std::span<const int>(idx.begin(), idx.size())); }
  double& at(std::initializer_list<int> idx) { return at(std::span<const int>(idx.begin(), idx.size())); }

  std::span<const double> components() const { return comps_; }
  std::span<double> components() { return comps_; }

  double max_abs() const;

 private:
  int r_, s_, dim_;
  std::vector<double> comps_;
};

/// A tensor field of valence (rank_up, rank_down) on a chart, with one
/// symbolic component per index combination. Same slot and storage
/// order as EvaluatedTensor. Entry [i][j] of a (1,1) field is the
/// coefficient sending basis vector j to component i.
class TensorField {
 public:
  TensorField(ChartPtr chart, int rank_up, int rank_down);

  int rank_up() const { return r_; }
  int rank_down() const { return s_; }
  int slots() const { return r_ + s_; }
  int dim() const { return chart_->dim(); }
  const ChartPtr& chart() const { return chart_; }

  const Expr& at(std::span<const int> idx) const;
  Expr& at(std::span<const int> idx);
  const Expr& at(std::initializer_list<int> idx) const { return at(std::span<const int>(idx.begin(), idx.size())); }
  Expr& at(std::initializer_list<int> idx) { return at(std::span<const int>(idx.begin(), idx.size())); }

  std::span<const Expr> components() const { return comps_; }
  std::span<Expr> components() { return comps_; }

 private:
  ChartPtr chart_;
  int r_, s_;
  std::vector<Expr> comps_;
};

/// Evaluates every component at the evaluator's point.
EvaluatedTensor tensor_eval(const TensorField& t, Evaluator& ev);
EvaluatedTensor tensor_eval(const TensorField& t, const Point& p,
                            const ParamMap& params = {});

/// Contraction of one upper against one lower slot (0-based within the
/// upper and lower groups respectively). Valence drops by (1,1).
TensorField contract(const TensorField& t, int upper_slot, int lower_slot);
EvaluatedTensor contract(const EvaluatedTensor& t, int upper_slot, int lower_slot);

/// a*A + b*B for same-valence fields on the same chart.
TensorField add_scale(const TensorField& A, const TensorField& B, double a,
                      double b);

/// Componentwise product with outer slot order: A uppers, B uppers,
/// A lowers, B lowers.
TensorField tensor_product(const TensorField& A, const TensorField& B);

/// Multiplies every component by a scalar expression.
TensorField scale(const TensorField& A, const Expr& c);

/// Operator composition of (1,1) fields: (A B)^i_j = A^i_m B^m_j.
TensorField compose(const TensorField& A, const TensorField& B);

/// A (1,1) operator applied to a (1,0) vector field.
TensorField apply(const TensorField& A, const TensorField& v);

/// Draws points uniformly from a chart's box domain. The stream is
/// fully determined by the seed (no library distributions involved).
class PointSampler {
 public:
  PointSampler(ChartPtr chart, std::uint64_t seed);

  Point next();

 private:
  ChartPtr chart_;
  std::mt19937_64 rng_;
};

std::vector<Point> sample_chart(const ChartPtr& chart, int count,
                                std::uint64_t seed);

/// max over points of the largest |A - B| component, divided by
/// max(1, largest |A| or |B| component seen). Uses one shared memo per
/// point, so common subtrees of A and B are evaluated once.
double max_residual(const TensorField& A, const TensorField& B,
                    std::span<const Point> points, const ParamMap& params = {});

/// max over points of the largest |A| component (absolute, no scaling).
double max_abs_over(const TensorField& A, std::span<const Point> points,
                    const ParamMap& params = {});

}  // namespace wacs
