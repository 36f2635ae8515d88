#pragma once

#include "wacs/soliton.hpp"

namespace wacs {

/// A ready-made bundle, optionally with soliton data attached.
struct ZooInstance {
  WacsBundle bundle;
  std::optional<SolitonData> soliton;
};

/// The solvable model on coordinates x1..x_{2n}, z: metric
/// diag(e^{2 beta z}, ..., e^{2 beta z}, 1), f rotating the pairs
/// (x_k, x_{n+k}) with scale sqrt(1+c), Q = (1+c) id on ker(eta),
/// Q xi = xi. Comes with the V = xi soliton,
/// lambda = -mu = beta - (1+c) beta^2. Needs 1 + c > 0.
ZooInstance kenmotsu_model(int n, double beta, double c);

/// Flat 2m-dimensional chart (coordinates y1..y_{2m}, identity metric)
/// carrying a blockwise rotation J with J^2 = -diag(c_i^2, c_i^2), one
/// scale per pair. Every scale must be nonzero.
struct FlatBase {
  ChartPtr chart;
  TensorField g;  // (0,2)
  TensorField J;  // (1,1)
  std::vector<double> scales;
};

FlatBase flat_weak_kaehler(std::vector<double> scales);

/// g = dt^2 + sigma(t)^2 gbar on {t} x base, f the lifted J,
/// Q = -J^2 on ker(eta), Q xi = xi, xi = d_t, eta = dt, and rate
/// sigma'/sigma attached as beta. sigma may depend on t only.
WacsBundle warped_product(const FlatBase& base, const Expr& sigma);

/// kenmotsu_model with Q scaled by (1+eps) on one ker(eta) direction;
/// breaks the compatibility axioms by about eps/(1+eps). No soliton.
ZooInstance perturbed_model(int n, double beta, double c, double eps);

}  // namespace wacs
