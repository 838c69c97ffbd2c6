#pragma once

#include <vector>

#include <Eigen/Core>

namespace porofem {

/// Tensor-product quadrature rule on the reference square [-1,1]^2.
struct QuadratureRule {
    std::vector<Eigen::Vector2d> points;
    std::vector<double> weights;

    int size() const { return static_cast<int>(points.size()); }
    /// Per-axis polynomial degree integrated exactly (2n-1 for n-point Gauss).
    int exact_degree = 0;
};

/// n-by-n tensor Gauss-Legendre rule, n in 1..6.
QuadratureRule gauss_rule(int n_per_axis);

} // namespace porofem
