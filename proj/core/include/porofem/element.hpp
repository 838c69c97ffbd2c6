#pragma once

#include <array>

#include <Eigen/Core>

namespace porofem {

/// Continuous Lagrange element on the reference square [-1,1]^2.
enum class ElementKind : int { q1 = 1, q2 = 2 };

constexpr int nodes_per_cell(ElementKind kind) {
    return kind == ElementKind::q1 ? 4 : 9;
}

/// Shape function values and reference-coordinate gradients at one point.
/// Node ordering is lexicographic over the (order+1)^2 sub-lattice of the
/// cell, x fastest, matching the global lattice numbering of DofMap.
struct ShapeEval {
    int n = 0;
    std::array<double, 9> value{};
    std::array<Eigen::Vector2d, 9> grad{};
};

/// Evaluates the Q1/Q2 basis at reference coordinates (xi, eta).
/// Throws std::domain_error when the point lies outside the closed cell.
ShapeEval shape_eval(ElementKind kind, double xi, double eta);

/// Reference coordinates of the element nodes (same ordering as ShapeEval).
std::array<Eigen::Vector2d, 9> reference_nodes(ElementKind kind);

} // namespace porofem
