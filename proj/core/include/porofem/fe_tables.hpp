#pragma once

#include <vector>

#include <Eigen/Core>

#include "porofem/dofmap.hpp"
#include "porofem/quadrature.hpp"

namespace porofem {

/// Shape values and physical-coordinate gradients tabulated at the points of
/// one quadrature rule. Cells of a uniform rectangle mesh are congruent with
/// a constant diagonal Jacobian, so one table serves every cell.
struct FeTable {
    int n_nodes = 0;
    int n_points = 0;
    /// weights[q] already includes the constant Jacobian determinant.
    std::vector<double> weights;
    /// value[q*n_nodes + a]
    std::vector<double> value;
    /// grad[q*n_nodes + a] in physical coordinates
    std::vector<Eigen::Vector2d> grad;

    double val(int q, int a) const { return value[q * n_nodes + a]; }
    const Eigen::Vector2d& grd(int q, int a) const { return grad[q * n_nodes + a]; }
};

FeTable tabulate(const DofMap& dofmap, const QuadratureRule& rule);

/// Physical coordinates of the rule's points within a given cell.
std::vector<Eigen::Vector2d> cell_points(const DofMap& dofmap, int cell,
                                         const QuadratureRule& rule);

} // namespace porofem
