#include "porofem/norms.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "porofem/fe_tables.hpp"

namespace porofem {

FeTable tabulate(const DofMap& dofmap, const QuadratureRule& rule) {
    FeTable table;
    table.n_nodes = dofmap.nodes_per_cell();
    table.n_points = rule.size();
    const int order = static_cast<int>(dofmap.kind());
    const double hx = dofmap.lattice_dx() * order; // cell extents
    const double hy = dofmap.lattice_dy() * order;
    const double det_jac = 0.25 * hx * hy;

    table.weights.resize(table.n_points);
    table.value.resize(table.n_points * table.n_nodes);
    table.grad.resize(table.n_points * table.n_nodes);
    for (int q = 0; q < table.n_points; ++q) {
        table.weights[q] = rule.weights[q] * det_jac;
        const ShapeEval se = shape_eval(dofmap.kind(), rule.points[q].x(), rule.points[q].y());
        for (int a = 0; a < table.n_nodes; ++a) {
            table.value[q * table.n_nodes + a] = se.value[a];
            table.grad[q * table.n_nodes + a] = {se.grad[a].x() * 2.0 / hx,
                                                 se.grad[a].y() * 2.0 / hy};
        }
    }
    return table;
}

std::vector<Eigen::Vector2d> cell_points(const DofMap& dofmap, int cell,
                                         const QuadratureRule& rule) {
    const int order = static_cast<int>(dofmap.kind());
    const double hx = dofmap.lattice_dx() * order;
    const double hy = dofmap.lattice_dy() * order;
    const int cx = cell % dofmap.mesh_nx();
    const int cy = cell / dofmap.mesh_nx();
    const double x_mid = dofmap.domain().x0 + (cx + 0.5) * hx;
    const double y_mid = dofmap.domain().y0 + (cy + 0.5) * hy;
    std::vector<Eigen::Vector2d> pts(rule.size());
    for (int q = 0; q < rule.size(); ++q)
        pts[q] = {x_mid + 0.5 * hx * rule.points[q].x(), y_mid + 0.5 * hy * rule.points[q].y()};
    return pts;
}

namespace {

template <typename PointFn>
ErrorNorms accumulate_error(const Vector& coeffs, const DofMap& dofmap,
                            const QuadratureRule& rule, const PointFn& point_error) {
    const FeTable table = tabulate(dofmap, rule);
    const int n_nodes = table.n_nodes;
    const int n_comp = dofmap.n_components();
    std::vector<int> nodes(n_nodes);

    double l2 = 0.0;
    double h1 = 0.0;
    for (int cell = 0; cell < dofmap.n_cells(); ++cell) {
        dofmap.cell_nodes(cell, nodes.data());
        const auto pts = cell_points(dofmap, cell, rule);
        for (int q = 0; q < table.n_points; ++q) {
            // FE value and gradient at the point
            double val[2] = {0.0, 0.0};
            Eigen::Vector2d grd[2] = {Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero()};
            for (int a = 0; a < n_nodes; ++a) {
                const double phi = table.val(q, a);
                const Eigen::Vector2d& dphi = table.grd(q, a);
                for (int c = 0; c < n_comp; ++c) {
                    const double u = coeffs[dofmap.dof_index(nodes[a], c)];
                    val[c] += u * phi;
                    grd[c] += u * dphi;
                }
            }
            const auto [e2, g2] = point_error(pts[q], val, grd);
            l2 += table.weights[q] * e2;
            h1 += table.weights[q] * g2;
        }
    }
    return {std::sqrt(l2), std::sqrt(h1)};
}

} // namespace

ErrorNorms error_norms(const Vector& coeffs, const DofMap& dofmap, const ExactScalar& exact,
                       const QuadratureRule& rule) {
    if (dofmap.n_components() != 1)
        throw std::invalid_argument("error_norms: scalar field on vector DofMap");
    return accumulate_error(coeffs, dofmap, rule,
                            [&](const Eigen::Vector2d& x, const double* val,
                                const Eigen::Vector2d* grd) {
                                const double e = val[0] - exact.value(x);
                                const Eigen::Vector2d ge = grd[0] - exact.grad(x);
                                return std::pair<double, double>{e * e, ge.squaredNorm()};
                            });
}

ErrorNorms error_norms(const Vector& coeffs, const DofMap& dofmap, const ExactVector& exact,
                       const QuadratureRule& rule) {
    if (dofmap.n_components() != 2)
        throw std::invalid_argument("error_norms: vector field on scalar DofMap");
    return accumulate_error(coeffs, dofmap, rule,
                            [&](const Eigen::Vector2d& x, const double* val,
                                const Eigen::Vector2d* grd) {
                                const Eigen::Vector2d u = exact.value(x);
                                const Eigen::Matrix2d g = exact.grad(x);
                                const double e0 = val[0] - u[0];
                                const double e1 = val[1] - u[1];
                                const Eigen::Vector2d g0 = grd[0] - g.row(0).transpose();
                                const Eigen::Vector2d g1 = grd[1] - g.row(1).transpose();
                                return std::pair<double, double>{
                                    e0 * e0 + e1 * e1, g0.squaredNorm() + g1.squaredNorm()};
                            });
}

FieldNormsSq field_norms_sq(const Vector& coeffs, const DofMap& dofmap,
                            const QuadratureRule& rule) {
    const FeTable table = tabulate(dofmap, rule);
    const int n_nodes = table.n_nodes;
    const int n_comp = dofmap.n_components();
    std::vector<int> nodes(n_nodes);

    FieldNormsSq out;
    for (int cell = 0; cell < dofmap.n_cells(); ++cell) {
        dofmap.cell_nodes(cell, nodes.data());
        for (int q = 0; q < table.n_points; ++q) {
            double val[2] = {0.0, 0.0};
            Eigen::Vector2d grd[2] = {Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero()};
            for (int a = 0; a < n_nodes; ++a) {
                const double phi = table.val(q, a);
                const Eigen::Vector2d& dphi = table.grd(q, a);
                for (int c = 0; c < n_comp; ++c) {
                    const double u = coeffs[dofmap.dof_index(nodes[a], c)];
                    val[c] += u * phi;
                    grd[c] += u * dphi;
                }
            }
            const double w = table.weights[q];
            out.l2 += w * (val[0] * val[0] + val[1] * val[1]);
            out.grad += w * (grd[0].squaredNorm() + grd[1].squaredNorm());
            if (n_comp == 2) {
                const double div = grd[0].x() + grd[1].y();
                const double e01 = 0.5 * (grd[0].y() + grd[1].x());
                out.strain += w * (grd[0].x() * grd[0].x() + grd[1].y() * grd[1].y() +
                                   2.0 * e01 * e01);
                out.div += w * div * div;
                out.max_abs_div = std::max(out.max_abs_div, std::abs(div));
            }
        }
    }
    return out;
}

} // namespace porofem
