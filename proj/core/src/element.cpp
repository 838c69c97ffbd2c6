#include "porofem/element.hpp"

#include <cmath>
#include <stdexcept>

namespace porofem {

namespace {

// 1D Lagrange bases on [-1,1]: linear at nodes {-1,1}, quadratic at {-1,0,1}.
inline void line_q1(double x, double* val, double* der) {
    val[0] = 0.5 * (1.0 - x);
    val[1] = 0.5 * (1.0 + x);
    der[0] = -0.5;
    der[1] = 0.5;
}

inline void line_q2(double x, double* val, double* der) {
    val[0] = 0.5 * x * (x - 1.0);
    val[1] = 1.0 - x * x;
    val[2] = 0.5 * x * (x + 1.0);
    der[0] = x - 0.5;
    der[1] = -2.0 * x;
    der[2] = x + 0.5;
}

} // namespace

ShapeEval shape_eval(ElementKind kind, double xi, double eta) {
    constexpr double tol = 1e-12;
    if (std::abs(xi) > 1.0 + tol || std::abs(eta) > 1.0 + tol)
        throw std::domain_error("shape_eval: point outside reference cell");

    double vx[3], dx[3], vy[3], dy[3];
    const int n1d = (kind == ElementKind::q1) ? 2 : 3;
    if (kind == ElementKind::q1) {
        line_q1(xi, vx, dx);
        line_q1(eta, vy, dy);
    } else {
        line_q2(xi, vx, dx);
        line_q2(eta, vy, dy);
    }

    ShapeEval out;
    out.n = n1d * n1d;
    for (int j = 0; j < n1d; ++j)
        for (int i = 0; i < n1d; ++i) {
            const int k = j * n1d + i;
            out.value[k] = vx[i] * vy[j];
            out.grad[k] = {dx[i] * vy[j], vx[i] * dy[j]};
        }
    return out;
}

std::array<Eigen::Vector2d, 9> reference_nodes(ElementKind kind) {
    std::array<Eigen::Vector2d, 9> nodes{};
    const int n1d = (kind == ElementKind::q1) ? 2 : 3;
    const double step = 2.0 / (n1d - 1);
    for (int j = 0; j < n1d; ++j)
        for (int i = 0; i < n1d; ++i)
            nodes[j * n1d + i] = {-1.0 + i * step, -1.0 + j * step};
    return nodes;
}

} // namespace porofem
