#include "porofem/quadrature.hpp"

#include <stdexcept>

namespace porofem {

namespace {

struct Node1d {
    double x;
    double w;
};

// Gauss-Legendre abscissae/weights on [-1,1].
const Node1d* gauss_nodes_1d(int n) {
    static const Node1d n1[] = {{0.0, 2.0}};
    static const Node1d n2[] = {{-0.5773502691896257, 1.0}, {0.5773502691896257, 1.0}};
    static const Node1d n3[] = {{-0.7745966692414834, 5.0 / 9.0},
                                {0.0, 8.0 / 9.0},
                                {0.7745966692414834, 5.0 / 9.0}};
    static const Node1d n4[] = {{-0.8611363115940526, 0.3478548451374538},
                                {-0.3399810435848563, 0.6521451548625461},
                                {0.3399810435848563, 0.6521451548625461},
                                {0.8611363115940526, 0.3478548451374538}};
    static const Node1d n5[] = {{-0.9061798459386640, 0.2369268850561891},
                                {-0.5384693101056831, 0.4786286704993665},
                                {0.0, 0.5688888888888889},
                                {0.5384693101056831, 0.4786286704993665},
                                {0.9061798459386640, 0.2369268850561891}};
    static const Node1d n6[] = {{-0.9324695142031521, 0.1713244923791704},
                                {-0.6612093864662645, 0.3607615730481386},
                                {-0.2386191860831969, 0.4679139345726910},
                                {0.2386191860831969, 0.4679139345726910},
                                {0.6612093864662645, 0.3607615730481386},
                                {0.9324695142031521, 0.1713244923791704}};
    switch (n) {
    case 1: return n1;
    case 2: return n2;
    case 3: return n3;
    case 4: return n4;
    case 5: return n5;
    case 6: return n6;
    default: return nullptr;
    }
}

} // namespace

QuadratureRule gauss_rule(int n_per_axis) {
    const Node1d* nodes = gauss_nodes_1d(n_per_axis);
    if (nodes == nullptr)
        throw std::invalid_argument("gauss_rule: order must be in 1..6");

    QuadratureRule rule;
    rule.exact_degree = 2 * n_per_axis - 1;
    rule.points.reserve(n_per_axis * n_per_axis);
    rule.weights.reserve(n_per_axis * n_per_axis);
    for (int j = 0; j < n_per_axis; ++j)
        for (int i = 0; i < n_per_axis; ++i) {
            rule.points.emplace_back(nodes[i].x, nodes[j].x);
            rule.weights.push_back(nodes[i].w * nodes[j].w);
        }
    return rule;
}

} // namespace porofem
