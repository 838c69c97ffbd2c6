#include "porofem/dofmap.hpp"

#include <stdexcept>

namespace porofem {

DofMap::DofMap(const Mesh& mesh, ElementKind kind, int n_components)
    : kind_(kind), components_(n_components), nx_(mesh.nx()), ny_(mesh.ny()),
      domain_(mesh.domain()) {
    if (n_components != 1 && n_components != 2)
        throw std::invalid_argument("DofMap: n_components must be 1 or 2");
    const int order = static_cast<int>(kind);
    nodes_x_ = order * nx_ + 1;
    nodes_y_ = order * ny_ + 1;
    lattice_dx_ = mesh.dx() / order;
    lattice_dy_ = mesh.dy() / order;
    dirichlet_node_tag_.assign(n_nodes(), -1);
}

void DofMap::cell_nodes(int cell, int* out) const {
    const int order = static_cast<int>(kind_);
    const int cx = cell % nx_;
    const int cy = cell / nx_;
    const int base = (order * cy) * nodes_x_ + order * cx;
    int k = 0;
    for (int j = 0; j <= order; ++j)
        for (int i = 0; i <= order; ++i)
            out[k++] = base + j * nodes_x_ + i;
}

Eigen::Vector2d DofMap::node_coord(int node) const {
    const int i = node % nodes_x_;
    const int j = node / nodes_x_;
    return {domain_.x0 + i * lattice_dx_, domain_.y0 + j * lattice_dy_};
}

void DofMap::mark_dirichlet(const Mesh& mesh, const std::vector<BoundaryTag>& tags) {
    const int order = static_cast<int>(kind_);
    for (const BoundaryFacet& facet : mesh.boundary_facets()) {
        bool wanted = false;
        for (BoundaryTag t : tags)
            wanted = wanted || (t == facet.tag);
        if (!wanted)
            continue;
        // Lattice nodes along the facet. Facet endpoints are mesh vertices;
        // convert to lattice indices and walk the (order+1) nodes between.
        const auto to_lattice = [&](int vertex) {
            const int vi = vertex % (mesh.nx() + 1);
            const int vj = vertex / (mesh.nx() + 1);
            return std::pair<int, int>{order * vi, order * vj};
        };
        const auto [i0, j0] = to_lattice(facet.vertices[0]);
        const auto [i1, j1] = to_lattice(facet.vertices[1]);
        const int di = (i1 - i0) / order;
        const int dj = (j1 - j0) / order;
        for (int s = 0; s <= order; ++s) {
            const int node = (j0 + s * dj) * nodes_x_ + (i0 + s * di);
            const signed char tag = static_cast<signed char>(facet.tag);
            signed char& slot = dirichlet_node_tag_[node];
            if (slot < 0) {
                slot = tag;
                ++n_constrained_;
            } else if (tag < slot) {
                slot = tag;
            }
        }
    }
}

std::optional<BoundaryTag> DofMap::dirichlet_tag(int node) const {
    const signed char t = dirichlet_node_tag_[node];
    if (t < 0)
        return std::nullopt;
    return static_cast<BoundaryTag>(t);
}

DofMap build_dof_map(const Mesh& mesh, ElementKind kind, int n_components) {
    return DofMap(mesh, kind, n_components);
}

Vector nodal_interpolate(const ScalarField& field, const DofMap& dofmap) {
    if (dofmap.n_components() != 1)
        throw std::invalid_argument("nodal_interpolate: scalar field on vector DofMap");
    Vector coeffs(dofmap.n_dofs());
    for (int node = 0; node < dofmap.n_nodes(); ++node)
        coeffs[node] = field(dofmap.node_coord(node));
    return coeffs;
}

Vector nodal_interpolate(const VectorField& field, const DofMap& dofmap) {
    if (dofmap.n_components() != 2)
        throw std::invalid_argument("nodal_interpolate: vector field on scalar DofMap");
    Vector coeffs(dofmap.n_dofs());
    for (int node = 0; node < dofmap.n_nodes(); ++node) {
        const Eigen::Vector2d v = field(dofmap.node_coord(node));
        coeffs[2 * node] = v.x();
        coeffs[2 * node + 1] = v.y();
    }
    return coeffs;
}

Vector dirichlet_values(const DofMap& dofmap,
                        const std::function<Eigen::Vector2d(BoundaryTag, const Eigen::Vector2d&)>& value) {
    Vector g = Vector::Zero(dofmap.n_dofs());
    for (int node = 0; node < dofmap.n_nodes(); ++node) {
        const auto tag = dofmap.dirichlet_tag(node);
        if (!tag)
            continue;
        const Eigen::Vector2d v = value(*tag, dofmap.node_coord(node));
        for (int c = 0; c < dofmap.n_components(); ++c)
            g[dofmap.dof_index(node, c)] = v[c];
    }
    return g;
}

} // namespace porofem
