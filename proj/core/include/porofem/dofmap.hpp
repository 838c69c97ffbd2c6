#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "porofem/element.hpp"
#include "porofem/mesh.hpp"

namespace porofem {

using Vector = Eigen::VectorXd;

/// Scalar field of space, e.g. an exact-solution component.
using ScalarField = std::function<double(const Eigen::Vector2d&)>;
/// 2-vector field of space.
using VectorField = std::function<Eigen::Vector2d(const Eigen::Vector2d&)>;

/// Global numbering of a Q1/Q2 Lagrange space with 1 or 2 components on a
/// structured rectangle mesh.
///
/// Nodes live on the (order*nx+1) x (order*ny+1) lattice, numbered
/// lexicographically with x fastest; components are interleaved, so the DOF
/// of node k, component c is k*n_components+c. Shared nodes receive the same
/// index from every adjacent cell (the space is conforming).
class DofMap {
public:
    DofMap(const Mesh& mesh, ElementKind kind, int n_components);

    ElementKind kind() const { return kind_; }
    int n_components() const { return components_; }
    int n_nodes() const { return nodes_x_ * nodes_y_; }
    int n_dofs() const { return n_nodes() * components_; }
    int nodes_x() const { return nodes_x_; }
    int nodes_y() const { return nodes_y_; }
    int n_cells() const { return nx_ * ny_; }
    int nodes_per_cell() const { return porofem::nodes_per_cell(kind_); }

    /// Global node indices of a cell, lexicographic over its local lattice.
    void cell_nodes(int cell, int* out) const;
    Eigen::Vector2d node_coord(int node) const;

    int dof_index(int node, int component) const { return node * components_ + component; }

    /// Marks every lattice node lying on a facet whose tag appears in `tags`
    /// as Dirichlet-constrained. When a node is touched by several tagged
    /// facets the lowest tag index wins, which makes corner ownership
    /// deterministic.
    void mark_dirichlet(const Mesh& mesh, const std::vector<BoundaryTag>& tags);

    /// Dirichlet tag of a node, or nullopt for unconstrained nodes.
    std::optional<BoundaryTag> dirichlet_tag(int node) const;
    bool is_constrained_node(int node) const { return dirichlet_node_tag_[node] >= 0; }
    bool is_constrained_dof(int dof) const { return is_constrained_node(dof / components_); }
    int n_constrained_nodes() const { return n_constrained_; }

    double lattice_dx() const { return lattice_dx_; }
    double lattice_dy() const { return lattice_dy_; }
    const Rect& domain() const { return domain_; }
    int mesh_nx() const { return nx_; }
    int mesh_ny() const { return ny_; }

private:
    ElementKind kind_;
    int components_;
    int nx_, ny_;
    int nodes_x_, nodes_y_;
    Rect domain_;
    double lattice_dx_, lattice_dy_;
    std::vector<signed char> dirichlet_node_tag_; // -1 = free
    int n_constrained_ = 0;
};

DofMap build_dof_map(const Mesh& mesh, ElementKind kind, int n_components);

/// Lagrange interpolation: evaluates the field at every node and returns the
/// coefficient vector. Exact on functions already in the FE space.
Vector nodal_interpolate(const ScalarField& field, const DofMap& dofmap);
Vector nodal_interpolate(const VectorField& field, const DofMap& dofmap);

/// Evaluates prescribed boundary values into a full-length vector (zero on
/// free DOFs). `values[tag]` gives the prescribed field on that side; tags
/// without an entry must not be marked in the DofMap.
Vector dirichlet_values(const DofMap& dofmap,
                        const std::function<Eigen::Vector2d(BoundaryTag, const Eigen::Vector2d&)>& value);

} // namespace porofem
