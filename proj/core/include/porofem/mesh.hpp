#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace porofem {

/// Boundary side of an axis-aligned rectangle, numbered counter-clockwise
/// starting at the bottom edge.
enum class BoundaryTag : std::uint8_t { bottom = 0, right = 1, top = 2, left = 3 };

constexpr int kNumBoundaryTags = 4;

inline const char* to_string(BoundaryTag tag) {
    switch (tag) {
    case BoundaryTag::bottom: return "bottom";
    case BoundaryTag::right: return "right";
    case BoundaryTag::top: return "top";
    case BoundaryTag::left: return "left";
    }
    return "?";
}

/// Axis-aligned rectangle (x0,x1) x (y0,y1).
struct Rect {
    double x0 = 0.0;
    double x1 = 1.0;
    double y0 = 0.0;
    double y1 = 1.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }
};

/// One boundary edge of the mesh: the two endpoint vertex indices (in edge
/// direction), the owning cell, and the side tag.
struct BoundaryFacet {
    std::array<int, 2> vertices;
    int cell = -1;
    BoundaryTag tag = BoundaryTag::bottom;
};

/// Uniform structured quadrilateral mesh of a rectangle.
///
/// Vertices are numbered lexicographically, x fastest: vertex (i,j) with
/// 0 <= i <= nx, 0 <= j <= ny sits at index j*(nx+1)+i. Cell (cx,cy) with
/// 0 <= cx < nx, 0 <= cy < ny has index cy*nx+cx and lists its four corner
/// vertices in counter-clockwise order starting at the lower-left one.
class Mesh {
public:
    Mesh(Rect domain, int nx, int ny);

    const Rect& domain() const { return domain_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int n_cells() const { return nx_ * ny_; }
    int n_vertices() const { return (nx_ + 1) * (ny_ + 1); }

    double dx() const { return domain_.width() / nx_; }
    double dy() const { return domain_.height() / ny_; }
    /// Cell diameter h = sqrt(dx^2 + dy^2); all cells are congruent.
    double cell_diameter() const;
    double cell_area() const { return dx() * dy(); }

    Eigen::Vector2d vertex(int v) const;
    Eigen::Vector2d cell_center(int cell) const;
    /// Corner vertices of a cell, counter-clockwise from the lower-left.
    std::array<int, 4> cell_vertices(int cell) const;

    const std::vector<BoundaryFacet>& boundary_facets() const { return facets_; }

private:
    Rect domain_;
    int nx_;
    int ny_;
    std::vector<BoundaryFacet> facets_;
};

/// Builds the uniform nx-by-ny mesh of `domain`.
/// Throws std::invalid_argument for empty rectangles or zero cell counts.
Mesh build_rect_mesh(Rect domain, int nx, int ny);

/// Unit-square mesh with 2^m cells per axis (refinement level m).
Mesh build_unit_square_mesh(int level);

} // namespace porofem
