#include "porofem/mesh.hpp"

#include <cmath>
#include <stdexcept>

namespace porofem {

Mesh::Mesh(Rect domain, int nx, int ny) : domain_(domain), nx_(nx), ny_(ny) {
    if (nx < 1 || ny < 1)
        throw std::invalid_argument("Mesh: cell counts must be positive");
    if (!(domain.x1 > domain.x0) || !(domain.y1 > domain.y0))
        throw std::invalid_argument("Mesh: rectangle must have positive extent");

    facets_.reserve(2 * (nx_ + ny_));
    const int vstride = nx_ + 1;
    // Counter-clockwise boundary walk: bottom, right, top, left. Facet
    // vertices are listed in walk direction.
    for (int i = 0; i < nx_; ++i)
        facets_.push_back({{i, i + 1}, i, BoundaryTag::bottom});
    for (int j = 0; j < ny_; ++j)
        facets_.push_back({{j * vstride + nx_, (j + 1) * vstride + nx_},
                           j * nx_ + (nx_ - 1), BoundaryTag::right});
    for (int i = nx_; i > 0; --i)
        facets_.push_back({{ny_ * vstride + i, ny_ * vstride + i - 1},
                           (ny_ - 1) * nx_ + (i - 1), BoundaryTag::top});
    for (int j = ny_; j > 0; --j)
        facets_.push_back({{j * vstride, (j - 1) * vstride}, (j - 1) * nx_, BoundaryTag::left});
}

double Mesh::cell_diameter() const { return std::hypot(dx(), dy()); }

Eigen::Vector2d Mesh::vertex(int v) const {
    const int i = v % (nx_ + 1);
    const int j = v / (nx_ + 1);
    return {domain_.x0 + i * dx(), domain_.y0 + j * dy()};
}

Eigen::Vector2d Mesh::cell_center(int cell) const {
    const int cx = cell % nx_;
    const int cy = cell / nx_;
    return {domain_.x0 + (cx + 0.5) * dx(), domain_.y0 + (cy + 0.5) * dy()};
}

std::array<int, 4> Mesh::cell_vertices(int cell) const {
    const int cx = cell % nx_;
    const int cy = cell / nx_;
    const int v0 = cy * (nx_ + 1) + cx;
    return {v0, v0 + 1, v0 + nx_ + 2, v0 + nx_ + 1};
}

Mesh build_rect_mesh(Rect domain, int nx, int ny) { return Mesh(domain, nx, ny); }

Mesh build_unit_square_mesh(int level) {
    if (level < 0)
        throw std::invalid_argument("build_unit_square_mesh: level must be >= 0");
    const int n = 1 << level;
    return Mesh(Rect{0.0, 1.0, 0.0, 1.0}, n, n);
}

} // namespace porofem
