#include "porofem/vtu.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "porofem/element.hpp"

namespace porofem {

namespace {

struct Blob {
    std::vector<char> bytes;

    template <typename T>
    std::uint64_t append(const std::vector<T>& data) {
        const std::uint64_t offset = bytes.size();
        const std::uint64_t n = data.size() * sizeof(T);
        bytes.resize(bytes.size() + sizeof(std::uint64_t) + n);
        std::memcpy(bytes.data() + offset, &n, sizeof(std::uint64_t));
        if (n > 0)
            std::memcpy(bytes.data() + offset + sizeof(std::uint64_t), data.data(), n);
        return offset;
    }
};

} // namespace

void export_vtu(const SystemState& state, const ProblemSetup& setup,
                const std::string& path) {
    const DofMap& dof_u = setup.dof_u;
    const DofMap& dof_p = setup.dof_p;
    const int npx = dof_u.nodes_x();
    const int npy = dof_u.nodes_y();
    const int n_points = npx * npy;
    const int nx = setup.mesh.nx();
    const int ny = setup.mesh.ny();
    const int n_cells = 4 * nx * ny;

    std::vector<double> points(3 * n_points);
    std::vector<double> displacement(3 * n_points, 0.0);
    std::vector<double> velocity(3 * n_points, 0.0);
    std::vector<double> pressure(n_points);
    std::vector<double> strain_frob(n_points);

    std::vector<int> q2_nodes(9), q1_nodes(4);
    for (int node = 0; node < n_points; ++node) {
        const Eigen::Vector2d x = dof_u.node_coord(node);
        points[3 * node] = x.x();
        points[3 * node + 1] = x.y();
        points[3 * node + 2] = 0.0;
        displacement[3 * node] = state.u[2 * node];
        displacement[3 * node + 1] = state.u[2 * node + 1];
        velocity[3 * node] = state.v[2 * node];
        velocity[3 * node + 1] = state.v[2 * node + 1];

        // Owning cell of the lattice point (lower-left rule at interfaces).
        const int i = node % npx;
        const int j = node / npx;
        const int cx = std::min(i / 2, nx - 1);
        const int cy = std::min(j / 2, ny - 1);
        const int cell = cy * nx + cx;
        const double xi = (i - 2 * cx) - 1.0;
        const double eta = (j - 2 * cy) - 1.0;

        dof_p.cell_nodes(cell, q1_nodes.data());
        const ShapeEval sp = shape_eval(ElementKind::q1, xi, eta);
        double p = 0.0;
        for (int a = 0; a < 4; ++a)
            p += sp.value[a] * state.p[q1_nodes[a]];
        pressure[node] = p;

        dof_u.cell_nodes(cell, q2_nodes.data());
        const ShapeEval su = shape_eval(ElementKind::q2, xi, eta);
        Eigen::Vector2d g0 = Eigen::Vector2d::Zero();
        Eigen::Vector2d g1 = Eigen::Vector2d::Zero();
        const double sx = 2.0 / (2.0 * dof_u.lattice_dx());
        const double sy = 2.0 / (2.0 * dof_u.lattice_dy());
        for (int a = 0; a < 9; ++a) {
            const Eigen::Vector2d dphi(su.grad[a].x() * sx, su.grad[a].y() * sy);
            g0 += state.u[2 * q2_nodes[a]] * dphi;
            g1 += state.u[2 * q2_nodes[a] + 1] * dphi;
        }
        const double e01 = 0.5 * (g0.y() + g1.x());
        strain_frob[node] =
            std::sqrt(g0.x() * g0.x() + g1.y() * g1.y() + 2.0 * e01 * e01);
    }

    std::vector<std::int64_t> connectivity;
    connectivity.reserve(4 * n_cells);
    for (int j = 0; j < 2 * ny; ++j)
        for (int i = 0; i < 2 * nx; ++i) {
            const int v0 = j * npx + i;
            connectivity.push_back(v0);
            connectivity.push_back(v0 + 1);
            connectivity.push_back(v0 + npx + 1);
            connectivity.push_back(v0 + npx);
        }
    std::vector<std::int64_t> offsets(n_cells);
    for (int c = 0; c < n_cells; ++c)
        offsets[c] = 4 * (c + 1);
    std::vector<std::uint8_t> types(n_cells, 9); // VTK_QUAD

    Blob blob;
    const std::uint64_t off_points = blob.append(points);
    const std::uint64_t off_conn = blob.append(connectivity);
    const std::uint64_t off_offsets = blob.append(offsets);
    const std::uint64_t off_types = blob.append(types);
    const std::uint64_t off_disp = blob.append(displacement);
    const std::uint64_t off_vel = blob.append(velocity);
    const std::uint64_t off_pres = blob.append(pressure);
    const std::uint64_t off_strain = blob.append(strain_frob);

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("export_vtu: cannot open " + path);
    out << "<?xml version=\"1.0\"?>\n"
        << "<VTKFile type=\"UnstructuredGrid\" version=\"1.0\" "
           "byte_order=\"LittleEndian\" header_type=\"UInt64\">\n"
        << "  <UnstructuredGrid>\n"
        << "    <Piece NumberOfPoints=\"" << n_points << "\" NumberOfCells=\"" << n_cells
        << "\">\n"
        << "      <Points>\n"
        << "        <DataArray type=\"Float64\" NumberOfComponents=\"3\" "
           "format=\"appended\" offset=\""
        << off_points << "\"/>\n"
        << "      </Points>\n"
        << "      <Cells>\n"
        << "        <DataArray type=\"Int64\" Name=\"connectivity\" format=\"appended\" "
           "offset=\""
        << off_conn << "\"/>\n"
        << "        <DataArray type=\"Int64\" Name=\"offsets\" format=\"appended\" "
           "offset=\""
        << off_offsets << "\"/>\n"
        << "        <DataArray type=\"UInt8\" Name=\"types\" format=\"appended\" "
           "offset=\""
        << off_types << "\"/>\n"
        << "      </Cells>\n"
        << "      <PointData>\n"
        << "        <DataArray type=\"Float64\" Name=\"displacement\" "
           "NumberOfComponents=\"3\" format=\"appended\" offset=\""
        << off_disp << "\"/>\n"
        << "        <DataArray type=\"Float64\" Name=\"velocity\" "
           "NumberOfComponents=\"3\" format=\"appended\" offset=\""
        << off_vel << "\"/>\n"
        << "        <DataArray type=\"Float64\" Name=\"pressure\" format=\"appended\" "
           "offset=\""
        << off_pres << "\"/>\n"
        << "        <DataArray type=\"Float64\" Name=\"strain_frobenius\" "
           "format=\"appended\" offset=\""
        << off_strain << "\"/>\n"
        << "      </PointData>\n"
        << "    </Piece>\n"
        << "  </UnstructuredGrid>\n"
        << "  <AppendedData encoding=\"raw\">\n    _";
    out.write(blob.bytes.data(), static_cast<std::streamsize>(blob.bytes.size()));
    out << "\n  </AppendedData>\n</VTKFile>\n";
}

} // namespace porofem
