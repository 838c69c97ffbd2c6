#pragma once

#include <string>

#include "porofem/problem.hpp"

namespace porofem {

/// Writes the state as a VTK XML UnstructuredGrid (.vtu) file: float64
/// little-endian arrays in one raw appended block (header_type UInt64).
/// Points are the Q2 node lattice, each mesh cell appears as four bilinear
/// quads, and the point data holds displacement and velocity (padded to 3
/// components), pressure (Q1 evaluated on the lattice), and the strain
/// Frobenius norm.
void export_vtu(const SystemState& state, const ProblemSetup& setup,
                const std::string& path);

} // namespace porofem
