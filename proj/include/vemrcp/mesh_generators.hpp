#pragma once

#include <cstdint>

#include "vemrcp/mesh.hpp"

namespace vemrcp {

class MeshGenerationError : public MeshError {
public:
    using MeshError::MeshError;
};

/// Mesh of the unit square for one of the eight generated families.
/// `subdivisions` sets the resolution (about `subdivisions` cells per side);
/// structured families ignore `seed`. Output is validated before return.
PolygonalMesh generate_mesh(MeshFamily family, int subdivisions, std::uint64_t seed = 0);

}  // namespace vemrcp
