#pragma once

#include <string>
#include <vector>

#include "enclosure/forward_solver.hpp"

namespace enclosure::io {

// Boundary-trace file, little-endian:
//   bytes 0..7   magic "ENCLTRC1"
//   u32          node count N
//   u32          time level count L (= n_steps + 1)
//   f64          dt
//   f64          horizon (= (L - 1) * dt)
//   f64 * 3N     node positions (x, y, z per node)
//   f64 * 3N     outward unit normals
//   f64 * N      area weights
//   f64 * L*N    samples, time-major: sample(level, node) at index level*N + node
void write_trace(const std::string& path, const fdtd::BoundaryTrace& trace);
fdtd::BoundaryTrace read_trace(const std::string& path);

// Scalar-field snapshot, little-endian:
//   bytes 0..7   magic "ENCLSNP1"
//   i32 * 3      nx, ny, nz
//   f64          h
//   f64          dt
//   f64 * 3      origin (corner of cell (0,0,0))
//   i64          step index
//   f64          time
//   f64 * nx*ny*nz  cell values, x-fastest
void write_snapshot(const std::string& path, const fdtd::GridSpec& grid,
                    const std::vector<double>& field, std::int64_t step, double time,
                    double dt);

struct Snapshot {
    int nx = 0, ny = 0, nz = 0;
    double h = 0.0;
    double dt = 0.0;
    Vec3 origin;
    std::int64_t step = 0;
    double time = 0.0;
    std::vector<double> field;
};
Snapshot read_snapshot(const std::string& path);

/// FNV-1a 64-bit digest of a byte buffer / file, as "fnv1a64:<hex>".
std::string digest_bytes(const void* data, std::size_t len);
std::string digest_file(const std::string& path);

}  // namespace enclosure::io
