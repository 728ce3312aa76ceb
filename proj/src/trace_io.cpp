#include "enclosure/trace_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "enclosure/errors.hpp"

namespace enclosure::io {

namespace {

constexpr char kTraceMagic[8] = {'E', 'N', 'C', 'L', 'T', 'R', 'C', '1'};
constexpr char kSnapMagic[8] = {'E', 'N', 'C', 'L', 'S', 'N', 'P', '1'};

template <typename T>
void put(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

void put_doubles(std::ofstream& os, const double* data, std::size_t n) {
    os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
}

void get_doubles(std::ifstream& is, double* data, std::size_t n) {
    is.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
}

}  // namespace

void write_trace(const std::string& path, const fdtd::BoundaryTrace& trace) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open trace file for writing: " + path);
    os.write(kTraceMagic, 8);
    const std::uint32_t n = static_cast<std::uint32_t>(trace.quad.size());
    const std::uint32_t levels = static_cast<std::uint32_t>(trace.n_steps + 1);
    put(os, n);
    put(os, levels);
    put(os, trace.dt);
    const double horizon = trace.horizon();
    put(os, horizon);
    for (const Vec3& v : trace.quad.nodes) {
        put(os, v.x);
        put(os, v.y);
        put(os, v.z);
    }
    for (const Vec3& v : trace.quad.normals) {
        put(os, v.x);
        put(os, v.y);
        put(os, v.z);
    }
    put_doubles(os, trace.quad.weights.data(), n);
    put_doubles(os, trace.samples.data(), trace.samples.size());
    if (!os) throw ConfigError("short write to trace file: " + path);
}

fdtd::BoundaryTrace read_trace(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open trace file: " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kTraceMagic, 8) != 0)
        throw ConfigError("not a boundary-trace file: " + path);
    const auto n = get<std::uint32_t>(is);
    const auto levels = get<std::uint32_t>(is);
    fdtd::BoundaryTrace trace;
    trace.dt = get<double>(is);
    const double horizon = get<double>(is);
    (void)horizon;
    trace.n_steps = static_cast<int>(levels) - 1;
    trace.quad.nodes.resize(n);
    trace.quad.normals.resize(n);
    trace.quad.weights.resize(n);
    for (auto& v : trace.quad.nodes) {
        v.x = get<double>(is);
        v.y = get<double>(is);
        v.z = get<double>(is);
    }
    for (auto& v : trace.quad.normals) {
        v.x = get<double>(is);
        v.y = get<double>(is);
        v.z = get<double>(is);
    }
    get_doubles(is, trace.quad.weights.data(), n);
    trace.samples.resize(static_cast<std::size_t>(levels) * n);
    get_doubles(is, trace.samples.data(), trace.samples.size());
    if (!is) throw ConfigError("truncated trace file: " + path);
    for (double s : trace.samples)
        if (!std::isfinite(s)) throw NumericalError("trace file contains non-finite samples");
    return trace;
}

void write_snapshot(const std::string& path, const fdtd::GridSpec& grid,
                    const std::vector<double>& field, std::int64_t step, double time,
                    double dt) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open snapshot file for writing: " + path);
    os.write(kSnapMagic, 8);
    put(os, static_cast<std::int32_t>(grid.nx));
    put(os, static_cast<std::int32_t>(grid.ny));
    put(os, static_cast<std::int32_t>(grid.nz));
    put(os, grid.h);
    put(os, dt);
    put(os, grid.origin.x);
    put(os, grid.origin.y);
    put(os, grid.origin.z);
    put(os, step);
    put(os, time);
    put_doubles(os, field.data(), field.size());
    if (!os) throw ConfigError("short write to snapshot file: " + path);
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open snapshot file: " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kSnapMagic, 8) != 0)
        throw ConfigError("not a snapshot file: " + path);
    Snapshot s;
    s.nx = get<std::int32_t>(is);
    s.ny = get<std::int32_t>(is);
    s.nz = get<std::int32_t>(is);
    s.h = get<double>(is);
    s.dt = get<double>(is);
    s.origin.x = get<double>(is);
    s.origin.y = get<double>(is);
    s.origin.z = get<double>(is);
    s.step = get<std::int64_t>(is);
    s.time = get<double>(is);
    s.field.resize(static_cast<std::size_t>(s.nx) * s.ny * s.nz);
    get_doubles(is, s.field.data(), s.field.size());
    if (!is) throw ConfigError("truncated snapshot file: " + path);
    return s;
}

std::string digest_bytes(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 1469598103934665603ull;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string digest_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open file for digest: " + path);
    std::uint64_t h = 1469598103934665603ull;
    char buf[1 << 16];
    while (is) {
        is.read(buf, sizeof(buf));
        const std::streamsize got = is.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
    }
    char out[32];
    std::snprintf(out, sizeof(out), "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return out;
}

}  // namespace enclosure::io
