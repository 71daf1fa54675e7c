#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ksns/diagnostics.hpp"
#include "ksns/state.hpp"

namespace ksns {

/// Header row followed by one row per record; doubles in shortest round-trip form, so
/// identical series give identical bytes.
std::string records_to_csv(const std::vector<DiagnosticsRecord>& records);
std::vector<DiagnosticsRecord> records_from_csv(const std::string& text);
void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);

inline constexpr char kSnapshotMagic[8] = {'K', 'S', 'N', 'S', 'S', 'N', 'A', 'P'};
inline constexpr std::uint32_t kSnapshotVersion = 1;

/// 16-byte header (magic, uint32 version, 4 reserved bytes), int64 nx and ny, then the
/// row-major float64 fields n, c, u1, u2, P. All little endian.
std::vector<unsigned char> encode_snapshot(const SimState& state);
void write_snapshot(const std::string& path, const SimState& state);

struct SnapshotData {
    std::int64_t nx = 0;
    std::int64_t ny = 0;
    std::vector<double> n, c, u1, u2, p;
};

SnapshotData decode_snapshot(const std::vector<unsigned char>& bytes);
SnapshotData read_snapshot(const std::string& path);

/// Copies snapshot fields into a state on `grid`; dimensions must match.
SimState state_from_snapshot(const SnapshotData& data, const GridPtr& grid);

std::string format_double(double v);

}  // namespace ksns
