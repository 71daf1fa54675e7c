#include "ksns/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ksns/errors.hpp"

namespace ksns {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string records_to_csv(const std::vector<DiagnosticsRecord>& records) {
    std::string out;
    const auto& names = DiagnosticsRecord::column_names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        out += (i ? "," : "");
        out += names[i];
    }
    out += "\n";
    for (const DiagnosticsRecord& r : records) {
        const auto v = r.values();
        for (std::size_t i = 0; i < v.size(); ++i) {
            out += (i ? "," : "");
            out += format_double(v[i]);
        }
        out += "\n";
    }
    return out;
}

std::vector<DiagnosticsRecord> records_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw InvalidInput("CSV is empty");
    std::string expected;
    for (std::size_t i = 0; i < DiagnosticsRecord::kColumns; ++i) {
        expected += (i ? "," : "");
        expected += DiagnosticsRecord::column_names()[i];
    }
    if (line != expected) throw InvalidInput("CSV header does not match the record columns");
    std::vector<DiagnosticsRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::array<double, DiagnosticsRecord::kColumns> v{};
        const char* p = line.data();
        const char* end = line.data() + line.size();
        for (std::size_t i = 0; i < v.size(); ++i) {
            const auto res = std::from_chars(p, end, v[i]);
            if (res.ec != std::errc()) throw InvalidInput("CSV row is malformed: " + line);
            p = res.ptr;
            if (i + 1 < v.size()) {
                if (p == end || *p != ',') throw InvalidInput("CSV row is malformed: " + line);
                ++p;
            }
        }
        if (p != end) throw InvalidInput("CSV row has extra columns: " + line);
        out.push_back(DiagnosticsRecord::from_values(v));
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidInput("cannot write '" + path + "'");
    f << contents;
    if (!f) throw InvalidInput("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InvalidInput("cannot read '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

namespace {

template <class T>
void put_le(std::vector<unsigned char>& out, T value) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    }
    out.insert(out.end(), bytes, bytes + sizeof(T));
}

template <class T>
T get_le(const std::vector<unsigned char>& in, std::size_t& pos) {
    if (pos + sizeof(T) > in.size()) throw InvalidInput("snapshot is truncated");
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, in.data() + pos, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    }
    pos += sizeof(T);
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

}  // namespace

std::vector<unsigned char> encode_snapshot(const SimState& state) {
    const Grid& g = state.grid();
    std::vector<unsigned char> out(kSnapshotMagic, kSnapshotMagic + 8);
    put_le<std::uint32_t>(out, kSnapshotVersion);
    put_le<std::uint32_t>(out, 0);
    put_le<std::int64_t>(out, g.nx());
    put_le<std::int64_t>(out, g.ny());
    for (const ScalarField* f : {&state.n, &state.c, &state.u.x(), &state.u.y(), &state.p}) {
        for (std::size_t k = 0; k < g.size(); ++k) put_le<double>(out, g.inside(k) ? (*f)[k] : 0.0);
    }
    return out;
}

void write_snapshot(const std::string& path, const SimState& state) {
    const auto bytes = encode_snapshot(state);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidInput("cannot write '" + path + "'");
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw InvalidInput("failed writing '" + path + "'");
}

SnapshotData decode_snapshot(const std::vector<unsigned char>& bytes) {
    if (bytes.size() < 32 || std::memcmp(bytes.data(), kSnapshotMagic, 8) != 0) {
        throw InvalidInput("not a field snapshot");
    }
    std::size_t pos = 8;
    const auto version = get_le<std::uint32_t>(bytes, pos);
    if (version != kSnapshotVersion) {
        throw InvalidInput("unsupported snapshot version " + std::to_string(version));
    }
    get_le<std::uint32_t>(bytes, pos);
    SnapshotData d;
    d.nx = get_le<std::int64_t>(bytes, pos);
    d.ny = get_le<std::int64_t>(bytes, pos);
    if (d.nx <= 0 || d.ny <= 0 || d.nx > (1 << 20) || d.ny > (1 << 20)) {
        throw InvalidInput("snapshot dimensions are invalid");
    }
    const std::size_t m = static_cast<std::size_t>(d.nx * d.ny);
    if (bytes.size() != 32 + 5 * m * sizeof(double)) throw InvalidInput("snapshot size mismatch");
    for (std::vector<double>* f : {&d.n, &d.c, &d.u1, &d.u2, &d.p}) {
        f->resize(m);
        for (std::size_t k = 0; k < m; ++k) (*f)[k] = get_le<double>(bytes, pos);
    }
    return d;
}

SnapshotData read_snapshot(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InvalidInput("cannot read '" + path + "'");
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)),
                                     std::istreambuf_iterator<char>());
    return decode_snapshot(bytes);
}

SimState state_from_snapshot(const SnapshotData& d, const GridPtr& grid) {
    if (d.nx != grid->nx() || d.ny != grid->ny()) {
        throw InvalidInput("snapshot dimensions do not match the grid");
    }
    SimState s = SimState::zeros(grid);
    for (std::size_t k = 0; k < grid->size(); ++k) {
        if (!grid->inside(k)) continue;
        s.n[k] = d.n[k];
        s.c[k] = d.c[k];
        s.u.x()[k] = d.u1[k];
        s.u.y()[k] = d.u2[k];
        s.p[k] = d.p[k];
    }
    return s;
}

}  // namespace ksns
