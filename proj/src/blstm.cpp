#include "rvk/blstm.hpp"

#include <cstring>
#include <fstream>

namespace rvk {

namespace {

constexpr char kMagic[4] = {'R', 'V', 'K', 'M'};
constexpr uint32_t kVersion = 1;

void put_u32(std::ostream& out, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return uint32_t(b[0]) | uint32_t(b[1]) << 8 | uint32_t(b[2]) << 16 | uint32_t(b[3]) << 24;
}

}  // namespace

void save_checkpoint(const std::string& path, const BlstmNetF& net) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_data("cannot write checkpoint: " + path);
    out.write(kMagic, 4);
    put_u32(out, kVersion);
    put_u32(out, uint32_t(net.in_dim));
    put_u32(out, uint32_t(net.hidden));
    put_u32(out, uint32_t(net.ff_dim));
    std::vector<float> row;
    for (const auto* t : net.tensors()) {
        row.resize(size_t(t->cols()));
        for (Eigen::Index r = 0; r < t->rows(); ++r) {
            for (Eigen::Index c = 0; c < t->cols(); ++c) row[size_t(c)] = (*t)(r, c);
            // x86 is little-endian; floats go out verbatim
            out.write(reinterpret_cast<const char*>(row.data()),
                      std::streamsize(row.size() * sizeof(float)));
        }
    }
    if (!out) throw_data("failed writing checkpoint: " + path);
}

BlstmNetF load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_data("cannot open checkpoint: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw_data("not a model checkpoint: " + path);
    const uint32_t version = get_u32(in);
    if (version != kVersion)
        throw_data("unsupported checkpoint version " + std::to_string(version) + ": " + path);
    const uint32_t in_dim = get_u32(in);
    const uint32_t hidden = get_u32(in);
    const uint32_t ff_dim = get_u32(in);
    if (!in || in_dim == 0 || hidden == 0 || ff_dim == 0)
        throw_data("corrupt checkpoint header: " + path);

    BlstmNetF net = BlstmNetF::zeros(int(in_dim), int(hidden), int(ff_dim));
    std::vector<float> row;
    for (auto* t : net.tensors()) {
        row.resize(size_t(t->cols()));
        for (Eigen::Index r = 0; r < t->rows(); ++r) {
            in.read(reinterpret_cast<char*>(row.data()),
                    std::streamsize(row.size() * sizeof(float)));
            if (!in) throw_data("truncated checkpoint: " + path);
            for (Eigen::Index c = 0; c < t->cols(); ++c) (*t)(r, c) = row[size_t(c)];
        }
    }
    // Trailing garbage means the file does not match the declared shape.
    in.peek();
    if (!in.eof()) throw_data("checkpoint has trailing bytes: " + path);
    return net;
}

}  // namespace rvk
