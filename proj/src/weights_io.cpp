#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "streamfill/attention.hpp"
#include "streamfill/errors.hpp"

namespace streamfill {

namespace {

constexpr char kMagic[4] = {'W', 'T', 'S', '1'};
constexpr std::size_t kHeaderBytes = 4 + 7 * 4;

class Writer {
public:
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void floats(std::span<const float> values) {
        for (float f : values) u32(std::bit_cast<std::uint32_t>(f));
    }
    std::vector<std::uint8_t> bytes;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> b) : bytes_(b) {}

    std::uint32_t u32() {
        if (bytes_.size() - pos_ < 4) throw FormatError("WTS1 file truncated");
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }
    void floats(std::span<float> out) {
        for (float& f : out) f = std::bit_cast<float>(u32());
    }
    Matrix matrix(std::size_t r, std::size_t c) {
        Matrix m(r, c);
        floats(m.data());
        return m;
    }
    std::vector<float> vec(std::size_t n) {
        std::vector<float> v(n);
        floats(v);
        return v;
    }
    bool done() const { return pos_ == bytes_.size(); }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

std::uint32_t to_u32(std::size_t v) {
    if (v > std::numeric_limits<std::uint32_t>::max()) throw FormatError("WTS1 header overflow");
    return static_cast<std::uint32_t>(v);
}

} // namespace

std::vector<std::uint8_t> serialize_weights(const WeightSet& w) {
    w.validate();
    Writer out;
    out.bytes.assign(std::begin(kMagic), std::end(kMagic));
    const auto& c = w.config;
    for (std::size_t v : {c.blocks, c.heads, c.dim, c.ffn_dim, c.codec.downsample, c.codec.patch,
                          c.codec.stride}) {
        out.u32(to_u32(v));
    }
    out.floats(w.encoder.weight.data());
    out.floats(w.encoder.bias);
    out.floats(w.embed.data());
    for (const auto& b : w.blocks) {
        out.floats(b.wq.data());
        out.floats(b.wk.data());
        out.floats(b.wv.data());
        out.floats(b.wo.data());
        out.floats(b.ln1_gain);
        out.floats(b.ln1_bias);
        out.floats(b.ffn_w1.data());
        out.floats(b.ffn_b1);
        out.floats(b.ffn_w2.data());
        out.floats(b.ffn_b2);
        out.floats(b.ln2_gain);
        out.floats(b.ln2_bias);
    }
    out.floats(w.back_project.data());
    out.floats(w.decoder.weight.data());
    out.floats(w.decoder.bias);
    return std::move(out.bytes);
}

WeightSet parse_weights(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kHeaderBytes) throw FormatError("WTS1 file truncated in header");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("bad WTS1 magic");
    Reader in(bytes.subspan(4));
    StackConfig c;
    c.blocks = in.u32();
    c.heads = in.u32();
    c.dim = in.u32();
    c.ffn_dim = in.u32();
    c.codec.downsample = in.u32();
    c.codec.patch = in.u32();
    c.codec.stride = in.u32();
    c.codec.dim = c.dim;
    if (c.dim > 4096 || c.ffn_dim > 65536 || c.blocks > 1024 || c.codec.patch > 64 ||
        c.codec.downsample > 64) {
        throw FormatError("WTS1 header dimensions out of range");
    }
    try {
        c.validate();
    } catch (const ConfigError& e) {
        throw FormatError(std::string("WTS1 header invalid: ") + e.what());
    }
    // Reject before allocating if the payload cannot possibly hold the arrays.
    const std::size_t d = c.dim;
    const std::size_t per_block = 4 * d * d + 4 * d + 2 * d * c.ffn_dim + c.ffn_dim + d;
    const std::size_t expected_floats = c.codec.encode_inputs() * d + d +
                                        2 * c.codec.patch_values() * d + c.blocks * per_block +
                                        d * c.codec.decode_outputs() + c.codec.decode_outputs();
    if (bytes.size() - kHeaderBytes != expected_floats * 4) {
        throw FormatError("WTS1 payload size does not match header");
    }

    WeightSet w;
    w.config = c;
    w.encoder.weight = in.matrix(c.codec.encode_inputs(), d);
    w.encoder.bias = in.vec(d);
    w.embed = in.matrix(c.codec.patch_values(), d);
    for (std::size_t i = 0; i < c.blocks; ++i) {
        BlockWeights b;
        b.wq = in.matrix(d, d);
        b.wk = in.matrix(d, d);
        b.wv = in.matrix(d, d);
        b.wo = in.matrix(d, d);
        b.ln1_gain = in.vec(d);
        b.ln1_bias = in.vec(d);
        b.ffn_w1 = in.matrix(d, c.ffn_dim);
        b.ffn_b1 = in.vec(c.ffn_dim);
        b.ffn_w2 = in.matrix(c.ffn_dim, d);
        b.ffn_b2 = in.vec(d);
        b.ln2_gain = in.vec(d);
        b.ln2_bias = in.vec(d);
        w.blocks.push_back(std::move(b));
    }
    w.back_project = in.matrix(d, c.codec.patch_values());
    w.decoder.weight = in.matrix(d, c.codec.decode_outputs());
    w.decoder.bias = in.vec(c.codec.decode_outputs());
    if (!in.done()) throw FormatError("WTS1 trailing bytes");
    return w;
}

void write_weights(const WeightSet& w, const std::filesystem::path& path) {
    const auto bytes = serialize_weights(w);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

WeightSet read_weights(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return parse_weights(bytes);
}

} // namespace streamfill
