#include "streamfill/video.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <numbers>
#include <string>

#include "streamfill/errors.hpp"
#include "streamfill/matrix.hpp"

namespace streamfill {

std::size_t MaskTensor::count() const {
    return static_cast<std::size_t>(std::count(data.begin(), data.end(), std::uint8_t{1}));
}

void VideoClip::validate() const {
    if (!masks.empty() && masks.size() != frames.size()) {
        throw_shape("clip has " + std::to_string(frames.size()) + " frames but " +
                    std::to_string(masks.size()) + " masks");
    }
    for (const auto& f : frames) {
        if (f.height != height() || f.width != width() ||
            f.data.size() != f.height * f.width * FrameTensor::kChannels) {
            throw_shape("clip frames have non-uniform dimensions");
        }
    }
    for (const auto& m : masks) {
        if (m.height != height() || m.width != width() || m.data.size() != m.height * m.width) {
            throw_shape("mask dimensions do not match frames");
        }
    }
}

void SynthConfig::validate() const {
    if (frame_count < 1) throw_config("frame_count must be >= 1");
    if (width == 0 || height == 0) throw_config("frame dimensions must be positive");
    if (downsample == 0 || width % downsample != 0 || height % downsample != 0) {
        throw_config("frame dimensions " + std::to_string(width) + "x" +
                     std::to_string(height) + " not divisible by downsample factor " +
                     std::to_string(downsample));
    }
    if (!(object_speed >= 0.0)) throw_config("object_speed must be >= 0");
}

namespace {

double reflect(double p, double extent) {
    if (extent <= 0.0) return 0.0;
    const double period = 2.0 * extent;
    double m = std::fmod(p, period);
    if (m < 0.0) m += period;
    return m <= extent ? m : period - m;
}

struct Object {
    Vec2 start;
    Vec2 velocity;
    double radius;
    bool disk;
    std::array<float, 3> color;
};

} // namespace

Vec2 object_center(Vec2 start, Vec2 velocity, double t, std::size_t width, std::size_t height) {
    return {reflect(start.x + velocity.x * t, static_cast<double>(width) - 1.0),
            reflect(start.y + velocity.y * t, static_cast<double>(height) - 1.0)};
}

VideoClip synth_video(const SynthConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    const std::size_t h = cfg.height;
    const std::size_t w = cfg.width;

    FrameTensor background(h, w);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const double fx = static_cast<double>(x) / static_cast<double>(w);
            const double fy = static_cast<double>(y) / static_cast<double>(h);
            if (cfg.background == Background::gradient) {
                background.at(y, x, 0) = static_cast<float>(0.2 + 0.6 * fx);
                background.at(y, x, 1) = static_cast<float>(0.2 + 0.6 * fy);
                background.at(y, x, 2) = static_cast<float>(0.5 + 0.25 * std::sin(6.0 * (fx + fy)));
            } else {
                for (std::size_t c = 0; c < 3; ++c) {
                    background.at(y, x, c) = static_cast<float>(0.25 + 0.5 * rng.uniform());
                }
            }
        }
    }

    std::vector<Object> objects;
    const double min_side = static_cast<double>(std::min(w, h));
    for (std::size_t i = 0; i < cfg.object_count; ++i) {
        Object o{};
        o.start = {rng.uniform() * static_cast<double>(w - 1),
                   rng.uniform() * static_cast<double>(h - 1)};
        const double angle = 2.0 * std::numbers::pi * rng.uniform();
        o.velocity = {cfg.object_speed * std::cos(angle), cfg.object_speed * std::sin(angle)};
        o.radius = std::max(1.0, min_side * (0.08 + 0.1 * rng.uniform()));
        o.disk = (i % 2) == 1;
        for (float& c : o.color) c = static_cast<float>(rng.uniform());
        objects.push_back(o);
    }

    VideoClip clip;
    clip.frames.reserve(cfg.frame_count);
    for (std::size_t t = 0; t < cfg.frame_count; ++t) {
        FrameTensor frame = background;
        for (const Object& o : objects) {
            const Vec2 c = object_center(o.start, o.velocity, static_cast<double>(t), w, h);
            for (std::size_t y = 0; y < h; ++y) {
                for (std::size_t x = 0; x < w; ++x) {
                    const double dx = static_cast<double>(x) - c.x;
                    const double dy = static_cast<double>(y) - c.y;
                    const bool inside = o.disk ? dx * dx + dy * dy <= o.radius * o.radius
                                               : std::abs(dx) <= o.radius && std::abs(dy) <= o.radius;
                    if (!inside) continue;
                    for (std::size_t ch = 0; ch < 3; ++ch) frame.at(y, x, ch) = o.color[ch];
                }
            }
        }
        clip.frames.push_back(std::move(frame));
    }
    return clip;
}

namespace {

MaskTensor rasterize(const SynthConfig& cfg, Rect rect) {
    if (rect.x + rect.w > cfg.width || rect.y + rect.h > cfg.height) {
        throw_config("mask rect out of frame bounds");
    }
    MaskTensor m(cfg.height, cfg.width);
    for (std::size_t y = rect.y; y < rect.y + rect.h; ++y) {
        for (std::size_t x = rect.x; x < rect.x + rect.w; ++x) m.at(y, x) = 1;
    }
    return m;
}

} // namespace

std::vector<MaskTensor> stationary_mask(const SynthConfig& cfg, Rect rect) {
    return std::vector<MaskTensor>(cfg.frame_count, rasterize(cfg, rect));
}

std::vector<MaskTensor> moving_mask(const SynthConfig& cfg, std::span<const Rect> track) {
    if (track.size() != cfg.frame_count) {
        throw_config("mask track has " + std::to_string(track.size()) + " rects for " +
                     std::to_string(cfg.frame_count) + " frames");
    }
    std::vector<MaskTensor> masks;
    masks.reserve(track.size());
    for (const Rect& r : track) masks.push_back(rasterize(cfg, r));
    return masks;
}

std::vector<MaskTensor> default_masks(const SynthConfig& cfg, MaskKind kind) {
    cfg.validate();
    if (kind == MaskKind::stationary) {
        return stationary_mask(cfg, {cfg.width / 4, cfg.height / 4, cfg.width / 2, cfg.height / 2});
    }
    const std::size_t w = std::max<std::size_t>(1, cfg.width / 4);
    const std::size_t h = std::max<std::size_t>(1, cfg.height / 4);
    std::vector<Rect> track;
    for (std::size_t t = 0; t < cfg.frame_count; ++t) {
        track.push_back({t % (cfg.width - w + 1), (cfg.height - h) / 2, w, h});
    }
    return moving_mask(cfg, track);
}

VideoClip synth_masked_clip(const SynthConfig& cfg, MaskKind kind) {
    VideoClip clip = synth_video(cfg);
    clip.masks = default_masks(cfg, kind);
    return clip;
}

VideoClip corrupt(const VideoClip& clip) {
    clip.validate();
    if (clip.masks.size() != clip.frames.size()) throw_shape("corrupt: clip has no masks");
    VideoClip out = clip;
    for (std::size_t i = 0; i < out.frames.size(); ++i) {
        FrameTensor& f = out.frames[i];
        const MaskTensor& m = clip.masks[i];
        for (std::size_t p = 0; p < m.data.size(); ++p) {
            const float keep = 1.0f - static_cast<float>(m.data[p]);
            for (std::size_t c = 0; c < FrameTensor::kChannels; ++c) {
                f.data[p * FrameTensor::kChannels + c] *= keep;
            }
        }
    }
    return out;
}

namespace {

std::uint8_t to_byte(float v) {
    const float clamped = std::clamp(v, 0.0f, 1.0f);
    return static_cast<std::uint8_t>(std::lround(clamped * 255.0f));
}

constexpr std::array<char, 4> kMagic = {'R', 'V', 'V', '1'};
constexpr std::size_t kHeaderBytes = 4 + 4 * 4;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t offset) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[offset + i]) << (8 * i);
    return v;
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
    if (v > std::numeric_limits<std::uint32_t>::max()) {
        throw FormatError(std::string("RVV field overflows u32: ") + what);
    }
    return static_cast<std::uint32_t>(v);
}

} // namespace

FrameTensor quantize(const FrameTensor& frame) {
    FrameTensor q = frame;
    for (float& v : q.data) v = static_cast<float>(to_byte(v)) / 255.0f;
    return q;
}

RvvData encode_frames(std::span<const FrameTensor> frames) {
    RvvData rvv;
    rvv.channels = FrameTensor::kChannels;
    rvv.frame_count = checked_u32(frames.size(), "frame_count");
    if (!frames.empty()) {
        rvv.height = checked_u32(frames.front().height, "height");
        rvv.width = checked_u32(frames.front().width, "width");
    }
    for (const auto& f : frames) {
        if (f.height != rvv.height || f.width != rvv.width) throw_shape("non-uniform frames");
        for (float v : f.data) rvv.payload.push_back(to_byte(v));
    }
    return rvv;
}

RvvData encode_masks(std::span<const MaskTensor> masks) {
    RvvData rvv;
    rvv.channels = 1;
    rvv.frame_count = checked_u32(masks.size(), "frame_count");
    if (!masks.empty()) {
        rvv.height = checked_u32(masks.front().height, "height");
        rvv.width = checked_u32(masks.front().width, "width");
    }
    for (const auto& m : masks) {
        if (m.height != rvv.height || m.width != rvv.width) throw_shape("non-uniform masks");
        for (std::uint8_t v : m.data) rvv.payload.push_back(v ? 255 : 0);
    }
    return rvv;
}

std::vector<FrameTensor> decode_frames(const RvvData& rvv) {
    if (rvv.channels != FrameTensor::kChannels) {
        throw FormatError("expected a 3-channel RVV video, got " + std::to_string(rvv.channels));
    }
    const std::size_t per_frame = std::size_t{rvv.width} * rvv.height * rvv.channels;
    std::vector<FrameTensor> frames;
    frames.reserve(rvv.frame_count);
    for (std::size_t i = 0; i < rvv.frame_count; ++i) {
        FrameTensor f(rvv.height, rvv.width);
        for (std::size_t p = 0; p < per_frame; ++p) {
            f.data[p] = static_cast<float>(rvv.payload[i * per_frame + p]) / 255.0f;
        }
        frames.push_back(std::move(f));
    }
    return frames;
}

std::vector<MaskTensor> decode_masks(const RvvData& rvv) {
    if (rvv.channels != 1) {
        throw FormatError("expected a 1-channel RVV mask, got " + std::to_string(rvv.channels));
    }
    const std::size_t per_frame = std::size_t{rvv.width} * rvv.height;
    std::vector<MaskTensor> masks;
    masks.reserve(rvv.frame_count);
    for (std::size_t i = 0; i < rvv.frame_count; ++i) {
        MaskTensor m(rvv.height, rvv.width);
        for (std::size_t p = 0; p < per_frame; ++p) {
            const std::uint8_t b = rvv.payload[i * per_frame + p];
            if (b != 0 && b != 255) throw FormatError("mask byte must be 0 or 255");
            m.data[p] = b ? 1 : 0;
        }
        masks.push_back(std::move(m));
    }
    return masks;
}

std::vector<std::uint8_t> serialize_rvv(const RvvData& rvv) {
    std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
    put_u32(out, rvv.width);
    put_u32(out, rvv.height);
    put_u32(out, rvv.channels);
    put_u32(out, rvv.frame_count);
    out.insert(out.end(), rvv.payload.begin(), rvv.payload.end());
    return out;
}

RvvData parse_rvv(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kHeaderBytes) throw FormatError("RVV file truncated in header");
    if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
        throw FormatError("bad RVV magic");
    }
    RvvData rvv;
    rvv.width = get_u32(bytes, 4);
    rvv.height = get_u32(bytes, 8);
    rvv.channels = get_u32(bytes, 12);
    rvv.frame_count = get_u32(bytes, 16);
    if (rvv.channels == 0) throw FormatError("RVV channel count is zero");

    // 4 x u32 fits in 128 bits; reject anything that cannot fit in size_t.
    unsigned __int128 expected = rvv.width;
    expected *= rvv.height;
    expected *= rvv.channels;
    expected *= rvv.frame_count;
    if (expected > std::numeric_limits<std::size_t>::max() - kHeaderBytes) {
        throw FormatError("RVV dimensions overflow");
    }
    const auto payload = static_cast<std::size_t>(expected);
    if (bytes.size() - kHeaderBytes < payload) throw FormatError("RVV payload truncated");
    if (bytes.size() - kHeaderBytes > payload) throw FormatError("RVV payload has trailing bytes");
    rvv.payload.assign(bytes.begin() + kHeaderBytes, bytes.end());
    return rvv;
}

void write_rvv(const RvvData& rvv, const std::filesystem::path& path) {
    const auto bytes = serialize_rvv(rvv);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

RvvData read_rvv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return parse_rvv(bytes);
}

void write_clip(const VideoClip& clip, const std::filesystem::path& video_path,
                const std::filesystem::path& mask_path) {
    clip.validate();
    write_rvv(encode_frames(clip.frames), video_path);
    write_rvv(encode_masks(clip.masks), mask_path);
}

VideoClip read_clip(const std::filesystem::path& video_path,
                    const std::filesystem::path& mask_path) {
    VideoClip clip;
    clip.frames = decode_frames(read_rvv(video_path));
    clip.masks = decode_masks(read_rvv(mask_path));
    if (clip.frames.size() != clip.masks.size()) {
        throw FormatError("video has " + std::to_string(clip.frames.size()) +
                          " frames but mask file has " + std::to_string(clip.masks.size()));
    }
    try {
        clip.validate();
    } catch (const ShapeError& e) {
        throw FormatError(e.what());
    }
    return clip;
}

} // namespace streamfill
