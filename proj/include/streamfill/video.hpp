#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace streamfill {

/// H x W x 3 frame, channel-interleaved, values in [0, 1].
struct FrameTensor {
    static constexpr std::size_t kChannels = 3;

    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<float> data;

    FrameTensor() = default;
    FrameTensor(std::size_t h, std::size_t w, float fill = 0.0f)
        : height(h), width(w), data(h * w * kChannels, fill) {}

    float& at(std::size_t y, std::size_t x, std::size_t c) {
        return data[(y * width + x) * kChannels + c];
    }
    float at(std::size_t y, std::size_t x, std::size_t c) const {
        return data[(y * width + x) * kChannels + c];
    }

    friend bool operator==(const FrameTensor&, const FrameTensor&) = default;
};

/// Binary mask: 1 marks a missing pixel.
struct MaskTensor {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<std::uint8_t> data;

    MaskTensor() = default;
    MaskTensor(std::size_t h, std::size_t w, std::uint8_t fill = 0)
        : height(h), width(w), data(h * w, fill) {}

    std::uint8_t& at(std::size_t y, std::size_t x) { return data[y * width + x]; }
    std::uint8_t at(std::size_t y, std::size_t x) const { return data[y * width + x]; }
    std::size_t count() const;

    friend bool operator==(const MaskTensor&, const MaskTensor&) = default;
};

struct VideoClip {
    std::vector<FrameTensor> frames;
    std::vector<MaskTensor> masks;
    double fps_nominal = 25.0;

    std::size_t size() const { return frames.size(); }
    std::size_t height() const { return frames.empty() ? 0 : frames.front().height; }
    std::size_t width() const { return frames.empty() ? 0 : frames.front().width; }

    /// Throws ShapeError unless lengths and dimensions are uniform.
    void validate() const;

    friend bool operator==(const VideoClip&, const VideoClip&) = default;
};

enum class Background { gradient, noise };

struct SynthConfig {
    std::size_t width = 32;
    std::size_t height = 32;
    std::size_t frame_count = 30;
    std::size_t object_count = 2;
    std::uint64_t seed = 0;
    Background background = Background::gradient;
    double object_speed = 1.5;   // pixels per frame
    std::size_t downsample = 4;  // must divide width and height

    void validate() const;
};

struct Rect {
    std::size_t x = 0;
    std::size_t y = 0;
    std::size_t w = 0;
    std::size_t h = 0;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// Center of an object moving at constant velocity, reflected at the borders of
/// [0, width-1] x [0, height-1].
Vec2 object_center(Vec2 start, Vec2 velocity, double t, std::size_t width, std::size_t height);

/// Frames only; masks are attached separately.
VideoClip synth_video(const SynthConfig& cfg);

std::vector<MaskTensor> stationary_mask(const SynthConfig& cfg, Rect rect);
std::vector<MaskTensor> moving_mask(const SynthConfig& cfg, std::span<const Rect> track);

enum class MaskKind { stationary, moving };

/// Centered rectangle of half the frame size; the moving variant is a
/// quarter-size rectangle drifting right by one pixel per frame and wrapping.
std::vector<MaskTensor> default_masks(const SynthConfig& cfg, MaskKind kind);

/// synth_video with default_masks attached.
VideoClip synth_masked_clip(const SynthConfig& cfg, MaskKind kind = MaskKind::stationary);

/// X = Y * (1 - M), mask broadcast over channels.
VideoClip corrupt(const VideoClip& clip);

/// Rounds every value to the nearest multiple of 1/255 (the RVV representation).
FrameTensor quantize(const FrameTensor& frame);

// RVV file: "RVV1", u32 LE {width, height, channels, frame_count}, then
// frame-major, row-major, channel-interleaved u8 payload.
struct RvvData {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::uint32_t channels = 0;
    std::uint32_t frame_count = 0;
    std::vector<std::uint8_t> payload;

    friend bool operator==(const RvvData&, const RvvData&) = default;
};

RvvData encode_frames(std::span<const FrameTensor> frames);
RvvData encode_masks(std::span<const MaskTensor> masks);
std::vector<FrameTensor> decode_frames(const RvvData& rvv);
std::vector<MaskTensor> decode_masks(const RvvData& rvv);

std::vector<std::uint8_t> serialize_rvv(const RvvData& rvv);
RvvData parse_rvv(std::span<const std::uint8_t> bytes);

void write_rvv(const RvvData& rvv, const std::filesystem::path& path);
RvvData read_rvv(const std::filesystem::path& path);

void write_clip(const VideoClip& clip, const std::filesystem::path& video_path,
                const std::filesystem::path& mask_path);
VideoClip read_clip(const std::filesystem::path& video_path,
                    const std::filesystem::path& mask_path);

} // namespace streamfill
