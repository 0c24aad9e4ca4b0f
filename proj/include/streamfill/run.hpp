#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <vector>

#include "streamfill/attention.hpp"
#include "streamfill/memory_store.hpp"
#include "streamfill/schedule.hpp"
#include "streamfill/video.hpp"

namespace streamfill {

enum class Pacing {
    synchronous,   // refiner driven to its maximal watermark before each online step
    free_running,  // two threads; the online worker never waits
    scripted,      // like synchronous, but to a given watermark per frame (tests)
};

std::string_view to_string(Pacing pacing);
Pacing parse_pacing(std::string_view name);

struct RefinerConfig {
    FrameIndex radius = 2;  // k_r: refiner windows are [w - radius, w]
    FrameIndex lag = 4;     // L: the refiner only touches frames <= f - L
    FrameIndex stride = 0;  // distance between window ends; 0 = radius + 1
    bool enabled = true;
    std::chrono::milliseconds stall{0};  // injected before each refiner window

    void validate() const;
    FrameIndex effective_stride() const { return stride > 0 ? stride : radius + 1; }
};

struct RunConfig {
    SchedulerConfig sched{};
    RefinerConfig refiner{};
    ContextToggles toggles{};
    std::size_t memory_budget_bytes = 0;  // 0 = unbounded store
    Pacing pacing = Pacing::synchronous;
    /// Pacing::scripted: watermark to reach before each frame (nullopt = none yet).
    std::vector<std::optional<FrameIndex>> script;
    bool keep_plans = false;
};

struct FrameStat {
    FrameIndex frame = 0;
    double latency_ms = 0.0;
    OpCounter macs;  // online-worker work attributed to this frame
    std::size_t context_frames = 0;
    std::optional<FrameIndex> watermark;  // refined mode: t used for this frame
};

struct RunStats {
    Mode mode = Mode::online;
    std::vector<FrameStat> frames;
    OpCounter online_macs;
    OpCounter refiner_macs;
    double elapsed_s = 0.0;       // wall clock over the timed frames
    std::size_t timed_frames = 0;  // frames covered by elapsed_s (warm-up excluded)
    StoreStats store;
    std::size_t dropped_context = 0;  // plan frames removed because they were evicted
    std::size_t self_only_frames = 0;  // frames whose plan ended up empty
    std::size_t refiner_steps = 0;
    double refiner_busy_ms = 0.0;
    std::vector<FrameIndex> watermark_log;  // every published t, in order
    std::vector<SelectionPlan> plans;       // when RunConfig::keep_plans

    double fps() const { return elapsed_s > 0.0 ? static_cast<double>(timed_frames) / elapsed_s : 0.0; }
};

struct RunResult {
    VideoClip output;
    RunStats stats;
};

} // namespace streamfill
