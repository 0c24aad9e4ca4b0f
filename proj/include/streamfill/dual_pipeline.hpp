#pragma once

// Online inpainter + refining inpainter sharing one MemoryStore.
//
// The online worker is the only writer of online memories and the only
// emitter of output frames; it reads a store snapshot and the watermark t at
// the start of each frame and never waits on the refiner. The refiner is the
// only writer of refined memories and of t: it re-runs joint windows
// [w - k_r, w] (plus refined refs) over frames it is allowed to see
// (w <= f - L), stores the block inputs of every window frame and then
// publishes t = w.

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "streamfill/attention.hpp"
#include "streamfill/memory_store.hpp"
#include "streamfill/run.hpp"
#include "streamfill/schedule.hpp"

namespace streamfill {

/// Frames received so far. Appended by the online worker, read by the refiner.
class FrameHistory {
public:
    void append(FrameTensor frame, MaskTensor mask);
    std::size_t size() const;
    /// Copies of the received frames at `indices`.
    void gather(std::span<const FrameIndex> indices, std::vector<FrameTensor>& frames,
                std::vector<MaskTensor>& masks) const;

private:
    mutable std::mutex mutex_;
    std::vector<FrameTensor> frames_;
    std::vector<MaskTensor> masks_;
};

class DualPipeline {
public:
    /// Frame dimensions fix the token count and hence the store geometry.
    DualPipeline(const WeightSet& weights, const RunConfig& config, std::size_t height,
                 std::size_t width);

    // -- online worker --
    /// Inpaints frame next_frame(); `input` should already be corrupted.
    FrameTensor online_step(const FrameTensor& input, const MaskTensor& mask);
    FrameIndex next_frame() const { return next_frame_.load(std::memory_order_acquire); }

    // -- refiner worker --
    /// End of the next refiner window.
    FrameIndex pending_window_end() const { return next_window_end_; }
    bool refiner_ready() const;
    /// Runs one refiner window if ready; returns the newly published watermark.
    std::optional<FrameIndex> refiner_step();

    const MemoryStore& store() const { return store_; }
    /// Wakes a refiner blocked in wait_for_frames.
    void notify();
    /// Blocks until next_frame() changes from `seen` or `stop` becomes true.
    void wait_for_frames(FrameIndex seen, const std::atomic<bool>& stop);

    /// Fills the per-worker fields of `stats` (call after both workers finished).
    void collect(RunStats& stats) const;

private:
    const WeightSet& weights_;
    RunConfig config_;
    MemoryStore store_;
    FrameHistory history_;
    std::atomic<FrameIndex> next_frame_{0};

    // online worker state
    OpCounter online_macs_;
    std::vector<FrameStat> frame_stats_;
    std::vector<SelectionPlan> plans_;
    std::size_t dropped_context_ = 0;
    std::size_t self_only_frames_ = 0;

    // refiner state
    FrameIndex next_window_end_;
    OpCounter refiner_macs_;
    std::size_t refiner_steps_ = 0;
    double refiner_busy_ms_ = 0.0;
    std::vector<FrameIndex> watermark_log_;

    std::mutex wake_mutex_;
    std::condition_variable wake_;
};

/// Drops plan frames the snapshot cannot serve; returns how many were dropped.
std::size_t restrict_to_available(SelectionPlan& plan, const StoreSnapshot& snapshot);

/// Runs a whole clip through the dual pipeline with the configured pacing.
RunResult run_refined_clip(const VideoClip& clip, const RunConfig& config, const WeightSet& weights);

} // namespace streamfill
