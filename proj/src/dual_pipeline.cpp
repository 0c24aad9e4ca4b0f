#include "streamfill/dual_pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

#include "streamfill/errors.hpp"

namespace streamfill {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

StoreGeometry geometry_for(const WeightSet& w, std::size_t height, std::size_t width) {
    const auto& c = w.config.codec;
    if (height % c.downsample != 0 || width % c.downsample != 0) {
        throw_shape("frame size not divisible by the codec downsample factor");
    }
    const TokenLayout l = token_layout(height / c.downsample, width / c.downsample, c);
    return {w.config.blocks, l.tokens(), w.config.dim};
}

} // namespace

std::string_view to_string(Pacing pacing) {
    switch (pacing) {
    case Pacing::synchronous: return "synchronous";
    case Pacing::free_running: return "free-running";
    case Pacing::scripted: return "scripted";
    }
    return "?";
}

Pacing parse_pacing(std::string_view name) {
    if (name == "synchronous" || name == "sync") return Pacing::synchronous;
    if (name == "free-running" || name == "free_running" || name == "free") {
        return Pacing::free_running;
    }
    throw_config("unknown pacing '" + std::string(name) + "'");
}

void RefinerConfig::validate() const {
    if (radius < 0) throw_config("refiner radius must be >= 0");
    if (lag < 1) throw_config("refiner lag L must be >= 1");
    if (stride < 0) throw_config("refiner stride must be >= 0");
}

void FrameHistory::append(FrameTensor frame, MaskTensor mask) {
    std::lock_guard lock(mutex_);
    frames_.push_back(std::move(frame));
    masks_.push_back(std::move(mask));
}

std::size_t FrameHistory::size() const {
    std::lock_guard lock(mutex_);
    return frames_.size();
}

void FrameHistory::gather(std::span<const FrameIndex> indices, std::vector<FrameTensor>& frames,
                          std::vector<MaskTensor>& masks) const {
    std::lock_guard lock(mutex_);
    for (FrameIndex i : indices) {
        if (i < 0 || static_cast<std::size_t>(i) >= frames_.size()) {
            throw ProtocolError("refiner asked for frame " + std::to_string(i) +
                                " which has not been received");
        }
        frames.push_back(frames_[static_cast<std::size_t>(i)]);
        masks.push_back(masks_[static_cast<std::size_t>(i)]);
    }
}

std::size_t restrict_to_available(SelectionPlan& plan, const StoreSnapshot& snapshot) {
    std::size_t dropped = 0;
    auto keep = [&](std::vector<FrameIndex>& set) {
        dropped += static_cast<std::size_t>(
            std::erase_if(set, [&](FrameIndex f) { return !snapshot.has(f); }));
    };
    keep(plan.refs);
    keep(plan.online_neighbors);
    keep(plan.refined_neighbors);
    keep(plan.refined_refs);
    return dropped;
}

DualPipeline::DualPipeline(const WeightSet& weights, const RunConfig& config, std::size_t height,
                           std::size_t width)
    : weights_(weights),
      config_(config),
      store_(geometry_for(weights, height, width),
             EvictionPolicy{config.sched.s, config.sched.rp, config.memory_budget_bytes},
             std::max(config.refiner.radius + 1, config.refiner.effective_stride())),
      next_window_end_(config.refiner.radius) {
    config_.sched.validate();
    config_.refiner.validate();
}

FrameTensor DualPipeline::online_step(const FrameTensor& input, const MaskTensor& mask) {
    const auto t0 = Clock::now();
    const FrameIndex f = next_frame();
    history_.append(input, mask);

    const StoreSnapshot snap = store_.snapshot();
    const std::optional<FrameIndex> t = snap.watermark();
    if (t && *t > f - config_.refiner.lag) {
        throw ProtocolError("watermark " + std::to_string(*t) + " violates lag bound at frame " +
                            std::to_string(f));
    }
    SelectionPlan plan = apply_toggles(
        select_refined(f, t, config_.sched.s, config_.sched.sp, config_.sched.rp), config_.toggles);
    if (store_.policy().bounded()) dropped_context_ += restrict_to_available(plan, snap);
    const auto context = plan.context();
    if (context.empty()) ++self_only_frames_;

    const BlockContext ctx = snap.resolve(plan, weights_.config.blocks);
    const OpCounter before = online_macs_;
    MemoryStepResult step = run_stack_memory(input, mask, ctx, weights_, online_macs_);
    store_.put_frame(f, std::move(step.entries), MemorySide::online);

    frame_stats_.push_back({f, ms_since(t0), online_macs_ - before, context.size(), t});
    if (config_.keep_plans) plans_.push_back(std::move(plan));

    next_frame_.store(f + 1, std::memory_order_release);
    notify();
    return std::move(step.output);
}

bool DualPipeline::refiner_ready() const {
    return config_.refiner.enabled && next_window_end_ <= next_frame() - config_.refiner.lag;
}

std::optional<FrameIndex> DualPipeline::refiner_step() {
    if (!refiner_ready()) return std::nullopt;
    const auto t0 = Clock::now();
    const FrameIndex w = next_window_end_;
    const FrameIndex lo = std::max<FrameIndex>(0, w - config_.refiner.radius);

    std::vector<FrameIndex> inputs = multiples_in(config_.sched.rp, 0, lo - 1);
    for (FrameIndex i = lo; i <= w; ++i) inputs.push_back(i);
    std::vector<FrameTensor> frames;
    std::vector<MaskTensor> masks;
    history_.gather(inputs, frames, masks);

    JointResult joint = run_stack_joint(frames, masks, weights_, refiner_macs_, true);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (inputs[i] < lo) continue;
        store_.put_frame(inputs[i], std::move(joint.block_inputs[i]), MemorySide::refined);
    }
    store_.publish_watermark(w);
    watermark_log_.push_back(w);
    next_window_end_ += config_.refiner.effective_stride();
    ++refiner_steps_;
    refiner_busy_ms_ += ms_since(t0);
    return w;
}

void DualPipeline::notify() {
    { std::lock_guard lock(wake_mutex_); }
    wake_.notify_all();
}

void DualPipeline::wait_for_frames(FrameIndex seen, const std::atomic<bool>& stop) {
    std::unique_lock lock(wake_mutex_);
    wake_.wait_for(lock, std::chrono::milliseconds(5),
                   [&] { return stop.load() || next_frame() != seen; });
}

void DualPipeline::collect(RunStats& stats) const {
    stats.frames = frame_stats_;
    stats.online_macs = online_macs_;
    stats.refiner_macs = refiner_macs_;
    stats.store = store_.stats();
    stats.dropped_context = dropped_context_;
    stats.self_only_frames = self_only_frames_;
    stats.refiner_steps = refiner_steps_;
    stats.refiner_busy_ms = refiner_busy_ms_;
    stats.watermark_log = watermark_log_;
    stats.plans = plans_;
}

RunResult run_refined_clip(const VideoClip& clip, const RunConfig& config, const WeightSet& weights) {
    const VideoClip input = corrupt(clip);
    DualPipeline pipe(weights, config, input.height(), input.width());
    const std::size_t n = input.size();
    if (config.pacing == Pacing::scripted && config.script.size() != n) {
        throw_config("scripted pacing needs one watermark entry per frame");
    }

    RunResult result;
    result.output.fps_nominal = clip.fps_nominal;
    result.output.masks = clip.masks;
    std::vector<double> drive_ms(n, 0.0);
    Clock::time_point timed_start;

    if (config.pacing == Pacing::free_running) {
        std::atomic<bool> stop{false};
        std::thread refiner([&] {
            while (!stop.load()) {
                if (pipe.refiner_ready()) {
                    if (config.refiner.stall.count() > 0) {
                        const auto until = Clock::now() + config.refiner.stall;
                        while (!stop.load() && Clock::now() < until) {
                            std::this_thread::sleep_for(std::chrono::microseconds(200));
                        }
                        if (stop.load()) break;
                    }
                    pipe.refiner_step();
                } else {
                    pipe.wait_for_frames(pipe.next_frame(), stop);
                }
            }
        });
        try {
            for (std::size_t i = 0; i < n; ++i) {
                result.output.frames.push_back(pipe.online_step(input.frames[i], input.masks[i]));
                if (i == 0) timed_start = Clock::now();
            }
        } catch (...) {
            stop = true;
            pipe.notify();
            refiner.join();
            throw;
        }
        const auto end = Clock::now();
        stop = true;
        pipe.notify();
        refiner.join();
        result.stats.elapsed_s = std::chrono::duration<double>(end - timed_start).count();
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const auto t0 = Clock::now();
            const auto f = static_cast<FrameIndex>(i);
            if (config.pacing == Pacing::scripted) {
                if (const auto& target = config.script[i]) {
                    while (pipe.pending_window_end() <= *target) {
                        if (!pipe.refiner_step()) {
                            throw ProtocolError("scripted watermark " + std::to_string(*target) +
                                                " not reachable before frame " + std::to_string(f));
                        }
                    }
                }
            } else {
                while (pipe.refiner_step()) {
                }
            }
            drive_ms[i] = ms_since(t0);
            result.output.frames.push_back(pipe.online_step(input.frames[i], input.masks[i]));
            if (i == 0) timed_start = Clock::now();
        }
        result.stats.elapsed_s =
            std::chrono::duration<double>(Clock::now() - timed_start).count();
    }

    result.stats.mode = Mode::refined;
    result.stats.timed_frames = n > 0 ? n - 1 : 0;
    pipe.collect(result.stats);
    for (std::size_t i = 0; i < result.stats.frames.size(); ++i) {
        result.stats.frames[i].latency_ms += drive_ms[i];
    }
    return result;
}

} // namespace streamfill
