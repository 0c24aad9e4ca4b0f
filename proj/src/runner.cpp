#include "streamfill/runner.hpp"

#include <chrono>

#include "streamfill/dual_pipeline.hpp"
#include "streamfill/errors.hpp"
#include "streamfill/memory_store.hpp"

namespace streamfill {

namespace {

using Clock = std::chrono::steady_clock;

double ms_between(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

double seconds_between(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

void gather(const VideoClip& clip, const std::vector<FrameIndex>& idx,
            std::vector<FrameTensor>& frames, std::vector<MaskTensor>& masks) {
    frames.clear();
    masks.clear();
    for (FrameIndex i : idx) {
        frames.push_back(clip.frames[static_cast<std::size_t>(i)]);
        masks.push_back(clip.masks[static_cast<std::size_t>(i)]);
    }
}

RunResult start_result(const VideoClip& clip, Mode mode) {
    RunResult r;
    r.output.fps_nominal = clip.fps_nominal;
    r.output.masks = clip.masks;
    r.output.frames.resize(clip.size());
    r.stats.mode = mode;
    return r;
}

} // namespace

void check_clip_for_weights(const VideoClip& clip, const WeightSet& weights) {
    clip.validate();
    if (clip.size() == 0) throw_shape("clip has no frames");
    const std::size_t e = weights.config.codec.downsample;
    if (clip.height() % e != 0 || clip.width() % e != 0) {
        throw_shape("frame size " + std::to_string(clip.width()) + "x" +
                    std::to_string(clip.height()) + " is not divisible by downsample " +
                    std::to_string(e));
    }
}

RunResult run_offline_clip(const VideoClip& clip, const RunConfig& config, const WeightSet& weights) {
    check_clip_for_weights(clip, weights);
    config.sched.validate();
    const VideoClip input = corrupt(clip);
    const auto n = static_cast<FrameIndex>(input.size());
    RunResult result = start_result(clip, Mode::offline);

    std::vector<FrameTensor> frames;
    std::vector<MaskTensor> masks;
    Clock::time_point timed_start;
    for (SelectionPlan plan : offline_tiles(n, config.sched.k, config.sched.r)) {
        plan = apply_toggles(std::move(plan), config.toggles);
        const auto t0 = Clock::now();
        const auto inputs = plan.joint_inputs();
        gather(input, inputs, frames, masks);
        OpCounter tile;
        JointResult joint = run_stack_joint(frames, masks, weights, tile);
        const auto t1 = Clock::now();

        const double share = ms_between(t0, t1) / static_cast<double>(plan.window.size());
        const OpCounter none;
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            const FrameIndex f = inputs[i];
            if (f < plan.window.front() || f > plan.window.back()) continue;
            result.output.frames[static_cast<std::size_t>(f)] = std::move(joint.outputs[i]);
            // The tile's work is attributed to its first frame.
            result.stats.frames.push_back({f, share, f == plan.window.front() ? tile : none,
                                           inputs.size() - 1, std::nullopt});
        }
        result.stats.online_macs += tile;
        if (plan.window.front() == 0) {
            timed_start = t1;
        } else {
            result.stats.timed_frames += plan.window.size();
            result.stats.elapsed_s = seconds_between(timed_start, t1);
        }
        if (config.keep_plans) result.stats.plans.push_back(std::move(plan));
    }
    return result;
}

RunResult run_online_clip(const VideoClip& clip, const RunConfig& config, const WeightSet& weights) {
    check_clip_for_weights(clip, weights);
    config.sched.validate();
    const VideoClip input = corrupt(clip);
    const auto n = static_cast<FrameIndex>(input.size());
    RunResult result = start_result(clip, Mode::online);

    std::vector<FrameTensor> frames;
    std::vector<MaskTensor> masks;
    Clock::time_point timed_start;
    for (FrameIndex f = 0; f < n; ++f) {
        const auto t0 = Clock::now();
        SelectionPlan plan =
            apply_toggles(select_online(f, config.sched.k, config.sched.r), config.toggles);
        const auto inputs = plan.joint_inputs();
        gather(input, inputs, frames, masks);
        OpCounter step;
        JointResult joint = run_stack_joint(frames, masks, weights, step);
        // The target is the newest frame, hence the last input.
        result.output.frames[static_cast<std::size_t>(f)] = std::move(joint.outputs.back());
        const auto t1 = Clock::now();

        result.stats.frames.push_back({f, ms_between(t0, t1), step, inputs.size() - 1, std::nullopt});
        result.stats.online_macs += step;
        if (f == 0) timed_start = t1;
        if (config.keep_plans) result.stats.plans.push_back(std::move(plan));
    }
    result.stats.timed_frames = static_cast<std::size_t>(n - 1);
    result.stats.elapsed_s = seconds_between(timed_start, Clock::now());
    return result;
}

RunResult run_memory_clip(const VideoClip& clip, const RunConfig& config, const WeightSet& weights) {
    check_clip_for_weights(clip, weights);
    config.sched.validate();
    const VideoClip input = corrupt(clip);
    const auto n = static_cast<FrameIndex>(input.size());
    RunResult result = start_result(clip, Mode::memory);

    const auto& codec = weights.config.codec;
    const TokenLayout layout =
        token_layout(input.height() / codec.downsample, input.width() / codec.downsample, codec);
    MemoryStore store({weights.config.blocks, layout.tokens(), weights.config.dim},
                      EvictionPolicy{config.sched.s, config.sched.r, config.memory_budget_bytes});

    Clock::time_point timed_start;
    for (FrameIndex f = 0; f < n; ++f) {
        const auto t0 = Clock::now();
        const StoreSnapshot snap = store.snapshot();
        SelectionPlan plan =
            apply_toggles(select_memory(f, config.sched.s, config.sched.r), config.toggles);
        if (store.policy().bounded()) result.stats.dropped_context += restrict_to_available(plan, snap);
        const std::size_t context = plan.context().size();
        if (context == 0) ++result.stats.self_only_frames;

        const BlockContext ctx = snap.resolve(plan, weights.config.blocks);
        OpCounter step;
        const auto& frame = input.frames[static_cast<std::size_t>(f)];
        const auto& mask = input.masks[static_cast<std::size_t>(f)];
        MemoryStepResult out = run_stack_memory(frame, mask, ctx, weights, step);
        store.put_frame(f, std::move(out.entries), MemorySide::online);
        result.output.frames[static_cast<std::size_t>(f)] = std::move(out.output);
        const auto t1 = Clock::now();

        result.stats.frames.push_back({f, ms_between(t0, t1), step, context, std::nullopt});
        result.stats.online_macs += step;
        if (f == 0) timed_start = t1;
        if (config.keep_plans) result.stats.plans.push_back(std::move(plan));
    }
    result.stats.timed_frames = static_cast<std::size_t>(n - 1);
    result.stats.elapsed_s = seconds_between(timed_start, Clock::now());
    result.stats.store = store.stats();
    return result;
}

RunResult run_clip(const VideoClip& clip, Mode mode, const RunConfig& config,
                   const WeightSet& weights) {
    switch (mode) {
    case Mode::offline: return run_offline_clip(clip, config, weights);
    case Mode::online: return run_online_clip(clip, config, weights);
    case Mode::memory: return run_memory_clip(clip, config, weights);
    case Mode::refined:
        check_clip_for_weights(clip, weights);
        return run_refined_clip(clip, config, weights);
    }
    throw_config("unknown mode");
}

} // namespace streamfill
