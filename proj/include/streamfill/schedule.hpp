#pragma once

// Index-set selection for the four inference modes. Frame indices are 0-based;
// reference frames are the indices congruent to 0 modulo the sampling rate.
//
//   offline  : window [f-k, f+k] plus refs over the whole clip
//   online   : window [f-k, f]   plus refs in [0, f]
//   memory   : neighbors [f-s, f-1] plus refs in [0, f-1]
//   refined  : online neighbors [f-s, f-1], refined neighbors [t-s', t],
//              refined refs in [0, t]

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace streamfill {

using FrameIndex = std::int64_t;

enum class Mode { offline, online, memory, refined };

std::string_view to_string(Mode mode);
/// Throws ConfigError for unknown names.
Mode parse_mode(std::string_view name);

struct SchedulerConfig {
    FrameIndex k = 5;    // window radius (offline / online)
    FrameIndex s = 5;    // online memory span
    FrameIndex sp = 3;   // refined neighbor span s'
    FrameIndex r = 10;   // sampling rate (offline / online / memory)
    FrameIndex rp = 10;  // refined sampling rate r'

    void validate() const;
};

struct SelectionPlan {
    Mode mode = Mode::online;
    FrameIndex target = 0;
    std::vector<FrameIndex> window;             // joint modes; includes target
    std::vector<FrameIndex> refs;               // offline/online/memory references
    std::vector<FrameIndex> online_neighbors;   // memory / refined
    std::vector<FrameIndex> refined_neighbors;  // refined
    std::vector<FrameIndex> refined_refs;       // refined

    /// Sorted union of every set, target excluded.
    std::vector<FrameIndex> context() const;
    /// Frames fed to a joint pass: sorted union of every set, target included.
    std::vector<FrameIndex> joint_inputs() const;

    friend bool operator==(const SelectionPlan&, const SelectionPlan&) = default;
};

/// Which parts of a plan to keep. Used by the ablation table and context sweeps.
struct ContextToggles {
    bool online_neighbors = true;
    bool refined_neighbors = true;
    bool references = true;  // refs and refined_refs
};

SelectionPlan apply_toggles(SelectionPlan plan, const ContextToggles& toggles);

/// Multiples of `rate` in [lo, hi], ascending; empty when hi < lo.
std::vector<FrameIndex> multiples_in(FrameIndex rate, FrameIndex lo, FrameIndex hi);

SelectionPlan select_offline(FrameIndex f, FrameIndex k, FrameIndex r, FrameIndex n);
SelectionPlan select_online(FrameIndex f, FrameIndex k, FrameIndex r);
SelectionPlan select_memory(FrameIndex f, FrameIndex s, FrameIndex r);
/// t == nullopt degrades to select_memory(f, s, rp). Throws ProtocolError if t >= f.
SelectionPlan select_refined(FrameIndex f, std::optional<FrameIndex> t, FrameIndex s,
                             FrameIndex sp, FrameIndex rp);

/// Non-overlapping offline windows of 2k+1 frames tiling [0, n), each with the
/// clip-wide refs; the last window may be shorter. Full windows equal
/// select_offline at their center.
std::vector<SelectionPlan> offline_tiles(FrameIndex n, FrameIndex k, FrameIndex r);

} // namespace streamfill
