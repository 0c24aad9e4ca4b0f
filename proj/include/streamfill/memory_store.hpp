#pragma once

// Per-(block, frame) token memories for the online inpainter and the refined
// overlay written by the refiner. A frame is always stored with all B block
// entries at once and evicted the same way.
//
// Writers copy-on-write an immutable state under a mutex; readers take a
// snapshot (a shared pointer to that state), so a snapshot never changes and
// never holds a torn frame. Refined entries are only visible for frames at or
// below the published watermark.

#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "streamfill/attention.hpp"
#include "streamfill/codec.hpp"
#include "streamfill/schedule.hpp"

namespace streamfill {

enum class MemorySide { online, refined };

struct MemoryKey {
    std::size_t block = 0;
    FrameIndex frame = 0;

    friend bool operator==(const MemoryKey&, const MemoryKey&) = default;
};

/// Thrown when a plan references a (block, frame) that is not in the store.
class CacheMiss : public std::runtime_error {
public:
    explicit CacheMiss(std::vector<MemoryKey> missing);
    const std::vector<MemoryKey>& missing() const { return missing_; }

private:
    std::vector<MemoryKey> missing_;
};

struct StoreGeometry {
    std::size_t blocks = 0;
    std::size_t tokens = 0;
    std::size_t dim = 0;

    std::size_t frame_bytes() const { return blocks * tokens * dim * sizeof(float); }
};

struct EvictionPolicy {
    FrameIndex span = 0;           // protected neighbors [f - span, f - 1]
    FrameIndex rate = 1;           // sampled frames (index % rate == 0) go last
    std::size_t budget_bytes = 0;  // 0 = unbounded

    bool bounded() const { return budget_bytes != 0; }
    /// Throws ConfigError if the budget cannot hold one protected span.
    void validate(const StoreGeometry& geometry) const;
};

using FrameEntries = std::vector<TokenGrid>;

struct StoreStats {
    std::size_t online_frames = 0;
    std::size_t refined_frames = 0;
    std::size_t bytes = 0;
    std::size_t peak_bytes = 0;
    std::size_t evictions = 0;  // frames removed so far
    std::optional<FrameIndex> watermark;
};

class StoreSnapshot {
public:
    struct State {
        std::map<FrameIndex, std::shared_ptr<const FrameEntries>> online;
        std::map<FrameIndex, std::shared_ptr<const FrameEntries>> refined;
        std::optional<FrameIndex> watermark;
        std::size_t bytes = 0;
    };

    StoreSnapshot() : state_(std::make_shared<const State>()) {}
    explicit StoreSnapshot(std::shared_ptr<const State> s) : state_(std::move(s)) {}

    std::optional<FrameIndex> watermark() const { return state_->watermark; }
    std::size_t bytes() const { return state_->bytes; }

    /// Refined entries above the watermark are treated as absent.
    const FrameEntries* find(FrameIndex frame, MemorySide side) const;
    /// Refined wins over online when a frame is visible on both sides.
    std::optional<MemorySide> source_of(FrameIndex frame) const;
    bool has(FrameIndex frame) const { return source_of(frame).has_value(); }

    std::vector<FrameIndex> frames(MemorySide side) const;
    std::size_t frame_count() const;

    /// Entries for block `block` of every context frame of `plan`, in plan order.
    std::vector<const TokenGrid*> select_context(const SelectionPlan& plan,
                                                 std::size_t block) const;
    /// select_context for every block; CacheMiss lists every missing key.
    BlockContext resolve(const SelectionPlan& plan, std::size_t blocks) const;

    /// Pointers returned above stay valid while this snapshot (or a copy) lives.
    const State& state() const { return *state_; }

private:
    std::shared_ptr<const State> state_;
};

class MemoryStore {
public:
    explicit MemoryStore(StoreGeometry geometry, EvictionPolicy policy = {},
                         FrameIndex refine_ahead = std::numeric_limits<FrameIndex>::max() / 2);

    /// Atomic insert (or replace) of all block entries of `frame`. Online puts
    /// run the store's eviction policy against frame + 1 afterwards. Refined
    /// puts must stay within `refine_ahead` frames of the current watermark.
    void put_frame(FrameIndex frame, FrameEntries entries, MemorySide side);

    /// Watermarks only move forward.
    void publish_watermark(FrameIndex t);

    /// Evicts whole frames until under `policy.budget_bytes`; returns evicted indices.
    std::vector<FrameIndex> evict(const EvictionPolicy& policy, FrameIndex current);

    StoreSnapshot snapshot() const;
    StoreStats stats() const;
    const StoreGeometry& geometry() const { return geometry_; }
    const EvictionPolicy& policy() const { return policy_; }

private:
    std::vector<FrameIndex> evict_locked(StoreSnapshot::State& s, const EvictionPolicy& policy,
                                         FrameIndex current);
    void publish_locked(StoreSnapshot::State next);

    StoreGeometry geometry_;
    EvictionPolicy policy_;
    FrameIndex refine_ahead_;

    mutable std::mutex mutex_;
    std::shared_ptr<const StoreSnapshot::State> state_;
    std::size_t peak_bytes_ = 0;
    std::size_t evictions_ = 0;
    FrameIndex latest_online_ = -1;
};

} // namespace streamfill
