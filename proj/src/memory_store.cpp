#include "streamfill/memory_store.hpp"

#include <algorithm>
#include <string>

#include "streamfill/errors.hpp"

namespace streamfill {

namespace {

std::string describe(const std::vector<MemoryKey>& keys) {
    std::string s = "cache miss for";
    const std::size_t shown = std::min<std::size_t>(keys.size(), 8);
    for (std::size_t i = 0; i < shown; ++i) {
        s += " (block " + std::to_string(keys[i].block) + ", frame " +
             std::to_string(keys[i].frame) + ")";
    }
    if (keys.size() > shown) s += " and " + std::to_string(keys.size() - shown) + " more";
    return s;
}

} // namespace

CacheMiss::CacheMiss(std::vector<MemoryKey> missing)
    : std::runtime_error(describe(missing)), missing_(std::move(missing)) {}

void EvictionPolicy::validate(const StoreGeometry& geometry) const {
    if (span < 0) throw_config("eviction span must be >= 0");
    if (rate < 1) throw_config("eviction sampling rate must be >= 1");
    if (bounded() && budget_bytes < static_cast<std::size_t>(span) * geometry.frame_bytes()) {
        throw_config("memory budget of " + std::to_string(budget_bytes) +
                     " bytes cannot hold the protected span of " + std::to_string(span) +
                     " frames");
    }
}

const FrameEntries* StoreSnapshot::find(FrameIndex frame, MemorySide side) const {
    if (side == MemorySide::refined) {
        if (!state_->watermark || frame > *state_->watermark) return nullptr;
        auto it = state_->refined.find(frame);
        return it == state_->refined.end() ? nullptr : it->second.get();
    }
    auto it = state_->online.find(frame);
    return it == state_->online.end() ? nullptr : it->second.get();
}

std::optional<MemorySide> StoreSnapshot::source_of(FrameIndex frame) const {
    if (find(frame, MemorySide::refined)) return MemorySide::refined;
    if (find(frame, MemorySide::online)) return MemorySide::online;
    return std::nullopt;
}

std::vector<FrameIndex> StoreSnapshot::frames(MemorySide side) const {
    const auto& m = side == MemorySide::online ? state_->online : state_->refined;
    std::vector<FrameIndex> out;
    for (const auto& [f, e] : m) out.push_back(f);
    return out;
}

std::size_t StoreSnapshot::frame_count() const {
    return state_->online.size() + state_->refined.size();
}

std::vector<const TokenGrid*> StoreSnapshot::select_context(const SelectionPlan& plan,
                                                            std::size_t block) const {
    std::vector<const TokenGrid*> out;
    std::vector<MemoryKey> missing;
    for (FrameIndex f : plan.context()) {
        const FrameEntries* e = find(f, MemorySide::refined);
        if (!e) e = find(f, MemorySide::online);
        if (!e || block >= e->size()) {
            missing.push_back({block, f});
            continue;
        }
        out.push_back(&(*e)[block]);
    }
    if (!missing.empty()) throw CacheMiss(std::move(missing));
    return out;
}

BlockContext StoreSnapshot::resolve(const SelectionPlan& plan, std::size_t blocks) const {
    BlockContext ctx(blocks);
    std::vector<MemoryKey> missing;
    for (std::size_t b = 0; b < blocks; ++b) {
        try {
            ctx[b] = select_context(plan, b);
        } catch (const CacheMiss& miss) {
            missing.insert(missing.end(), miss.missing().begin(), miss.missing().end());
        }
    }
    if (!missing.empty()) throw CacheMiss(std::move(missing));
    return ctx;
}

MemoryStore::MemoryStore(StoreGeometry geometry, EvictionPolicy policy, FrameIndex refine_ahead)
    : geometry_(geometry),
      policy_(policy),
      refine_ahead_(refine_ahead),
      state_(std::make_shared<const StoreSnapshot::State>()) {
    if (geometry_.blocks == 0) throw_config("store needs at least one block");
    policy_.validate(geometry_);
    if (refine_ahead_ < 1) throw_config("refine_ahead must be >= 1");
}

void MemoryStore::publish_locked(StoreSnapshot::State next) {
    peak_bytes_ = std::max(peak_bytes_, next.bytes);
    state_ = std::make_shared<const StoreSnapshot::State>(std::move(next));
}

void MemoryStore::put_frame(FrameIndex frame, FrameEntries entries, MemorySide side) {
    if (frame < 0) throw_config("negative frame index");
    if (entries.size() != geometry_.blocks) {
        throw_shape("put_frame: expected " + std::to_string(geometry_.blocks) +
                    " block entries, got " + std::to_string(entries.size()));
    }
    for (const auto& e : entries) {
        if (e.count() != geometry_.tokens || e.dim() != geometry_.dim) {
            throw_shape("put_frame: entry shape does not match store geometry");
        }
    }
    auto shared = std::make_shared<const FrameEntries>(std::move(entries));

    std::lock_guard lock(mutex_);
    StoreSnapshot::State next = *state_;
    if (side == MemorySide::refined) {
        const FrameIndex limit = next.watermark.value_or(-1) + refine_ahead_;
        if (frame > limit) {
            throw ProtocolError("refined frame " + std::to_string(frame) +
                                " is beyond watermark window (limit " + std::to_string(limit) + ")");
        }
    }
    auto& map = side == MemorySide::online ? next.online : next.refined;
    if (map.find(frame) == map.end()) next.bytes += geometry_.frame_bytes();
    map[frame] = std::move(shared);

    if (side == MemorySide::online) latest_online_ = std::max(latest_online_, frame);
    if (policy_.bounded()) evict_locked(next, policy_, latest_online_ + 1);
    publish_locked(std::move(next));
}

void MemoryStore::publish_watermark(FrameIndex t) {
    std::lock_guard lock(mutex_);
    if (state_->watermark && t < *state_->watermark) {
        throw ProtocolError("watermark may not move backwards (" +
                            std::to_string(*state_->watermark) + " -> " + std::to_string(t) + ")");
    }
    StoreSnapshot::State next = *state_;
    next.watermark = t;
    publish_locked(std::move(next));
}

std::vector<FrameIndex> MemoryStore::evict_locked(StoreSnapshot::State& s,
                                                  const EvictionPolicy& policy,
                                                  FrameIndex current) {
    std::vector<FrameIndex> evicted;
    if (!policy.bounded()) return evicted;
    const auto in_span = [&](FrameIndex f) { return f >= current - policy.span && f <= current - 1; };
    while (s.bytes > policy.budget_bytes) {
        std::vector<FrameIndex> present;
        for (const auto& [f, e] : s.online) present.push_back(f);
        for (const auto& [f, e] : s.refined) present.push_back(f);
        std::sort(present.begin(), present.end());
        present.erase(std::unique(present.begin(), present.end()), present.end());

        std::optional<FrameIndex> victim;
        for (FrameIndex f : present) {
            if (!in_span(f) && f % policy.rate != 0) {
                victim = f;
                break;
            }
        }
        if (!victim) {
            for (FrameIndex f : present) {
                if (!in_span(f)) {
                    victim = f;
                    break;
                }
            }
        }
        if (!victim) break;  // only the protected span is left
        if (s.online.erase(*victim)) s.bytes -= geometry_.frame_bytes();
        if (s.refined.erase(*victim)) s.bytes -= geometry_.frame_bytes();
        evicted.push_back(*victim);
    }
    evictions_ += evicted.size();
    return evicted;
}

std::vector<FrameIndex> MemoryStore::evict(const EvictionPolicy& policy, FrameIndex current) {
    policy.validate(geometry_);
    std::lock_guard lock(mutex_);
    StoreSnapshot::State next = *state_;
    auto evicted = evict_locked(next, policy, current);
    if (!evicted.empty()) publish_locked(std::move(next));
    return evicted;
}

StoreSnapshot MemoryStore::snapshot() const {
    std::lock_guard lock(mutex_);
    return StoreSnapshot(state_);
}

StoreStats MemoryStore::stats() const {
    std::lock_guard lock(mutex_);
    StoreStats st;
    st.online_frames = state_->online.size();
    st.refined_frames = state_->refined.size();
    st.bytes = state_->bytes;
    st.peak_bytes = peak_bytes_;
    st.evictions = evictions_;
    st.watermark = state_->watermark;
    return st;
}

} // namespace streamfill
