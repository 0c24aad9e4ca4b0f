#include "streamfill/schedule.hpp"

#include <algorithm>

#include "streamfill/errors.hpp"

namespace streamfill {

std::string_view to_string(Mode mode) {
    switch (mode) {
    case Mode::offline: return "offline";
    case Mode::online: return "online";
    case Mode::memory: return "memory";
    case Mode::refined: return "refined";
    }
    return "?";
}

Mode parse_mode(std::string_view name) {
    for (Mode m : {Mode::offline, Mode::online, Mode::memory, Mode::refined}) {
        if (to_string(m) == name) return m;
    }
    throw_config("unknown mode '" + std::string(name) + "'");
}

void SchedulerConfig::validate() const {
    if (k < 0 || s < 0 || sp < 0) throw_config("k, s and s' must be >= 0");
    if (r < 1 || rp < 1) throw_config("sampling rates r and r' must be >= 1");
}

namespace {

std::vector<FrameIndex> range(FrameIndex lo, FrameIndex hi) {
    std::vector<FrameIndex> out;
    for (FrameIndex i = std::max<FrameIndex>(lo, 0); i <= hi; ++i) out.push_back(i);
    return out;
}

std::vector<FrameIndex> minus(std::vector<FrameIndex> a, const std::vector<FrameIndex>& b) {
    std::erase_if(a, [&b](FrameIndex x) { return std::binary_search(b.begin(), b.end(), x); });
    return a;
}

std::vector<FrameIndex> merged(const SelectionPlan& p) {
    std::vector<FrameIndex> all;
    for (const auto* set : {&p.window, &p.refs, &p.online_neighbors, &p.refined_neighbors,
                            &p.refined_refs}) {
        all.insert(all.end(), set->begin(), set->end());
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return all;
}

} // namespace

std::vector<FrameIndex> SelectionPlan::context() const {
    auto all = merged(*this);
    std::erase(all, target);
    return all;
}

std::vector<FrameIndex> SelectionPlan::joint_inputs() const {
    auto all = merged(*this);
    if (!std::binary_search(all.begin(), all.end(), target)) {
        all.insert(std::upper_bound(all.begin(), all.end(), target), target);
    }
    return all;
}

SelectionPlan apply_toggles(SelectionPlan plan, const ContextToggles& toggles) {
    if (!toggles.online_neighbors) plan.online_neighbors.clear();
    if (!toggles.refined_neighbors) plan.refined_neighbors.clear();
    if (!toggles.references) {
        plan.refs.clear();
        plan.refined_refs.clear();
    }
    return plan;
}

std::vector<FrameIndex> multiples_in(FrameIndex rate, FrameIndex lo, FrameIndex hi) {
    if (rate < 1) throw_config("sampling rate must be >= 1");
    std::vector<FrameIndex> out;
    lo = std::max<FrameIndex>(lo, 0);
    for (FrameIndex i = (lo + rate - 1) / rate * rate; i <= hi; i += rate) out.push_back(i);
    return out;
}

SelectionPlan select_offline(FrameIndex f, FrameIndex k, FrameIndex r, FrameIndex n) {
    if (f < 0 || f >= n) throw_config("select_offline: frame index out of range");
    SelectionPlan p;
    p.mode = Mode::offline;
    p.target = f;
    p.window = range(f - k, std::min(n - 1, f + k));
    p.refs = minus(multiples_in(r, 0, n - 1), p.window);
    return p;
}

SelectionPlan select_online(FrameIndex f, FrameIndex k, FrameIndex r) {
    if (f < 0) throw_config("select_online: negative frame index");
    SelectionPlan p;
    p.mode = Mode::online;
    p.target = f;
    p.window = range(f - k, f);
    p.refs = minus(multiples_in(r, 0, f), p.window);
    return p;
}

SelectionPlan select_memory(FrameIndex f, FrameIndex s, FrameIndex r) {
    if (f < 0) throw_config("select_memory: negative frame index");
    SelectionPlan p;
    p.mode = Mode::memory;
    p.target = f;
    p.online_neighbors = range(f - s, f - 1);
    p.refs = minus(multiples_in(r, 0, f - 1), p.online_neighbors);
    return p;
}

SelectionPlan select_refined(FrameIndex f, std::optional<FrameIndex> t, FrameIndex s,
                             FrameIndex sp, FrameIndex rp) {
    if (!t) return select_memory(f, s, rp);
    if (*t >= f) {
        throw ProtocolError("select_refined: watermark " + std::to_string(*t) +
                            " must precede frame " + std::to_string(f));
    }
    if (*t < 0) throw ProtocolError("select_refined: negative watermark");
    SelectionPlan p;
    p.mode = Mode::refined;
    p.target = f;
    p.refined_neighbors = range(*t - sp, *t);
    // Online neighbors that are also refined neighbors are served from the
    // refined store, so they are listed once, on the refined side.
    p.online_neighbors = minus(range(f - s, f - 1), p.refined_neighbors);
    p.refined_refs = minus(minus(multiples_in(rp, 0, *t), p.refined_neighbors), p.online_neighbors);
    return p;
}

std::vector<SelectionPlan> offline_tiles(FrameIndex n, FrameIndex k, FrameIndex r) {
    std::vector<SelectionPlan> out;
    for (FrameIndex start = 0; start < n; start += 2 * k + 1) {
        const FrameIndex end = std::min(n - 1, start + 2 * k);
        SelectionPlan p;
        p.mode = Mode::offline;
        p.target = start + (end - start) / 2;
        p.window = range(start, end);
        p.refs = minus(multiples_in(r, 0, n - 1), p.window);
        out.push_back(std::move(p));
    }
    return out;
}

} // namespace streamfill
