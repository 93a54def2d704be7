#pragma once

#include "hdats/schedule.hpp"

namespace hdats {

// How many critical tasks produce or consume each block. Blocks touching the
// critical path are the ones whose transfers bound the makespan.
struct CriticalUsage {
    std::vector<int> count;  // by block id
};

inline CriticalUsage critical_usage_counts(const Instance& inst, const GraphMetrics& metrics) {
    CriticalUsage usage;
    usage.count.assign(inst.blocks.size(), 0);
    for (const auto& b : inst.blocks) {
        int c = 0;
        if (!b.is_initial() && metrics.is_critical(b.producer)) ++c;
        for (TaskId t : b.consumers)
            if (metrics.is_critical(t)) ++c;
        usage.count[b.id] = c;
    }
    return usage;
}

struct ReallocOptions {
    // recompute timing and criticality after this many placements
    int refresh_every = 1;
};

inline constexpr int kFastReallocRefresh = 10;

inline ReallocOptions fast_realloc_options() { return {kFastReallocRefresh}; }

namespace detail {

inline Size bank_peak_with(const Instance& inst, const Schedule& sched,
                           const std::vector<MemId>& alloc, MemId bank, BlockId extra) {
    std::vector<std::pair<Time, Size>> events;
    auto push = [&](BlockId b) {
        Time enter = sched.block_enter[b];
        Time release = sched.block_release[b];
        if (enter >= release) return;
        events.emplace_back(enter, inst.blocks[b].size);
        events.emplace_back(release, -inst.blocks[b].size);
    };
    for (const auto& b : inst.blocks)
        if (alloc[b.id] == bank && b.id != extra) push(b.id);
    if (extra >= 0) push(extra);
    std::sort(events.begin(), events.end());
    Size peak = 0, running = 0;
    for (const auto& [time, delta] : events) {
        running += delta;
        peak = std::max(peak, running);
    }
    return peak;
}

inline bool bank_accepts(const Instance& inst, const Schedule& sched,
                         const std::vector<MemId>& alloc, const MemoryBank& bank, BlockId b) {
    if (bank.unbounded()) return true;
    if (inst.blocks[b].size > *bank.capacity) return false;
    return bank_peak_with(inst, sched, alloc, bank.id, b) <= *bank.capacity;
}

}  // namespace detail

// Re-derive the whole data placement for fixed sequences: start from LOW
// everywhere, then repeatedly promote the block with the highest critical
// usage into the fastest bank whose capacity still holds over the block's
// current residency. Timing (and hence criticality and lifetimes) is
// refreshed as placements accumulate, and the final placement is re-checked
// against its own timing, demoting late placements if the shifted lifetimes
// broke a capacity.
inline Solution reallocate(const Instance& inst, const Solution& sol,
                           const ReallocOptions& opts = {}) {
    Solution result = sol;
    const MemId low = inst.low_bank();
    std::fill(result.allocation.begin(), result.allocation.end(), low);
    if (inst.blocks.empty()) return result;

    Schedule sched = simulate(inst, result);
    GraphMetrics metrics = compute_metrics(inst, &result, solution_weights(inst, result));

    std::vector<char> pending(inst.blocks.size(), 1);
    std::vector<BlockId> commit_order;
    commit_order.reserve(inst.blocks.size());
    int since_refresh = 0;

    for (int left = inst.num_blocks(); left > 0; --left) {
        CriticalUsage usage = critical_usage_counts(inst, metrics);

        BlockId pick = -1;
        for (BlockId b = 0; b < inst.num_blocks(); ++b) {
            if (!pending[b]) continue;
            if (pick < 0) { pick = b; continue; }
            auto key = [&](BlockId x) {
                return std::make_tuple(-usage.count[x], -inst.blocks[x].size, x);
            };
            if (key(b) < key(pick)) pick = b;
        }

        MemId chosen = low;
        bool placed = false;
        for (const auto& m : inst.memories) {
            if (m.mtype != MemType::High2) continue;
            if (detail::bank_accepts(inst, sched, result.allocation, m, pick)) {
                chosen = m.id;
                placed = true;
                break;
            }
        }
        if (!placed && !inst.blocks[pick].is_initial()) {
            int group = inst.processors[result.assignment[inst.blocks[pick].producer]].group;
            for (const auto& m : inst.memories) {
                if (m.mtype != MemType::High1 || m.group != group) continue;
                if (detail::bank_accepts(inst, sched, result.allocation, m, pick)) {
                    chosen = m.id;
                    placed = true;
                    break;
                }
            }
        }

        result.allocation[pick] = chosen;
        pending[pick] = 0;
        commit_order.push_back(pick);

        if (++since_refresh >= opts.refresh_every && left > 1) {
            since_refresh = 0;
            sched = simulate(inst, result);
            metrics = compute_metrics(inst, &result, solution_weights(inst, result));
        }
    }

    // lifetimes shift as transfers shorten; demote the newest offender until
    // the placement is consistent with its own timing
    for (;;) {
        sched = simulate(inst, result);
        MemId over = -1;
        for (const auto& m : inst.memories) {
            if (m.unbounded()) continue;
            if (detail::bank_peak_with(inst, sched, result.allocation, m.id, -1) > *m.capacity) {
                over = m.id;
                break;
            }
        }
        if (over < 0) break;
        bool demoted = false;
        for (auto it = commit_order.rbegin(); it != commit_order.rend(); ++it) {
            if (result.allocation[*it] == over) {
                result.allocation[*it] = low;
                demoted = true;
                break;
            }
        }
        if (!demoted) throw std::logic_error("over-capacity bank without demotable block");
    }
    return result;
}

}  // namespace hdats
