#pragma once

#include <functional>

#include "hdats/schedule.hpp"

namespace hdats {

struct OracleLimits {
    int max_tasks = 10;
    int max_procs = 3;
    int max_blocks = 8;
};

struct OracleResult {
    Solution best;
    Time makespan = 0;
    std::uint64_t leaves = 0;  // complete solutions examined
};

// Exhaustive ground truth for tiny instances: every bank placement, every
// processor assignment, every consistent interleaving, each timed with the
// same earliest-start rules as simulate(), keeping the best capacity-feasible
// solution. Branches are cut once their partial makespan cannot beat the
// incumbent.
inline OracleResult brute_force_optimum(const Instance& inst, const OracleLimits& limits = {}) {
    if (inst.num_tasks() > limits.max_tasks)
        throw std::invalid_argument("oracle limit exceeded: " + std::to_string(inst.num_tasks()) +
                                    " tasks > " + std::to_string(limits.max_tasks));
    if (inst.num_procs() > limits.max_procs)
        throw std::invalid_argument("oracle limit exceeded: " + std::to_string(inst.num_procs()) +
                                    " processors > " + std::to_string(limits.max_procs));
    if (inst.num_blocks() > limits.max_blocks)
        throw std::invalid_argument("oracle limit exceeded: " + std::to_string(inst.num_blocks()) +
                                    " blocks > " + std::to_string(limits.max_blocks));

    const int n = inst.num_tasks();
    const int n_blocks = inst.num_blocks();
    const MemId low = inst.low_bank();
    Adjacency adj = make_adjacency(inst);

    OracleResult result;
    result.makespan = std::numeric_limits<Time>::max();

    // blocks that never occupy memory are pinned to LOW; placements of the
    // rest are enumerated
    std::vector<BlockId> movable;
    std::vector<MemId> alloc(n_blocks, low);
    for (const auto& b : inst.blocks)
        if (!(b.is_initial() && b.consumers.empty())) movable.push_back(b.id);

    std::vector<ProcId> assignment(n, -1);
    std::vector<std::vector<TaskId>> sequences(inst.num_procs());
    std::vector<Time> move_in_start(n, 0), proc_start(n, 0), move_out_end(n, 0);
    std::vector<int> indeg(n, 0);
    for (int u = 0; u < n; ++u) indeg[u] = static_cast<int>(adj.pred[u].size());

    std::function<void(int, Time)> dfs = [&](int placed, Time partial_makespan) {
        if (partial_makespan >= result.makespan) return;
        if (placed == n) {
            ++result.leaves;
            // residency per bank from the final times
            std::vector<std::vector<std::pair<Time, Size>>> events(inst.num_mems());
            for (const auto& b : inst.blocks) {
                Time enter = b.is_initial() ? 0 : move_in_start[b.producer];
                Time release = b.is_initial() ? enter : move_out_end[b.producer];
                for (TaskId c : b.consumers) release = std::max(release, move_out_end[c]);
                if (enter >= release) continue;
                events[alloc[b.id]].emplace_back(enter, b.size);
                events[alloc[b.id]].emplace_back(release, -b.size);
            }
            for (const auto& m : inst.memories) {
                if (m.unbounded()) continue;
                auto& ev = events[m.id];
                std::sort(ev.begin(), ev.end());
                Size running = 0;
                for (const auto& [time, delta] : ev) {
                    running += delta;
                    if (running > *m.capacity) return;  // placement infeasible
                }
            }
            result.makespan = partial_makespan;
            result.best.assignment = assignment;
            result.best.sequences = sequences;
            result.best.allocation = alloc;
            return;
        }

        for (TaskId t = 0; t < n; ++t) {
            if (indeg[t] != 0 || assignment[t] >= 0) continue;
            for (ProcId p : inst.tasks[t].candidate_procs) {
                PhaseDurations d = phase_durations(inst, alloc, t, p);
                Time start = 0;
                for (TaskId pr : adj.pred[t]) start = std::max(start, move_out_end[pr]);
                if (!sequences[p].empty()) {
                    TaskId last = sequences[p].back();
                    start = std::max(start, move_out_end[last] - d.move_in);
                    start = std::max(start, proc_start[last]);
                }

                assignment[t] = p;
                sequences[p].push_back(t);
                move_in_start[t] = start;
                proc_start[t] = start + d.move_in;
                move_out_end[t] = start + d.total();
                for (TaskId s : adj.succ[t]) --indeg[s];

                dfs(placed + 1, std::max(partial_makespan, move_out_end[t]));

                for (TaskId s : adj.succ[t]) ++indeg[s];
                sequences[p].pop_back();
                assignment[t] = -1;
            }
        }
    };

    std::function<void(size_t)> enumerate_alloc = [&](size_t idx) {
        if (idx == movable.size()) {
            dfs(0, 0);
            return;
        }
        BlockId b = movable[idx];
        for (const auto& m : inst.memories) {
            if (!m.unbounded() && inst.blocks[b].size > *m.capacity) continue;
            alloc[b] = m.id;
            enumerate_alloc(idx + 1);
        }
        alloc[b] = low;
    };

    enumerate_alloc(0);

    if (result.makespan == std::numeric_limits<Time>::max())
        throw std::logic_error("no feasible solution found");  // LOW-only placement always works
    return result;
}

}  // namespace hdats
