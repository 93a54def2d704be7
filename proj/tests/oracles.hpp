#pragma once

// Reference implementations kept deliberately separate from the library: a
// fixed-point relaxation of the timing rules, an exhaustive lagged-path
// enumerator, a per-time-unit occupancy counter, and a recursive cycle
// detector. Slow and simple on purpose.

#include <functional>
#include <random>

#include "hdats/graph.hpp"
#include "hdats/schedule.hpp"

namespace oracles {

using namespace hdats;

struct OracleTimes {
    std::vector<Time> move_in_start, proc_start, proc_end, move_out_end;
    Time makespan = 0;
};

// Relax the timing constraints until a fixed point is reached, sweeping tasks
// in id order. Acyclic constraints converge within n sweeps.
inline OracleTimes relaxation_times(const Instance& inst, const Solution& sol) {
    const int n = inst.num_tasks();
    std::vector<TaskId> seq_prev(n, -1);
    for (const auto& seq : sol.sequences)
        for (size_t i = 1; i < seq.size(); ++i) seq_prev[seq[i]] = seq[i - 1];

    std::vector<PhaseDurations> dur(n);
    for (TaskId t = 0; t < n; ++t) dur[t] = phase_durations(inst, sol.allocation, t, sol.assignment[t]);

    OracleTimes o;
    o.move_in_start.assign(n, 0);
    o.proc_start.assign(n, 0);
    o.proc_end.assign(n, 0);
    o.move_out_end.assign(n, 0);

    std::vector<std::vector<TaskId>> preds(n);
    for (const auto& [u, v] : inst.edges) preds[v].push_back(u);
    for (const auto& b : inst.blocks) {
        if (b.is_initial()) continue;
        for (TaskId c : b.consumers) preds[c].push_back(b.producer);
    }

    bool changed = true;
    int guard = 0;
    while (changed) {
        if (++guard > n + 2) throw std::logic_error("relaxation did not converge");
        changed = false;
        for (TaskId t = 0; t < n; ++t) {
            Time start = 0;
            for (TaskId u : preds[t]) start = std::max(start, o.move_out_end[u]);
            if (seq_prev[t] >= 0) {
                start = std::max(start, o.move_out_end[seq_prev[t]] - dur[t].move_in);
                start = std::max(start, o.proc_start[seq_prev[t]]);
            }
            if (start != o.move_in_start[t] || guard == 1) {
                o.move_in_start[t] = start;
                o.proc_start[t] = start + dur[t].move_in;
                o.proc_end[t] = o.proc_start[t] + dur[t].proc;
                o.move_out_end[t] = o.proc_end[t] + dur[t].move_out;
                changed = true;
            }
        }
    }
    for (TaskId t = 0; t < n; ++t) o.makespan = std::max(o.makespan, o.move_out_end[t]);
    return o;
}

// Edge-lag view of the constraint graph: head(v) >= head(u) + lag.
struct LaggedEdge {
    TaskId from, to;
    Time lag;
};

inline std::vector<LaggedEdge> lagged_edges(const Instance& inst, const Solution* sol,
                                            const TaskWeights& weights) {
    std::vector<LaggedEdge> edges;
    auto adj = make_adjacency(inst);
    for (TaskId u = 0; u < inst.num_tasks(); ++u)
        for (TaskId v : adj.succ[u]) edges.push_back({u, v, weights[u].total()});
    if (sol) {
        for (const auto& seq : sol->sequences)
            for (size_t i = 1; i < seq.size(); ++i) {
                TaskId u = seq[i - 1], v = seq[i];
                edges.push_back({u, v, weights[u].total() - weights[v].move_in});
                edges.push_back({u, v, weights[u].move_in});
            }
    }
    return edges;
}

// Exhaustive longest lagged path into each node (head) and the longest
// lagged continuation including the final span (tail). Exponential; for tiny
// graphs only.
struct PathMetrics {
    std::vector<Time> head, tail;
    Time cmax = 0;
};

inline PathMetrics exhaustive_paths(const Instance& inst, const Solution* sol,
                                    const TaskWeights& weights) {
    const int n = inst.num_tasks();
    auto edges = lagged_edges(inst, sol, weights);
    std::vector<std::vector<std::pair<TaskId, Time>>> out(n), in(n);
    for (const auto& e : edges) {
        out[e.from].push_back({e.to, e.lag});
        in[e.to].push_back({e.from, e.lag});
    }

    PathMetrics pm;
    pm.head.assign(n, 0);
    pm.tail.assign(n, 0);

    std::function<Time(TaskId)> best_into = [&](TaskId t) -> Time {
        Time best = 0;
        for (const auto& [u, lag] : in[t]) best = std::max(best, best_into(u) + lag);
        return best;
    };
    std::function<Time(TaskId)> best_from = [&](TaskId t) -> Time {
        Time best = weights[t].total();
        for (const auto& [v, lag] : out[t]) best = std::max(best, lag + best_from(v));
        return best;
    };
    for (TaskId t = 0; t < n; ++t) {
        pm.head[t] = best_into(t);
        pm.tail[t] = best_from(t);
        pm.cmax = std::max(pm.cmax, pm.head[t] + pm.tail[t]);
    }
    return pm;
}

// Occupancy by stepping through every integer instant.
inline Size per_time_unit_peak(const Instance& inst, const Schedule& sched,
                               const std::vector<MemId>& alloc, MemId bank) {
    Size peak = 0;
    for (Time t = 0; t <= sched.makespan; ++t) {
        Size occ = 0;
        for (const auto& b : inst.blocks)
            if (alloc[b.id] == bank && sched.block_enter[b.id] <= t && t < sched.block_release[b.id])
                occ += b.size;
        peak = std::max(peak, occ);
    }
    return peak;
}

// Recursive three-colour cycle detection over explicit edges.
inline bool has_cycle(int n, const std::vector<std::pair<int, int>>& edges) {
    std::vector<std::vector<int>> succ(n);
    for (const auto& [u, v] : edges) succ[u].push_back(v);
    std::vector<int> colour(n, 0);
    std::function<bool(int)> visit = [&](int u) -> bool {
        colour[u] = 1;
        for (int v : succ[u]) {
            if (colour[v] == 1) return true;
            if (colour[v] == 0 && visit(v)) return true;
        }
        colour[u] = 2;
        return false;
    };
    for (int u = 0; u < n; ++u)
        if (colour[u] == 0 && visit(u)) return true;
    return false;
}

// Literal restatement of the three solution requirements, checked one task,
// sequence slot and block at a time.
inline bool solution_invariants_hold(const Instance& inst, const Solution& sol) {
    if (static_cast<int>(sol.assignment.size()) != inst.num_tasks()) return false;
    if (static_cast<int>(sol.sequences.size()) != inst.num_procs()) return false;
    if (static_cast<int>(sol.allocation.size()) != inst.num_blocks()) return false;
    for (TaskId t = 0; t < inst.num_tasks(); ++t) {
        ProcId p = sol.assignment[t];
        bool candidate = false;
        for (ProcId c : inst.tasks[t].candidate_procs) candidate |= (c == p);
        if (!candidate) return false;
        int appearances = 0;
        for (ProcId q = 0; q < inst.num_procs(); ++q)
            for (TaskId u : sol.sequences[q]) {
                if (u != t) continue;
                ++appearances;
                if (q != p) return false;
            }
        if (appearances != 1) return false;
    }
    for (BlockId b = 0; b < inst.num_blocks(); ++b)
        if (sol.allocation[b] < 0 || sol.allocation[b] >= inst.num_mems()) return false;
    return true;
}

}  // namespace oracles
