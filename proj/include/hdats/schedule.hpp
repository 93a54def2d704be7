#pragma once

#include <array>

#include "hdats/graph.hpp"
#include "hdats/move.hpp"

namespace hdats {

// Time to move `size` units between a bank of type `from` and a processor of
// type `to`: ceil(size * factor), zero only for empty transfers.
inline Time transfer_time(Size size, MemType from, ProcType to, const Instance& factors) {
    if (size < 0) throw std::invalid_argument("negative transfer size");
    return factors.factor(to, from).ceil_mul(size);
}

inline PhaseDurations phase_durations(const Instance& inst, const std::vector<MemId>& alloc,
                                      TaskId t, ProcId p) {
    PhaseDurations d;
    ProcType ptype = inst.processors[p].ptype;
    for (BlockId b : inst.tasks[t].inputs)
        d.move_in += transfer_time(inst.blocks[b].size, inst.memories[alloc[b]].mtype, ptype, inst);
    d.proc = inst.proc_time(t, p);
    for (BlockId b : inst.tasks[t].outputs)
        d.move_out += transfer_time(inst.blocks[b].size, inst.memories[alloc[b]].mtype, ptype, inst);
    return d;
}

inline TaskWeights solution_weights(const Instance& inst, const Solution& sol) {
    TaskWeights w(inst.tasks.size());
    for (TaskId t = 0; t < inst.num_tasks(); ++t)
        w[t] = phase_durations(inst, sol.allocation, t, sol.assignment[t]);
    return w;
}

struct Schedule {
    std::vector<Time> move_in_start;
    std::vector<Time> proc_start;
    std::vector<Time> proc_end;
    std::vector<Time> move_out_end;
    // block residency [enter, release); empty interval when enter == release
    std::vector<Time> block_enter;
    std::vector<Time> block_release;
    Time makespan = 0;
};

// Earliest-start timing of a complete solution. Each task waits for its
// predecessors' move-out, its input blocks, and its processor: processing
// cannot begin before the previous task's move-out has finished, while the
// move-in may already run during the previous task's processing/move-out
// (but not during its move-in).
inline Schedule simulate(const Instance& inst, const Solution& sol) {
    const int n = inst.num_tasks();
    auto adj = make_adjacency(inst);
    auto links = detail::SeqLinks::of(inst, sol.sequences);
    auto order = detail::topo_sort_impl(inst, adj, links);

    Schedule s;
    s.move_in_start.assign(n, 0);
    s.proc_start.assign(n, 0);
    s.proc_end.assign(n, 0);
    s.move_out_end.assign(n, 0);

    for (TaskId t : order) {
        PhaseDurations d = phase_durations(inst, sol.allocation, t, sol.assignment[t]);
        Time start = 0;
        for (TaskId p : adj.pred[t]) start = std::max(start, s.move_out_end[p]);
        if (TaskId sp = links.prev[t]; sp >= 0) {
            start = std::max(start, s.move_out_end[sp] - d.move_in);
            start = std::max(start, s.proc_start[sp]);
        }
        s.move_in_start[t] = start;
        s.proc_start[t] = start + d.move_in;
        s.proc_end[t] = s.proc_start[t] + d.proc;
        s.move_out_end[t] = s.proc_end[t] + d.move_out;
        s.makespan = std::max(s.makespan, s.move_out_end[t]);
    }

    s.block_enter.assign(inst.blocks.size(), 0);
    s.block_release.assign(inst.blocks.size(), 0);
    for (const auto& b : inst.blocks) {
        Time enter = b.is_initial() ? 0 : s.move_in_start[b.producer];
        Time release = b.is_initial() ? enter : s.move_out_end[b.producer];
        for (TaskId c : b.consumers) release = std::max(release, s.move_out_end[c]);
        s.block_enter[b.id] = enter;
        s.block_release[b.id] = release;
    }
    return s;
}

// Occupancy events of one bank, sorted by time with releases applied before
// entries at equal instants. peak is the maximum running sum.
struct OccupancyProfile {
    std::vector<std::pair<Time, Size>> events;
    Size peak = 0;
};

inline std::vector<OccupancyProfile> peak_occupancy(const Instance& inst, const Schedule& sched,
                                                    const std::vector<MemId>& alloc) {
    std::vector<OccupancyProfile> profiles(inst.memories.size());
    for (const auto& b : inst.blocks) {
        Time enter = sched.block_enter[b.id];
        Time release = sched.block_release[b.id];
        if (enter >= release) continue;
        auto& pr = profiles[alloc[b.id]];
        pr.events.emplace_back(enter, b.size);
        pr.events.emplace_back(release, -b.size);
    }
    for (auto& pr : profiles) {
        std::sort(pr.events.begin(), pr.events.end());
        Size running = 0;
        for (const auto& [time, delta] : pr.events) {
            running += delta;
            pr.peak = std::max(pr.peak, running);
        }
    }
    return profiles;
}

struct Feasibility {
    bool ok = true;
    std::string first_violation;

    explicit operator bool() const { return ok; }
};

// Structural validity, acyclicity, and per-bank peak occupancy within
// capacity, in that order.
inline Feasibility is_feasible(const Instance& inst, const Solution& sol) {
    auto violations = validate_solution(inst, sol);
    if (!violations.empty()) return {false, violations.front().what};
    Schedule sched;
    try {
        sched = simulate(inst, sol);
    } catch (const CycleError& e) {
        return {false, e.what()};
    }
    auto profiles = peak_occupancy(inst, sched, sol.allocation);
    for (const auto& m : inst.memories) {
        if (!m.fits(profiles[m.id].peak))
            return {false, "memory " + std::to_string(m.id) + ": peak occupancy " +
                               std::to_string(profiles[m.id].peak) + " exceeds capacity " +
                               std::to_string(*m.capacity)};
    }
    return {};
}

// Snapshot of one solution used to screen neighbourhood moves: cached
// heads/tails, phase durations, sequence links, and the top head+tail sums
// for a fallback bound over untouched tasks.
struct EvalContext {
    const Instance* inst = nullptr;
    const Solution* sol = nullptr;
    const GraphMetrics* metrics = nullptr;
    Adjacency adj;
    detail::SeqLinks links = detail::SeqLinks::none(0);
    TaskWeights weights;
    std::array<std::pair<Time, TaskId>, 4> top;  // largest head+tail entries
    int top_count = 0;

    EvalContext(const Instance& i, const Solution& s, const GraphMetrics& m)
        : inst(&i), sol(&s), metrics(&m), adj(make_adjacency(i)),
          links(detail::SeqLinks::of(i, s.sequences)), weights(solution_weights(i, s)) {
        for (TaskId t = 0; t < i.num_tasks(); ++t) {
            std::pair<Time, TaskId> entry{m.head[t] + m.tail[t], t};
            for (int k = 0; k < 4; ++k) {
                if (k == top_count) {
                    top[top_count++] = entry;
                    break;
                }
                if (entry.first > top[k].first) {
                    for (int j = std::min(top_count, 3); j > k; --j) top[j] = top[j - 1];
                    top[k] = entry;
                    if (top_count < 4) ++top_count;
                    break;
                }
            }
        }
    }

    Time best_excluding(TaskId a, TaskId b, TaskId c) const {
        for (int k = 0; k < top_count; ++k) {
            TaskId t = top[k].second;
            if (t != a && t != b && t != c) return top[k].first;
        }
        return 0;
    }
};

namespace detail {

inline Time head_from(const EvalContext& ctx, TaskId u, TaskId seq_prev, Time prev_head,
                      const PhaseDurations& prev_dur, const PhaseDurations& u_dur) {
    Time h = 0;
    for (TaskId p : ctx.adj.pred[u]) h = std::max(h, ctx.metrics->head[p] + ctx.weights[p].total());
    if (seq_prev >= 0) {
        h = std::max(h, prev_head + prev_dur.total() - u_dur.move_in);
        h = std::max(h, prev_head + prev_dur.move_in);
    }
    return h;
}

inline Time tail_towards(const EvalContext& ctx, TaskId u, TaskId seq_next,
                         const PhaseDurations& u_dur) {
    Time q = u_dur.total();
    for (TaskId s : ctx.adj.succ[u]) q = std::max(q, u_dur.total() + ctx.metrics->tail[s]);
    if (seq_next >= 0) {
        q = std::max(q, u_dur.total() - ctx.weights[seq_next].move_in + ctx.metrics->tail[seq_next]);
        q = std::max(q, u_dur.move_in + ctx.metrics->tail[seq_next]);
    }
    return q;
}

}  // namespace detail

// Fast makespan estimate for a move, from cached pre-move heads and tails.
// Only the spliced tasks are re-evaluated; the memory allocation is frozen
// (durations on a new processor are recomputed from the existing banks).
// Exact when the move reproduces the current sequences.
inline Time approx_makespan(const EvalContext& ctx, const Move& move) {
    const Instance& inst = *ctx.inst;
    const Solution& sol = *ctx.sol;
    const TaskId u = move.task;

    ProcId to = move.kind == MoveKind::ChangeCore ? move.target_proc : sol.assignment[u];
    PhaseDurations u_dur = move.kind == MoveKind::ChangeCore
                               ? phase_durations(inst, sol.allocation, u, to)
                               : ctx.weights[u];

    const TaskId old_prev = ctx.links.prev[u];
    const TaskId old_next = ctx.links.next[u];

    // splice target: u goes between a and b on processor `to`
    const auto& target_seq = sol.sequences[to];
    int pos = move.target_pos;
    TaskId a = -1, b = -1;
    {
        // positions index the target sequence with u removed
        int skip = (sol.assignment[u] == to) ? 1 : 0;
        int idx = -1, count = 0;
        for (int i = 0; i < static_cast<int>(target_seq.size()); ++i) {
            if (skip && target_seq[i] == u) continue;
            if (count == pos) { idx = i; break; }
            ++count;
        }
        if (idx >= 0) b = target_seq[idx];
        // predecessor: nearest earlier entry that is not u
        int before = (idx >= 0) ? idx - 1 : static_cast<int>(target_seq.size()) - 1;
        while (before >= 0 && target_seq[before] == u) --before;
        if (before >= 0) a = target_seq[before];
    }

    static const PhaseDurations kNoDur{};
    Time head_u = detail::head_from(ctx, u, a, a >= 0 ? ctx.metrics->head[a] : 0,
                                    a >= 0 ? ctx.weights[a] : kNoDur, u_dur);
    Time tail_u = detail::tail_towards(ctx, u, b, u_dur);

    Time est = head_u + tail_u;
    if (b >= 0 && b != u) {
        Time head_b = detail::head_from(ctx, b, u, head_u, u_dur, ctx.weights[b]);
        est = std::max(est, head_b + ctx.metrics->tail[b]);
    }
    if (old_next >= 0 && old_next != b) {
        Time head_n = detail::head_from(ctx, old_next, old_prev,
                                        old_prev >= 0 ? ctx.metrics->head[old_prev] : 0,
                                        old_prev >= 0 ? ctx.weights[old_prev] : kNoDur,
                                        ctx.weights[old_next]);
        est = std::max(est, head_n + ctx.metrics->tail[old_next]);
    }
    est = std::max(est, ctx.best_excluding(u, b, old_next));
    return est;
}

}  // namespace hdats
