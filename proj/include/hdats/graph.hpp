#pragma once

#include <limits>
#include <queue>

#include "hdats/model.hpp"

namespace hdats {

// Per-task effective durations. A task occupies [start, start+total()) with
// the processing phase in [start+move_in, start+move_in+proc).
struct PhaseDurations {
    Time move_in = 0;
    Time proc = 0;
    Time move_out = 0;

    Time total() const { return move_in + proc + move_out; }
};

using TaskWeights = std::vector<PhaseDurations>;

// Weights for the no-solution case: cheapest processing time, no transfers.
inline TaskWeights processing_only_weights(const Instance& inst) {
    TaskWeights w(inst.tasks.size());
    for (const auto& t : inst.tasks) {
        Time best = std::numeric_limits<Time>::max();
        for (const auto& [p, pt] : t.proc_time) best = std::min(best, pt);
        w[t.id].proc = (best == std::numeric_limits<Time>::max()) ? 0 : best;
    }
    return w;
}

class CycleError : public std::runtime_error {
public:
    explicit CycleError(std::vector<TaskId> cycle)
        : std::runtime_error(describe(cycle)), cycle_(std::move(cycle)) {}
    const std::vector<TaskId>& cycle() const { return cycle_; }

private:
    static std::string describe(const std::vector<TaskId>& cycle) {
        std::string s = "cycle:";
        for (TaskId t : cycle) s += " " + std::to_string(t);
        return s;
    }
    std::vector<TaskId> cycle_;
};

namespace detail {

// Direct sequence neighbours on each task's processor; -1 where absent.
// Sequences may cover only a subset of tasks (used mid-construction).
struct SeqLinks {
    std::vector<TaskId> prev;
    std::vector<TaskId> next;

    static SeqLinks none(int n_tasks) {
        SeqLinks l;
        l.prev.assign(n_tasks, -1);
        l.next.assign(n_tasks, -1);
        return l;
    }

    static SeqLinks of(const Instance& inst, const std::vector<std::vector<TaskId>>& sequences) {
        SeqLinks l = none(inst.num_tasks());
        for (const auto& seq : sequences)
            for (size_t i = 1; i < seq.size(); ++i) {
                l.next[seq[i - 1]] = seq[i];
                l.prev[seq[i]] = seq[i - 1];
            }
        return l;
    }
};

// Kahn order over precedence + sequence edges, smallest id first among ready
// tasks. Throws CycleError with one offending cycle.
inline std::vector<TaskId> topo_sort_impl(const Instance& inst, const Adjacency& adj,
                                          const SeqLinks& links) {
    const int n = inst.num_tasks();
    std::vector<int> indeg(n, 0);
    for (int u = 0; u < n; ++u) {
        indeg[u] += static_cast<int>(adj.pred[u].size());
        if (links.prev[u] >= 0) ++indeg[u];
    }
    std::priority_queue<TaskId, std::vector<TaskId>, std::greater<>> ready;
    for (int u = 0; u < n; ++u)
        if (indeg[u] == 0) ready.push(u);

    std::vector<TaskId> order;
    order.reserve(n);
    auto release = [&](TaskId v) {
        if (--indeg[v] == 0) ready.push(v);
    };
    while (!ready.empty()) {
        TaskId u = ready.top();
        ready.pop();
        order.push_back(u);
        for (TaskId v : adj.succ[u]) release(v);
        if (links.next[u] >= 0) release(links.next[u]);
    }
    if (static_cast<int>(order.size()) == n) return order;

    // extract one cycle from the unresolved remainder
    std::vector<int> state(n, 0);  // 0 unseen, 1 on stack, 2 done
    std::vector<TaskId> stack, path;
    std::vector<TaskId> pos_in_path(n, -1);
    for (int s = 0; s < n; ++s) {
        if (indeg[s] == 0 || state[s] != 0) continue;
        path.clear();
        std::vector<std::pair<TaskId, size_t>> frames{{s, 0}};
        while (!frames.empty()) {
            auto& [u, idx] = frames.back();
            if (idx == 0) {
                state[u] = 1;
                pos_in_path[u] = static_cast<int>(path.size());
                path.push_back(u);
            }
            std::vector<TaskId> nbrs = adj.succ[u];
            if (links.next[u] >= 0) nbrs.push_back(links.next[u]);
            if (idx < nbrs.size()) {
                TaskId v = nbrs[idx++];
                if (state[v] == 1) {
                    std::vector<TaskId> cycle(path.begin() + pos_in_path[v], path.end());
                    throw CycleError(std::move(cycle));
                }
                if (state[v] == 0) frames.emplace_back(v, 0);
            } else {
                state[u] = 2;
                pos_in_path[u] = -1;
                path.pop_back();
                frames.pop_back();
            }
        }
    }
    throw CycleError({});  // unreachable for a well-formed graph
}

}  // namespace detail

inline std::vector<TaskId> topo_sort(const Instance& inst, const Solution* sol = nullptr) {
    auto adj = make_adjacency(inst);
    auto links = sol ? detail::SeqLinks::of(inst, sol->sequences)
                     : detail::SeqLinks::none(inst.num_tasks());
    return detail::topo_sort_impl(inst, adj, links);
}

struct GraphMetrics {
    std::vector<TaskId> topo_order;
    std::vector<Time> head;      // longest start-offset from the source side
    std::vector<Time> tail;      // longest remaining span including own phases
    std::vector<Time> slack;
    Time cmax = 0;
    std::vector<char> critical;  // slack == 0
    std::vector<TaskId> critical_tasks;

    bool is_critical(TaskId t) const { return critical[t] != 0; }
};

namespace detail {

// Longest-path heads/tails over precedence plus per-processor sequence edges.
//
// A precedence or data edge u->v delays v's start by the full span of u.
// A sequence edge u->v carries two constraints instead: v's processing phase
// waits for u's move-out to finish (so v's start is offset by total(u) minus
// v's own move-in, which may overlap u), and v's move-in cannot start before
// u's move-in has finished.
inline GraphMetrics compute_metrics_impl(const Instance& inst, const Adjacency& adj,
                                         const SeqLinks& links, const TaskWeights& weights) {
    const int n = inst.num_tasks();
    if (static_cast<int>(weights.size()) != static_cast<size_t>(n))
        throw std::invalid_argument("weights must cover every task");

    GraphMetrics m;
    m.topo_order = topo_sort_impl(inst, adj, links);
    m.head.assign(n, 0);
    m.tail.assign(n, 0);
    m.slack.assign(n, 0);
    m.critical.assign(n, 0);

    for (TaskId u : m.topo_order) {
        Time h = 0;
        for (TaskId p : adj.pred[u]) h = std::max(h, m.head[p] + weights[p].total());
        if (TaskId sp = links.prev[u]; sp >= 0) {
            h = std::max(h, m.head[sp] + weights[sp].total() - weights[u].move_in);
            h = std::max(h, m.head[sp] + weights[sp].move_in);
        }
        m.head[u] = h;
    }

    for (auto it = m.topo_order.rbegin(); it != m.topo_order.rend(); ++it) {
        TaskId u = *it;
        Time q = weights[u].total();
        for (TaskId s : adj.succ[u]) q = std::max(q, weights[u].total() + m.tail[s]);
        if (TaskId sn = links.next[u]; sn >= 0) {
            q = std::max(q, weights[u].total() - weights[sn].move_in + m.tail[sn]);
            q = std::max(q, weights[u].move_in + m.tail[sn]);
        }
        m.tail[u] = q;
    }

    m.cmax = 0;
    for (int u = 0; u < n; ++u) m.cmax = std::max(m.cmax, m.head[u] + m.tail[u]);
    for (int u = 0; u < n; ++u) {
        m.slack[u] = m.cmax - m.head[u] - m.tail[u];
        if (m.slack[u] == 0) {
            m.critical[u] = 1;
            m.critical_tasks.push_back(u);
        }
    }
    return m;
}

}  // namespace detail

inline GraphMetrics compute_metrics(const Instance& inst, const Solution* sol,
                                    const TaskWeights& weights) {
    auto adj = make_adjacency(inst);
    auto links = sol ? detail::SeqLinks::of(inst, sol->sequences)
                     : detail::SeqLinks::none(inst.num_tasks());
    return detail::compute_metrics_impl(inst, adj, links, weights);
}

// Maximal run of consecutive critical tasks on one processor's sequence.
struct CriticalBlock {
    ProcId proc = 0;
    int begin = 0;  // index range [begin, end) into sequences[proc]
    int end = 0;

    int length() const { return end - begin; }
};

inline std::vector<CriticalBlock> critical_blocks(const Instance& inst, const GraphMetrics& metrics,
                                                  const Solution& sol) {
    std::vector<CriticalBlock> out;
    for (ProcId p = 0; p < inst.num_procs(); ++p) {
        const auto& seq = sol.sequences[p];
        int i = 0;
        const int len = static_cast<int>(seq.size());
        while (i < len) {
            if (!metrics.is_critical(seq[i])) {
                ++i;
                continue;
            }
            int j = i;
            while (j < len && metrics.is_critical(seq[j])) ++j;
            out.push_back({p, i, j});
            i = j;
        }
    }
    return out;
}

}  // namespace hdats
