#pragma once

#include <chrono>
#include <functional>
#include <random>

#include "hdats/construct.hpp"
#include "hdats/memory_realloc.hpp"

namespace hdats {

struct TabuList {
    std::map<std::tuple<int, int, int>, std::int64_t> expiry;

    bool is_tabu(const Move& m, std::int64_t iter) const {
        auto it = expiry.find(m.attribute());
        return it != expiry.end() && it->second > iter;
    }

    void insert(const Move& m, std::int64_t iter, std::int64_t tenure) {
        expiry[m.attribute()] = iter + tenure;
    }
};

struct SearchParams {
    int kmax = 100;                  // neighbours evaluated exactly per step
    std::int64_t lambda = 100000;    // cap on consecutive non-improving steps
    double tmax_s = 600.0;           // wall-clock budget
    int realloc_round = 100;         // full placement rebuild every p-th adoption
    std::uint64_t seed = 1;
    bool fast_realloc = false;       // use the cheap placement refresh on adoption too
    bool deterministic_timing = false;  // ignore tmax and report zero elapsed
    std::optional<Time> stop_at;     // finish early once best <= this
    std::function<void(const Solution&, Time)> on_accept;  // every adopted solution
};

struct TraceRow {
    std::int64_t iteration = 0;
    std::int64_t elapsed_ms = 0;
    Time current = 0;
    Time best = 0;
};

struct SearchResult {
    Solution best;
    Time best_makespan = 0;
    std::vector<TraceRow> trace;
    std::int64_t iterations = 0;
    std::int64_t adoptions = 0;
    std::int64_t perturbations = 0;
};

namespace detail {

// Reachability around one task with its own sequence links detached (the
// chain is bridged across it), i.e. in the graph every move of that task
// must respect.
struct MoveClosure {
    std::vector<char> ancestor;
    std::vector<char> descendant;
};

inline MoveClosure move_closure(const Instance& inst, const Adjacency& adj, const SeqLinks& links,
                                TaskId u) {
    const int n = inst.num_tasks();
    std::vector<TaskId> next = links.next, prev = links.prev;
    TaskId ap = prev[u], bn = next[u];
    if (ap >= 0) next[ap] = bn;
    if (bn >= 0) prev[bn] = ap;
    next[u] = -1;
    prev[u] = -1;

    MoveClosure c;
    c.ancestor.assign(n, 0);
    c.descendant.assign(n, 0);

    std::vector<TaskId> stack{u};
    while (!stack.empty()) {
        TaskId x = stack.back();
        stack.pop_back();
        for (TaskId y : adj.pred[x])
            if (!c.ancestor[y]) { c.ancestor[y] = 1; stack.push_back(y); }
        if (prev[x] >= 0 && !c.ancestor[prev[x]]) { c.ancestor[prev[x]] = 1; stack.push_back(prev[x]); }
    }
    stack.push_back(u);
    while (!stack.empty()) {
        TaskId x = stack.back();
        stack.pop_back();
        for (TaskId y : adj.succ[x])
            if (!c.descendant[y]) { c.descendant[y] = 1; stack.push_back(y); }
        if (next[x] >= 0 && !c.descendant[next[x]]) { c.descendant[next[x]] = 1; stack.push_back(next[x]); }
    }
    return c;
}

// Legal insertion range [lo, hi] for u on processor p, in positions of p's
// sequence with u removed: after the last ancestor, no later than the first
// descendant.
inline std::pair<int, int> insertion_window(const std::vector<TaskId>& seq, TaskId u,
                                            const MoveClosure& closure) {
    int lo = 0;
    int pos = 0;
    for (TaskId t : seq) {
        if (t == u) continue;
        if (closure.ancestor[t]) lo = pos + 1;
        ++pos;
    }
    int hi = pos;
    pos = 0;
    for (TaskId t : seq) {
        if (t == u) continue;
        if (closure.descendant[t]) { hi = pos; break; }
        ++pos;
    }
    return {lo, hi};
}

}  // namespace detail

// All legal critical-task moves of the current solution: repositionings to
// the ends of their critical blocks plus reinsertions on other candidate
// processors.
inline std::vector<Move> enumerate_neighborhood(const Instance& inst, const Solution& sol,
                                                const GraphMetrics& metrics) {
    auto adj = make_adjacency(inst);
    auto links = detail::SeqLinks::of(inst, sol.sequences);
    auto blocks = critical_blocks(inst, metrics, sol);

    std::vector<Move> moves;

    for (const auto& cb : blocks) {
        if (cb.length() < 2) continue;
        const auto& seq = sol.sequences[cb.proc];
        for (int pos = cb.begin; pos < cb.end; ++pos) {
            TaskId u = seq[pos];
            auto closure = detail::move_closure(inst, adj, links, u);
            if (pos > cb.begin) {
                bool legal = true;
                for (int i = cb.begin; i < pos && legal; ++i)
                    if (closure.ancestor[seq[i]]) legal = false;
                if (legal)
                    moves.push_back({MoveKind::SwapInBlock, u, cb.proc, cb.begin, BlockEnd::Head});
            }
            if (pos < cb.end - 1) {
                bool legal = true;
                for (int i = pos + 1; i < cb.end && legal; ++i)
                    if (closure.descendant[seq[i]]) legal = false;
                if (legal)
                    moves.push_back({MoveKind::SwapInBlock, u, cb.proc, cb.end - 1, BlockEnd::Tail});
            }
        }
    }
    // a two-task block's head and tail repositionings coincide; keep the head one
    {
        std::vector<Move> dedup;
        for (const auto& m : moves) {
            bool dup = false;
            if (m.kind == MoveKind::SwapInBlock && m.end == BlockEnd::Tail) {
                for (const auto& h : dedup) {
                    if (h.kind != MoveKind::SwapInBlock || h.end != BlockEnd::Head) continue;
                    if (h.target_proc != m.target_proc) continue;
                    // same resulting order: head-move of the pair partner
                    if (h.target_pos + 1 == m.target_pos &&
                        sol.sequences[m.target_proc][m.target_pos] == h.task &&
                        sol.sequences[m.target_proc][h.target_pos] == m.task) {
                        dup = true;
                        break;
                    }
                }
            }
            if (!dup) dedup.push_back(m);
        }
        moves.swap(dedup);
    }

    for (TaskId u : metrics.critical_tasks) {
        auto closure = detail::move_closure(inst, adj, links, u);
        for (ProcId p : inst.tasks[u].candidate_procs) {
            if (p == sol.assignment[u]) continue;
            auto [lo, hi] = detail::insertion_window(sol.sequences[p], u, closure);
            for (int pos = lo; pos <= hi; ++pos)
                moves.push_back({MoveKind::ChangeCore, u, p, pos, BlockEnd::Head});
        }
    }

    return moves;
}

inline Solution apply_move(const Instance& inst, const Solution& sol, const Move& move) {
    (void)inst;
    Solution out = sol;
    TaskId u = move.task;
    ProcId from = sol.assignment[u];
    ProcId to = move.kind == MoveKind::ChangeCore ? move.target_proc : from;

    auto& src = out.sequences[from];
    src.erase(std::find(src.begin(), src.end(), u));
    auto& dst = out.sequences[to];
    int pos = std::min<int>(move.target_pos, static_cast<int>(dst.size()));
    dst.insert(dst.begin() + pos, u);
    out.assignment[u] = to;
    return out;
}

// Displace a few critical tasks to random legal positions. Returns the input
// unchanged when no legal displacement exists. The result is always feasible.
inline Solution random_perturbation(const Instance& inst, const Solution& sol,
                                    std::mt19937_64& rng) {
    GraphMetrics metrics = compute_metrics(inst, &sol, solution_weights(inst, sol));
    if (metrics.critical_tasks.empty()) return sol;

    auto adj = make_adjacency(inst);
    Solution cur = sol;
    int want = 2 + static_cast<int>(rng() % 3);
    std::vector<TaskId> picks = metrics.critical_tasks;
    // partial Fisher-Yates for the first `want` picks
    for (int i = 0; i < want && i < static_cast<int>(picks.size()); ++i) {
        size_t j = i + rng() % (picks.size() - i);
        std::swap(picks[i], picks[j]);
    }
    if (static_cast<int>(picks.size()) > want) picks.resize(want);

    bool changed = false;
    for (TaskId u : picks) {
        auto links = detail::SeqLinks::of(inst, cur.sequences);
        auto closure = detail::move_closure(inst, adj, links, u);
        for (int attempt = 0; attempt < 20; ++attempt) {
            const auto& cand = inst.tasks[u].candidate_procs;
            ProcId p = cand[rng() % cand.size()];
            auto [lo, hi] = detail::insertion_window(cur.sequences[p], u, closure);
            if (lo > hi) continue;
            int pos = lo + static_cast<int>(rng() % (hi - lo + 1));
            if (p == cur.assignment[u]) {
                const auto& seq = cur.sequences[p];
                int own = static_cast<int>(std::find(seq.begin(), seq.end(), u) - seq.begin());
                if (pos == own) continue;  // identity draw
            }
            Move m{MoveKind::ChangeCore, u, p, pos, BlockEnd::Head};
            Solution next = apply_move(inst, cur, m);
            if (next.assignment == sol.assignment && next.sequences == sol.sequences)
                continue;  // this draw would undo the displacement so far
            cur = std::move(next);
            changed = true;
            break;
        }
    }
    if (!changed) return sol;
    return reallocate(inst, cur, fast_realloc_options());
}

struct SearchState {
    Solution current;
    Solution best;
    Time current_makespan = 0;
    Time best_makespan = 0;
    GraphMetrics metrics;
    TabuList tabu;
    std::int64_t iteration = 0;
    std::int64_t unimproved = 0;
    std::int64_t adoptions = 0;
    std::int64_t perturbations = 0;
    std::mt19937_64 rng;

    SearchState(const Instance& inst, Solution start, std::uint64_t seed)
        : current(std::move(start)), best(current), rng(seed) {
        refresh(inst);
        best_makespan = current_makespan;
    }

    void refresh(const Instance& inst) {
        Schedule sched = simulate(inst, current);
        current_makespan = sched.makespan;
        metrics = compute_metrics(inst, &current, solution_weights(inst, current));
    }
};

// One step: screen every legal move with the fast estimate, evaluate the
// best-ranked ones exactly (placement refresh plus timing), and adopt the
// winner unless the tabu list forbids everything that does not beat the
// global best; in that case jump with a random perturbation.
inline void tabu_step(const Instance& inst, SearchState& state, const SearchParams& params) {
    const std::int64_t n = inst.num_tasks();
    const std::int64_t m = inst.num_procs();

    auto moves = enumerate_neighborhood(inst, state.current, state.metrics);

    bool adopted = false;
    if (!moves.empty()) {
        EvalContext ctx(inst, state.current, state.metrics);
        std::vector<std::pair<Time, size_t>> ranked(moves.size());
        for (size_t i = 0; i < moves.size(); ++i) ranked[i] = {approx_makespan(ctx, moves[i]), i};
        std::sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first < b.first;
            return moves[a.second].key() < moves[b.second].key();
        });

        size_t k = std::min<size_t>(std::max(1, params.kmax), ranked.size());
        int best_idx = -1;
        Time best_exact = 0;
        std::vector<Solution> evaluated(k);
        for (size_t i = 0; i < k; ++i) {
            const Move& move = moves[ranked[i].second];
            Solution cand = apply_move(inst, state.current, move);
            cand = reallocate(inst, cand, fast_realloc_options());
            Time exact = simulate(inst, cand).makespan;
            evaluated[i] = std::move(cand);

            bool tabu = state.tabu.is_tabu(move, state.iteration);
            if (tabu && exact >= state.best_makespan) continue;  // no aspiration
            if (best_idx < 0 || exact < best_exact ||
                (exact == best_exact &&
                 move.key() < moves[ranked[best_idx].second].key())) {
                best_idx = static_cast<int>(i);
                best_exact = exact;
            }
        }

        if (best_idx >= 0) {
            const Move& move = moves[ranked[best_idx].second];
            state.current = std::move(evaluated[best_idx]);
            ++state.adoptions;
            std::int64_t tenure =
                move.kind == MoveKind::ChangeCore
                    ? m + static_cast<std::int64_t>(state.rng() % static_cast<std::uint64_t>(2 * m))
                    : n + static_cast<std::int64_t>(state.rng() % static_cast<std::uint64_t>(n));
            state.tabu.insert(move, state.iteration, tenure);
            if (!params.fast_realloc && state.adoptions % params.realloc_round == 0)
                state.current = reallocate(inst, state.current);
            adopted = true;
        }
    }

    if (!adopted) {
        state.current = random_perturbation(inst, state.current, state.rng);
        ++state.perturbations;
    }

    state.refresh(inst);
    if (params.on_accept) params.on_accept(state.current, state.current_makespan);

    if (state.current_makespan < state.best_makespan) {
        state.best = state.current;
        state.best_makespan = state.current_makespan;
        state.unimproved = 0;
    } else {
        ++state.unimproved;
    }
    ++state.iteration;
}

inline SearchResult solve(const Instance& inst, const SearchParams& params,
                          const PriorityStrategy& init_strategy) {
    auto t0 = std::chrono::steady_clock::now();
    auto elapsed_ms = [&]() -> std::int64_t {
        if (params.deterministic_timing) return 0;
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - t0)
            .count();
    };

    Solution init = greedy_assign(inst, init_strategy);
    init = reallocate(inst, init);
    SearchState state(inst, std::move(init), params.seed);

    SearchResult result;
    result.trace.push_back({0, elapsed_ms(), state.current_makespan, state.best_makespan});

    auto out_of_time = [&]() {
        if (params.deterministic_timing) return false;
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() >=
               params.tmax_s;
    };
    auto target_reached = [&]() {
        return params.stop_at && state.best_makespan <= *params.stop_at;
    };

    while (state.unimproved < params.lambda && !out_of_time() && !target_reached()) {
        tabu_step(inst, state, params);
        result.trace.push_back(
            {state.iteration, elapsed_ms(), state.current_makespan, state.best_makespan});
    }

    result.best = state.best;
    result.best_makespan = state.best_makespan;
    result.iterations = state.iteration;
    result.adoptions = state.adoptions;
    result.perturbations = state.perturbations;
    return result;
}

inline std::string trace_csv(const std::vector<TraceRow>& trace) {
    std::string out = "iteration,elapsed_ms,current,best\n";
    for (const auto& row : trace) {
        out += std::to_string(row.iteration) + "," + std::to_string(row.elapsed_ms) + "," +
               std::to_string(row.current) + "," + std::to_string(row.best) + "\n";
    }
    return out;
}

}  // namespace hdats
