#pragma once

#include <random>

#include "hdats/model.hpp"

namespace fixtures {

using namespace hdats;

// Three tasks fanning out from one producer: A feeds B and C through block 0
// (size 10), two identical general processors, one small HIGH2 bank and
// unbounded LOW. HIGH2 halves the transfer time.
inline Instance tiny3() {
    Instance inst;
    inst.tasks.resize(3);
    for (int i = 0; i < 3; ++i) {
        inst.tasks[i].id = i;
        inst.tasks[i].candidate_procs = {0, 1};
        inst.tasks[i].proc_time = {{0, 15}, {1, 15}};
    }
    inst.tasks[0].outputs = {0};
    inst.tasks[1].inputs = {0};
    inst.tasks[2].inputs = {0};
    inst.blocks.push_back({0, 10, 0, {1, 2}});
    inst.edges = {{0, 1}, {0, 2}};
    inst.processors = {{0, ProcType::General, 0}, {1, ProcType::General, 0}};
    inst.memories = {{0, MemType::High2, Size{10}, -1}, {1, MemType::Low, std::nullopt, -1}};
    inst.access_factor[{ProcType::General, MemType::High2}] = Ratio{1, 2};
    inst.access_factor[{ProcType::General, MemType::Low}] = Ratio{1, 1};
    check_instance(inst);
    return inst;
}

inline Instance single_task(Time pt = 27) {
    Instance inst;
    inst.tasks.resize(1);
    inst.tasks[0].id = 0;
    inst.tasks[0].candidate_procs = {0};
    inst.tasks[0].proc_time = {{0, pt}};
    inst.processors = {{0, ProcType::General, 0}};
    inst.memories = {{0, MemType::Low, std::nullopt, -1}};
    inst.access_factor[{ProcType::General, MemType::Low}] = Ratio{1, 1};
    check_instance(inst);
    return inst;
}

struct RandomSpec {
    int min_tasks = 2;
    int max_tasks = 8;
    int max_procs = 2;
    int max_blocks = 5;
    int max_extra_edges = 6;
    bool with_high1 = false;
    bool allow_initial_blocks = true;
};

// Small random instance for oracle-backed tests. Edges only run from lower
// to higher ids.
inline Instance random_instance(std::mt19937_64& rng, const RandomSpec& spec = {}) {
    Instance inst;
    const int n = spec.min_tasks + static_cast<int>(rng() % (spec.max_tasks - spec.min_tasks + 1));
    const int n_procs = 1 + static_cast<int>(rng() % spec.max_procs);
    const int n_blocks = static_cast<int>(rng() % (spec.max_blocks + 1));

    for (int p = 0; p < n_procs; ++p)
        inst.processors.push_back(
            {p, (p == 0 && n_procs > 1) ? ProcType::HighSpeed : ProcType::General,
             p < (n_procs + 1) / 2 ? 0 : 1});

    inst.tasks.resize(n);
    for (int t = 0; t < n; ++t) {
        auto& task = inst.tasks[t];
        task.id = t;
        // nonempty random candidate subset
        for (int p = 0; p < n_procs; ++p)
            if (rng() % 100 < 70) task.candidate_procs.push_back(p);
        if (task.candidate_procs.empty())
            task.candidate_procs.push_back(static_cast<int>(rng() % n_procs));
        for (ProcId p : task.candidate_procs) task.proc_time[p] = 1 + static_cast<Time>(rng() % 30);
    }

    std::set<std::pair<TaskId, TaskId>> edges;
    int extra = static_cast<int>(rng() % (spec.max_extra_edges + 1));
    for (int e = 0; e < extra && n >= 2; ++e) {
        int u = static_cast<int>(rng() % n);
        int v = static_cast<int>(rng() % n);
        if (u == v) continue;
        if (u > v) std::swap(u, v);
        edges.insert({u, v});
    }
    inst.edges.assign(edges.begin(), edges.end());

    for (int b = 0; b < n_blocks; ++b) {
        DataBlock block;
        block.id = b;
        block.size = 1 + static_cast<Size>(rng() % 12);
        bool initial = spec.allow_initial_blocks && rng() % 100 < 20;
        if (!initial && n >= 2) {
            block.producer = static_cast<int>(rng() % (n - 1));  // leaves room for a consumer
            inst.tasks[block.producer].outputs.push_back(b);
        }
        std::set<TaskId> consumers;
        int want = 1 + static_cast<int>(rng() % 2);
        for (int c = 0; c < want; ++c) {
            TaskId lo = block.is_initial() ? 0 : block.producer + 1;
            if (lo >= n) break;
            consumers.insert(lo + static_cast<int>(rng() % (n - lo)));
        }
        block.consumers.assign(consumers.begin(), consumers.end());
        for (TaskId c : block.consumers) inst.tasks[c].inputs.push_back(b);
        inst.blocks.push_back(std::move(block));
    }
    for (auto& t : inst.tasks) {
        std::sort(t.inputs.begin(), t.inputs.end());
        std::sort(t.outputs.begin(), t.outputs.end());
    }

    inst.memories.push_back({0, MemType::High2, Size{8 + static_cast<Size>(rng() % 20)}, -1});
    int next_mem = 1;
    if (spec.with_high1) {
        inst.memories.push_back({next_mem++, MemType::High1, Size{6 + static_cast<Size>(rng() % 12)}, 0});
        inst.memories.push_back({next_mem++, MemType::High1, Size{6 + static_cast<Size>(rng() % 12)}, 1});
    }
    inst.memories.push_back({next_mem, MemType::Low, std::nullopt, -1});

    for (ProcType pt : {ProcType::HighSpeed, ProcType::General}) {
        inst.access_factor[{pt, MemType::High2}] = Ratio{1, 2};
        inst.access_factor[{pt, MemType::High1}] = Ratio{2, 3};
        inst.access_factor[{pt, MemType::Low}] = Ratio{1, 1};
    }

    check_instance(inst);
    return inst;
}

// Random structurally-valid solution: candidate assignment, a random linear
// extension split into per-processor sequences, uniform bank placement (not
// necessarily capacity-feasible). Pass all_low for guaranteed feasibility.
inline Solution random_solution(const Instance& inst, std::mt19937_64& rng, bool all_low = false) {
    Solution sol = Solution::empty(inst);
    for (TaskId t = 0; t < inst.num_tasks(); ++t) {
        const auto& cand = inst.tasks[t].candidate_procs;
        sol.assignment[t] = cand[rng() % cand.size()];
    }
    Adjacency adj = make_adjacency(inst);
    std::vector<int> indeg(inst.num_tasks(), 0);
    for (TaskId u = 0; u < inst.num_tasks(); ++u)
        for (TaskId v : adj.succ[u]) ++indeg[v];
    std::vector<TaskId> ready;
    for (TaskId t = 0; t < inst.num_tasks(); ++t)
        if (indeg[t] == 0) ready.push_back(t);
    while (!ready.empty()) {
        size_t i = rng() % ready.size();
        TaskId t = ready[i];
        ready.erase(ready.begin() + i);
        sol.sequences[sol.assignment[t]].push_back(t);
        for (TaskId v : adj.succ[t])
            if (--indeg[v] == 0) ready.push_back(v);
    }
    for (BlockId b = 0; b < inst.num_blocks(); ++b)
        sol.allocation[b] = all_low ? inst.low_bank() : static_cast<MemId>(rng() % inst.num_mems());
    return sol;
}

}  // namespace fixtures
