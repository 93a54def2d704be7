#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hdats {

using Time = std::int64_t;
using Size = std::int64_t;
using TaskId = int;
using BlockId = int;
using ProcId = int;
using MemId = int;

// Sentinel producer for blocks that exist before any task runs.
inline constexpr TaskId kInitialProducer = -1;

enum class ProcType { HighSpeed, General };
enum class MemType { High2, High1, Low };

inline const char* to_string(ProcType t) {
    return t == ProcType::HighSpeed ? "HIGH_SPEED" : "GENERAL";
}

inline const char* to_string(MemType t) {
    switch (t) {
        case MemType::High2: return "HIGH2";
        case MemType::High1: return "HIGH1";
        default: return "LOW";
    }
}

// Exact non-negative rational, kept normalized with den > 0.
struct Ratio {
    std::int64_t num = 1;
    std::int64_t den = 1;

    Ratio() = default;
    Ratio(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) throw std::invalid_argument("ratio with zero denominator");
        if (den < 0) { num = -num; den = -den; }
        std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }

    // ceil(value * num / den), exact in integer arithmetic
    Time ceil_mul(Size value) const {
        if (value <= 0) return 0;
        return (value * num + den - 1) / den;
    }

    bool operator==(const Ratio& o) const { return num == o.num && den == o.den; }
    bool operator<(const Ratio& o) const { return num * o.den < o.num * den; }
};

struct Task {
    TaskId id = 0;
    std::vector<ProcId> candidate_procs;      // sorted ascending
    std::map<ProcId, Time> proc_time;         // one entry per candidate
    std::vector<BlockId> inputs;              // sorted ascending
    std::vector<BlockId> outputs;             // sorted ascending
};

struct DataBlock {
    BlockId id = 0;
    Size size = 1;
    TaskId producer = kInitialProducer;
    std::vector<TaskId> consumers;            // sorted ascending

    bool is_initial() const { return producer == kInitialProducer; }
};

struct Processor {
    ProcId id = 0;
    ProcType ptype = ProcType::General;
    int group = 0;
};

struct MemoryBank {
    MemId id = 0;
    MemType mtype = MemType::Low;
    std::optional<Size> capacity;             // nullopt = unbounded
    int group = -1;                           // meaningful for High1

    bool unbounded() const { return !capacity.has_value(); }
    bool fits(Size occupancy) const { return unbounded() || occupancy <= *capacity; }
};

struct Instance {
    std::vector<Task> tasks;
    std::vector<DataBlock> blocks;
    std::vector<std::pair<TaskId, TaskId>> edges;     // sorted, deduplicated
    std::vector<Processor> processors;
    std::vector<MemoryBank> memories;
    std::map<std::pair<ProcType, MemType>, Ratio> access_factor;

    int num_tasks() const { return static_cast<int>(tasks.size()); }
    int num_blocks() const { return static_cast<int>(blocks.size()); }
    int num_procs() const { return static_cast<int>(processors.size()); }
    int num_mems() const { return static_cast<int>(memories.size()); }

    const Ratio& factor(ProcType p, MemType m) const {
        auto it = access_factor.find({p, m});
        if (it == access_factor.end()) {
            throw std::out_of_range(std::string("missing access factor for (") +
                                    to_string(p) + ", " + to_string(m) + ")");
        }
        return it->second;
    }

    Time proc_time(TaskId t, ProcId p) const {
        const auto& pt = tasks[t].proc_time;
        auto it = pt.find(p);
        if (it == pt.end())
            throw std::out_of_range("task " + std::to_string(t) +
                                    " has no processing time on processor " + std::to_string(p));
        return it->second;
    }

    // Lowest-id unbounded LOW bank; validation guarantees one exists.
    MemId low_bank() const {
        for (const auto& m : memories)
            if (m.mtype == MemType::Low && m.unbounded()) return m.id;
        throw std::logic_error("instance has no unbounded LOW bank");
    }
};

struct Solution {
    std::vector<ProcId> assignment;               // by task id, -1 = unassigned
    std::vector<std::vector<TaskId>> sequences;   // by processor id
    std::vector<MemId> allocation;                // by block id, -1 = unallocated

    static Solution empty(const Instance& inst) {
        Solution s;
        s.assignment.assign(inst.tasks.size(), -1);
        s.sequences.assign(inst.processors.size(), {});
        s.allocation.assign(inst.blocks.size(), -1);
        return s;
    }

    bool operator==(const Solution& o) const {
        return assignment == o.assignment && sequences == o.sequences &&
               allocation == o.allocation;
    }
};

struct Violation {
    std::string what;
};

// Precedence adjacency: explicit edges plus producer->consumer relations.
struct Adjacency {
    std::vector<std::vector<TaskId>> succ;
    std::vector<std::vector<TaskId>> pred;
};

inline Adjacency make_adjacency(const Instance& inst) {
    Adjacency adj;
    const int n = inst.num_tasks();
    adj.succ.resize(n);
    adj.pred.resize(n);
    auto add = [&](TaskId u, TaskId v) {
        adj.succ[u].push_back(v);
        adj.pred[v].push_back(u);
    };
    for (const auto& [u, v] : inst.edges) add(u, v);
    for (const auto& b : inst.blocks) {
        if (b.is_initial()) continue;
        for (TaskId c : b.consumers) add(b.producer, c);
    }
    for (int i = 0; i < n; ++i) {
        auto dedupe = [](std::vector<TaskId>& v) {
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
        };
        dedupe(adj.succ[i]);
        dedupe(adj.pred[i]);
    }
    return adj;
}

namespace detail {

// Kahn pass over the precedence graph; reports whether all nodes were ordered.
inline bool acyclic(const Adjacency& adj) {
    const int n = static_cast<int>(adj.succ.size());
    std::vector<int> indeg(n, 0);
    for (int u = 0; u < n; ++u)
        for (TaskId v : adj.succ[u]) ++indeg[v];
    std::vector<TaskId> stack;
    for (int u = 0; u < n; ++u)
        if (indeg[u] == 0) stack.push_back(u);
    int seen = 0;
    while (!stack.empty()) {
        TaskId u = stack.back();
        stack.pop_back();
        ++seen;
        for (TaskId v : adj.succ[u])
            if (--indeg[v] == 0) stack.push_back(v);
    }
    return seen == n;
}

}  // namespace detail

// Structural checks on the instance itself. Returns human-readable findings;
// empty means the instance is well formed.
inline std::vector<Violation> validate_instance(const Instance& inst) {
    std::vector<Violation> out;
    auto flag = [&](std::string msg) { out.push_back({std::move(msg)}); };

    const int n_tasks = inst.num_tasks();
    const int n_blocks = inst.num_blocks();
    const int n_procs = inst.num_procs();
    const int n_mems = inst.num_mems();

    for (int i = 0; i < n_tasks; ++i)
        if (inst.tasks[i].id != i) flag("task ids must be dense 0..n-1; slot " + std::to_string(i));
    for (int i = 0; i < n_blocks; ++i)
        if (inst.blocks[i].id != i) flag("block ids must be dense 0..n-1; slot " + std::to_string(i));
    for (int i = 0; i < n_procs; ++i)
        if (inst.processors[i].id != i) flag("processor ids must be dense 0..n-1; slot " + std::to_string(i));
    for (int i = 0; i < n_mems; ++i)
        if (inst.memories[i].id != i) flag("memory ids must be dense 0..n-1; slot " + std::to_string(i));
    if (!out.empty()) return out;  // id-based checks below assume density

    for (const auto& t : inst.tasks) {
        if (t.candidate_procs.empty())
            flag("task " + std::to_string(t.id) + ": empty candidate set");
        for (ProcId p : t.candidate_procs) {
            if (p < 0 || p >= n_procs)
                flag("task " + std::to_string(t.id) + ": dangling id (processor " + std::to_string(p) + ")");
            else if (!t.proc_time.count(p))
                flag("task " + std::to_string(t.id) + ": missing processing time on processor " + std::to_string(p));
        }
        for (const auto& [p, pt] : t.proc_time) {
            if (!std::binary_search(t.candidate_procs.begin(), t.candidate_procs.end(), p))
                flag("task " + std::to_string(t.id) + ": processing time for non-candidate processor " + std::to_string(p));
            if (pt < 0)
                flag("task " + std::to_string(t.id) + ": negative processing time");
        }
        for (BlockId b : t.inputs)
            if (b < 0 || b >= n_blocks)
                flag("task " + std::to_string(t.id) + ": dangling id (input block " + std::to_string(b) + ")");
        for (BlockId b : t.outputs) {
            if (b < 0 || b >= n_blocks)
                flag("task " + std::to_string(t.id) + ": dangling id (output block " + std::to_string(b) + ")");
            if (std::binary_search(t.inputs.begin(), t.inputs.end(), b))
                flag("task " + std::to_string(t.id) + ": block " + std::to_string(b) + " is both input and output");
        }
    }

    for (const auto& b : inst.blocks) {
        if (b.size < 1) flag("block " + std::to_string(b.id) + ": size must be >= 1");
        if (!b.is_initial()) {
            if (b.producer < 0 || b.producer >= n_tasks)
                flag("block " + std::to_string(b.id) + ": dangling id (producer " + std::to_string(b.producer) + ")");
            else if (!std::binary_search(inst.tasks[b.producer].outputs.begin(),
                                         inst.tasks[b.producer].outputs.end(), b.id))
                flag("block " + std::to_string(b.id) + ": producer " + std::to_string(b.producer) +
                     " does not list it as output");
        }
        for (TaskId c : b.consumers) {
            if (c < 0 || c >= n_tasks) {
                flag("block " + std::to_string(b.id) + ": dangling id (consumer " + std::to_string(c) + ")");
                continue;
            }
            if (c == b.producer)
                flag("block " + std::to_string(b.id) + ": produced and consumed by the same task");
            if (!std::binary_search(inst.tasks[c].inputs.begin(), inst.tasks[c].inputs.end(), b.id))
                flag("block " + std::to_string(b.id) + ": consumer " + std::to_string(c) +
                     " does not list it as input");
        }
    }
    // cross-check task block lists against block records
    for (const auto& t : inst.tasks) {
        for (BlockId b : t.outputs)
            if (b >= 0 && b < n_blocks && inst.blocks[b].producer != t.id)
                flag("task " + std::to_string(t.id) + ": claims output block " + std::to_string(b) +
                     " with different producer");
        for (BlockId b : t.inputs)
            if (b >= 0 && b < n_blocks &&
                !std::binary_search(inst.blocks[b].consumers.begin(), inst.blocks[b].consumers.end(), t.id))
                flag("task " + std::to_string(t.id) + ": claims input block " + std::to_string(b) +
                     " without being its consumer");
    }

    for (const auto& [u, v] : inst.edges) {
        if (u < 0 || u >= n_tasks || v < 0 || v >= n_tasks)
            flag("edge (" + std::to_string(u) + "," + std::to_string(v) + "): dangling id");
        else if (u == v)
            flag("edge (" + std::to_string(u) + "," + std::to_string(v) + "): self loop");
    }

    bool has_unbounded_low = false;
    for (const auto& m : inst.memories) {
        if (m.unbounded()) {
            if (m.mtype != MemType::Low)
                flag("memory " + std::to_string(m.id) + ": only LOW banks may be unbounded");
            else
                has_unbounded_low = true;
        } else if (*m.capacity < 0) {
            flag("memory " + std::to_string(m.id) + ": negative capacity");
        } else if (m.mtype == MemType::Low && *m.capacity < 1) {
            flag("memory " + std::to_string(m.id) + ": bounded LOW bank must have positive capacity");
        }
    }
    if (!inst.memories.empty() && !has_unbounded_low)
        flag("no unbounded LOW bank present");

    {
        std::set<ProcType> ptypes;
        std::set<MemType> mtypes;
        for (const auto& p : inst.processors) ptypes.insert(p.ptype);
        for (const auto& m : inst.memories) mtypes.insert(m.mtype);
        for (ProcType p : ptypes)
            for (MemType m : mtypes) {
                auto it = inst.access_factor.find({p, m});
                if (it == inst.access_factor.end())
                    flag(std::string("missing access factor for (") + to_string(p) + ", " + to_string(m) + ")");
                else if (it->second.num <= 0)
                    flag(std::string("access factor for (") + to_string(p) + ", " + to_string(m) +
                         ") must be positive");
            }
    }

    if (out.empty() && !detail::acyclic(make_adjacency(inst)))
        flag("cycle in the task precedence graph");

    return out;
}

// Structural checks of a solution against its instance. Capacity feasibility
// is a schedule property and checked separately.
inline std::vector<Violation> validate_solution(const Instance& inst, const Solution& sol) {
    std::vector<Violation> out;
    auto flag = [&](std::string msg) { out.push_back({std::move(msg)}); };

    const int n_tasks = inst.num_tasks();
    const int n_procs = inst.num_procs();
    const int n_blocks = inst.num_blocks();

    if (static_cast<int>(sol.assignment.size()) != n_tasks)
        flag("assignment must cover every task");
    if (static_cast<int>(sol.sequences.size()) != n_procs)
        flag("sequences must cover every processor");
    if (static_cast<int>(sol.allocation.size()) != n_blocks)
        flag("allocation must cover every block");
    if (!out.empty()) return out;

    for (TaskId t = 0; t < n_tasks; ++t) {
        ProcId p = sol.assignment[t];
        if (p < 0 || p >= n_procs) {
            flag("task " + std::to_string(t) + ": not assigned to a processor");
            continue;
        }
        const auto& cand = inst.tasks[t].candidate_procs;
        if (!std::binary_search(cand.begin(), cand.end(), p))
            flag("task " + std::to_string(t) + ": assigned to non-candidate processor " + std::to_string(p));
    }

    std::vector<int> seen(n_tasks, 0);
    for (ProcId p = 0; p < n_procs; ++p) {
        for (TaskId t : sol.sequences[p]) {
            if (t < 0 || t >= n_tasks) {
                flag("sequence of processor " + std::to_string(p) + ": unknown task " + std::to_string(t));
                continue;
            }
            if (++seen[t] > 1)
                flag("task " + std::to_string(t) + ": appears more than once in sequences");
            if (sol.assignment[t] != p)
                flag("task " + std::to_string(t) + ": sequenced on processor " + std::to_string(p) +
                     " but assigned to " + std::to_string(sol.assignment[t]));
        }
    }
    for (TaskId t = 0; t < n_tasks; ++t)
        if (seen[t] == 0) flag("task " + std::to_string(t) + ": missing from all sequences");

    for (BlockId b = 0; b < n_blocks; ++b) {
        MemId m = sol.allocation[b];
        if (m < 0 || m >= inst.num_mems())
            flag("block " + std::to_string(b) + ": not allocated to a memory bank");
    }

    return out;
}

inline void check_instance(const Instance& inst) {
    auto v = validate_instance(inst);
    if (!v.empty()) throw std::invalid_argument("invalid instance: " + v.front().what);
}

}  // namespace hdats
