#pragma once

#include <array>
#include <cmath>
#include <random>
#include <set>

#include "hdats/load_balance.hpp"

namespace hdats {

struct GeneratorConfig {
    std::pair<int, int> n_tasks{200, 300};
    std::pair<int, int> n_blocks{500, 700};
    double edge_task_ratio = 8.0;
    int high_speed_cores = 2;
    int general_cores = 8;
    std::array<std::int64_t, 3> time_ratio{7, 15, 5};  // move-in : processing : move-out
    Ratio low_access_penalty{6, 5};                    // LOW transfer time per HIGH time unit
    std::pair<Size, Size> block_size{1, 15000};
    double high_mem_fraction = 0.2;  // HIGH capacity as share of the all-LOW peak volume
    double high_speed_speedup = 2.0;
    int group_size = 4;             // general cores per local-memory group
    std::uint64_t seed = 1;
};

namespace detail {

inline int uniform_in(std::mt19937_64& rng, std::pair<int, int> range) {
    if (range.second <= range.first) return range.first;
    return range.first + static_cast<int>(rng() % static_cast<std::uint64_t>(range.second - range.first + 1));
}

inline Size uniform_size(std::mt19937_64& rng, std::pair<Size, Size> range) {
    if (range.second <= range.first) return range.first;
    return range.first + static_cast<Size>(rng() % static_cast<std::uint64_t>(range.second - range.first + 1));
}

}  // namespace detail

// Random layered DAG with producer/consumer wiring, timing calibrated to the
// configured move-in : processing : move-out proportions at the LOW transfer
// rate, and HIGH capacities set to a fraction of the all-LOW peak resident
// volume. Deterministic per seed.
inline Instance generate(const GeneratorConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    Instance inst;

    const int n = detail::uniform_in(rng, cfg.n_tasks);
    const int n_layers = n >= 2 ? std::max(2, static_cast<int>(std::ceil(std::sqrt(n)))) : 1;

    std::vector<int> layer(n);
    for (int i = 0; i < n; ++i) layer[i] = static_cast<int>(rng() % n_layers);
    std::sort(layer.begin(), layer.end());  // ids ascend with layers

    std::vector<char> has_later(n, 0);
    for (int i = 0; i < n; ++i) has_later[i] = (layer[i] < layer[n - 1]) ? 1 : 0;

    // edges run to strictly later layers only
    std::set<std::pair<TaskId, TaskId>> edges;
    {
        std::int64_t target = std::llround(cfg.edge_task_ratio * n);
        std::int64_t possible = 0;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if (layer[u] < layer[v]) ++possible;
        target = std::min(target, possible);
        std::int64_t attempts = 0;
        while (static_cast<std::int64_t>(edges.size()) < target && attempts < 100 * target + 100) {
            ++attempts;
            int u = static_cast<int>(rng() % n);
            int v = static_cast<int>(rng() % n);
            if (layer[u] >= layer[v]) continue;
            edges.insert({u, v});
        }
        for (int u = 0; u < n && static_cast<std::int64_t>(edges.size()) < target; ++u)
            for (int v = u + 1; v < n && static_cast<std::int64_t>(edges.size()) < target; ++v)
                if (layer[u] < layer[v]) edges.insert({u, v});
    }

    // processors and groups
    for (int i = 0; i < cfg.high_speed_cores; ++i)
        inst.processors.push_back({static_cast<int>(inst.processors.size()), ProcType::HighSpeed, 0});
    for (int i = 0; i < cfg.general_cores; ++i)
        inst.processors.push_back({static_cast<int>(inst.processors.size()), ProcType::General,
                                   1 + i / std::max(1, cfg.group_size)});

    // blocks: producer in a non-final layer, one to three later consumers
    const int n_blocks = detail::uniform_in(rng, cfg.n_blocks);
    std::vector<TaskId> producers_pool;
    for (int i = 0; i < n; ++i)
        if (has_later[i]) producers_pool.push_back(i);

    struct ProtoBlock {
        TaskId producer;
        std::set<TaskId> consumers;
        Size size;
    };
    std::vector<ProtoBlock> protos;
    for (int b = 0; b < n_blocks; ++b) {
        ProtoBlock pb;
        pb.size = detail::uniform_size(rng, cfg.block_size);
        if (producers_pool.empty()) {
            pb.producer = kInitialProducer;
        } else {
            pb.producer = producers_pool[rng() % producers_pool.size()];
        }
        int want;
        {
            std::uint64_t roll = rng() % 100;
            want = roll < 65 ? 1 : roll < 95 ? 2 : 3;
        }
        std::vector<TaskId> candidates;
        for (int t = 0; t < n; ++t) {
            if (pb.producer == kInitialProducer) {
                candidates.push_back(t);
            } else if (layer[t] > layer[pb.producer]) {
                candidates.push_back(t);
            }
        }
        if (candidates.empty()) continue;
        for (int c = 0; c < want; ++c) pb.consumers.insert(candidates[rng() % candidates.size()]);
        protos.push_back(std::move(pb));
    }

    // nudge total consumer volume so move-in : move-out approaches the
    // configured proportion (each consumer adds one load of the block)
    {
        const double target = static_cast<double>(cfg.time_ratio[0]) / cfg.time_ratio[2];
        auto volumes = [&]() {
            double load = 0, store = 0;
            for (const auto& pb : protos) {
                load += static_cast<double>(pb.size) * pb.consumers.size();
                if (pb.producer != kInitialProducer) store += static_cast<double>(pb.size);
            }
            return std::make_pair(load, store);
        };
        for (int round = 0; round < 4 * static_cast<int>(protos.size()) + 4; ++round) {
            auto [load, store] = volumes();
            if (store <= 0) break;
            double cur = load / store;
            if (std::abs(cur - target) <= 0.02 * target) break;
            size_t idx = protos.empty() ? 0 : rng() % protos.size();
            auto& pb = protos[idx];
            if (cur < target) {
                std::vector<TaskId> candidates;
                for (int t = 0; t < n; ++t) {
                    bool later = pb.producer == kInitialProducer || layer[t] > layer[pb.producer];
                    if (later && !pb.consumers.count(t)) candidates.push_back(t);
                }
                if (!candidates.empty()) pb.consumers.insert(candidates[rng() % candidates.size()]);
            } else if (pb.consumers.size() > 1) {
                auto it = pb.consumers.begin();
                std::advance(it, rng() % pb.consumers.size());
                pb.consumers.erase(it);
            }
        }
    }

    inst.tasks.resize(n);
    for (int i = 0; i < n; ++i) inst.tasks[i].id = i;
    for (const auto& pb : protos) {
        DataBlock b;
        b.id = static_cast<int>(inst.blocks.size());
        b.size = pb.size;
        b.producer = pb.producer;
        b.consumers.assign(pb.consumers.begin(), pb.consumers.end());
        if (b.producer != kInitialProducer) inst.tasks[b.producer].outputs.push_back(b.id);
        for (TaskId c : b.consumers) inst.tasks[c].inputs.push_back(b.id);
        inst.blocks.push_back(std::move(b));
    }
    for (auto& t : inst.tasks) {
        std::sort(t.inputs.begin(), t.inputs.end());
        std::sort(t.outputs.begin(), t.outputs.end());
    }
    inst.edges.assign(edges.begin(), edges.end());

    // memories: one global HIGH2, one HIGH1 per group, unbounded LOW
    std::set<int> groups;
    for (const auto& p : inst.processors) groups.insert(p.group);
    inst.memories.push_back({0, MemType::High2, Size{0}, -1});
    for (int g : groups)
        inst.memories.push_back({static_cast<int>(inst.memories.size()), MemType::High1, Size{0}, g});
    inst.memories.push_back({static_cast<int>(inst.memories.size()), MemType::Low, std::nullopt, -1});

    for (ProcType pt : {ProcType::HighSpeed, ProcType::General}) {
        inst.access_factor[{pt, MemType::High2}] = Ratio{1, 1};
        inst.access_factor[{pt, MemType::High1}] = Ratio{1, 1};
        inst.access_factor[{pt, MemType::Low}] = cfg.low_access_penalty;
    }

    // processing times: calibrate the instance-wide mean against the LOW-rate
    // move-in volume
    {
        std::vector<Time> base(n);
        for (int i = 0; i < n; ++i) base[i] = 50 + static_cast<Time>(rng() % 101);
        double mean_base = 0;
        for (Time b : base) mean_base += static_cast<double>(b);
        mean_base /= std::max(1, n);

        double total_load_time = 0;
        const Ratio& low_rate = cfg.low_access_penalty;
        for (const auto& b : inst.blocks)
            total_load_time += static_cast<double>(low_rate.ceil_mul(b.size)) * b.consumers.size();
        double scale = 1.0;
        if (total_load_time > 0) {
            double target_proc_mean = (total_load_time / n) *
                                      (static_cast<double>(cfg.time_ratio[1]) / cfg.time_ratio[0]);
            scale = target_proc_mean / mean_base;
        }
        for (int i = 0; i < n; ++i) {
            Time pt_general = std::max<Time>(1, std::llround(static_cast<double>(base[i]) * scale));
            Time pt_high =
                std::max<Time>(1, std::llround(static_cast<double>(pt_general) / cfg.high_speed_speedup));
            auto& t = inst.tasks[i];
            for (const auto& p : inst.processors) {
                t.candidate_procs.push_back(p.id);
                t.proc_time[p.id] = p.ptype == ProcType::HighSpeed ? pt_high : pt_general;
            }
        }
    }

    // HIGH capacities: fraction of the peak resident volume of the all-LOW
    // baseline schedule, split between the global bank and the groups
    {
        Solution lb = load_balance_schedule(inst);
        Schedule sched = simulate(inst, lb);
        auto profiles = peak_occupancy(inst, sched, lb.allocation);
        Size peak = 0;
        for (const auto& pr : profiles) peak = std::max(peak, pr.peak);
        Size total_high = std::max<Size>(1, std::llround(cfg.high_mem_fraction * static_cast<double>(peak)));
        Size high2 = std::max<Size>(1, (total_high + 1) / 2);
        Size per_group = std::max<Size>(1, (total_high - high2) / std::max<size_t>(1, groups.size()));
        for (auto& m : inst.memories) {
            if (m.mtype == MemType::High2) m.capacity = high2;
            if (m.mtype == MemType::High1) m.capacity = per_group;
        }
    }

    check_instance(inst);
    return inst;
}

}  // namespace hdats
