#pragma once

#include <atomic>
#include <thread>

#include "hdats/generator.hpp"
#include "hdats/tabu.hpp"

namespace hdats {

struct BenchRow {
    std::string instance;
    std::string alg;      // "lb" or "ts"
    std::string config;   // sweep point, empty when not applicable
    Time makespan = 0;
    double improvement = 0;  // (lb - ts) / lb, on ts rows
    std::int64_t wall_ms = 0;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    double mean_improvement = 0;
    double min_improvement = 0;
    double max_improvement = 0;

    std::string csv() const {
        std::ostringstream out;
        out << "instance,alg,config,makespan,improvement,wall_ms\n";
        out.setf(std::ios::fixed);
        out.precision(6);
        for (const auto& r : rows)
            out << r.instance << "," << r.alg << "," << r.config << "," << r.makespan << ","
                << r.improvement << "," << r.wall_ms << "\n";
        out << "mean,,," << "," << mean_improvement << ",\n";
        out << "min,,," << "," << min_improvement << ",\n";
        out << "max,,," << "," << max_improvement << ",\n";
        return out.str();
    }
};

struct BenchOptions {
    int instances = 10;
    std::pair<int, int> tasks{50, 100};
    std::pair<int, int> blocks{120, 240};
    double budget_s = 60.0;
    int kmax = 100;
    std::int64_t lambda = 100000;
    std::uint64_t seed = 1;
    double high_mem_fraction = 0.2;
    int general_cores = 8;
    int threads = 0;  // 0 = hardware concurrency
    bool full = false;           // full-size instances instead of desk scale
    bool deterministic = false;  // iteration-capped runs, wall clock ignored

    GeneratorConfig generator_config(int index) const {
        GeneratorConfig g;
        if (!full) {
            g.n_tasks = tasks;
            g.n_blocks = blocks;
        }
        g.general_cores = general_cores;
        g.high_mem_fraction = high_mem_fraction;
        g.seed = seed * 1000003ULL + static_cast<std::uint64_t>(index);
        return g;
    }

    SearchParams search_params(int index) const {
        SearchParams p;
        p.kmax = kmax;
        p.lambda = lambda;
        p.tmax_s = budget_s;
        p.seed = seed * 7919ULL + static_cast<std::uint64_t>(index);
        return p;
    }
};

namespace detail {

inline void parallel_cells(int count, int threads, const std::function<void(int)>& fn) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    for (auto& t : pool) t.join();
}

inline std::int64_t run_ms(const std::function<void()>& fn) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                 t0)
        .count();
}

inline void fill_improvement_stats(BenchReport& report) {
    double sum = 0;
    int count = 0;
    report.min_improvement = 1e30;
    report.max_improvement = -1e30;
    for (const auto& r : report.rows) {
        if (r.alg != "ts") continue;
        sum += r.improvement;
        report.min_improvement = std::min(report.min_improvement, r.improvement);
        report.max_improvement = std::max(report.max_improvement, r.improvement);
        ++count;
    }
    if (count == 0) {
        report.min_improvement = report.max_improvement = 0;
        return;
    }
    report.mean_improvement = sum / count;
}

}  // namespace detail

// Head-to-head: the load-balancing baseline against the search on a batch of
// generated instances.
inline BenchReport run_dominance(const BenchOptions& opts) {
    BenchReport report;
    report.rows.resize(2 * opts.instances);
    detail::parallel_cells(opts.instances, opts.threads, [&](int i) {
        Instance inst = generate(opts.generator_config(i));
        std::string name = "desk" + std::to_string(i);

        Time lb_mk = 0;
        std::int64_t lb_ms = detail::run_ms([&]() {
            Solution lb = load_balance_schedule(inst);
            lb_mk = simulate(inst, lb).makespan;
        });

        SearchResult ts;
        std::int64_t ts_ms = detail::run_ms(
            [&]() { ts = solve(inst, opts.search_params(i), PriorityStrategy{}); });

        double imp = lb_mk > 0 ? static_cast<double>(lb_mk - ts.best_makespan) / lb_mk : 0;
        report.rows[2 * i] = {name, "lb", "", lb_mk, 0, lb_ms};
        report.rows[2 * i + 1] = {name, "ts", "", ts.best_makespan, imp, ts_ms};
    });
    detail::fill_improvement_stats(report);
    return report;
}

// Same instance seeds re-generated under different HIGH capacity fractions.
inline BenchReport run_memory_sweep(const BenchOptions& opts,
                                    const std::vector<double>& fractions = {0.2, 1.0}) {
    BenchReport report;
    const int cells = opts.instances * static_cast<int>(fractions.size());
    report.rows.resize(2 * cells);
    detail::parallel_cells(cells, opts.threads, [&](int cell) {
        int i = cell % opts.instances;
        double frac = fractions[cell / opts.instances];
        GeneratorConfig g = opts.generator_config(i);
        g.high_mem_fraction = frac;
        Instance inst = generate(g);
        std::string name = "desk" + std::to_string(i);
        std::string config = "high_mem=" + std::to_string(frac);

        Solution lb = load_balance_schedule(inst);
        Time lb_mk = simulate(inst, lb).makespan;
        SearchResult ts = solve(inst, opts.search_params(i), PriorityStrategy{});
        double imp = lb_mk > 0 ? static_cast<double>(lb_mk - ts.best_makespan) / lb_mk : 0;
        report.rows[2 * cell] = {name, "lb", config, lb_mk, 0, 0};
        report.rows[2 * cell + 1] = {name, "ts", config, ts.best_makespan, imp, 0};
    });
    detail::fill_improvement_stats(report);
    return report;
}

// One instance, the exact-evaluation count swept under a fixed budget.
inline BenchReport run_topk_sweep(const BenchOptions& opts,
                                  const std::vector<int>& ks = {1, 10, 30, 100}) {
    BenchReport report;
    Instance inst = generate(opts.generator_config(0));
    report.rows.resize(ks.size());
    detail::parallel_cells(static_cast<int>(ks.size()), opts.threads, [&](int cell) {
        SearchParams params = opts.search_params(0);
        params.kmax = ks[cell];
        SearchResult ts;
        std::int64_t ms = detail::run_ms([&]() { ts = solve(inst, params, PriorityStrategy{}); });
        report.rows[cell] = {"desk0", "ts", "kmax=" + std::to_string(ks[cell]), ts.best_makespan, 0,
                             ms};
    });
    return report;
}

// Post-search quality of the four construction orders, instances x seeds.
struct InitStudyReport {
    BenchReport bench;
    std::map<StrategyKind, double> post_mean;     // best makespan mean per strategy
    std::map<StrategyKind, double> initial_mean;  // construction makespan mean per strategy
};

inline InitStudyReport run_init_study(const BenchOptions& opts, int seeds_per_instance = 5) {
    const std::vector<StrategyKind> kinds = {StrategyKind::SlackFirst, StrategyKind::RFirst,
                                             StrategyKind::Random, StrategyKind::RelaxR};
    InitStudyReport report;
    const int cells = opts.instances * seeds_per_instance * static_cast<int>(kinds.size());
    report.bench.rows.resize(cells);
    std::vector<Time> initials(cells, 0);

    detail::parallel_cells(cells, opts.threads, [&](int cell) {
        int k = cell % static_cast<int>(kinds.size());
        int rest = cell / static_cast<int>(kinds.size());
        int s = rest % seeds_per_instance;
        int i = rest / seeds_per_instance;

        Instance inst = generate(opts.generator_config(i));
        PriorityStrategy strat;
        strat.kind = kinds[k];
        strat.rng_seed = opts.seed * 31 + static_cast<std::uint64_t>(s);
        SearchParams params = opts.search_params(i * seeds_per_instance + s);

        Solution init = greedy_assign(inst, strat);
        initials[cell] = simulate(inst, init).makespan;

        SearchResult ts = solve(inst, params, strat);
        report.bench.rows[cell] = {"desk" + std::to_string(i),
                                   "ts",
                                   std::string("init=") + to_string(kinds[k]) +
                                       ",seed=" + std::to_string(s),
                                   ts.best_makespan,
                                   0,
                                   0};
    });

    for (size_t k = 0; k < kinds.size(); ++k) {
        double post = 0, initial = 0;
        int count = 0;
        for (int cell = static_cast<int>(k); cell < cells; cell += static_cast<int>(kinds.size())) {
            post += static_cast<double>(report.bench.rows[cell].makespan);
            initial += static_cast<double>(initials[cell]);
            ++count;
        }
        report.post_mean[kinds[k]] = post / count;
        report.initial_mean[kinds[k]] = initial / count;
    }
    return report;
}

// Improvement as a function of the general-core count.
inline BenchReport run_core_sweep(const BenchOptions& opts,
                                  const std::vector<int>& general_cores = {2, 4, 8, 16}) {
    BenchReport report;
    const int cells = opts.instances * static_cast<int>(general_cores.size());
    report.rows.resize(2 * cells);
    detail::parallel_cells(cells, opts.threads, [&](int cell) {
        int i = cell % opts.instances;
        int cores = general_cores[cell / opts.instances];
        GeneratorConfig g = opts.generator_config(i);
        g.general_cores = cores;
        Instance inst = generate(g);
        std::string config = "general_cores=" + std::to_string(cores);

        Solution lb = load_balance_schedule(inst);
        Time lb_mk = simulate(inst, lb).makespan;
        SearchResult ts = solve(inst, opts.search_params(i), PriorityStrategy{});
        double imp = lb_mk > 0 ? static_cast<double>(lb_mk - ts.best_makespan) / lb_mk : 0;
        report.rows[2 * cell] = {"desk" + std::to_string(i), "lb", config, lb_mk, 0, 0};
        report.rows[2 * cell + 1] = {"desk" + std::to_string(i), "ts", config, ts.best_makespan, imp, 0};
    });
    detail::fill_improvement_stats(report);
    return report;
}

}  // namespace hdats
