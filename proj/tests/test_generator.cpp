#include <catch2/catch_amalgamated.hpp>

#include "hdats/bench.hpp"
#include "hdats/io.hpp"

using namespace hdats;

TEST_CASE("default configuration yields a valid instance") {
    GeneratorConfig cfg;
    cfg.seed = 1;
    Instance inst = generate(cfg);
    REQUIRE(validate_instance(inst).empty());
    REQUIRE(inst.num_tasks() >= 200);
    REQUIRE(inst.num_tasks() <= 300);
    REQUIRE(inst.num_blocks() >= 1);
    REQUIRE(inst.num_procs() == 10);
    // one global fast bank, one local bank per group, one unbounded LOW
    REQUIRE(inst.memories.front().mtype == MemType::High2);
    REQUIRE(inst.memories.back().mtype == MemType::Low);
    REQUIRE(inst.memories.back().unbounded());
}

TEST_CASE("degenerate ranges give a single-task instance") {
    GeneratorConfig cfg;
    cfg.n_tasks = {1, 1};
    cfg.n_blocks = {0, 0};
    Instance inst = generate(cfg);
    REQUIRE(inst.num_tasks() == 1);
    REQUIRE(inst.num_blocks() == 0);
    REQUIRE(validate_instance(inst).empty());
}

TEST_CASE("generation is byte-deterministic per seed") {
    GeneratorConfig cfg;
    cfg.n_tasks = {60, 90};
    cfg.n_blocks = {100, 150};
    cfg.seed = 42;
    std::string a = serialize_instance(generate(cfg));
    std::string b = serialize_instance(generate(cfg));
    REQUIRE(a == b);
    cfg.seed = 43;
    REQUIRE(serialize_instance(generate(cfg)) != a);
}

TEST_CASE("edge count tracks the configured ratio") {
    GeneratorConfig cfg;
    cfg.n_tasks = {100, 100};
    cfg.n_blocks = {50, 50};
    cfg.seed = 5;
    Instance inst = generate(cfg);
    REQUIRE(static_cast<double>(inst.edges.size()) >= 0.95 * 8.0 * inst.num_tasks());
    REQUIRE(static_cast<double>(inst.edges.size()) <= 8.0 * inst.num_tasks() + 1);
    for (const auto& [u, v] : inst.edges) REQUIRE(u < v);
}

TEST_CASE("phase-time proportions land near the configured ratio") {
    GeneratorConfig cfg;
    cfg.n_tasks = {150, 150};
    cfg.n_blocks = {400, 400};
    cfg.seed = 9;
    Instance inst = generate(cfg);

    double move_in = 0, proc = 0, move_out = 0;
    const Ratio low_rate = inst.factor(ProcType::General, MemType::Low);
    for (const auto& t : inst.tasks) {
        for (BlockId b : t.inputs) move_in += static_cast<double>(low_rate.ceil_mul(inst.blocks[b].size));
        for (BlockId b : t.outputs) move_out += static_cast<double>(low_rate.ceil_mul(inst.blocks[b].size));
        proc += static_cast<double>(t.proc_time.at(inst.processors.back().id));
    }

    double in_per_proc = move_in / proc;
    double out_per_proc = move_out / proc;
    REQUIRE(in_per_proc == Catch::Approx(7.0 / 15.0).margin(0.1 * 7.0 / 15.0));
    REQUIRE(out_per_proc == Catch::Approx(5.0 / 15.0).margin(0.1 * 5.0 / 15.0));
}

TEST_CASE("the baseline schedules every generated instance", "[property]") {
    for (std::uint64_t seed : {2ULL, 3ULL, 4ULL}) {
        GeneratorConfig cfg;
        cfg.n_tasks = {40, 70};
        cfg.n_blocks = {60, 120};
        cfg.seed = seed;
        Instance inst = generate(cfg);
        Solution lb = load_balance_schedule(inst);
        auto feas = is_feasible(inst, lb);
        INFO(feas.first_violation);
        REQUIRE(feas.ok);
    }
}

TEST_CASE("high-capacity fractions scale the banks") {
    GeneratorConfig cfg;
    cfg.n_tasks = {50, 50};
    cfg.n_blocks = {80, 80};
    cfg.seed = 12;
    cfg.high_mem_fraction = 0.2;
    Instance small = generate(cfg);
    cfg.high_mem_fraction = 1.0;
    Instance large = generate(cfg);
    REQUIRE(*large.memories[0].capacity > *small.memories[0].capacity);
}

TEST_CASE("report arithmetic is recomputable from its rows") {
    BenchOptions opts;
    opts.instances = 2;
    opts.tasks = {10, 15};
    opts.blocks = {10, 20};
    opts.budget_s = 0.3;
    opts.lambda = 60;
    opts.threads = 1;
    BenchReport report = run_dominance(opts);
    REQUIRE(report.rows.size() == 4);

    double sum = 0;
    int count = 0;
    for (size_t i = 0; i < report.rows.size(); i += 2) {
        const auto& lb = report.rows[i];
        const auto& ts = report.rows[i + 1];
        REQUIRE(lb.alg == "lb");
        REQUIRE(ts.alg == "ts");
        double expect = lb.makespan > 0
                            ? static_cast<double>(lb.makespan - ts.makespan) / lb.makespan
                            : 0.0;
        REQUIRE(ts.improvement == Catch::Approx(expect));
        sum += ts.improvement;
        ++count;
    }
    REQUIRE(report.mean_improvement == Catch::Approx(sum / count));

    std::string csv = report.csv();
    REQUIRE(csv.rfind("instance,alg,config,makespan,improvement,wall_ms\n", 0) == 0);
    REQUIRE(std::count(csv.begin(), csv.end(), '\n') >= 5);
}
