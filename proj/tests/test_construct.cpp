#include <catch2/catch_amalgamated.hpp>

#include "hdats/brute_force.hpp"
#include "hdats/construct.hpp"
#include "hdats/load_balance.hpp"

#include "fixtures.hpp"

using namespace hdats;

namespace {

// one producer task with a single output block that fits HIGH2
Instance producer_task() {
    Instance inst;
    inst.tasks.resize(1);
    inst.tasks[0].id = 0;
    inst.tasks[0].candidate_procs = {0};
    inst.tasks[0].proc_time = {{0, 9}};
    inst.tasks[0].outputs = {0};
    inst.blocks.push_back({0, 5, 0, {}});
    inst.processors = {{0, ProcType::General, 0}};
    inst.memories = {{0, MemType::High2, Size{10}, -1}, {1, MemType::Low, std::nullopt, -1}};
    inst.access_factor[{ProcType::General, MemType::High2}] = Ratio{1, 2};
    inst.access_factor[{ProcType::General, MemType::Low}] = Ratio{1, 1};
    check_instance(inst);
    return inst;
}

GraphMetrics fake_metrics(std::vector<Time> heads, std::vector<Time> slacks, Time cmax) {
    GraphMetrics m;
    m.head = std::move(heads);
    m.slack = std::move(slacks);
    m.cmax = cmax;
    m.tail.assign(m.head.size(), 0);
    m.critical.assign(m.head.size(), 0);
    return m;
}

constexpr Time kNoSucc = std::numeric_limits<Time>::max();

}  // namespace

TEST_CASE("selection orders: head-first, slack-first, relaxed head") {
    auto metrics = fake_metrics({0, 3}, {5, 0}, 20);
    std::vector<TaskId> frontier{0, 1};
    std::mt19937_64 rng(1);
    auto no_succ = [](TaskId) { return kNoSucc; };

    PriorityStrategy strat;
    strat.kind = StrategyKind::RFirst;
    REQUIRE(select_next_task(frontier, metrics, strat, rng, no_succ) == 0);

    strat.kind = StrategyKind::SlackFirst;
    REQUIRE(select_next_task(frontier, metrics, strat, rng, no_succ) == 1);

    strat.kind = StrategyKind::RelaxR;
    strat.epsilon = 3;
    REQUIRE(select_next_task(frontier, metrics, strat, rng, no_succ) == 1);

    strat.epsilon = 2;  // head 3 now outside the window
    REQUIRE(select_next_task(frontier, metrics, strat, rng, no_succ) == 0);
}

TEST_CASE("successor slack breaks head-and-slack ties") {
    auto metrics = fake_metrics({0, 0}, {4, 4}, 20);
    std::vector<TaskId> frontier{0, 1};
    std::mt19937_64 rng(1);
    PriorityStrategy strat;
    strat.kind = StrategyKind::RFirst;
    auto succ_slack = [](TaskId t) { return t == 1 ? Time{1} : Time{9}; };
    REQUIRE(select_next_task(frontier, metrics, strat, rng, succ_slack) == 1);
}

TEST_CASE("random selection is seed-deterministic and in-range") {
    auto metrics = fake_metrics({0, 0, 0}, {0, 0, 0}, 10);
    std::vector<TaskId> frontier{3, 5, 9};
    PriorityStrategy strat;
    strat.kind = StrategyKind::Random;
    std::mt19937_64 a(7), b(7);
    auto no_succ = [](TaskId) { return kNoSucc; };
    for (int i = 0; i < 20; ++i) {
        TaskId x = select_next_task(frontier, metrics, strat, a, no_succ);
        REQUIRE(x == select_next_task(frontier, metrics, strat, b, no_succ));
        REQUIRE(std::count(frontier.begin(), frontier.end(), x) == 1);
    }
}

TEST_CASE("empty frontier is an error") {
    auto metrics = fake_metrics({}, {}, 0);
    std::mt19937_64 rng(1);
    REQUIRE_THROWS_AS(select_next_task({}, metrics, PriorityStrategy{}, rng,
                                       [](TaskId) { return kNoSucc; }),
                      std::invalid_argument);
}

TEST_CASE("lone task lands on its only processor, output in the fast bank") {
    Instance inst = producer_task();
    Solution sol = greedy_assign(inst, PriorityStrategy{});
    REQUIRE(sol.assignment[0] == 0);
    REQUIRE(sol.sequences[0] == std::vector<TaskId>{0});
    REQUIRE(sol.allocation[0] == 0);  // fits the 10-unit HIGH2 bank
    REQUIRE(is_feasible(inst, sol).ok);
}

TEST_CASE("fan-out construction reaches the exhaustive optimum") {
    Instance inst = fixtures::tiny3();
    Solution sol = greedy_assign(inst, PriorityStrategy{});
    REQUIRE(is_feasible(inst, sol).ok);
    REQUIRE(sol.allocation[0] == 0);
    REQUIRE(sol.assignment[1] != sol.assignment[2]);  // parallel branches split
    Time optimum = brute_force_optimum(inst).makespan;
    REQUIRE(simulate(inst, sol).makespan == optimum);
    REQUIRE(optimum == 40);
}

TEST_CASE("single processor forces a serialized topological order") {
    Instance inst;
    inst.tasks.resize(4);
    Time total = 0;
    for (int i = 0; i < 4; ++i) {
        inst.tasks[i].id = i;
        inst.tasks[i].candidate_procs = {0};
        inst.tasks[i].proc_time = {{0, 5 + i}};
        total += 5 + i;
    }
    inst.edges = {{0, 2}, {1, 3}};
    inst.processors = {{0, ProcType::General, 0}};
    inst.memories = {{0, MemType::Low, std::nullopt, -1}};
    inst.access_factor[{ProcType::General, MemType::Low}] = Ratio{1, 1};
    check_instance(inst);

    Solution sol = greedy_assign(inst, PriorityStrategy{});
    REQUIRE(simulate(inst, sol).makespan == total);
    REQUIRE(simulate(inst, sol).makespan == brute_force_optimum(inst).makespan);

    // the emitted sequence is a topological order of the edges
    const auto& seq = sol.sequences[0];
    auto pos = [&](TaskId t) { return std::find(seq.begin(), seq.end(), t) - seq.begin(); };
    REQUIRE(pos(0) < pos(2));
    REQUIRE(pos(1) < pos(3));
}

TEST_CASE("construction is deterministic per strategy and seed", "[property]") {
    std::mt19937_64 rng(601);
    for (int round = 0; round < 20; ++round) {
        Instance inst = fixtures::random_instance(rng);
        for (StrategyKind kind : {StrategyKind::SlackFirst, StrategyKind::RFirst,
                                  StrategyKind::Random, StrategyKind::RelaxR}) {
            PriorityStrategy strat;
            strat.kind = kind;
            strat.rng_seed = 99;
            Solution a = greedy_assign(inst, strat);
            Solution b = greedy_assign(inst, strat);
            REQUIRE(a == b);
        }
    }
}

TEST_CASE("every strategy yields a feasible solution", "[property]") {
    std::mt19937_64 rng(602);
    for (int round = 0; round < 60; ++round) {
        fixtures::RandomSpec spec;
        spec.with_high1 = true;
        Instance inst = fixtures::random_instance(rng, spec);
        for (StrategyKind kind : {StrategyKind::SlackFirst, StrategyKind::RFirst,
                                  StrategyKind::Random, StrategyKind::RelaxR}) {
            PriorityStrategy strat;
            strat.kind = kind;
            strat.rng_seed = rng();
            Solution sol = greedy_assign(inst, strat);
            auto feas = is_feasible(inst, sol);
            INFO(feas.first_violation);
            REQUIRE(feas.ok);
        }
    }
}

TEST_CASE("baseline: lone task matches the greedy placement") {
    Instance inst = producer_task();
    REQUIRE(load_balance_schedule(inst) == greedy_assign(inst, PriorityStrategy{}));
}

TEST_CASE("baseline: equal independent tasks spread over idle processors") {
    Instance inst;
    inst.tasks.resize(2);
    for (int i = 0; i < 2; ++i) {
        inst.tasks[i].id = i;
        inst.tasks[i].candidate_procs = {0, 1};
        inst.tasks[i].proc_time = {{0, 10}, {1, 10}};
    }
    inst.processors = {{0, ProcType::General, 0}, {1, ProcType::General, 0}};
    inst.memories = {{0, MemType::Low, std::nullopt, -1}};
    inst.access_factor[{ProcType::General, MemType::Low}] = Ratio{1, 1};
    check_instance(inst);

    Solution sol = load_balance_schedule(inst);
    REQUIRE(sol.assignment[0] != sol.assignment[1]);
    REQUIRE(sol.assignment[0] == 0);  // lower id first onto the lower processor
}

TEST_CASE("baseline is deterministic and always feasible", "[property]") {
    std::mt19937_64 rng(603);
    for (int round = 0; round < 60; ++round) {
        fixtures::RandomSpec spec;
        spec.with_high1 = true;
        Instance inst = fixtures::random_instance(rng, spec);
        Solution a = load_balance_schedule(inst);
        Solution b = load_balance_schedule(inst);
        REQUIRE(a == b);
        auto feas = is_feasible(inst, a);
        INFO(feas.first_violation);
        REQUIRE(feas.ok);
    }
}

TEST_CASE("baseline never beats the exhaustive optimum", "[property]") {
    std::mt19937_64 rng(604);
    for (int round = 0; round < 30; ++round) {
        fixtures::RandomSpec spec;
        spec.max_tasks = 6;
        spec.max_blocks = 3;
        Instance inst = fixtures::random_instance(rng, spec);
        Time lb = simulate(inst, load_balance_schedule(inst)).makespan;
        Time greedy = simulate(inst, greedy_assign(inst, PriorityStrategy{})).makespan;
        Time optimum = brute_force_optimum(inst).makespan;
        REQUIRE(lb >= optimum);
        REQUIRE(greedy >= optimum);
    }
}
