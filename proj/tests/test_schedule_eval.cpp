#include <catch2/catch_amalgamated.hpp>

#include "hdats/schedule.hpp"
#include "hdats/tabu.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace hdats;

namespace {

Solution tiny3_split(const Instance& inst, MemId bank) {
    Solution sol = Solution::empty(inst);
    sol.assignment = {0, 0, 1};
    sol.sequences = {{0, 1}, {2}};
    sol.allocation = {bank};
    return sol;
}

Solution tiny3_serialized(const Instance& inst, MemId bank) {
    Solution sol = Solution::empty(inst);
    sol.assignment = {0, 0, 0};
    sol.sequences = {{0, 1, 2}, {}};
    sol.allocation = {bank};
    return sol;
}

}  // namespace

TEST_CASE("transfer time: ceiling of size times the access factor") {
    Instance inst = fixtures::single_task();
    REQUIRE(transfer_time(0, MemType::Low, ProcType::General, inst) == 0);
    REQUIRE(transfer_time(10, MemType::Low, ProcType::General, inst) == 10);

    Instance tiny = fixtures::tiny3();
    tiny.access_factor[{ProcType::General, MemType::Low}] = Ratio{6, 5};
    REQUIRE(transfer_time(10, MemType::Low, ProcType::General, tiny) == 12);

    REQUIRE_THROWS_AS(transfer_time(4, MemType::High1, ProcType::General, inst),
                      std::out_of_range);
}

TEST_CASE("transfer time is monotone in size", "[property]") {
    Instance tiny = fixtures::tiny3();
    Time prev = 0;
    for (Size s = 0; s <= 50; ++s) {
        Time cur = transfer_time(s, MemType::High2, ProcType::General, tiny);
        REQUIRE(cur >= prev);
        REQUIRE((cur == 0) == (s == 0));
        prev = cur;
    }
}

TEST_CASE("single task without blocks finishes after its processing time") {
    Instance inst = fixtures::single_task(27);
    Solution sol = Solution::empty(inst);
    sol.assignment = {0};
    sol.sequences = {{0}};
    REQUIRE(simulate(inst, sol).makespan == 27);
}

TEST_CASE("fan-out with the block in LOW") {
    Instance inst = fixtures::tiny3();
    Solution sol = tiny3_split(inst, inst.low_bank());
    Schedule sched = simulate(inst, sol);
    // producer: proc [0,15), store [15,25); consumers load 10, run 15
    REQUIRE(sched.move_out_end[0] == 25);
    REQUIRE(sched.move_in_start[1] == 25);
    REQUIRE(sched.makespan == 50);
    REQUIRE(sched.makespan == oracles::relaxation_times(inst, sol).makespan);
}

TEST_CASE("faster bank never lengthens the fixed sequences") {
    Instance inst = fixtures::tiny3();
    Time low = simulate(inst, tiny3_split(inst, inst.low_bank())).makespan;
    Time high = simulate(inst, tiny3_split(inst, 0)).makespan;
    REQUIRE(high <= low);
    REQUIRE(high == 40);
}

TEST_CASE("block lifetime spans the producer's load to the last consumer's store") {
    Instance inst = fixtures::tiny3();
    Solution sol = tiny3_split(inst, inst.low_bank());
    Schedule sched = simulate(inst, sol);
    REQUIRE(sched.block_enter[0] == sched.move_in_start[0]);
    REQUIRE(sched.block_release[0] ==
            std::max(sched.move_out_end[1], sched.move_out_end[2]));
}

TEST_CASE("occupancy: empty, single interval, and an overflow") {
    Instance inst = fixtures::single_task();
    Solution sol = Solution::empty(inst);
    sol.assignment = {0};
    sol.sequences = {{0}};
    auto profiles = peak_occupancy(inst, simulate(inst, sol), sol.allocation);
    for (const auto& pr : profiles) REQUIRE(pr.peak == 0);

    Instance tiny = fixtures::tiny3();
    Solution split = tiny3_split(tiny, 0);
    Schedule sched = simulate(tiny, split);
    auto tiny_profiles = peak_occupancy(tiny, sched, split.allocation);
    REQUIRE(tiny_profiles[0].peak == 10);
    REQUIRE(is_feasible(tiny, split).ok);

    // a second concurrent block of size 6 pushes the bank to 16 > 10
    Instance two = tiny;
    two.blocks.push_back({1, 6, 0, {1}});
    two.tasks[0].outputs = {0, 1};
    two.tasks[1].inputs = {0, 1};
    check_instance(two);
    Solution both = Solution::empty(two);
    both.assignment = {0, 0, 1};
    both.sequences = {{0, 1}, {2}};
    both.allocation = {0, 0};
    Schedule s2 = simulate(two, both);
    auto p2 = peak_occupancy(two, s2, both.allocation);
    REQUIRE(p2[0].peak == 16);
    REQUIRE(p2[0].peak == oracles::per_time_unit_peak(two, s2, both.allocation, 0));
    auto feas = is_feasible(two, both);
    REQUIRE_FALSE(feas.ok);
    REQUIRE_THAT(feas.first_violation, Catch::Matchers::ContainsSubstring("capacity"));
}

TEST_CASE("structural violations are reported before capacity") {
    Instance inst = fixtures::tiny3();
    Solution sol = tiny3_split(inst, 0);
    sol.allocation = {-1};
    auto feas = is_feasible(inst, sol);
    REQUIRE_FALSE(feas.ok);
    REQUIRE_THAT(feas.first_violation, Catch::Matchers::ContainsSubstring("block 0"));
}

TEST_CASE("timed phases are consistent and the processor is exclusive", "[property]") {
    std::mt19937_64 rng(501);
    for (int round = 0; round < 200; ++round) {
        Instance inst = fixtures::random_instance(rng);
        Solution sol = fixtures::random_solution(inst, rng);
        Schedule sched = simulate(inst, sol);
        TaskWeights weights = solution_weights(inst, sol);

        for (TaskId t = 0; t < inst.num_tasks(); ++t) {
            REQUIRE(sched.move_in_start[t] <= sched.proc_start[t]);
            REQUIRE(sched.proc_start[t] <= sched.proc_end[t]);
            REQUIRE(sched.proc_end[t] <= sched.move_out_end[t]);
            REQUIRE(sched.proc_end[t] - sched.proc_start[t] ==
                    inst.proc_time(t, sol.assignment[t]));
        }
        for (const auto& seq : sol.sequences)
            for (size_t i = 1; i < seq.size(); ++i) {
                // processing waits for the predecessor's store; loads never overlap
                REQUIRE(sched.proc_start[seq[i]] >= sched.move_out_end[seq[i - 1]]);
                REQUIRE(sched.move_in_start[seq[i]] >= sched.proc_start[seq[i - 1]]);
            }

        // the relaxation oracle agrees on every timestamp
        auto oracle = oracles::relaxation_times(inst, sol);
        REQUIRE(sched.move_in_start == oracle.move_in_start);
        REQUIRE(sched.move_out_end == oracle.move_out_end);
        REQUIRE(sched.makespan == oracle.makespan);

        // and the longest-path view gives the same makespan
        auto metrics = compute_metrics(inst, &sol, weights);
        REQUIRE(metrics.cmax == sched.makespan);
        for (TaskId t = 0; t < inst.num_tasks(); ++t)
            REQUIRE(metrics.head[t] == sched.move_in_start[t]);
    }
}

TEST_CASE("event-swept peaks equal per-time-unit counting", "[property]") {
    std::mt19937_64 rng(502);
    for (int round = 0; round < 120; ++round) {
        Instance inst = fixtures::random_instance(rng);
        Solution sol = fixtures::random_solution(inst, rng);
        Schedule sched = simulate(inst, sol);
        auto profiles = peak_occupancy(inst, sched, sol.allocation);
        for (MemId m = 0; m < inst.num_mems(); ++m)
            REQUIRE(profiles[m].peak ==
                    oracles::per_time_unit_peak(inst, sched, sol.allocation, m));
    }
}

TEST_CASE("identity repositioning estimates the current makespan exactly") {
    Instance inst = fixtures::tiny3();
    Solution sol = tiny3_serialized(inst, inst.low_bank());
    Schedule sched = simulate(inst, sol);
    GraphMetrics metrics = compute_metrics(inst, &sol, solution_weights(inst, sol));
    EvalContext ctx(inst, sol, metrics);
    for (TaskId t = 0; t < 3; ++t) {
        Move identity{MoveKind::SwapInBlock, t, 0, t, BlockEnd::Head};
        REQUIRE(approx_makespan(ctx, identity) == sched.makespan);
    }
}

TEST_CASE("estimate error on the serialized pair stays within the moved transfers") {
    Instance inst = fixtures::tiny3();
    Solution sol = tiny3_serialized(inst, inst.low_bank());
    GraphMetrics metrics = compute_metrics(inst, &sol, solution_weights(inst, sol));
    TaskWeights weights = solution_weights(inst, sol);
    EvalContext ctx(inst, sol, metrics);

    Move swap{MoveKind::SwapInBlock, 1, 0, 2, BlockEnd::Tail};  // B behind C
    Time estimate = approx_makespan(ctx, swap);
    Time exact = simulate(inst, apply_move(inst, sol, swap)).makespan;
    Time budget = weights[1].move_in + weights[1].move_out + weights[2].move_in +
                  weights[2].move_out;
    REQUIRE(std::llabs(estimate - exact) <= budget);
}

TEST_CASE("reinsertion on an idle processor is bounded by span plus the move") {
    Instance inst = fixtures::tiny3();
    Solution sol = tiny3_serialized(inst, inst.low_bank());
    GraphMetrics metrics = compute_metrics(inst, &sol, solution_weights(inst, sol));
    TaskWeights weights = solution_weights(inst, sol);
    EvalContext ctx(inst, sol, metrics);

    Move shift{MoveKind::ChangeCore, 2, 1, 0, BlockEnd::Head};
    Time estimate = approx_makespan(ctx, shift);
    REQUIRE(estimate <= metrics.cmax + weights[2].total());
}

TEST_CASE("the estimator accepts every legal move", "[property]") {
    std::mt19937_64 rng(503);
    for (int round = 0; round < 80; ++round) {
        Instance inst = fixtures::random_instance(rng);
        Solution sol = fixtures::random_solution(inst, rng, true);
        GraphMetrics metrics = compute_metrics(inst, &sol, solution_weights(inst, sol));
        EvalContext ctx(inst, sol, metrics);
        for (const Move& move : enumerate_neighborhood(inst, sol, metrics)) {
            Time estimate = approx_makespan(ctx, move);
            REQUIRE(estimate >= 0);
            // applying the move must stay acyclic
            REQUIRE_NOTHROW(simulate(inst, apply_move(inst, sol, move)));
        }
    }
}
