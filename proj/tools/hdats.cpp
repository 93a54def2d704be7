#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "hdats/bench.hpp"
#include "hdats/brute_force.hpp"
#include "hdats/ilp_export.hpp"
#include "hdats/io.hpp"

namespace {

hdats::Instance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return hdats::parse_instance(in);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << content;
}

hdats::StrategyKind parse_strategy(const std::string& name) {
    if (name == "slack") return hdats::StrategyKind::SlackFirst;
    if (name == "r") return hdats::StrategyKind::RFirst;
    if (name == "rand") return hdats::StrategyKind::Random;
    if (name == "relaxr") return hdats::StrategyKind::RelaxR;
    throw CLI::ValidationError("--init", "unknown strategy '" + name + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Solver and benchmark harness for task/data placement on "
                 "heterogeneous multiprocessors with capacity-limited fast memories"};
    app.require_subcommand(1);

    // generate
    auto* gen_cmd = app.add_subcommand("generate", "Generate a random instance");
    hdats::GeneratorConfig gen_cfg;
    std::string gen_out;
    bool gen_full = false;
    gen_cmd->add_option("--seed", gen_cfg.seed, "RNG seed");
    gen_cmd->add_option("--tasks", gen_cfg.n_tasks, "task count range (min max)");
    gen_cmd->add_option("--blocks", gen_cfg.n_blocks, "block count range (min max)");
    gen_cmd->add_option("--edge-ratio", gen_cfg.edge_task_ratio, "edges per task");
    gen_cmd->add_option("--high-cores", gen_cfg.high_speed_cores, "high-speed core count");
    gen_cmd->add_option("--general-cores", gen_cfg.general_cores, "general core count");
    gen_cmd->add_option("--high-mem", gen_cfg.high_mem_fraction,
                        "HIGH capacity as a fraction of the all-LOW peak volume");
    gen_cmd->add_option("--block-size", gen_cfg.block_size, "block size range (min max)");
    gen_cmd->add_flag("--full", gen_full, "keep the full-scale default sizes");
    gen_cmd->add_option("-o,--out", gen_out, "output file (default stdout)");

    // solve
    auto* solve_cmd = app.add_subcommand("solve", "Construct and improve a solution");
    std::string solve_in, solve_out, solve_trace, solve_alg = "ts", solve_init = "slack";
    hdats::SearchParams search;
    bool det_trace = false, fast_realloc = false;
    solve_cmd->add_option("instance", solve_in, "instance file")->required();
    solve_cmd->add_option("--alg", solve_alg, "algorithm: ts | lb | greedy")
        ->check(CLI::IsMember({"ts", "lb", "greedy"}));
    solve_cmd->add_option("--init", solve_init, "construction order: slack | r | rand | relaxr");
    solve_cmd->add_option("--seed", search.seed, "RNG seed");
    solve_cmd->add_option("--kmax", search.kmax, "exact evaluations per step");
    solve_cmd->add_option("--lambda", search.lambda, "non-improving step cap");
    solve_cmd->add_option("--tmax-s", search.tmax_s, "wall-clock budget in seconds");
    solve_cmd->add_option("--realloc-round", search.realloc_round,
                          "full placement rebuild every p-th adoption");
    solve_cmd->add_flag("--fast-realloc", fast_realloc,
                        "use the cheap placement refresh everywhere");
    solve_cmd->add_flag("--det-trace", det_trace,
                        "deterministic run: ignore the wall clock, zero the trace timings");
    solve_cmd->add_option("-o,--out", solve_out, "solution file");
    solve_cmd->add_option("--trace", solve_trace, "search trace CSV");

    // validate
    auto* val_cmd = app.add_subcommand("validate", "Check an instance or a solution against it");
    std::string val_in, val_sol;
    val_cmd->add_option("instance", val_in, "instance file")->required();
    val_cmd->add_option("--solution", val_sol, "solution file");

    // export-ilp
    auto* ilp_cmd = app.add_subcommand("export-ilp", "Emit the stage-indexed 0/1 model as LP text");
    std::string ilp_in, ilp_out;
    hdats::IlpOptions ilp_opts;
    std::int64_t ma_bound = 0;
    ilp_cmd->add_option("instance", ilp_in, "instance file")->required();
    ilp_cmd->add_option("--horizon", ilp_opts.stage_horizon, "stage horizon")->required();
    ilp_cmd->add_option("--var-cap", ilp_opts.var_cap, "refuse above this many variables");
    ilp_cmd->add_option("--ma-bound", ma_bound, "concurrent transfers per bank (0 = unbounded)");
    ilp_cmd->add_option("-o,--out", ilp_out, "output file (default stdout)");

    // oracle
    auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustive optimum for tiny instances");
    std::string oracle_in, oracle_out;
    hdats::OracleLimits limits;
    oracle_cmd->add_option("instance", oracle_in, "instance file")->required();
    oracle_cmd->add_option("--max-tasks", limits.max_tasks, "task limit");
    oracle_cmd->add_option("--max-procs", limits.max_procs, "processor limit");
    oracle_cmd->add_option("--max-blocks", limits.max_blocks, "block limit");
    oracle_cmd->add_option("-o,--out", oracle_out, "write the optimal solution here");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark suite, CSV on stdout or --out");
    std::string bench_suite = "dominance", bench_out;
    hdats::BenchOptions bench_opts;
    bench_cmd->add_option("--suite", bench_suite,
                          "dominance | memsweep | topk | initstudy | coresweep")
        ->check(CLI::IsMember({"dominance", "memsweep", "topk", "initstudy", "coresweep"}));
    bench_cmd->add_option("--seed", bench_opts.seed, "master seed");
    bench_cmd->add_option("--instances", bench_opts.instances, "instances per suite");
    bench_cmd->add_option("--budget-s", bench_opts.budget_s, "search budget per run");
    bench_cmd->add_option("--kmax", bench_opts.kmax, "exact evaluations per step");
    bench_cmd->add_option("--threads", bench_opts.threads, "worker threads (0 = all)");
    bench_cmd->add_flag("--full", bench_opts.full, "full-scale instances");
    bench_cmd->add_option("-o,--out", bench_out, "output CSV file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen_cmd) {
            if (gen_full) {
                hdats::GeneratorConfig full;
                full.seed = gen_cfg.seed;
                gen_cfg = full;
            }
            std::string text = hdats::serialize_instance(hdats::generate(gen_cfg));
            if (gen_out.empty())
                std::cout << text;
            else
                write_file(gen_out, text);
            return 0;
        }

        if (*solve_cmd) {
            hdats::Instance inst = load_instance(solve_in);
            hdats::Solution sol;
            search.fast_realloc = fast_realloc;
            search.deterministic_timing = det_trace;
            hdats::PriorityStrategy strat;
            strat.kind = parse_strategy(solve_init);
            strat.rng_seed = search.seed;

            if (solve_alg == "lb") {
                sol = hdats::load_balance_schedule(inst);
            } else if (solve_alg == "greedy") {
                sol = hdats::greedy_assign(inst, strat);
            } else {
                hdats::SearchResult result = hdats::solve(inst, search, strat);
                sol = result.best;
                if (!solve_trace.empty()) write_file(solve_trace, hdats::trace_csv(result.trace));
                std::cerr << "iterations=" << result.iterations
                          << " adoptions=" << result.adoptions
                          << " perturbations=" << result.perturbations << "\n";
            }

            hdats::Time makespan = hdats::simulate(inst, sol).makespan;
            std::cout << "makespan " << makespan << "\n";
            if (!solve_out.empty()) write_file(solve_out, hdats::serialize_solution(inst, sol));
            return 0;
        }

        if (*val_cmd) {
            std::ifstream in(val_in);
            if (!in) throw std::runtime_error("cannot open " + val_in);
            hdats::Instance inst;
            try {
                inst = hdats::parse_instance(in);
            } catch (const hdats::ParseError& e) {
                std::cout << "instance\tinvalid\t" << e.what() << "\n";
                return 2;
            }
            std::cout << "instance\tok\ttasks=" << inst.num_tasks()
                      << " blocks=" << inst.num_blocks() << "\n";
            if (val_sol.empty()) return 0;

            std::ifstream sin(val_sol);
            if (!sin) throw std::runtime_error("cannot open " + val_sol);
            hdats::Solution sol = hdats::parse_solution(sin, inst);
            auto violations = hdats::validate_solution(inst, sol);
            for (const auto& v : violations) std::cout << "violation\t" << v.what << "\n";
            if (!violations.empty()) return 2;

            hdats::Schedule sched = hdats::simulate(inst, sol);
            auto profiles = hdats::peak_occupancy(inst, sched, sol.allocation);
            bool over = false;
            std::cout << "makespan\t" << sched.makespan << "\n";
            for (const auto& m : inst.memories) {
                std::cout << "bank\t" << m.id << "\t" << hdats::to_string(m.mtype) << "\tpeak="
                          << profiles[m.id].peak << "\tcap="
                          << (m.unbounded() ? std::string("inf") : std::to_string(*m.capacity))
                          << "\n";
                if (!m.fits(profiles[m.id].peak)) {
                    std::cout << "violation\tmemory " << m.id << " over capacity\n";
                    over = true;
                }
            }
            return over ? 2 : 0;
        }

        if (*ilp_cmd) {
            hdats::Instance inst = load_instance(ilp_in);
            if (ma_bound > 0) ilp_opts.memory_access_bound = ma_bound;
            std::string text = hdats::emit_ilp(inst, ilp_opts);
            if (text.find("WARNING") != std::string::npos)
                std::cerr << "warning: horizon below the baseline makespan\n";
            if (ilp_out.empty())
                std::cout << text;
            else
                write_file(ilp_out, text);
            return 0;
        }

        if (*oracle_cmd) {
            hdats::Instance inst = load_instance(oracle_in);
            hdats::OracleResult result = hdats::brute_force_optimum(inst, limits);
            std::cout << "optimum " << result.makespan << " (" << result.leaves
                      << " complete solutions examined)\n";
            if (!oracle_out.empty())
                write_file(oracle_out, hdats::serialize_solution(inst, result.best));
            return 0;
        }

        if (*bench_cmd) {
            hdats::BenchReport report;
            if (bench_suite == "dominance") {
                report = hdats::run_dominance(bench_opts);
            } else if (bench_suite == "memsweep") {
                report = hdats::run_memory_sweep(bench_opts);
            } else if (bench_suite == "topk") {
                report = hdats::run_topk_sweep(bench_opts);
            } else if (bench_suite == "coresweep") {
                report = hdats::run_core_sweep(bench_opts);
            } else {
                auto study = hdats::run_init_study(bench_opts);
                report = study.bench;
                for (const auto& [kind, mean] : study.post_mean)
                    std::cerr << "post_mean " << hdats::to_string(kind) << " " << mean << "\n";
                for (const auto& [kind, mean] : study.initial_mean)
                    std::cerr << "initial_mean " << hdats::to_string(kind) << " " << mean << "\n";
            }
            if (bench_out.empty())
                std::cout << report.csv();
            else
                write_file(bench_out, report.csv());
            return 0;
        }
    } catch (const hdats::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
