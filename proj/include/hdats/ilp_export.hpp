#pragma once

#include "hdats/load_balance.hpp"
#include "hdats/schedule.hpp"

namespace hdats {

struct IlpOptions {
    std::int64_t stage_horizon = 0;          // stages 1..S, one time unit each
    std::int64_t var_cap = 2'000'000;        // refuse emission above this many variables
    std::optional<std::int64_t> memory_access_bound;  // per-bank concurrent transfers
};

namespace detail {

// One memory transfer, attached to its task: inputs load before processing,
// outputs store after it.
struct AccessOp {
    TaskId task;
    BlockId block;
    bool is_input;
};

inline std::vector<AccessOp> access_ops(const Instance& inst) {
    std::vector<AccessOp> ops;
    for (const auto& t : inst.tasks) {
        for (BlockId b : t.inputs) ops.push_back({t.id, b, true});
        for (BlockId b : t.outputs) ops.push_back({t.id, b, false});
    }
    return ops;
}

class LpWriter {
public:
    void comment(const std::string& text) { body_ += "\\ " + text + "\n"; }

    void begin_constraint(const std::string& name) {
        line_ = " " + name + ":";
        first_term_ = true;
    }

    void term(std::int64_t coef, const std::string& var) {
        if (coef == 0) return;
        std::string piece;
        if (coef > 0)
            piece = (first_term_ ? std::string(" ") : std::string(" + ")) +
                    (coef == 1 ? "" : std::to_string(coef) + " ") + var;
        else
            piece = " - " + (coef == -1 ? "" : std::to_string(-coef) + " ") + var;
        if (line_.size() + piece.size() > 200) {
            body_ += line_ + "\n";
            line_ = "   ";
        }
        line_ += piece;
        first_term_ = false;
    }

    void finish(const std::string& relation, std::int64_t rhs) {
        if (first_term_) line_ += " 0 Cmax";
        body_ += line_ + " " + relation + " " + std::to_string(rhs) + "\n";
        line_.clear();
    }

    const std::string& str() const { return body_; }

private:
    std::string body_;
    std::string line_;
    bool first_term_ = true;
};

}  // namespace detail

// Stage-indexed 0/1 program for an instance, in LP interchange text.
// Stage k covers the time unit [k-1, k); a task starting at stage k on
// processor j finishes processing at time k-1+PT. Constraint families are
// numbered in comments; simplifications are listed in the header.
inline std::string emit_ilp(const Instance& inst, const IlpOptions& opts) {
    const std::int64_t S = opts.stage_horizon;
    if (S < 1) throw std::invalid_argument("stage horizon must be >= 1");

    const int n_tasks = inst.num_tasks();
    const int n_procs = inst.num_procs();
    const int n_mems = inst.num_mems();
    const auto ops = detail::access_ops(inst);
    const int n_ops = static_cast<int>(ops.size());

    // start-stage windows per (task, processor); a task must fit the horizon
    auto fits = [&](TaskId i, ProcId j, std::int64_t k) {
        return k >= 1 && k + inst.proc_time(i, j) - 1 <= S;
    };
    for (TaskId i = 0; i < n_tasks; ++i) {
        bool any = false;
        for (ProcId j : inst.tasks[i].candidate_procs)
            if (fits(i, j, 1)) any = true;
        if (!any)
            throw std::invalid_argument("horizon " + std::to_string(S) + " too small for task " +
                                        std::to_string(i));
    }

    auto dur = [&](int l, MemId j, ProcId p) {
        return transfer_time(inst.blocks[ops[l].block].size, inst.memories[j].mtype,
                             inst.processors[p].ptype, inst);
    };

    // variable census against the cap
    std::int64_t var_count = 1;  // Cmax
    for (TaskId i = 0; i < n_tasks; ++i) {
        for (ProcId j : inst.tasks[i].candidate_procs) {
            var_count += std::max<std::int64_t>(0, S - inst.proc_time(i, j) + 1);  // x
            var_count += S;                                                        // xp
            var_count += 1;                                                        // RT
        }
        var_count += 1;  // P
    }
    var_count += static_cast<std::int64_t>(inst.num_blocks()) * n_mems;  // d
    var_count += inst.num_blocks();                                      // Mem
    for (int l = 0; l < n_ops; ++l) {
        var_count += static_cast<std::int64_t>(n_mems) * S * 2;  // y, yp
        var_count += n_mems;                                     // RA
        var_count += static_cast<std::int64_t>(n_mems) *
                     static_cast<std::int64_t>(inst.tasks[ops[l].task].candidate_procs.size());  // w
    }
    if (var_count > opts.var_cap)
        throw std::invalid_argument("model would need " + std::to_string(var_count) +
                                    " variables, above the cap of " + std::to_string(opts.var_cap));

    Time lb_makespan = 0;
    if (n_tasks > 0) {
        Solution lb = load_balance_schedule(inst);
        lb_makespan = simulate(inst, lb).makespan;
    }

    auto x = [](TaskId i, ProcId j, std::int64_t k) {
        return "x_" + std::to_string(i) + "_" + std::to_string(j) + "_" + std::to_string(k);
    };
    auto xp = [](TaskId i, ProcId j, std::int64_t m) {
        return "xp_" + std::to_string(i) + "_" + std::to_string(j) + "_" + std::to_string(m);
    };
    auto dv = [](BlockId h, MemId j) { return "d_" + std::to_string(h) + "_" + std::to_string(j); };
    auto y = [](int l, MemId j, std::int64_t k) {
        return "y_" + std::to_string(l) + "_" + std::to_string(j) + "_" + std::to_string(k);
    };
    auto yp = [](int l, MemId j, std::int64_t m) {
        return "yp_" + std::to_string(l) + "_" + std::to_string(j) + "_" + std::to_string(m);
    };
    auto w = [](int l, MemId j, ProcId p) {
        return "w_" + std::to_string(l) + "_" + std::to_string(j) + "_" + std::to_string(p);
    };
    auto rt = [](TaskId i, ProcId j) { return "RT_" + std::to_string(i) + "_" + std::to_string(j); };
    auto ra = [](int l, MemId j) { return "RA_" + std::to_string(l) + "_" + std::to_string(j); };

    std::string header;
    header += "\\ hdats-v1 stage-indexed model\n";
    header += "\\ tasks=" + std::to_string(n_tasks) + " access_ops=" + std::to_string(n_ops) +
              " blocks=" + std::to_string(inst.num_blocks()) + " procs=" + std::to_string(n_procs) +
              " mems=" + std::to_string(n_mems) + " stages=" + std::to_string(S) +
              " variables=" + std::to_string(var_count) + "\n";
    if (S < lb_makespan)
        header += "\\ WARNING: horizon " + std::to_string(S) +
                  " is below the load-balancing makespan " + std::to_string(lb_makespan) +
                  "; the model may be infeasible\n";
    header += "\\ family (1): objective, minimize the latest completion\n";
    header += "\\ family (2): each task starts in exactly one stage on one processor\n";
    header += "\\ family (3): at most one task runs per processor per stage\n";
    header += "\\ family (4): per-stage task count bounded by the processor count\n";
    header += "\\ family (5): processor index helper P_i\n";
    header += "\\ family (6): declaration of start indicators x (see Binaries)\n";
    header += "\\ family (7): declaration of busy indicators xp (see Binaries)\n";
    header += "\\ family (8): each block lives in exactly one bank\n";
    header += "\\ family (9): static bank capacity over allocated blocks";
    {
        bool any_unbounded = false;
        for (const auto& m : inst.memories) any_unbounded |= m.unbounded();
        if (any_unbounded) header += " (unbounded banks omitted)";
    }
    header += "\n";
    header += "\\ family (10): bank index helper Mem_h\n";
    header += "\\ family (11): each access op starts in exactly one stage on one bank\n";
    if (opts.memory_access_bound)
        header += "\\ family (12): concurrent transfers per bank per stage bounded by " +
                  std::to_string(*opts.memory_access_bound) + "\n";
    else
        header += "\\ family (12): simplified away, concurrent-access bound unbounded\n";
    header += "\\ family (13): an op's bank equals its block's bank\n";
    header += "\\ family (14): declaration of allocation indicators d (see Binaries)\n";
    header += "\\ family (15): declaration of op start indicators y (see Binaries)\n";
    header += "\\ family (16): declaration of op busy indicators yp (see Binaries)\n";
    header += "\\ family (17): precedence between tasks\n";
    header += "\\ family (18): precedence from a task to an access op\n";
    header += "\\ family (19): precedence between access ops\n";
    header += "\\ family (20): precedence from an access op to a task\n";
    header += "\\ family (21): realized processing time RT\n";
    header += "\\ family (22): busy stages bounded by RT\n";
    header += "\\ family (23): processing occupies consecutive stages\n";
    header += "\\ family (24): realized access time RA, linearized via w_l_j_p\n";
    header += "\\ family (25): op busy stages bounded by RA\n";
    header += "\\ family (26): transfers occupy consecutive stages\n";

    detail::LpWriter sub;
    int c_no = 0;
    auto cname = [&](int family) { return "c" + std::to_string(family) + "_" + std::to_string(c_no++); };

    // (1) completion links
    sub.comment("family (1)");
    for (TaskId i = 0; i < n_tasks; ++i) {
        sub.begin_constraint(cname(1));
        sub.term(1, "Cmax");
        for (ProcId j : inst.tasks[i].candidate_procs) {
            for (std::int64_t k = 1; fits(i, j, k); ++k) sub.term(-(k - 1), x(i, j, k));
            sub.term(-1, rt(i, j));
        }
        sub.finish(">=", 0);
    }
    for (int l = 0; l < n_ops; ++l) {
        sub.begin_constraint(cname(1));
        sub.term(1, "Cmax");
        for (MemId j = 0; j < n_mems; ++j) {
            for (std::int64_t k = 1; k <= S; ++k) sub.term(-(k - 1), y(l, j, k));
            sub.term(-1, ra(l, j));
        }
        sub.finish(">=", 0);
    }

    // (2)
    sub.comment("family (2)");
    for (TaskId i = 0; i < n_tasks; ++i) {
        sub.begin_constraint(cname(2));
        for (ProcId j : inst.tasks[i].candidate_procs)
            for (std::int64_t k = 1; fits(i, j, k); ++k) sub.term(1, x(i, j, k));
        sub.finish("=", 1);
    }

    // (3) and (4)
    sub.comment("family (3)");
    for (ProcId j = 0; j < n_procs; ++j)
        for (std::int64_t m = 1; m <= S; ++m) {
            bool any = false;
            for (TaskId i = 0; i < n_tasks; ++i)
                if (inst.tasks[i].proc_time.count(j)) any = true;
            if (!any) continue;
            sub.begin_constraint(cname(3));
            for (TaskId i = 0; i < n_tasks; ++i)
                if (inst.tasks[i].proc_time.count(j)) sub.term(1, xp(i, j, m));
            sub.finish("<=", 1);
        }
    sub.comment("family (4)");
    for (std::int64_t m = 1; m <= S && n_tasks > 0; ++m) {
        sub.begin_constraint(cname(4));
        for (TaskId i = 0; i < n_tasks; ++i)
            for (ProcId j : inst.tasks[i].candidate_procs) sub.term(1, xp(i, j, m));
        sub.finish("<=", n_procs);
    }

    // (5)
    sub.comment("family (5)");
    for (TaskId i = 0; i < n_tasks; ++i) {
        sub.begin_constraint(cname(5));
        sub.term(1, "P_" + std::to_string(i));
        for (ProcId j : inst.tasks[i].candidate_procs)
            for (std::int64_t k = 1; fits(i, j, k); ++k) sub.term(-j, x(i, j, k));
        sub.finish("=", 0);
    }

    // (8), (9), (10)
    sub.comment("family (8)");
    for (BlockId h = 0; h < inst.num_blocks(); ++h) {
        sub.begin_constraint(cname(8));
        for (MemId j = 0; j < n_mems; ++j) sub.term(1, dv(h, j));
        sub.finish("=", 1);
    }
    sub.comment("family (9)");
    for (MemId j = 0; j < n_mems; ++j) {
        if (inst.memories[j].unbounded() || inst.num_blocks() == 0) continue;
        sub.begin_constraint(cname(9));
        for (BlockId h = 0; h < inst.num_blocks(); ++h) sub.term(inst.blocks[h].size, dv(h, j));
        sub.finish("<=", *inst.memories[j].capacity);
    }
    sub.comment("family (10)");
    for (BlockId h = 0; h < inst.num_blocks(); ++h) {
        sub.begin_constraint(cname(10));
        sub.term(1, "Mem_" + std::to_string(h));
        for (MemId j = 0; j < n_mems; ++j) sub.term(-j, dv(h, j));
        sub.finish("=", 0);
    }

    // (11), (12), (13)
    sub.comment("family (11)");
    for (int l = 0; l < n_ops; ++l) {
        sub.begin_constraint(cname(11));
        for (MemId j = 0; j < n_mems; ++j)
            for (std::int64_t k = 1; k <= S; ++k) sub.term(1, y(l, j, k));
        sub.finish("=", 1);
    }
    if (opts.memory_access_bound) {
        sub.comment("family (12)");
        for (MemId j = 0; j < n_mems; ++j)
            for (std::int64_t m = 1; m <= S && n_ops > 0; ++m) {
                sub.begin_constraint(cname(12));
                for (int l = 0; l < n_ops; ++l) sub.term(1, yp(l, j, m));
                sub.finish("<=", *opts.memory_access_bound);
            }
    }
    sub.comment("family (13)");
    for (int l = 0; l < n_ops; ++l)
        for (MemId j = 0; j < n_mems; ++j) {
            sub.begin_constraint(cname(13));
            for (std::int64_t k = 1; k <= S; ++k) sub.term(1, y(l, j, k));
            sub.term(-1, dv(ops[l].block, j));
            sub.finish("=", 0);
        }

    // precedence helpers
    auto task_end_before_task = [&](TaskId u, TaskId v) {
        sub.begin_constraint(cname(17));
        for (ProcId j : inst.tasks[u].candidate_procs)
            for (std::int64_t k = 1; fits(u, j, k); ++k)
                sub.term(k + inst.proc_time(u, j), x(u, j, k));
        for (ProcId j : inst.tasks[v].candidate_procs)
            for (std::int64_t k = 1; fits(v, j, k); ++k) sub.term(-k, x(v, j, k));
        sub.finish("<=", 0);
    };
    auto task_end_before_op = [&](TaskId u, int l) {
        sub.begin_constraint(cname(18));
        for (ProcId j : inst.tasks[u].candidate_procs)
            for (std::int64_t k = 1; fits(u, j, k); ++k)
                sub.term(k + inst.proc_time(u, j), x(u, j, k));
        for (MemId j = 0; j < n_mems; ++j)
            for (std::int64_t k = 1; k <= S; ++k) sub.term(-k, y(l, j, k));
        sub.finish("<=", 0);
    };
    auto op_end_before_op = [&](int l, int l2) {
        sub.begin_constraint(cname(19));
        for (MemId j = 0; j < n_mems; ++j) {
            for (std::int64_t k = 1; k <= S; ++k) sub.term(k, y(l, j, k));
            sub.term(1, ra(l, j));
        }
        for (MemId j = 0; j < n_mems; ++j)
            for (std::int64_t k = 1; k <= S; ++k) sub.term(-k, y(l2, j, k));
        sub.finish("<=", 0);
    };
    auto op_end_before_task = [&](int l, TaskId v) {
        sub.begin_constraint(cname(20));
        for (MemId j = 0; j < n_mems; ++j) {
            for (std::int64_t k = 1; k <= S; ++k) sub.term(k, y(l, j, k));
            sub.term(1, ra(l, j));
        }
        for (ProcId j : inst.tasks[v].candidate_procs)
            for (std::int64_t k = 1; fits(v, j, k); ++k) sub.term(-k, x(v, j, k));
        sub.finish("<=", 0);
    };

    std::vector<std::vector<int>> in_ops(n_tasks), out_ops(n_tasks);
    for (int l = 0; l < n_ops; ++l)
        (ops[l].is_input ? in_ops[ops[l].task] : out_ops[ops[l].task]).push_back(l);

    sub.comment("families (17)-(20)");
    for (TaskId i = 0; i < n_tasks; ++i) {
        for (int l : in_ops[i]) op_end_before_task(l, i);   // loads finish first
        for (int l : out_ops[i]) task_end_before_op(i, l);  // stores start after
    }
    for (const auto& b : inst.blocks) {
        if (b.is_initial()) continue;
        for (int lo : out_ops[b.producer]) {
            if (ops[lo].block != b.id) continue;
            for (TaskId c : b.consumers)
                for (int li : in_ops[c])
                    if (ops[li].block == b.id) op_end_before_op(lo, li);
        }
    }
    for (const auto& [u, v] : inst.edges) {
        task_end_before_task(u, v);
        for (int li : in_ops[v]) task_end_before_op(u, li);
        for (int lo : out_ops[u]) {
            op_end_before_task(lo, v);
            for (int li : in_ops[v]) op_end_before_op(lo, li);
        }
    }

    // (21), (22), (23)
    sub.comment("family (21)");
    for (TaskId i = 0; i < n_tasks; ++i)
        for (ProcId j : inst.tasks[i].candidate_procs) {
            sub.begin_constraint(cname(21));
            sub.term(1, rt(i, j));
            for (std::int64_t k = 1; fits(i, j, k); ++k) sub.term(-inst.proc_time(i, j), x(i, j, k));
            sub.finish("=", 0);
        }
    sub.comment("family (22)");
    for (TaskId i = 0; i < n_tasks; ++i)
        for (ProcId j : inst.tasks[i].candidate_procs) {
            sub.begin_constraint(cname(22));
            for (std::int64_t m = 1; m <= S; ++m) sub.term(1, xp(i, j, m));
            sub.term(-1, rt(i, j));
            sub.finish("<=", 0);
        }
    sub.comment("family (23)");
    for (TaskId i = 0; i < n_tasks; ++i)
        for (ProcId j : inst.tasks[i].candidate_procs) {
            Time pt = inst.proc_time(i, j);
            if (pt == 0) continue;
            for (std::int64_t k = 1; fits(i, j, k); ++k) {
                sub.begin_constraint(cname(23));
                for (std::int64_t m = k; m < k + pt; ++m) sub.term(1, xp(i, j, m));
                sub.term(-pt, x(i, j, k));
                sub.finish(">=", 0);
            }
        }

    // (24): RA via the op-on-bank x task-on-proc conjunction w
    sub.comment("family (24)");
    for (int l = 0; l < n_ops; ++l) {
        TaskId i = ops[l].task;
        for (MemId j = 0; j < n_mems; ++j) {
            sub.begin_constraint(cname(24));
            sub.term(1, ra(l, j));
            for (ProcId p : inst.tasks[i].candidate_procs) sub.term(-dur(l, j, p), w(l, j, p));
            sub.finish("=", 0);
            for (ProcId p : inst.tasks[i].candidate_procs) {
                sub.begin_constraint(cname(24));
                sub.term(1, w(l, j, p));
                for (std::int64_t k = 1; k <= S; ++k) sub.term(-1, y(l, j, k));
                sub.finish("<=", 0);
                sub.begin_constraint(cname(24));
                sub.term(1, w(l, j, p));
                for (std::int64_t k = 1; fits(i, p, k); ++k) sub.term(-1, x(i, p, k));
                sub.finish("<=", 0);
                sub.begin_constraint(cname(24));
                sub.term(1, w(l, j, p));
                for (std::int64_t k = 1; k <= S; ++k) sub.term(-1, y(l, j, k));
                for (std::int64_t k = 1; fits(i, p, k); ++k) sub.term(-1, x(i, p, k));
                sub.finish(">=", -1);
            }
        }
    }

    // (25), (26)
    sub.comment("family (25)");
    for (int l = 0; l < n_ops; ++l)
        for (MemId j = 0; j < n_mems; ++j) {
            sub.begin_constraint(cname(25));
            for (std::int64_t m = 1; m <= S; ++m) sub.term(1, yp(l, j, m));
            sub.term(-1, ra(l, j));
            sub.finish("<=", 0);
        }
    sub.comment("family (26)");
    for (int l = 0; l < n_ops; ++l) {
        TaskId i = ops[l].task;
        for (MemId j = 0; j < n_mems; ++j)
            for (ProcId p : inst.tasks[i].candidate_procs) {
                Time duration = dur(l, j, p);
                if (duration == 0) continue;
                for (std::int64_t k = 1; k <= S; ++k) {
                    if (k + duration - 1 > S) {
                        // start too late for this bank/processor pairing
                        sub.begin_constraint(cname(26));
                        sub.term(1, y(l, j, k));
                        for (std::int64_t k2 = 1; fits(i, p, k2); ++k2) sub.term(1, x(i, p, k2));
                        sub.finish("<=", 1);
                        continue;
                    }
                    sub.begin_constraint(cname(26));
                    for (std::int64_t m = k; m < k + duration; ++m) sub.term(1, yp(l, j, m));
                    sub.term(-duration, y(l, j, k));
                    for (std::int64_t k2 = 1; fits(i, p, k2); ++k2) sub.term(-duration, x(i, p, k2));
                    sub.finish(">=", -duration);
                }
            }
    }

    // assemble document
    std::string out = header;
    out += "Minimize\n obj: Cmax\nSubject To\n";
    out += sub.str();
    out += "Bounds\n Cmax >= 0\n";
    out += "Generals\n Cmax";
    for (TaskId i = 0; i < n_tasks; ++i) {
        out += " P_" + std::to_string(i);
        for (ProcId j : inst.tasks[i].candidate_procs) out += " " + rt(i, j);
    }
    for (BlockId h = 0; h < inst.num_blocks(); ++h) out += " Mem_" + std::to_string(h);
    for (int l = 0; l < n_ops; ++l)
        for (MemId j = 0; j < n_mems; ++j) out += " " + ra(l, j);
    out += "\nBinaries\n";
    {
        std::string line;
        auto push = [&](const std::string& var) {
            if (line.size() + var.size() + 1 > 200) {
                out += line + "\n";
                line.clear();
            }
            line += " " + var;
        };
        for (TaskId i = 0; i < n_tasks; ++i)
            for (ProcId j : inst.tasks[i].candidate_procs) {
                for (std::int64_t k = 1; fits(i, j, k); ++k) push(x(i, j, k));
                for (std::int64_t m = 1; m <= S; ++m) push(xp(i, j, m));
            }
        for (BlockId h = 0; h < inst.num_blocks(); ++h)
            for (MemId j = 0; j < n_mems; ++j) push(dv(h, j));
        for (int l = 0; l < n_ops; ++l)
            for (MemId j = 0; j < n_mems; ++j) {
                for (std::int64_t k = 1; k <= S; ++k) push(y(l, j, k));
                for (std::int64_t m = 1; m <= S; ++m) push(yp(l, j, m));
                for (ProcId p : inst.tasks[ops[l].task].candidate_procs) push(w(l, j, p));
            }
        if (!line.empty()) out += line + "\n";
    }
    out += "End\n";
    return out;
}

}  // namespace hdats
