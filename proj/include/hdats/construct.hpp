#pragma once

#include <functional>
#include <random>

#include "hdats/schedule.hpp"

namespace hdats {

enum class StrategyKind { SlackFirst, RFirst, Random, RelaxR };

struct PriorityStrategy {
    StrategyKind kind = StrategyKind::SlackFirst;
    // RelaxR tolerance on head values; auto = 5% of the current cmax
    std::optional<Time> epsilon;
    std::uint64_t rng_seed = 1;
};

inline const char* to_string(StrategyKind k) {
    switch (k) {
        case StrategyKind::SlackFirst: return "slack";
        case StrategyKind::RFirst: return "r";
        case StrategyKind::Random: return "rand";
        default: return "relaxr";
    }
}

namespace detail {

inline constexpr Time kOpenRelease = std::numeric_limits<Time>::max();

// Incremental construction: tasks are appended to processor sequences one at
// a time, output blocks are placed greedily, and a block's residency stays
// open-ended until every consumer has been scheduled so that capacity checks
// never have to be revisited.
class ConstructionState {
public:
    explicit ConstructionState(const Instance& inst)
        : inst_(&inst), adj_(make_adjacency(inst)), sol_(Solution::empty(inst)) {
        const int n = inst.num_tasks();
        move_in_start_.assign(n, 0);
        proc_start_.assign(n, 0);
        proc_end_.assign(n, 0);
        move_out_end_.assign(n, 0);
        durations_.assign(n, {});
        assigned_.assign(n, 0);
        busy_.assign(inst.num_procs(), 0);
        bank_intervals_.resize(inst.num_mems());
        block_slot_.assign(inst.num_blocks(), -1);

        indeg_.assign(n, 0);
        for (int u = 0; u < n; ++u) indeg_[u] = static_cast<int>(adj_.pred[u].size());
        for (int u = 0; u < n; ++u)
            if (indeg_[u] == 0) frontier_.push_back(u);

        pending_consumers_.assign(inst.num_blocks(), 0);
        for (const auto& b : inst.blocks)
            pending_consumers_[b.id] = static_cast<int>(b.consumers.size());

        // blocks that precede all tasks live in LOW from the start
        for (const auto& b : inst.blocks) {
            if (!b.is_initial()) continue;
            MemId low = inst.low_bank();
            sol_.allocation[b.id] = low;
            block_slot_[b.id] = static_cast<int>(bank_intervals_[low].size());
            Time release = b.consumers.empty() ? 0 : kOpenRelease;
            bank_intervals_[low].push_back({0, release, b.size, b.id});
        }

        refresh_metrics();
    }

    const Instance& instance() const { return *inst_; }
    const Adjacency& adjacency() const { return adj_; }
    const Solution& solution() const { return sol_; }
    const GraphMetrics& metrics() const { return metrics_; }
    const std::vector<TaskId>& frontier() const { return frontier_; }
    bool done() const { return frontier_.empty(); }
    Time busy_time(ProcId p) const { return busy_[p]; }
    Time move_out_end(TaskId t) const { return move_out_end_[t]; }

    // earliest instant the move-in could begin, ignoring processor business
    Time data_ready(TaskId t) const {
        Time ready = 0;
        for (TaskId p : adj_.pred[t]) ready = std::max(ready, move_out_end_[p]);
        return ready;
    }

    Time min_successor_slack(TaskId t) const {
        Time best = std::numeric_limits<Time>::max();
        for (TaskId s : adj_.succ[t]) best = std::min(best, metrics_.slack[s]);
        return best;
    }

    struct Trial {
        ProcId proc = -1;
        Time move_in_start = 0;
        PhaseDurations durations;
        std::vector<MemId> output_banks;  // aligned with ordered outputs
        std::vector<BlockId> output_order;
        Time completion() const { return move_in_start + durations.total(); }
    };

    // Tentatively place task t on processor c, choosing banks for its outputs
    // in the given order. Does not mutate state.
    Trial try_assign(TaskId t, ProcId c, const std::vector<BlockId>& output_order) const {
        const Instance& inst = *inst_;
        Trial trial;
        trial.proc = c;
        trial.output_order = output_order;
        ProcType ptype = inst.processors[c].ptype;

        PhaseDurations d;
        for (BlockId b : inst.tasks[t].inputs)
            d.move_in += transfer_time(inst.blocks[b].size,
                                       inst.memories[sol_.allocation[b]].mtype, ptype, inst);
        d.proc = inst.proc_time(t, c);

        Time start = data_ready(t);
        if (!sol_.sequences[c].empty()) {
            TaskId last = sol_.sequences[c].back();
            start = std::max(start, move_out_end_[last] - d.move_in);
            start = std::max(start, proc_start_[last]);
        }

        // outputs claim [start, open) while being chosen, so picks never
        // invalidate one another
        std::vector<std::pair<MemId, Size>> tentative;
        for (BlockId b : output_order) {
            MemId chosen = pick_bank(inst.blocks[b].size, inst.processors[c].group, start, tentative);
            tentative.emplace_back(chosen, inst.blocks[b].size);
            trial.output_banks.push_back(chosen);
            d.move_out += transfer_time(inst.blocks[b].size, inst.memories[chosen].mtype, ptype, inst);
        }

        trial.move_in_start = start;
        trial.durations = d;
        return trial;
    }

    void commit(TaskId t, const Trial& trial) {
        const Instance& inst = *inst_;
        ProcId c = trial.proc;
        sol_.assignment[t] = c;
        sol_.sequences[c].push_back(t);
        durations_[t] = trial.durations;
        move_in_start_[t] = trial.move_in_start;
        proc_start_[t] = trial.move_in_start + trial.durations.move_in;
        proc_end_[t] = proc_start_[t] + trial.durations.proc;
        move_out_end_[t] = proc_end_[t] + trial.durations.move_out;
        busy_[c] += trial.durations.total();
        assigned_[t] = 1;

        for (size_t i = 0; i < trial.output_order.size(); ++i) {
            BlockId b = trial.output_order[i];
            MemId bank = trial.output_banks[i];
            sol_.allocation[b] = bank;
            block_slot_[b] = static_cast<int>(bank_intervals_[bank].size());
            Time release = inst.blocks[b].consumers.empty() ? move_out_end_[t] : kOpenRelease;
            bank_intervals_[bank].push_back({trial.move_in_start, release, inst.blocks[b].size, b});
        }

        for (BlockId b : inst.tasks[t].inputs) {
            if (--pending_consumers_[b] > 0) continue;
            const auto& block = inst.blocks[b];
            Time release = block.is_initial() ? 0 : move_out_end_[block.producer];
            for (TaskId consumer : block.consumers)
                release = std::max(release, move_out_end_[consumer]);
            bank_intervals_[sol_.allocation[b]][block_slot_[b]].release = release;
        }

        auto it = std::find(frontier_.begin(), frontier_.end(), t);
        frontier_.erase(it);
        for (TaskId s : adj_.succ[t])
            if (--indeg_[s] == 0) frontier_.insert(std::lower_bound(frontier_.begin(), frontier_.end(), s), s);

        refresh_metrics();
    }

    // outputs ordered by the tightest consumer first
    std::vector<BlockId> outputs_by_consumer_slack(TaskId t) const {
        std::vector<BlockId> order = inst_->tasks[t].outputs;
        std::stable_sort(order.begin(), order.end(), [&](BlockId x, BlockId y) {
            return std::make_pair(consumer_slack(x), x) < std::make_pair(consumer_slack(y), y);
        });
        return order;
    }

private:
    struct Interval {
        Time enter;
        Time release;
        Size size;
        BlockId block;
    };

    Time consumer_slack(BlockId b) const {
        Time best = std::numeric_limits<Time>::max();
        for (TaskId c : inst_->blocks[b].consumers) best = std::min(best, metrics_.slack[c]);
        return best;
    }

    // max occupancy of the committed+tentative residents of `bank` within
    // [from, open), before adding a new block
    static Size window_peak(const std::vector<Interval>& ivs, Time from) {
        std::vector<std::pair<Time, Size>> events;
        Size base = 0;
        for (const auto& iv : ivs) {
            if (iv.release <= from || iv.enter >= iv.release) continue;
            if (iv.enter <= from) {
                base += iv.size;
                if (iv.release != kOpenRelease) events.emplace_back(iv.release, -iv.size);
            } else {
                events.emplace_back(iv.enter, iv.size);
                if (iv.release != kOpenRelease) events.emplace_back(iv.release, -iv.size);
            }
        }
        std::sort(events.begin(), events.end());
        Size peak = base, running = base;
        for (const auto& [time, delta] : events) {
            running += delta;
            peak = std::max(peak, running);
        }
        return peak;
    }

    bool bank_fits(const MemoryBank& bank, Size size, Time from,
                   const std::vector<std::pair<MemId, Size>>& tentative) const {
        if (bank.unbounded()) return true;
        if (size > *bank.capacity) return false;
        Size extra = 0;
        for (const auto& [m, s] : tentative)
            if (m == bank.id) extra += s;
        return window_peak(bank_intervals_[bank.id], from) + extra + size <= *bank.capacity;
    }

    // global high-speed first, then the local bank of the executing group,
    // then LOW; ties on lowest bank id
    MemId pick_bank(Size size, int proc_group, Time from,
                    const std::vector<std::pair<MemId, Size>>& tentative) const {
        for (const auto& m : inst_->memories)
            if (m.mtype == MemType::High2 && bank_fits(m, size, from, tentative)) return m.id;
        for (const auto& m : inst_->memories)
            if (m.mtype == MemType::High1 && m.group == proc_group &&
                bank_fits(m, size, from, tentative))
                return m.id;
        for (const auto& m : inst_->memories)
            if (m.mtype == MemType::Low && bank_fits(m, size, from, tentative)) return m.id;
        throw std::logic_error("no bank can hold block of size " + std::to_string(size));
    }

    void refresh_metrics() {
        TaskWeights w(inst_->tasks.size());
        for (TaskId t = 0; t < inst_->num_tasks(); ++t) {
            if (assigned_[t]) {
                w[t] = durations_[t];
            } else {
                Time best = std::numeric_limits<Time>::max();
                for (const auto& [p, pt] : inst_->tasks[t].proc_time) best = std::min(best, pt);
                w[t].proc = best;
            }
        }
        metrics_ = detail::compute_metrics_impl(*inst_, adj_, SeqLinks::of(*inst_, sol_.sequences), w);
    }

    const Instance* inst_;
    Adjacency adj_;
    Solution sol_;
    GraphMetrics metrics_;
    std::vector<Time> move_in_start_, proc_start_, proc_end_, move_out_end_;
    std::vector<PhaseDurations> durations_;
    std::vector<char> assigned_;
    std::vector<Time> busy_;
    std::vector<std::vector<Interval>> bank_intervals_;
    std::vector<int> block_slot_;
    std::vector<int> indeg_;
    std::vector<TaskId> frontier_;  // sorted ascending
    std::vector<int> pending_consumers_;
};

}  // namespace detail

// Pick one task from the ready frontier according to the strategy.
inline TaskId select_next_task(const std::vector<TaskId>& frontier, const GraphMetrics& metrics,
                               const PriorityStrategy& strat, std::mt19937_64& rng,
                               const std::function<Time(TaskId)>& min_succ_slack) {
    if (frontier.empty()) throw std::invalid_argument("empty frontier");

    switch (strat.kind) {
        case StrategyKind::RFirst: {
            TaskId best = frontier.front();
            auto key = [&](TaskId t) {
                return std::make_tuple(metrics.head[t], metrics.slack[t], min_succ_slack(t), t);
            };
            for (TaskId t : frontier)
                if (key(t) < key(best)) best = t;
            return best;
        }
        case StrategyKind::SlackFirst: {
            TaskId best = frontier.front();
            auto key = [&](TaskId t) {
                return std::make_tuple(metrics.slack[t], metrics.head[t], min_succ_slack(t), t);
            };
            for (TaskId t : frontier)
                if (key(t) < key(best)) best = t;
            return best;
        }
        case StrategyKind::Random: {
            std::uniform_int_distribution<size_t> pick(0, frontier.size() - 1);
            return frontier[pick(rng)];
        }
        case StrategyKind::RelaxR: {
            Time eps = strat.epsilon.value_or(metrics.cmax / 20);
            Time min_head = std::numeric_limits<Time>::max();
            for (TaskId t : frontier) min_head = std::min(min_head, metrics.head[t]);
            TaskId best = -1;
            auto key = [&](TaskId t) { return std::make_tuple(metrics.slack[t], metrics.head[t], t); };
            for (TaskId t : frontier) {
                if (metrics.head[t] > min_head + eps) continue;
                if (best < 0 || key(t) < key(best)) best = t;
            }
            return best;
        }
    }
    throw std::logic_error("unreachable");
}

// Construct a feasible solution by repeatedly committing the highest-priority
// ready task to the processor that completes it earliest.
inline Solution greedy_assign(const Instance& inst, const PriorityStrategy& strat) {
    detail::ConstructionState state(inst);
    std::mt19937_64 rng(strat.rng_seed);

    while (!state.done()) {
        TaskId t = select_next_task(
            state.frontier(), state.metrics(), strat, rng,
            [&](TaskId u) { return state.min_successor_slack(u); });

        auto outputs = state.outputs_by_consumer_slack(t);
        std::optional<detail::ConstructionState::Trial> best;
        for (ProcId c : inst.tasks[t].candidate_procs) {
            auto trial = state.try_assign(t, c, outputs);
            if (!best || trial.completion() < best->completion()) best = trial;
        }
        state.commit(t, *best);
    }
    return state.solution();
}

}  // namespace hdats
