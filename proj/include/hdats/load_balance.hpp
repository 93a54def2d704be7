#pragma once

#include "hdats/construct.hpp"

namespace hdats {

// List scheduler used as a comparison baseline: among ready tasks take the
// one whose inputs are available earliest, put it on the least-loaded
// candidate processor, and place its outputs with the usual bank preference.
// Fully deterministic.
inline Solution load_balance_schedule(const Instance& inst) {
    detail::ConstructionState state(inst);

    while (!state.done()) {
        TaskId pick = -1;
        Time pick_ready = 0;
        for (TaskId t : state.frontier()) {
            Time ready = state.data_ready(t);
            if (pick < 0 || ready < pick_ready) {
                pick = t;
                pick_ready = ready;
            }
        }

        ProcId proc = -1;
        for (ProcId c : inst.tasks[pick].candidate_procs)
            if (proc < 0 || state.busy_time(c) < state.busy_time(proc)) proc = c;

        std::vector<BlockId> outputs = inst.tasks[pick].outputs;  // id order
        state.commit(pick, state.try_assign(pick, proc, outputs));
    }
    return state.solution();
}

}  // namespace hdats
