#pragma once

#include <tuple>

#include "hdats/model.hpp"

namespace hdats {

enum class MoveKind { SwapInBlock, ChangeCore };
enum class BlockEnd { Head, Tail };

// One neighbourhood action on critical tasks: either a repositioning of a
// task to the head or tail of its critical block, or a reinsertion on a
// different candidate processor.
struct Move {
    MoveKind kind = MoveKind::SwapInBlock;
    TaskId task = -1;
    ProcId target_proc = -1;   // ChangeCore only
    int target_pos = 0;        // insertion index into the target sequence
    BlockEnd end = BlockEnd::Head;  // SwapInBlock only

    // tabu attribute: (task, kind, target processor or direction)
    std::tuple<int, int, int> attribute() const {
        int target = kind == MoveKind::ChangeCore ? target_proc
                                                  : (end == BlockEnd::Head ? -2 : -3);
        return {task, static_cast<int>(kind), target};
    }

    // total order used for deterministic tie-breaking
    std::tuple<int, int, int, int> key() const {
        return {static_cast<int>(kind), task,
                kind == MoveKind::ChangeCore ? target_proc : static_cast<int>(end), target_pos};
    }

    bool operator==(const Move& o) const { return key() == o.key(); }
    bool operator<(const Move& o) const { return key() < o.key(); }
};

}  // namespace hdats
