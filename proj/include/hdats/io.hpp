#pragma once

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "hdats/model.hpp"

// Text formats, both headed by an `hdats-v1` line:
//
//   hdats-v1 instance
//   TASKS <count>
//   <id> procs=<p>:<pt>[,<p>:<pt>...] in=<b,...>|- out=<b,...>|-
//   BLOCKS <count>
//   <id> size=<s> producer=<task|init> consumers=<t,...>|-
//   EDGES <count>
//   <u> <v>
//   PROCS <count>
//   <id> type=<HIGH_SPEED|GENERAL> group=<g>
//   MEMS <count>
//   <id> type=<HIGH2|HIGH1|LOW> cap=<n|inf> group=<g>
//   ACCESS <count>
//   <proctype> <memtype> <num>/<den>
//
//   hdats-v1 solution
//   ASSIGN <count>     lines: <task> <proc>
//   SEQ <count>        lines: <proc> <t1> <t2> ...
//   ALLOC <count>      lines: <block> <mem>
//
// Integers are decimal, `inf` encodes an unbounded capacity, `#` starts a
// comment, ids are dense starting at 0.

namespace hdats {

class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

namespace detail {

struct LineReader {
    std::istream& in;
    int line_no = 0;
    std::string current;

    // next non-empty, non-comment line (stripped); false at eof
    bool next() {
        while (std::getline(in, current)) {
            ++line_no;
            if (!current.empty() && current.back() == '\r') current.pop_back();
            auto hash = current.find('#');
            if (hash != std::string::npos) current.erase(hash);
            auto b = current.find_first_not_of(" \t");
            if (b == std::string::npos) continue;
            auto e = current.find_last_not_of(" \t");
            current = current.substr(b, e - b + 1);
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_no, msg); }
};

inline std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream iss(s);
    std::string tok;
    while (iss >> tok) out.push_back(tok);
    return out;
}

inline std::vector<std::string_view> split_char(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    size_t pos = 0;
    while (pos <= s.size()) {
        size_t next = s.find(sep, pos);
        if (next == std::string_view::npos) {
            out.push_back(s.substr(pos));
            break;
        }
        out.push_back(s.substr(pos, next - pos));
        pos = next + 1;
    }
    return out;
}

inline std::int64_t to_int(const LineReader& r, std::string_view s) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError(r.line_no, "expected integer, got '" + std::string(s) + "'");
    return value;
}

// "key=value" -> value, enforcing the key
inline std::string_view expect_kv(const LineReader& r, const std::string& tok, std::string_view key) {
    std::string_view sv(tok);
    auto eq = sv.find('=');
    if (eq == std::string_view::npos || sv.substr(0, eq) != key)
        throw ParseError(r.line_no, "expected '" + std::string(key) + "=...', got '" + tok + "'");
    return sv.substr(eq + 1);
}

inline std::vector<int> parse_id_list(const LineReader& r, std::string_view sv) {
    std::vector<int> out;
    if (sv == "-") return out;
    for (auto part : split_char(sv, ','))
        out.push_back(static_cast<int>(to_int(r, part)));
    std::sort(out.begin(), out.end());
    return out;
}

inline ProcType parse_ptype(const LineReader& r, std::string_view s) {
    if (s == "HIGH_SPEED") return ProcType::HighSpeed;
    if (s == "GENERAL") return ProcType::General;
    throw ParseError(r.line_no, "unknown processor type '" + std::string(s) + "'");
}

inline MemType parse_mtype(const LineReader& r, std::string_view s) {
    if (s == "HIGH2") return MemType::High2;
    if (s == "HIGH1") return MemType::High1;
    if (s == "LOW") return MemType::Low;
    throw ParseError(r.line_no, "unknown memory type '" + std::string(s) + "'");
}

inline int expect_section(LineReader& r, const std::string& name) {
    if (!r.next()) r.fail("expected section " + name);
    auto toks = split_ws(r.current);
    if (toks.size() != 2 || toks[0] != name)
        r.fail("expected '" + name + " <count>', got '" + r.current + "'");
    auto count = to_int(r, toks[1]);
    if (count < 0) r.fail("negative count");
    return static_cast<int>(count);
}

}  // namespace detail

inline Instance parse_instance(std::istream& in) {
    using namespace detail;
    LineReader r{in};
    if (!r.next()) r.fail("empty document");
    if (r.current != "hdats-v1 instance")
        r.fail("expected header 'hdats-v1 instance'");

    Instance inst;

    int n_tasks = expect_section(r, "TASKS");
    for (int i = 0; i < n_tasks; ++i) {
        if (!r.next()) r.fail("unexpected end of TASKS");
        auto toks = split_ws(r.current);
        if (toks.size() != 4) r.fail("task record needs: <id> procs=... in=... out=...");
        Task t;
        t.id = static_cast<int>(to_int(r, toks[0]));
        auto procs = expect_kv(r, toks[1], "procs");
        for (auto entry : split_char(procs, ',')) {
            auto colon = entry.find(':');
            if (colon == std::string_view::npos) r.fail("expected <proc>:<time> in procs list");
            ProcId p = static_cast<int>(to_int(r, entry.substr(0, colon)));
            Time pt = to_int(r, entry.substr(colon + 1));
            if (!t.proc_time.emplace(p, pt).second) r.fail("duplicate processor in procs list");
            t.candidate_procs.push_back(p);
        }
        std::sort(t.candidate_procs.begin(), t.candidate_procs.end());
        t.inputs = parse_id_list(r, expect_kv(r, toks[2], "in"));
        t.outputs = parse_id_list(r, expect_kv(r, toks[3], "out"));
        inst.tasks.push_back(std::move(t));
    }

    int n_blocks = expect_section(r, "BLOCKS");
    for (int i = 0; i < n_blocks; ++i) {
        if (!r.next()) r.fail("unexpected end of BLOCKS");
        auto toks = split_ws(r.current);
        if (toks.size() != 4) r.fail("block record needs: <id> size=... producer=... consumers=...");
        DataBlock b;
        b.id = static_cast<int>(to_int(r, toks[0]));
        b.size = to_int(r, expect_kv(r, toks[1], "size"));
        auto prod = expect_kv(r, toks[2], "producer");
        b.producer = (prod == "init") ? kInitialProducer : static_cast<int>(to_int(r, prod));
        b.consumers = parse_id_list(r, expect_kv(r, toks[3], "consumers"));
        inst.blocks.push_back(std::move(b));
    }

    int n_edges = expect_section(r, "EDGES");
    for (int i = 0; i < n_edges; ++i) {
        if (!r.next()) r.fail("unexpected end of EDGES");
        auto toks = split_ws(r.current);
        if (toks.size() != 2) r.fail("edge record needs: <u> <v>");
        inst.edges.emplace_back(static_cast<int>(to_int(r, toks[0])),
                                static_cast<int>(to_int(r, toks[1])));
    }
    std::sort(inst.edges.begin(), inst.edges.end());
    inst.edges.erase(std::unique(inst.edges.begin(), inst.edges.end()), inst.edges.end());

    int n_procs = expect_section(r, "PROCS");
    for (int i = 0; i < n_procs; ++i) {
        if (!r.next()) r.fail("unexpected end of PROCS");
        auto toks = split_ws(r.current);
        if (toks.size() != 3) r.fail("processor record needs: <id> type=... group=...");
        Processor p;
        p.id = static_cast<int>(to_int(r, toks[0]));
        p.ptype = parse_ptype(r, expect_kv(r, toks[1], "type"));
        p.group = static_cast<int>(to_int(r, expect_kv(r, toks[2], "group")));
        inst.processors.push_back(p);
    }

    int n_mems = expect_section(r, "MEMS");
    for (int i = 0; i < n_mems; ++i) {
        if (!r.next()) r.fail("unexpected end of MEMS");
        auto toks = split_ws(r.current);
        if (toks.size() != 4) r.fail("memory record needs: <id> type=... cap=... group=...");
        MemoryBank m;
        m.id = static_cast<int>(to_int(r, toks[0]));
        m.mtype = parse_mtype(r, expect_kv(r, toks[1], "type"));
        auto cap = expect_kv(r, toks[2], "cap");
        if (cap == "inf")
            m.capacity = std::nullopt;
        else
            m.capacity = to_int(r, cap);
        m.group = static_cast<int>(to_int(r, expect_kv(r, toks[3], "group")));
        inst.memories.push_back(m);
    }

    int n_access = expect_section(r, "ACCESS");
    for (int i = 0; i < n_access; ++i) {
        if (!r.next()) r.fail("unexpected end of ACCESS");
        auto toks = split_ws(r.current);
        if (toks.size() != 3) r.fail("access record needs: <proctype> <memtype> <num>/<den>");
        ProcType pt = parse_ptype(r, toks[0]);
        MemType mt = parse_mtype(r, toks[1]);
        auto slash = toks[2].find('/');
        if (slash == std::string::npos) r.fail("expected <num>/<den>");
        Ratio ratio(to_int(r, std::string_view(toks[2]).substr(0, slash)),
                    to_int(r, std::string_view(toks[2]).substr(slash + 1)));
        if (!inst.access_factor.emplace(std::make_pair(pt, mt), ratio).second)
            r.fail("duplicate access factor entry");
    }

    auto violations = validate_instance(inst);
    if (!violations.empty()) throw ParseError(r.line_no, violations.front().what);
    return inst;
}

inline Instance parse_instance(const std::string& text) {
    std::istringstream in(text);
    return parse_instance(in);
}

inline std::string serialize_instance(const Instance& inst) {
    std::ostringstream out;
    out << "hdats-v1 instance\n";
    out << "TASKS " << inst.num_tasks() << "\n";
    for (const auto& t : inst.tasks) {
        out << t.id << " procs=";
        for (size_t i = 0; i < t.candidate_procs.size(); ++i) {
            ProcId p = t.candidate_procs[i];
            out << (i ? "," : "") << p << ":" << t.proc_time.at(p);
        }
        auto list = [&](const std::vector<int>& ids) {
            if (ids.empty()) { out << "-"; return; }
            for (size_t i = 0; i < ids.size(); ++i) out << (i ? "," : "") << ids[i];
        };
        out << " in=";
        list(t.inputs);
        out << " out=";
        list(t.outputs);
        out << "\n";
    }
    out << "BLOCKS " << inst.num_blocks() << "\n";
    for (const auto& b : inst.blocks) {
        out << b.id << " size=" << b.size << " producer=";
        if (b.is_initial())
            out << "init";
        else
            out << b.producer;
        out << " consumers=";
        if (b.consumers.empty())
            out << "-";
        else
            for (size_t i = 0; i < b.consumers.size(); ++i) out << (i ? "," : "") << b.consumers[i];
        out << "\n";
    }
    out << "EDGES " << inst.edges.size() << "\n";
    for (const auto& [u, v] : inst.edges) out << u << " " << v << "\n";
    out << "PROCS " << inst.num_procs() << "\n";
    for (const auto& p : inst.processors)
        out << p.id << " type=" << to_string(p.ptype) << " group=" << p.group << "\n";
    out << "MEMS " << inst.num_mems() << "\n";
    for (const auto& m : inst.memories) {
        out << m.id << " type=" << to_string(m.mtype) << " cap=";
        if (m.unbounded())
            out << "inf";
        else
            out << *m.capacity;
        out << " group=" << m.group << "\n";
    }
    out << "ACCESS " << inst.access_factor.size() << "\n";
    for (const auto& [key, ratio] : inst.access_factor)
        out << to_string(key.first) << " " << to_string(key.second) << " "
            << ratio.num << "/" << ratio.den << "\n";
    return out.str();
}

inline Solution parse_solution(std::istream& in, const Instance& inst) {
    using namespace detail;
    LineReader r{in};
    if (!r.next()) r.fail("empty document");
    if (r.current != "hdats-v1 solution")
        r.fail("expected header 'hdats-v1 solution'");

    Solution sol = Solution::empty(inst);

    int n_assign = expect_section(r, "ASSIGN");
    for (int i = 0; i < n_assign; ++i) {
        if (!r.next()) r.fail("unexpected end of ASSIGN");
        auto toks = split_ws(r.current);
        if (toks.size() != 2) r.fail("assign record needs: <task> <proc>");
        int t = static_cast<int>(to_int(r, toks[0]));
        if (t < 0 || t >= inst.num_tasks()) r.fail("unknown task " + toks[0]);
        sol.assignment[t] = static_cast<int>(to_int(r, toks[1]));
    }

    int n_seq = expect_section(r, "SEQ");
    for (int i = 0; i < n_seq; ++i) {
        if (!r.next()) r.fail("unexpected end of SEQ");
        auto toks = split_ws(r.current);
        if (toks.empty()) r.fail("sequence record needs: <proc> <tasks...>");
        int p = static_cast<int>(to_int(r, toks[0]));
        if (p < 0 || p >= inst.num_procs()) r.fail("unknown processor " + toks[0]);
        for (size_t k = 1; k < toks.size(); ++k)
            sol.sequences[p].push_back(static_cast<int>(to_int(r, toks[k])));
    }

    int n_alloc = expect_section(r, "ALLOC");
    for (int i = 0; i < n_alloc; ++i) {
        if (!r.next()) r.fail("unexpected end of ALLOC");
        auto toks = split_ws(r.current);
        if (toks.size() != 2) r.fail("alloc record needs: <block> <mem>");
        int b = static_cast<int>(to_int(r, toks[0]));
        if (b < 0 || b >= inst.num_blocks()) r.fail("unknown block " + toks[0]);
        sol.allocation[b] = static_cast<int>(to_int(r, toks[1]));
    }

    return sol;
}

inline Solution parse_solution(const std::string& text, const Instance& inst) {
    std::istringstream in(text);
    return parse_solution(in, inst);
}

inline std::string serialize_solution(const Instance& inst, const Solution& sol) {
    std::ostringstream out;
    out << "hdats-v1 solution\n";
    out << "ASSIGN " << sol.assignment.size() << "\n";
    for (size_t t = 0; t < sol.assignment.size(); ++t)
        out << t << " " << sol.assignment[t] << "\n";
    int used = 0;
    for (const auto& seq : sol.sequences) used += seq.empty() ? 0 : 1;
    out << "SEQ " << used << "\n";
    for (size_t p = 0; p < sol.sequences.size(); ++p) {
        if (sol.sequences[p].empty()) continue;
        out << p;
        for (TaskId t : sol.sequences[p]) out << " " << t;
        out << "\n";
    }
    out << "ALLOC " << sol.allocation.size() << "\n";
    for (size_t b = 0; b < sol.allocation.size(); ++b)
        out << b << " " << sol.allocation[b] << "\n";
    (void)inst;
    return out.str();
}

}  // namespace hdats
