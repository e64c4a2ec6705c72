#include "klab/bitvm.hpp"

#include <deque>

namespace klab {

MachineCode MachineCode::from_bits(const BitString& raw) {
    MachineCode mc;
    mc.raw = raw;
    std::size_t n = raw.size() / 3;
    mc.ops.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        uint8_t v = static_cast<uint8_t>((raw.bit(3 * i) << 2) | (raw.bit(3 * i + 1) << 1) |
                                         raw.bit(3 * i + 2));
        mc.ops.push_back(static_cast<Op>(v));
    }
    mc.match.assign(mc.ops.size(), -1);
    std::vector<int32_t> stack;
    for (std::size_t i = 0; i < mc.ops.size(); ++i) {
        if (mc.ops[i] == Op::LoopStart) {
            stack.push_back(static_cast<int32_t>(i));
        } else if (mc.ops[i] == Op::LoopEnd && !stack.empty()) {
            mc.match[i] = stack.back();
            mc.match[stack.back()] = static_cast<int32_t>(i);
            stack.pop_back();
        }
    }
    return mc;
}

BitString ops_to_bits(const std::vector<Op>& ops) {
    BitString raw;
    for (Op op : ops) {
        uint8_t v = static_cast<uint8_t>(op);
        raw.push_back((v >> 2) & 1);
        raw.push_back((v >> 1) & 1);
        raw.push_back(v & 1);
    }
    return raw;
}

MachineCode MachineCode::from_ops(const std::vector<Op>& ops) {
    return from_bits(ops_to_bits(ops));
}

namespace {

enum class InputMode { EofHalts, EofDiverges };

ExecOutcome run_core(const MachineCode& code, const BitString& input, InputMode mode,
                     const BitString* condition, ExecBudget budget, const TraceFn& trace) {
    std::vector<uint8_t> tape;
    if (condition) {
        tape.assign(condition->size() + 1 + condition->size(), 0);
        for (std::size_t i = 0; i < condition->size(); ++i) tape[i] = 1;
        for (std::size_t i = 0; i < condition->size(); ++i)
            tape[condition->size() + 1 + i] = condition->bit(i);
    }
    uint64_t head = 0;
    std::size_t pc = 0;
    uint64_t fuel_left = budget.fuel;
    ExecOutcome out;
    out.steps = 0;

    auto cell = [&]() -> uint8_t { return head < tape.size() ? tape[head] : 0; };
    auto set_cell = [&](uint8_t v) {
        if (head >= tape.size()) tape.resize(head + 1, 0);
        tape[head] = v;
    };
    auto finish = [&](ExecOutcome::Kind kind) {
        out.kind = kind;
        out.steps = budget.fuel - fuel_left;
        return out;
    };
    // Charges hop cost for a bracket scan; false means the budget ran dry.
    auto charge_hops = [&](uint64_t hops) {
        if (hops > fuel_left) {
            fuel_left = 0;
            return false;
        }
        fuel_left -= hops;
        return true;
    };

    while (true) {
        if (pc >= code.ops.size()) return finish(ExecOutcome::Kind::Halted);
        if (fuel_left == 0) return finish(ExecOutcome::Kind::FuelExhausted);
        --fuel_left;
        if (trace) trace(pc, head, cell(), fuel_left);
        Op op = code.ops[pc];
        switch (op) {
            case Op::Flip:
                set_cell(cell() ^ 1);
                ++pc;
                break;
            case Op::Left:
                if (head == 0) return finish(ExecOutcome::Kind::Diverged);
                --head;
                ++pc;
                break;
            case Op::Right:
                ++head;
                ++pc;
                break;
            case Op::LoopStart:
                if (cell() == 0) {
                    int32_t m = code.match[pc];
                    if (m < 0) {
                        // Scan runs off the end of the program.
                        uint64_t hops = code.ops.size() - 1 - pc;
                        if (!charge_hops(hops)) return finish(ExecOutcome::Kind::FuelExhausted);
                        return finish(ExecOutcome::Kind::Diverged);
                    }
                    uint64_t hops = static_cast<uint64_t>(m) - pc;
                    if (!charge_hops(hops)) return finish(ExecOutcome::Kind::FuelExhausted);
                    pc = static_cast<std::size_t>(m) + 1;
                } else {
                    ++pc;
                }
                break;
            case Op::LoopEnd:
                if (cell() == 1) {
                    int32_t m = code.match[pc];
                    if (m < 0) {
                        uint64_t hops = pc;  // scan reaches the front without a match
                        if (!charge_hops(hops)) return finish(ExecOutcome::Kind::FuelExhausted);
                        return finish(ExecOutcome::Kind::Diverged);
                    }
                    uint64_t hops = pc - static_cast<uint64_t>(m);
                    if (!charge_hops(hops)) return finish(ExecOutcome::Kind::FuelExhausted);
                    pc = static_cast<std::size_t>(m);
                } else {
                    ++pc;
                }
                break;
            case Op::Read:
                if (out.consumed_input >= input.size()) {
                    if (mode == InputMode::EofHalts) return finish(ExecOutcome::Kind::Halted);
                    return finish(ExecOutcome::Kind::Diverged);
                }
                set_cell(input.bit(out.consumed_input));
                ++out.consumed_input;
                ++pc;
                break;
            case Op::Write:
                out.output.push_back(cell());
                ++pc;
                break;
            case Op::Halt:
                return finish(ExecOutcome::Kind::Halted);
        }
    }
}

}  // namespace

ExecOutcome run_plain(const MachineCode& code, const BitString& input, ExecBudget budget,
                      const TraceFn& trace) {
    return run_core(code, input, InputMode::EofHalts, nullptr, budget, trace);
}

ExecOutcome run_prefix(const MachineCode& code, const BitString& stream, ExecBudget budget,
                       const TraceFn& trace) {
    return run_core(code, stream, InputMode::EofDiverges, nullptr, budget, trace);
}

ExecOutcome run_conditional(const MachineCode& code, const BitString& input,
                            const BitString& condition, ExecBudget budget, const TraceFn& trace) {
    return run_core(code, input, InputMode::EofHalts, &condition, budget, trace);
}

ExecOutcome psi(uint64_t e, const BitString& x, ExecBudget budget) {
    return run_plain(MachineCode::from_bits(nat_to_str(e)), x, budget);
}

ExecOutcome universal_plain(const BitString& y, ExecBudget budget) {
    auto parts = pair_decode(y);
    if (!parts) {
        ExecOutcome out;
        out.kind = ExecOutcome::Kind::Diverged;
        return out;
    }
    return run_plain(MachineCode::from_bits(parts->first), parts->second, budget);
}

ExecOutcome universal_prefix(const BitString& s, ExecBudget budget) {
    auto parts = pair_decode(s);
    if (!parts) {
        ExecOutcome out;
        out.kind = ExecOutcome::Kind::Diverged;
        return out;
    }
    ExecOutcome inner = run_prefix(MachineCode::from_bits(parts->first), parts->second, budget);
    if (inner.halted() && inner.consumed_input != parts->second.size()) {
        inner.kind = ExecOutcome::Kind::Diverged;
        inner.output = BitString{};
    }
    return inner;
}

ExecOutcome universal_conditional(const BitString& z, const BitString& condition,
                                  ExecBudget budget) {
    auto parts = pair_decode(z);
    if (!parts) {
        ExecOutcome out;
        out.kind = ExecOutcome::Kind::Diverged;
        return out;
    }
    return run_conditional(MachineCode::from_bits(parts->first), parts->second, condition, budget);
}

namespace machines {

MachineCode plain_copier() {
    // cell0 is the loop flag, cell1 the data cell: read a bit, echo it,
    // repeat until end of input halts the run.
    return MachineCode::from_ops({Op::Flip, Op::LoopStart, Op::Right, Op::Read, Op::Write,
                                  Op::Left, Op::LoopEnd});
}

MachineCode cond_copier() {
    // Sliding-zipper walk over the preloaded tape 1^m 0 y: each round
    // consumes two leading 1s, re-extends the block over the separator,
    // emits one y bit and zeroes it. The final bit is emitted by the tail
    // after the inner loop exits on the exhausted block.
    return MachineCode::from_ops({
        Op::LoopStart,                                       // while tape not consumed
        Op::Flip, Op::Right,                                 //   clear block head, step in
        Op::LoopStart,                                       //   more than one round left?
        Op::Flip, Op::Right,                                 //     clear second 1
        Op::LoopStart, Op::Right, Op::LoopEnd,               //     walk 1s to the separator
        Op::Flip, Op::Right,                                 //     extend block, step to y bit
        Op::Write,                                           //     emit it
        Op::LoopStart, Op::Flip, Op::LoopEnd,                //     zero it
        Op::Left,                                            //     back onto the block
        Op::LoopStart, Op::Left, Op::LoopEnd,                //     walk left to the cleared edge
        Op::Right, Op::Flip, Op::Right,                      //     pre-clear next head, advance
        Op::LoopEnd,
        Op::Right, Op::Write,                                //   last y bit
        Op::LoopStart, Op::Flip, Op::LoopEnd,                //   zero it
        Op::LoopEnd,
    });
}

MachineCode cond_input_copier() {
    // [+]+ forces cell 0 to 1 whatever the preloaded tape holds, then the
    // usual read-echo loop runs with cell 1 as scratch.
    return MachineCode::from_ops({Op::LoopStart, Op::Flip, Op::LoopEnd, Op::Flip, Op::LoopStart,
                                  Op::Right, Op::Read, Op::Write, Op::Left, Op::LoopEnd});
}

MachineCode flipper() {
    return MachineCode::from_ops({Op::Flip, Op::LoopStart, Op::Right, Op::Read, Op::Flip,
                                  Op::Write, Op::Left, Op::LoopEnd});
}

MachineCode stutter() {
    return MachineCode::from_ops({Op::Read, Op::Write, Op::Write, Op::Right, Op::Flip,
                                  Op::LoopStart, Op::Right, Op::Read, Op::Write, Op::Left,
                                  Op::LoopEnd});
}

MachineCode looper() {
    return MachineCode::from_ops({Op::Flip, Op::LoopStart, Op::LoopEnd});
}

MachineCode writer(const BitString& s) {
    std::vector<Op> ops;
    uint8_t cell = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.bit(i) != cell) {
            ops.push_back(Op::Flip);
            cell = s.bit(i);
        }
        ops.push_back(Op::Write);
    }
    return MachineCode::from_ops(ops);
}

BitString prefix_writer_program(const BitString& s) {
    return pair_encode(writer(s).raw, BitString{});
}

uint64_t index_of(const MachineCode& code) { return str_to_nat(code.raw); }

}  // namespace machines

}  // namespace klab
