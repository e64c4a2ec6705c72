// Fuel-metered bit-cell interpreter with three run modes: plain (READ at
// end of input halts), prefix (READ past the stream diverges, halting
// requires exact consumption) and conditional (tape preloaded with
// 1^{|condition|} 0 condition).
//
// Every bitstring is a syntactically valid program: opcodes are 3-bit
// groups, 1-2 leftover bits are ignored, and unmatched brackets or LEFT at
// cell 0 are run-time divergences rather than parse errors. Every executed
// opcode and every bracket-scan hop costs one unit of fuel.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "klab/bitstring.hpp"

namespace klab {

enum class Op : uint8_t {
    Flip = 0,       // toggle current cell
    Left = 1,       // move head left; diverges at cell 0
    Right = 2,      // move head right
    LoopStart = 3,  // skip past matching LoopEnd when cell is 0
    LoopEnd = 4,    // jump back to matching LoopStart when cell is 1
    Read = 5,       // read next input bit into the cell
    Write = 6,      // append current cell to output
    Halt = 7,
};

struct MachineCode {
    BitString raw;
    std::vector<Op> ops;
    // match[i]: index of the partner bracket, or -1 when unmatched.
    std::vector<int32_t> match;

    static MachineCode from_bits(const BitString& raw);
    static MachineCode from_ops(const std::vector<Op>& ops);
};

BitString ops_to_bits(const std::vector<Op>& ops);

struct ExecBudget {
    uint64_t fuel = 0;
};

struct ExecOutcome {
    enum class Kind { Halted, FuelExhausted, Diverged };
    Kind kind = Kind::Diverged;
    BitString output;         // meaningful for Halted only
    uint64_t steps = 0;       // fuel actually consumed
    uint64_t consumed_input = 0;

    bool halted() const { return kind == Kind::Halted; }
    bool diverged() const { return kind == Kind::Diverged; }
    bool out_of_fuel() const { return kind == Kind::FuelExhausted; }
};

// Called once per executed opcode, before the opcode takes effect.
// Arguments: pc, head, current cell, fuel remaining after the base charge.
using TraceFn = std::function<void(std::size_t, uint64_t, int, uint64_t)>;

ExecOutcome run_plain(const MachineCode& code, const BitString& input, ExecBudget budget,
                      const TraceFn& trace = nullptr);
ExecOutcome run_prefix(const MachineCode& code, const BitString& stream, ExecBudget budget,
                       const TraceFn& trace = nullptr);
ExecOutcome run_conditional(const MachineCode& code, const BitString& input,
                            const BitString& condition, ExecBudget budget,
                            const TraceFn& trace = nullptr);

// The e-th machine applied to x: run_plain over the machine code nat_to_str(e).
ExecOutcome psi(uint64_t e, const BitString& x, ExecBudget budget);

// Reference machines. Programs carry their machine code in a pairing
// header; malformed headers diverge.
//   universal_plain:  y = 1^k 0 code(k bits) input, plain semantics.
//   universal_prefix: s = 1^k 0 code(k bits) stream, prefix semantics,
//                     halting requires the stream consumed exactly. The
//                     halting set is prefix-free by construction.
//   universal_conditional: z = 1^k 0 code(k bits) input, conditional
//                     semantics against the given condition.
ExecOutcome universal_plain(const BitString& y, ExecBudget budget);
ExecOutcome universal_prefix(const BitString& s, ExecBudget budget);
ExecOutcome universal_conditional(const BitString& z, const BitString& condition,
                                  ExecBudget budget);

namespace machines {

// Copies input to output; halts at end of input. psi_{e} = identity.
MachineCode plain_copier();

// Writes the condition string (the y of the preloaded tape 1^|y| 0 y) to
// the output without reading any input. Works for every condition length.
MachineCode cond_copier();

// Copies input to output like plain_copier, but first normalizes cell 0,
// so it works on a preloaded conditional tape too.
MachineCode cond_input_copier();

// Bitwise complement of the input.
MachineCode flipper();

// x -> x[0] x, i.e. the first bit stuttered; total, length-increasing.
MachineCode stutter();

// Never halts (1-cell bracket ping-pong); burns fuel forever.
MachineCode looper();

// Plain machine writing exactly s, reading nothing.
MachineCode writer(const BitString& s);

// Complete prefix-machine program (header + writer code, empty stream)
// whose universal_prefix run halts with output s.
BitString prefix_writer_program(const BitString& s);

// Machine index under str_to_nat of the raw code.
uint64_t index_of(const MachineCode& code);

}  // namespace machines

}  // namespace klab
