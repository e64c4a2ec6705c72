// The prefix-free composition code P = { 1^{p1} 000 1^{p2} 000 ... 1^{pk} 01 }
// over positive machine indices, the composed functions phi_tau, and the
// gated machine V that halts on tau x only once the composition has
// converged on every input no longer than x.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "klab/bitstring.hpp"
#include "klab/bitvm.hpp"
#include "klab/dovetail.hpp"

namespace klab {

struct PCode {
    std::vector<uint64_t> exps;  // p_1 .. p_k, all >= 1, k >= 1

    bool operator==(const PCode&) const = default;
};

// Exact grammar string; length is sum(p_i) + 3(k-1) + 2. Throws
// std::invalid_argument on an empty list or a zero exponent.
BitString p_encode(const PCode& code);
uint64_t p_encoded_length(const PCode& code);

// Splits off the unique P-prefix. Empty when no prefix of s lies in P.
std::optional<std::pair<PCode, BitString>> p_decode(const BitString& s);

// Right-to-left composition psi_{p1} o ... o psi_{pk} applied to x under a
// shared fuel budget across stages.
ExecOutcome phi_tau(const PCode& tau, const BitString& x, ExecBudget budget);

// Pre-decoded stage machines for repeated composition runs (the V gate
// applies one tau to thousands of inputs).
std::vector<MachineCode> compile_tau(const PCode& tau);
ExecOutcome phi_tau_compiled(const std::vector<MachineCode>& stages, const BitString& x,
                             ExecBudget budget);

struct VOutcome {
    enum class Gate { AllShorterConverged, PendingShorter, NotApplicable };
    ExecOutcome outcome;
    Gate gate = Gate::NotApplicable;
    std::vector<BitString> pending;  // unresolved gate inputs (truncated)
    std::size_t pending_count = 0;
};

// V(tau x) = phi_tau(x) if phi_tau converges on every y with |y| <= |x|,
// dovetailed under one shared budget. Not-in-P strings diverge; a
// structurally diverging gate input makes the whole run diverge; otherwise
// unresolved gates report FuelExhausted with the pending inputs.
VOutcome run_V(const BitString& s, ExecBudget budget);
VOutcome run_V_decoded(const PCode& tau, const BitString& x, uint64_t encoded_len,
                       ExecBudget budget);

// [e, p1..pk]: post-applies the total machine e; the encoded length grows
// by exactly e + 3.
PCode prepend_total(uint64_t e, const PCode& tau);

// Registers the Custom machine "V" in the dovetail registry and returns
// the kind to build stores with.
MachineKind register_v_machine();

}  // namespace klab
