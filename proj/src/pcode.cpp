#include "klab/pcode.hpp"

#include <algorithm>

namespace klab {

BitString p_encode(const PCode& code) {
    if (code.exps.empty()) throw std::invalid_argument("p_encode: empty exponent list");
    BitString out;
    for (std::size_t i = 0; i < code.exps.size(); ++i) {
        uint64_t p = code.exps[i];
        if (p == 0) throw std::invalid_argument("p_encode: zero exponent");
        for (uint64_t j = 0; j < p; ++j) out.push_back(1);
        if (i + 1 < code.exps.size()) {
            out.push_back(0);
            out.push_back(0);
            out.push_back(0);
        }
    }
    out.push_back(0);
    out.push_back(1);
    return out;
}

uint64_t p_encoded_length(const PCode& code) {
    uint64_t sum = 0;
    for (uint64_t p : code.exps) sum += p;
    return sum + 3 * (code.exps.size() - 1) + 2;
}

std::optional<std::pair<PCode, BitString>> p_decode(const BitString& s) {
    PCode code;
    std::size_t pos = 0;
    while (true) {
        std::size_t run = 0;
        while (pos + run < s.size() && s.bit(pos + run) == 1) ++run;
        if (run == 0) return std::nullopt;  // exponent block must be nonempty
        pos += run;
        code.exps.push_back(run);
        if (pos >= s.size()) return std::nullopt;  // ran out before 0
        // At the first 0 after a 1-run: "01" terminates, "000" separates.
        if (pos + 1 < s.size() && s.bit(pos + 1) == 1) {
            pos += 2;
            return std::make_pair(std::move(code),
                                  s.slice(pos, s.size() - pos));
        }
        if (pos + 2 < s.size() && s.bit(pos + 1) == 0 && s.bit(pos + 2) == 0) {
            pos += 3;
            continue;
        }
        return std::nullopt;  // "00" not followed by "0", or truncated
    }
}

std::vector<MachineCode> compile_tau(const PCode& tau) {
    std::vector<MachineCode> stages;
    stages.reserve(tau.exps.size());
    for (uint64_t e : tau.exps) stages.push_back(MachineCode::from_bits(nat_to_str(e)));
    return stages;
}

ExecOutcome phi_tau_compiled(const std::vector<MachineCode>& stages, const BitString& x,
                             ExecBudget budget) {
    BitString value = x;
    uint64_t fuel_left = budget.fuel;
    uint64_t total_steps = 0;
    for (std::size_t i = stages.size(); i-- > 0;) {
        ExecOutcome stage = run_plain(stages[i], value, {fuel_left});
        total_steps += stage.steps;
        if (!stage.halted()) {
            stage.steps = total_steps;
            stage.output = BitString{};
            return stage;
        }
        fuel_left -= stage.steps;
        value = std::move(stage.output);
    }
    ExecOutcome out;
    out.kind = ExecOutcome::Kind::Halted;
    out.output = std::move(value);
    out.steps = total_steps;
    return out;
}

ExecOutcome phi_tau(const PCode& tau, const BitString& x, ExecBudget budget) {
    return phi_tau_compiled(compile_tau(tau), x, budget);
}

VOutcome run_V_decoded(const PCode& tau, const BitString& x, uint64_t /*encoded_len*/,
                       ExecBudget budget) {
    VOutcome v;
    // Gate inputs: every y with |y| <= |x|, x itself included.
    std::vector<BitString> gate_inputs;
    std::size_t x_index = 0;
    for_each_string_up_to(x.size(), [&](const BitString& y) {
        if (y == x) x_index = gate_inputs.size();
        gate_inputs.push_back(y);
    });

    std::vector<std::optional<BitString>> results(gate_inputs.size());
    std::vector<MachineCode> stages = compile_tau(tau);
    uint64_t pool = budget.fuel;
    uint64_t spent = 0;

    // Dovetail: doubling per-attempt fuel, charging actual consumption
    // against the shared pool. Unresolved attempts burn their whole
    // allowance, so the pool shrinks every sweep until it runs dry.
    for (uint64_t attempt_fuel = 64;; attempt_fuel *= 2) {
        for (std::size_t i = 0; i < gate_inputs.size() && spent < pool; ++i) {
            if (results[i]) continue;
            uint64_t allowance = std::min(attempt_fuel, pool - spent);
            ExecOutcome out = phi_tau_compiled(stages, gate_inputs[i], {allowance});
            spent += out.steps;
            if (out.halted()) {
                results[i] = out.output;
            } else if (out.diverged()) {
                // Structural divergence is permanent: the gate can never
                // open, so V diverges on this program.
                v.outcome.kind = ExecOutcome::Kind::Diverged;
                v.outcome.steps = spent;
                v.gate = VOutcome::Gate::PendingShorter;
                v.pending.push_back(gate_inputs[i]);
                v.pending_count = 1;
                return v;
            }
        }
        std::size_t unresolved = 0;
        for (const auto& r : results)
            if (!r) ++unresolved;
        if (unresolved == 0) break;
        if (spent >= pool) {
            v.outcome.kind = ExecOutcome::Kind::FuelExhausted;
            v.outcome.steps = spent;
            v.gate = VOutcome::Gate::PendingShorter;
            v.pending_count = unresolved;
            for (std::size_t i = 0; i < gate_inputs.size() && v.pending.size() < 16; ++i)
                if (!results[i]) v.pending.push_back(gate_inputs[i]);
            return v;
        }
    }

    v.outcome.kind = ExecOutcome::Kind::Halted;
    v.outcome.steps = spent;
    v.gate = VOutcome::Gate::AllShorterConverged;
    v.outcome.output = *results[x_index];
    return v;
}

VOutcome run_V(const BitString& s, ExecBudget budget) {
    auto decoded = p_decode(s);
    if (!decoded) {
        VOutcome v;
        v.outcome.kind = ExecOutcome::Kind::Diverged;
        v.gate = VOutcome::Gate::NotApplicable;
        return v;
    }
    return run_V_decoded(decoded->first, decoded->second, s.size(), budget);
}

PCode prepend_total(uint64_t e, const PCode& tau) {
    if (e == 0) throw std::invalid_argument("prepend_total: zero exponent");
    PCode out;
    out.exps.reserve(tau.exps.size() + 1);
    out.exps.push_back(e);
    out.exps.insert(out.exps.end(), tau.exps.begin(), tau.exps.end());
    return out;
}

MachineKind register_v_machine() {
    if (!custom_machine_registered("V")) {
        register_custom_machine("V", [](const BitString& program, uint64_t fuel) {
            return run_V(program, {fuel}).outcome;
        });
    }
    return MachineKind::custom("V");
}

}  // namespace klab
