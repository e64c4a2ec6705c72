// klab: batch front-end for the complexity workbench. Builds and resumes
// dovetail stores, queries anytime functors, runs the audit suites, tabulates
// star and alpha values, and drives the P/V machine.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "klab/audit.hpp"
#include "klab/config.hpp"

using namespace klab;
using nlohmann::json;

namespace {

BitString parse_bits_or_die(const std::string& text, const std::string& what) {
    auto v = BitString::parse(text);
    if (!v) throw CLI::ValidationError(what, "expected a string over 0/1, got '" + text + "'");
    return *v;
}

// "@path" reads a raw ASCII bitstring file (trailing whitespace ignored).
BitString bits_arg_or_file(const std::string& text, const std::string& what) {
    if (text.empty() || text[0] != '@') return parse_bits_or_die(text, what);
    std::ifstream in(text.substr(1));
    if (!in) throw std::runtime_error("cannot open bit file: " + text.substr(1));
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    while (!data.empty() && (data.back() == '\n' || data.back() == '\r' || data.back() == ' '))
        data.pop_back();
    return parse_bits_or_die(data, what);
}

MachineKind kind_from_name(const std::string& machine, const std::string& cond_bits) {
    if (machine == "plain") return MachineKind::plain();
    if (machine == "prefix") return MachineKind::prefix();
    if (machine == "cv") return register_v_machine();
    if (machine == "cond")
        return MachineKind::conditional(parse_bits_or_die(cond_bits, "--cond"));
    throw CLI::ValidationError("--machine", "unknown machine kind: " + machine);
}

void seed_defaults(ResultStore& store, const LabConfig& lab) {
    if (store.kind().tag == MachineTag::Plain) {
        const BitString copier = machines::plain_copier().raw;
        for_each_string_up_to(lab.plain_seed_len, [&](const BitString& x) {
            store.seed_witness(pair_encode(copier, x), lab.witness_fuel);
        });
    } else if (store.kind().tag == MachineTag::Prefix) {
        for_each_string_up_to(lab.prefix_seed_len, [&](const BitString& s) {
            store.seed_witness(machines::prefix_writer_program(s), lab.witness_fuel);
        });
        for (uint32_t k = 0; k <= lab.prefix_seed_pow_max; ++k)
            store.seed_witness(machines::prefix_writer_program(nat_to_str(uint64_t(1) << k)),
                               lab.witness_fuel);
    } else if (store.kind().tag == MachineTag::Conditional) {
        const BitString echo = machines::cond_input_copier().raw;
        store.seed_witness(pair_encode(machines::cond_copier().raw, BitString{}),
                           lab.witness_fuel);
        for_each_string_up_to(6, [&](const BitString& t) {
            store.seed_witness(pair_encode(echo, t), lab.witness_fuel);
        });
    }
}

void print_status(const ResultStore& store, const std::string& path) {
    std::cout << "snapshot: " << path << "\n";
    switch (store.kind().tag) {
        case MachineTag::Plain: std::cout << "machine: plain\n"; break;
        case MachineTag::Prefix: std::cout << "machine: prefix\n"; break;
        case MachineTag::Conditional:
            std::cout << "machine: conditional(" << store.kind().condition.str() << ")\n";
            break;
        case MachineTag::Custom:
            std::cout << "machine: custom(" << store.kind().custom_name << ")\n";
            break;
    }
    std::cout << "round: " << store.round() << "\n";
    std::cout << "facts: " << store.facts().size() << "\n";
    std::cout << "outputs: " << store.distinct_outputs().size() << "\n";
    if (store.kind().tag == MachineTag::Prefix) {
        DyadicSum kraft = store.kraft_sum();
        std::cout << "kraft: " << kraft.ratio_string() << " ~= " << kraft.approx()
                  << (kraft.exceeds_one() ? "  EXCEEDS 1\n" : "  (<= 1)\n");
    }
}

json report_to_json(const AuditReport& r) {
    json j;
    j["audit"] = r.audit_id;
    j["functor"] = r.functor;
    j["verdict"] = verdict_name(r.verdict);
    j["constant"] = r.constant;
    j["round"] = r.round_stamp;
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

void write_report_csv(const AuditReport& r, const std::string& dir) {
    std::string name = r.functor + "_" + r.audit_id;
    for (char& c : name)
        if (c == '/' || c == ' ' || c == '|' || c == '(' || c == ')' || c == '\'') c = '_';
    std::ofstream out(dir + "/" + name + ".csv", std::ios::trunc);
    for (std::size_t i = 0; i < r.evidence_header.size(); ++i)
        out << (i ? "," : "") << r.evidence_header[i];
    out << "\n";
    for (const auto& row : r.evidence) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
}

int run_audit(const ExperimentConfig& cfg, bool self_test_only, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    Lab lab(cfg.lab);
    lab.build();
    cfg.save(out_dir + "/config.txt");

    SelfTestResult result = run_self_test(lab);
    json verdicts = json::array();
    for (const AuditReport& r : result.reports) {
        verdicts.push_back(report_to_json(r));
        write_report_csv(r, out_dir);
    }
    json summary;
    summary["self_test_ok"] = result.ok;
    summary["failures"] = result.failures;
    summary["c_id"] = lab.c_id();
    summary["c_copy"] = lab.c_copy();
    summary["copier_index"] = lab.copier_index();
    if (lab.alpha_threshold()) summary["alpha_threshold"] = *lab.alpha_threshold();
    summary["untested"] =
        "functors relativized to a halting oracle (no oracle in the machine model); "
        "limit statements are replaced by the witness and trend surrogates above";
    summary["reports"] = verdicts;
    {
        std::ofstream out(out_dir + "/verdicts.json", std::ios::trunc);
        out << summary.dump(2) << "\n";
    }
    std::cout << "reports: " << result.reports.size() << " written to " << out_dir << "\n";
    for (const std::string& f : result.failures) std::cout << "MISMATCH " << f << "\n";
    std::cout << (result.ok ? "self-test matrix: ok\n" : "self-test matrix: FAILED\n");
    if (self_test_only) return result.ok ? 0 : 1;

    // Exact combinatorial checks gate the exit status; measured constants
    // and trends are informational.
    bool exact_ok = true;
    for (const AuditReport& r : result.reports) {
        bool exact_class = r.audit_id == "counting" || r.audit_id == "kraft" ||
                           r.audit_id == "cond_counting";
        bool expected_violation = r.functor == "zero" && r.audit_id == "counting";
        if (exact_class && !expected_violation && r.verdict != Verdict::ExactPass)
            exact_ok = false;
    }
    return exact_ok && result.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"klab: a fuel-bounded Kolmogorov complexity workbench"};
    app.require_subcommand(1);

    std::string config_path, snapshot_path, store_dir = ".", out_dir = "out";
    std::string machine = "plain", cond_bits, functor_name, x_bits;
    std::string order_name = "log2p1", bits_arg, exps_arg;
    uint32_t rounds = 12, length_cap = 14;
    uint64_t fuel_cap = 1'000'000, fuel = 1'000'000;
    uint64_t threshold = 0;
    bool threshold_set = false, seed_witnesses = false, self_test = false, star_mode = false;
    uint64_t from_n = 0, to_n = 20;

    auto load_config = [&]() {
        ExperimentConfig cfg;
        if (!config_path.empty()) cfg = ExperimentConfig::load(config_path);
        return cfg;
    };

    // --- dovetail ---
    CLI::App* dovetail = app.add_subcommand("dovetail", "build, resume or inspect stores");
    dovetail->require_subcommand(1);

    CLI::App* dv_run = dovetail->add_subcommand("run", "run rounds from scratch");
    dv_run->add_option("--config", config_path, "experiment config file");
    dv_run->add_option("--machine", machine, "plain | prefix | cv | cond")->capture_default_str();
    dv_run->add_option("--cond", cond_bits, "condition bits for --machine cond");
    dv_run->add_option("--rounds", rounds, "target round")->capture_default_str();
    dv_run->add_option("--cap", length_cap, "program length cap")->capture_default_str();
    dv_run->add_option("--fuel-cap", fuel_cap, "per-round fuel ceiling")->capture_default_str();
    dv_run->add_flag("--seed-witnesses", seed_witnesses, "inject the constructive witnesses");
    dv_run->add_option("--snapshot", snapshot_path, "output snapshot path")->required();
    dv_run->callback([&]() {
        ExperimentConfig cfg = load_config();
        FuelSchedule schedule;
        schedule.fuel_cap = fuel_cap;
        ResultStore store(kind_from_name(machine, cond_bits), length_cap, schedule);
        if (seed_witnesses) seed_defaults(store, cfg.lab);
        store.run_rounds(rounds);
        snapshot_save(store, snapshot_path);
        print_status(store, snapshot_path);
    });

    CLI::App* dv_resume = dovetail->add_subcommand("resume", "continue rounds from a snapshot");
    dv_resume->add_option("--snapshot", snapshot_path, "snapshot to continue")->required();
    dv_resume->add_option("--rounds", rounds, "target round (absolute)")->required();
    dv_resume->add_option("--cap", length_cap, "program length cap")->capture_default_str();
    dv_resume->add_option("--fuel-cap", fuel_cap, "per-round fuel ceiling")
        ->capture_default_str();
    dv_resume->callback([&]() {
        FuelSchedule schedule;
        schedule.fuel_cap = fuel_cap;
        ResultStore store = snapshot_load(snapshot_path, length_cap, schedule);
        if (store.kind().tag == MachineTag::Custom) register_v_machine();
        store.run_rounds(rounds);
        snapshot_save(store, snapshot_path);
        print_status(store, snapshot_path);
    });

    CLI::App* dv_status = dovetail->add_subcommand("status", "round, fact count, Kraft sum");
    dv_status->add_option("--snapshot", snapshot_path, "snapshot to inspect")->required();
    dv_status->callback([&]() {
        ResultStore store = snapshot_load(snapshot_path);
        print_status(store, snapshot_path);
    });

    // --- query ---
    CLI::App* query = app.add_subcommand("query", "evaluate a functor at a string");
    query->add_option("functor", functor_name, "C | K | CV | 2C | zero | len | Ccond | Bmin")
        ->required();
    query->add_option("x", x_bits, "the string, as 0/1 text (empty allowed)");
    query->add_option("--store-dir", store_dir, "directory with plain/prefix/cv snapshots")
        ->capture_default_str();
    query->add_option("--cond", cond_bits, "condition for Ccond/Bmin");
    query->callback([&]() {
        BitString x = parse_bits_or_die(x_bits, "x");
        auto load = [&](const char* name) {
            return std::make_shared<ResultStore>(snapshot_load(store_dir + "/" + name));
        };
        std::optional<uint64_t> value;
        uint32_t round = 0;
        if (functor_name == "C" || functor_name == "2C") {
            auto s = load("plain.klab");
            round = s->round();
            value = s->complexity_upper(x);
            if (value && functor_name == "2C") *value *= 2;
        } else if (functor_name == "K") {
            auto s = load("prefix.klab");
            round = s->round();
            value = s->complexity_upper(x);
        } else if (functor_name == "CV") {
            register_v_machine();
            auto s = load("cv.klab");
            round = s->round();
            value = s->complexity_upper(x);
        } else if (functor_name == "zero") {
            value = 0;
        } else if (functor_name == "len") {
            value = x.size();
        } else if (functor_name == "Ccond" || functor_name == "Bmin") {
            BitString y = parse_bits_or_die(cond_bits, "--cond");
            auto s = std::make_shared<ResultStore>(
                snapshot_load(store_dir + "/cond-" + y.str() + ".klab"));
            round = s->round();
            auto cc = s->complexity_upper(x);
            if (functor_name == "Ccond") {
                value = cc;
            } else {
                auto plain = load("plain.klab");
                auto c = plain->complexity_upper(x);
                if (c && cc) value = std::min(*c, 2 * *cc);
                else if (c) value = *c;
                else if (cc) value = 2 * *cc;
            }
        } else {
            throw CLI::ValidationError("functor", "unknown functor: " + functor_name);
        }
        if (value)
            std::cout << functor_name << "(" << (x.empty() ? "(empty)" : x.str())
                      << ") <= " << *value << "  [round " << round << "]\n";
        else
            std::cout << "unknown\n";
    });

    // --- audit ---
    CLI::App* audit = app.add_subcommand("audit", "run the audit suites and emit reports");
    audit->add_option("--config", config_path, "experiment config file");
    audit->add_option("--out", out_dir, "report directory")->capture_default_str();
    audit->add_flag("--self-test", self_test, "gate only on the expectation matrix");
    int audit_exit = 0;
    audit->callback([&]() { audit_exit = run_audit(load_config(), self_test, out_dir); });

    // --- star ---
    CLI::App* star_cmd = app.add_subcommand("star", "tabulate an order's star values");
    bool list_orders = false;
    star_cmd->add_option("--order", order_name, "log2p1 | half | isqrt")->capture_default_str();
    star_cmd->add_option("--threshold", threshold, "iteration threshold p")
        ->each([&](const std::string&) { threshold_set = true; });
    star_cmd->add_option("--from", from_n, "range start")->capture_default_str();
    star_cmd->add_option("--to", to_n, "range end")->capture_default_str();
    star_cmd->add_flag("--list", list_orders, "list the order library and thresholds");
    star_cmd->callback([&]() {
        if (list_orders) {
            std::cout << "name,p_f\n";
            for (const OrderSpec& f : library_orders())
                std::cout << f.name << "," << compute_pf(f) << "\n";
            return;
        }
        OrderSpec spec;
        bool found = false;
        for (const OrderSpec& f : library_orders())
            if (f.name == order_name) {
                spec = f;
                found = true;
            }
        if (!found) throw CLI::ValidationError("--order", "unknown order: " + order_name);
        uint64_t p = threshold_set ? threshold : compute_pf(spec);
        std::cout << "n," << spec.name << "_star(p=" << p << ")\n";
        for (uint64_t n = from_n; n <= to_n; ++n)
            std::cout << n << "," << star(spec, p, n) << "\n";
    });

    // --- alpha ---
    CLI::App* alpha_cmd = app.add_subcommand("alpha", "tabulate the anytime alpha bound");
    alpha_cmd->add_option("--snapshot", snapshot_path, "prefix store snapshot")->required();
    alpha_cmd->add_option("--from", from_n, "range start")->capture_default_str();
    alpha_cmd->add_option("--to", to_n, "range end")->capture_default_str();
    alpha_cmd->add_flag("--star", star_mode, "tabulate alpha-star instead");
    alpha_cmd->add_option("--threshold", threshold, "alpha-star threshold p")
        ->each([&](const std::string&) { threshold_set = true; });
    alpha_cmd->callback([&]() {
        ResultStore store = snapshot_load(snapshot_path);
        AlphaIndex index(store);
        if (star_mode) {
            uint64_t p;
            if (threshold_set) {
                p = threshold;
            } else {
                auto suggested = suggest_alpha_threshold(store, {from_n, to_n, 1024, 10000});
                if (!suggested)
                    throw std::runtime_error("alpha undefined on the probe range; more rounds "
                                             "or witnesses needed");
                p = *suggested;
            }
            std::cout << "n,alpha_star(p=" << p << ")\n";
            for (uint64_t n = from_n; n <= to_n; ++n) {
                auto v = index.star_from(p, n);
                std::cout << n << "," << (v ? std::to_string(*v) : "unknown") << "\n";
            }
        } else {
            std::cout << "n,alpha\n";
            for (uint64_t n = from_n; n <= to_n; ++n) {
                auto v = index.query(n);
                std::cout << n << "," << (v ? std::to_string(*v) : "unknown") << "\n";
            }
        }
    });

    // --- pcode ---
    CLI::App* pcode = app.add_subcommand("pcode", "encode, decode and run V programs");
    pcode->require_subcommand(1);

    CLI::App* pc_encode = pcode->add_subcommand("encode", "exponent list -> code string");
    pc_encode->add_option("exps", exps_arg, "comma-separated positive indices, e.g. 2,3")
        ->required();
    pc_encode->callback([&]() {
        PCode code;
        std::string token;
        std::istringstream is(exps_arg);
        while (std::getline(is, token, ','))
            code.exps.push_back(std::stoull(token));
        std::cout << p_encode(code).str() << "\n";
    });

    CLI::App* pc_decode = pcode->add_subcommand("decode", "code string -> exponents + rest");
    pc_decode->add_option("bits", bits_arg, "bit string")->required();
    int decode_exit = 0;
    pc_decode->callback([&]() {
        auto d = p_decode(bits_arg_or_file(bits_arg, "bits"));
        if (!d) {
            std::cerr << "not in P: no prefix of the input lies in the code set\n";
            decode_exit = 1;
            return;
        }
        std::cout << "exps:";
        for (uint64_t e : d->first.exps) std::cout << " " << e;
        std::cout << "\nrest: " << (d->second.empty() ? "(empty)" : d->second.str()) << "\n";
    });

    CLI::App* pc_runv = pcode->add_subcommand("runv", "run the gated machine V");
    pc_runv->add_option("bits", bits_arg, "program bit string")->required();
    pc_runv->add_option("--fuel", fuel, "shared gate budget")->capture_default_str();
    pc_runv->callback([&]() {
        VOutcome v = run_V(bits_arg_or_file(bits_arg, "bits"), {fuel});
        switch (v.outcome.kind) {
            case ExecOutcome::Kind::Halted:
                std::cout << "halted, output: "
                          << (v.outcome.output.empty() ? "(empty)" : v.outcome.output.str())
                          << ", steps: " << v.outcome.steps << "\n";
                break;
            case ExecOutcome::Kind::FuelExhausted:
                std::cout << "fuel exhausted after " << v.outcome.steps << " steps\n";
                break;
            case ExecOutcome::Kind::Diverged:
                std::cout << "diverged\n";
                break;
        }
        switch (v.gate) {
            case VOutcome::Gate::AllShorterConverged:
                std::cout << "gate: all shorter inputs converged\n";
                break;
            case VOutcome::Gate::PendingShorter:
                std::cout << "gate: " << v.pending_count << " unresolved input(s):";
                for (const BitString& y : v.pending)
                    std::cout << " " << (y.empty() ? "(empty)" : y.str());
                std::cout << "\n";
                break;
            case VOutcome::Gate::NotApplicable:
                std::cout << "gate: not applicable\n";
                break;
        }
    });

    // --- report ---
    CLI::App* report = app.add_subcommand("report", "summarize verdicts from an audit run");
    report->add_option("--dir", out_dir, "audit output directory")->capture_default_str();
    report->callback([&]() {
        std::ifstream in(out_dir + "/verdicts.json");
        if (!in) throw std::runtime_error("no verdicts.json under " + out_dir);
        json j;
        in >> j;
        std::cout << "self_test_ok: " << (j["self_test_ok"].get<bool>() ? "yes" : "no") << "\n";
        std::cout << "c_id: " << j["c_id"] << "  c_copy: " << j["c_copy"] << "\n";
        for (const auto& r : j["reports"])
            std::cout << r["functor"].get<std::string>() << "/"
                      << r["audit"].get<std::string>() << ": "
                      << r["verdict"].get<std::string>() << " (c=" << r["constant"] << ")\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    if (*pc_decode) return decode_exit;
    if (*audit) return audit_exit;
    return 0;
}
