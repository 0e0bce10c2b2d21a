// sdegsim: run the construction against an adversary, persist the trace,
// and audit it. Exit codes: 0 ok, 1 config error, 2 schedule validation,
// 3 audit failure, 4 internal invariant trap.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sdeg/adversary.hpp"
#include "sdeg/engine.hpp"
#include "sdeg/scenarios.hpp"
#include "sdeg/verifier.hpp"

namespace {

using namespace sdeg;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitSchedule = 2;
constexpr int kExitAudit = 3;
constexpr int kExitTrap = 4;

struct CliOptions {
    std::string mode = "theorem2";
    std::string ordering = "s-first";
    std::uint64_t stages = 200;
    std::string scenario;
    std::string adversary_path;
    std::optional<std::uint64_t> seed;
    double density = 0.25;
    std::uint64_t operators = 6;
    std::string trace_path;
    std::uint64_t snapshot_every = 0;
    std::string audits = "all";
    std::uint64_t window = 25;
    std::uint64_t zbound = 64;
    std::string report_path;
    std::string config_path;
};

void apply_config_file(CliOptions& opt) {
    if (opt.config_path.empty()) return;
    std::ifstream in(opt.config_path);
    if (!in) throw ConfigError("cannot open config file: " + opt.config_path);
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.contains("mode")) opt.mode = j["mode"].get<std::string>();
    if (j.contains("ordering")) opt.ordering = j["ordering"].get<std::string>();
    if (j.contains("stages")) opt.stages = j["stages"].get<std::uint64_t>();
    if (j.contains("scenario")) opt.scenario = j["scenario"].get<std::string>();
    if (j.contains("adversary")) opt.adversary_path = j["adversary"].get<std::string>();
    if (j.contains("seed")) opt.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("density")) opt.density = j["density"].get<double>();
    if (j.contains("trace")) opt.trace_path = j["trace"].get<std::string>();
    if (j.contains("snapshotEvery"))
        opt.snapshot_every = j["snapshotEvery"].get<std::uint64_t>();
    if (j.contains("audit")) opt.audits = j["audit"].get<std::string>();
    if (j.contains("window")) opt.window = j["window"].get<std::uint64_t>();
    if (j.contains("zbound")) opt.zbound = j["zbound"].get<std::uint64_t>();
}

std::vector<OperatorSchedule> resolve_adversary(const CliOptions& opt) {
    int sources = int(!opt.scenario.empty()) + int(!opt.adversary_path.empty()) +
                  int(opt.seed.has_value());
    if (sources > 1)
        throw ConfigError("pick one of --scenario, --adversary, --seed");
    if (!opt.adversary_path.empty()) return load_adversary_file(opt.adversary_path);
    if (opt.seed) {
        RandomAdversaryOptions r;
        r.seed = *opt.seed;
        r.stages = opt.stages;
        r.density = opt.density;
        r.operator_count = opt.operators;
        r.ordering = opt.ordering == "r-first" ? RequirementOrdering::r_first
                                               : RequirementOrdering::s_first;
        return random_adversary(r);
    }
    std::string name = opt.scenario.empty() ? "empty" : opt.scenario;
    auto schedules = builtin_scenario(name);
    if (!schedules) throw ConfigError("unknown scenario: " + name);
    return *schedules;
}

EngineConfig engine_config(const CliOptions& opt) {
    EngineConfig cfg;
    auto mode = parse_mode(opt.mode);
    if (!mode) throw ConfigError("unknown mode: " + opt.mode);
    cfg.mode = *mode;
    if (opt.ordering == "s-first")
        cfg.ordering = RequirementOrdering::s_first;
    else if (opt.ordering == "r-first")
        cfg.ordering = RequirementOrdering::r_first;
    else
        throw ConfigError("unknown ordering: " + opt.ordering);
    if (opt.stages < 1) throw ConfigError("--stages must be at least 1");
    cfg.stage_budget = opt.stages;
    cfg.snapshot_every = opt.snapshot_every;
    return cfg;
}

std::string snapshot_path_for(const std::string& trace_path) {
    return trace_path + ".snapshots.json";
}

void write_snapshots(const std::vector<Snapshot>& snapshots, const std::string& path) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& s : snapshots) j.push_back(s.to_json());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write snapshot file: " + path);
    out << j.dump(2) << "\n";
}

std::vector<Snapshot> read_snapshots(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open snapshot file: " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    std::vector<Snapshot> out;
    for (const auto& js : j) out.push_back(Snapshot::from_json(js));
    return out;
}

bool wanted(const std::string& audits, const std::string& name) {
    if (audits == "all") return true;
    if (audits == "none") return false;
    std::size_t pos = 0;
    while (pos < audits.size()) {
        std::size_t comma = audits.find(',', pos);
        std::string token = audits.substr(pos, comma - pos);
        if (token == name) return true;
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return false;
}

int print_and_grade(const std::vector<AuditReport>& reports,
                    const std::string& report_path) {
    bool all_pass = true;
    for (const auto& r : reports) {
        std::string tag = !r.verdict ? "NOTE" : (r.pass ? "PASS" : "FAIL");
        std::cout << "[" << tag << "] " << r.name;
        if (!r.stats.empty()) std::cout << " " << r.stats.dump();
        std::cout << "\n";
        for (const auto& n : r.notes) std::cout << "    " << n << "\n";
        if (r.verdict && !r.pass) all_pass = false;
    }
    if (!report_path.empty()) {
        std::ofstream out(report_path, std::ios::binary);
        if (!out) throw ConfigError("cannot write report file: " + report_path);
        out << reports_to_json(reports).dump(2) << "\n";
    }
    return all_pass ? kExitOk : kExitAudit;
}

std::vector<AuditReport> run_audits(const ReplayState& rs, const CliOptions& opt) {
    VerifierOptions vopt{opt.window, opt.zbound};
    std::vector<AuditReport> reports;
    if (wanted(opt.audits, "change_counts")) reports.push_back(audit_change_counts(rs));
    if (wanted(opt.audits, "markers")) reports.push_back(audit_markers(rs));
    if (wanted(opt.audits, "streams")) reports.push_back(audit_streams(rs));
    if (wanted(opt.audits, "true_path")) reports.push_back(true_path_estimate(rs, vopt));
    if (wanted(opt.audits, "r_outcomes")) reports.push_back(check_r_outcomes(rs));
    if (wanted(opt.audits, "s_quiescence"))
        reports.push_back(check_s_at_quiescence(rs, vopt));
    if (rs.mode == Mode::corollary3 && wanted(opt.audits, "omega"))
        reports.push_back(omega_consistency(rs));
    return reports;
}

int cmd_run(const CliOptions& opt) {
    auto schedules = resolve_adversary(opt);
    Engine engine(engine_config(opt), std::move(schedules));
    engine.run();
    if (!opt.trace_path.empty()) {
        write_trace_file(engine.trace(), opt.trace_path);
        write_snapshots(engine.snapshots(), snapshot_path_for(opt.trace_path));
        std::cout << "trace: " << opt.trace_path << " (" << engine.trace().size()
                  << " events)\n";
    }
    std::cout << "final path: "
              << (engine.f_history().empty() ? root() : engine.f_history().back())
                     .to_string()
              << "\n";
    if (opt.audits == "none") return kExitOk;
    ReplayState rs = ReplayState::build(engine.trace());
    return print_and_grade(run_audits(rs, opt), opt.report_path);
}

int cmd_audit(const CliOptions& opt, const std::string& trace_path) {
    ReplayState rs = ReplayState::build(read_trace_file(trace_path));
    return print_and_grade(run_audits(rs, opt), opt.report_path);
}

int cmd_replay(const CliOptions& opt, const std::string& trace_path) {
    (void)opt;
    Trace trace = read_trace_file(trace_path);
    ReplayState rs = ReplayState::build(trace);
    // Rebuild the final exception lists from the replayed membership logs
    // and compare with the stored snapshots.
    Snapshot replayed = snapshot_from_replay(rs);
    auto stored = read_snapshots(snapshot_path_for(trace_path));
    if (stored.empty()) {
        std::cerr << "no snapshots stored alongside the trace\n";
        return kExitAudit;
    }
    const Snapshot& last = stored.back();
    if (last == replayed) {
        std::cout << "replay matches the final snapshot (stage " << last.stage
                  << ")\n";
        return kExitOk;
    }
    std::cerr << "replay diverges from the stored snapshot at stage " << last.stage
              << "\n  stored:   " << last.to_json().dump()
              << "\n  replayed: " << replayed.to_json().dump() << "\n";
    return kExitAudit;
}

int cmd_scenarios() {
    for (const auto& s : scenario_list())
        std::cout << s.name << "\t" << s.description << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"priority-construction simulator and trace auditor"};
    app.require_subcommand(1);

    CliOptions opt;
    std::string trace_arg;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--mode", opt.mode, "theorem2 or corollary3")
            ->envname("SDEGSIM_MODE");
        cmd->add_option("--ordering", opt.ordering,
                        "requirement interleaving: s-first or r-first")
            ->envname("SDEGSIM_ORDERING");
        cmd->add_option("--stages", opt.stages, "stage budget")
            ->envname("SDEGSIM_STAGES");
        cmd->add_option("--audit", opt.audits,
                        "all, none, or a comma list (change_counts, markers, "
                        "streams, true_path, r_outcomes, s_quiescence, omega)")
            ->envname("SDEGSIM_AUDIT");
        cmd->add_option("--window", opt.window, "quiescence / stability window")
            ->envname("SDEGSIM_WINDOW");
        cmd->add_option("--zbound", opt.zbound, "head bound for operator equalities")
            ->envname("SDEGSIM_ZBOUND");
        cmd->add_option("--report", opt.report_path, "write the audit report as JSON")
            ->envname("SDEGSIM_REPORT");
    };

    CLI::App* run = app.add_subcommand("run", "run the construction");
    add_common(run);
    run->add_option("--scenario", opt.scenario, "builtin scenario name")
        ->envname("SDEGSIM_SCENARIO");
    run->add_option("--adversary", opt.adversary_path, "adversary JSON file")
        ->envname("SDEGSIM_ADVERSARY");
    run->add_option("--seed", opt.seed, "generate a random adversary from this seed")
        ->envname("SDEGSIM_SEED");
    run->add_option("--density", opt.density, "random adversary axiom density")
        ->envname("SDEGSIM_DENSITY");
    run->add_option("--operators", opt.operators, "random adversary operator count")
        ->envname("SDEGSIM_OPERATORS");
    run->add_option("--trace", opt.trace_path, "trace output path")
        ->envname("SDEGSIM_TRACE");
    run->add_option("--snapshot-every", opt.snapshot_every,
                    "snapshot cadence in stages (0: final only)")
        ->envname("SDEGSIM_SNAPSHOT_EVERY");
    run->add_option("--config", opt.config_path, "JSON config file")
        ->envname("SDEGSIM_CONFIG");

    CLI::App* audit = app.add_subcommand("audit", "audit a stored trace");
    add_common(audit);
    audit->add_option("trace", trace_arg, "trace file")->required();

    CLI::App* replay = app.add_subcommand("replay", "replay a trace against its snapshots");
    replay->add_option("trace", trace_arg, "trace file")->required();

    CLI::App* scenarios = app.add_subcommand("scenarios", "scenario library");
    scenarios->add_subcommand("list", "list builtin scenarios");

    CLI11_PARSE(app, argc, argv);

    try {
        apply_config_file(opt);
        if (run->parsed()) return cmd_run(opt);
        if (audit->parsed()) return cmd_audit(opt, trace_arg);
        if (replay->parsed()) return cmd_replay(opt, trace_arg);
        if (scenarios->parsed()) return cmd_scenarios();
    } catch (const ScheduleError& e) {
        std::cerr << "schedule error: " << e.what() << "\n";
        return kExitSchedule;
    } catch (const AdversaryParseError& e) {
        std::cerr << "adversary error: " << e.what() << "\n";
        return kExitSchedule;
    } catch (const InvariantTrap& e) {
        std::cerr << "invariant trap: " << e.what() << "\n";
        return kExitTrap;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
