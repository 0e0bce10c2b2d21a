#include "sdeg/scenarios.hpp"

namespace sdeg {

namespace {

const NodePath kFirstRNode = {"infty"};

WitnessRef first_r_witness() { return WitnessRef{kFirstRNode}; }

// diag1: the first R-node's witness gets an unconditional axiom two stages
// after its appointment, forcing a plain diagonalization.
std::vector<OperatorSchedule> diag1() {
    OperatorSchedule phi_r;
    phi_r.id = 1;
    phi_r.kind = OperatorKind::s();
    Axiom ax;
    ax.head = first_r_witness();
    ax.body = FiniteSet{};
    phi_r.entries.emplace(5, std::move(ax));
    return {phi_r};
}

// setup1: the root strategy first sees the witness as an A-use (and appoints
// a marker for it); the R-operator then realizes the witness through that
// marker, which blocks clearing and forces a setup. The marker axiom enters
// at stage 8 so the resolved marker value clears the entry bound in both
// modes (odd markers run one ahead).
std::vector<OperatorSchedule> setup1() {
    OperatorSchedule phi_s;
    phi_s.id = 0;
    phi_s.kind = OperatorKind::s();
    {
        Axiom ax;
        ax.head = std::uint64_t{0};
        SymbolicBody body;
        body.ref = first_r_witness();
        body.side = JoinSide::a_side;
        ax.body = body;
        phi_s.entries.emplace(5, std::move(ax));
    }
    OperatorSchedule phi_r;
    phi_r.id = 1;
    phi_r.kind = OperatorKind::s();
    {
        Axiom ax;
        ax.head = first_r_witness();
        SymbolicBody body;
        MarkerRef mref;
        mref.op_id = 0;
        mref.z = 0;
        mref.x = first_r_witness();
        body.ref = mref;
        ax.body = body;
        phi_r.entries.emplace(8, std::move(ax));
    }
    return {phi_s, phi_r};
}

// setup-then-release: setup1 plus an unconditional axiom for the same head,
// which later clears the stored setup and lets the stream witness
// diagonalize.
std::vector<OperatorSchedule> setup_then_release() {
    auto schedules = setup1();
    Axiom ax;
    ax.head = std::uint64_t{0};
    ax.body = FiniteSet{};
    schedules[0].entries.emplace(10, std::move(ax));
    return schedules;
}

}  // namespace

std::vector<ScenarioInfo> scenario_list() {
    return {
        {"empty", "no adversary axioms; every strategy waits forever"},
        {"diag1", "one unconditional axiom realizes the first witness; plain diagonalization"},
        {"setup1", "a marker-mediated realization forces a setup and a Gamma-kill"},
        {"setup-then-release",
         "setup1, then the setup head gains an unconditional axiom and the stream "
         "witness diagonalizes"},
    };
}

std::optional<std::vector<OperatorSchedule>> builtin_scenario(const std::string& name) {
    if (name == "empty") return std::vector<OperatorSchedule>{};
    if (name == "diag1") return diag1();
    if (name == "setup1") return setup1();
    if (name == "setup-then-release") return setup_then_release();
    return std::nullopt;
}

}  // namespace sdeg
