#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdeg/event.hpp"
#include "sdeg/finite_set.hpp"
#include "sdeg/operator_schedule.hpp"
#include "sdeg/strategy_tree.hpp"
#include "sdeg/tracked_set.hpp"

namespace sdeg {

enum class Mode { theorem2, corollary3 };
const char* mode_name(Mode m);
std::optional<Mode> parse_mode(const std::string& name);

struct EngineConfig {
    Mode mode = Mode::theorem2;
    std::uint64_t stage_budget = 100;
    RequirementOrdering ordering = RequirementOrdering::s_first;
    std::uint64_t snapshot_every = 0;  // 0: final snapshot only
};

// Raised when a construction invariant the proof relies on breaks; this is
// an engine bug (or a corrupt input), never a routine error.
struct InvariantTrap : std::logic_error {
    using std::logic_error::logic_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScheduleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MarkerRecord {
    Node owner;  // the S-node that appointed it
    std::uint64_t z = 0;
    std::uint64_t x = 0;  // A-use of z
    std::uint64_t value = 0;
    std::uint64_t stage_appointed = 0;
    bool defined = true;
    std::uint64_t stage_canceled = 0;
};

// One observed correspondence "x in A <=> z in Z", recorded on the edge
// node that exploits it.
struct SetupRecord {
    std::uint64_t edge_index = 0;  // i
    std::uint64_t witness = 0;     // x
    std::uint64_t z = 0;
    std::uint64_t marker = 0;  // the marker d whose restraint conflict made the setup
    std::uint64_t stage = 0;
};

struct StoredAxiom {
    std::uint64_t head = 0;
    FiniteSet body;
    std::uint64_t stage = 0;  // when it entered the store
};

// A growing axiom set (Gamma of an S-node, Delta of an edge node).
class AxiomStore {
public:
    bool add(std::uint64_t head, FiniteSet body, std::uint64_t stage);
    bool contains(std::uint64_t head, const FiniteSet& body) const;
    bool member(std::uint64_t head, const Oracle& oracle) const;
    const std::vector<StoredAxiom>& axioms() const { return axioms_; }
    bool empty() const { return axioms_.empty(); }
    void clear() {
        axioms_.clear();
        index_.clear();
    }

private:
    std::vector<StoredAxiom> axioms_;
    std::set<std::pair<std::uint64_t, FiniteSet>> index_;
};

struct WitnessEntry {
    std::uint64_t value = 0;
    std::uint64_t stage = 0;
    bool canceled = false;
};

// A stopped node's diagonalization: the witness it extracted and the
// realization set it restrains inside D.
struct DiagRecord {
    std::uint64_t witness = 0;
    FiniteSet restraint;
    std::uint64_t stage = 0;
    std::string via;  // case label
};

struct NodeParams {
    std::optional<std::uint64_t> witness;
    std::vector<WitnessEntry> witness_history;
    std::set<std::uint64_t> stream;
    std::uint64_t last_init_stage = 0;
    std::uint64_t last_active_stage = 0;  // last stage this node was appointed
    bool stopped = false;
    AxiomStore gamma;                  // S-nodes
    AxiomStore delta;                  // edge nodes alpha.i(i)
    std::vector<SetupRecord> setups;   // edge nodes
    std::optional<DiagRecord> diag;    // R-nodes

    bool clean() const;
};

// The operator an adversary schedule has fed in so far: axioms resolved and
// materialized at their entry stages.
struct MaterializedOperator {
    std::uint64_t id = 0;
    OperatorKind kind = OperatorKind::s();
    std::vector<StoredAxiom> axioms;
};

struct Snapshot {
    std::uint64_t stage = 0;
    std::vector<std::uint64_t> a_extracted;
    std::vector<std::uint64_t> d_extracted;   // currently out of D
    std::vector<std::uint64_t> d_reentered;   // extracted once, back in
    // Per changed element, the stage from which its membership held steady.
    std::map<std::uint64_t, std::uint64_t> a_stable_since;
    std::map<std::uint64_t, std::uint64_t> d_stable_since;
    nlohmann::json to_json() const;
    static Snapshot from_json(const nlohmann::json& j);
    bool operator==(const Snapshot&) const = default;
};

// Executes the stage/substage construction against the given adversary
// schedules. Strictly single-threaded; deterministic function of
// (config, schedules). Construct, run() once, then read the final state.
class Engine {
public:
    Engine(EngineConfig config, std::vector<OperatorSchedule> schedules);

    void run();

    const Trace& trace() const { return trace_; }
    const std::vector<Snapshot>& snapshots() const { return snapshots_; }
    const std::vector<Node>& f_history() const { return f_history_; }
    const StrategyTree& tree() const { return tree_; }
    const EngineConfig& config() const { return config_; }

    bool a_contains(std::uint64_t x) const;
    const TrackedSet& d_set() const { return d_; }
    const TrackedSet& a_set() const { return a_; }
    const std::map<Node, NodeParams>& params() const { return params_; }
    const std::vector<MarkerRecord>& markers() const { return markers_; }
    const std::map<std::uint64_t, MaterializedOperator>& operators() const {
        return operators_;
    }
    std::uint64_t mention_counter() const { return mention_; }

    Snapshot snapshot(std::uint64_t stage) const;

private:
    // -- state access ------------------------------------------------------
    NodeParams& node_params(const Node& n);
    const NodeParams* find_params(const Node& n) const;
    std::uint64_t scan_last_init(const Node& n) const;
    std::uint64_t last_init(const Node& n);
    std::uint64_t p_of(const Node& n);  // max(|n|, last initialization stage)

    void mention(std::uint64_t v);
    std::uint64_t new_number();

    Oracle a_oracle() const;
    Oracle d_oracle() const;

    const MaterializedOperator& op_for(const Requirement& req);
    const MaterializedOperator& op_for_listing(std::uint64_t listing_index);

    // -- markers -----------------------------------------------------------
    const MarkerRecord* defined_marker(const Node& owner, std::uint64_t z,
                                       std::uint64_t x) const;
    const MarkerRecord* defined_marker_by_value(std::uint64_t value) const;
    std::vector<const MarkerRecord*> defined_markers_of(const Node& owner) const;
    MarkerRecord& define_marker(const Node& owner, std::uint64_t z, std::uint64_t x);
    void cancel_marker(std::uint64_t value, const std::string& reason);

    // Still-defined markers gamma_i(., x) of each active S-ancestor; the
    // union D-hat_x over i < n.
    FiniteSet dhat_for(const std::vector<Node>& betas, std::uint64_t x) const;

    // -- events ------------------------------------------------------------
    void emit(EventKind kind, const Node& node, nlohmann::json data);
    void emit_plain(EventKind kind, nlohmann::json data);

    // -- stage machinery ---------------------------------------------------
    void run_stage(std::uint64_t s);
    void materialize_entries(std::uint64_t s);
    std::optional<LiteralAxiom> resolve_axiom(const OperatorSchedule& sched,
                                              const Axiom& axiom, std::uint64_t s,
                                              std::string& why_not);
    std::optional<std::uint64_t> resolve_witness_ref(const WitnessRef& ref,
                                                     std::string& why_not);
    Node act(const Node& node);
    Node act_s(const Node& beta);
    Node act_r(const Node& alpha);
    Node appoint(const Node& parent, const Outcome& outcome, const std::string& label,
                 bool trim_stream, nlohmann::json extra = nlohmann::json::object());
    void end_of_stage(const Node& f);
    void initialize_node(const Node& node, NodeParams& np);

    // -- R-strategy pieces -------------------------------------------------
    struct Realization {
        FiniteSet f;              // the selected F_x
        std::uint64_t since = 0;  // stage since which F subseteq D
    };
    std::optional<Realization> realization_of(const MaterializedOperator& phi,
                                              std::uint64_t x) const;
    bool cleared_current(std::uint64_t x, const FiniteSet& fx,
                         const std::vector<Node>& betas, std::size_t i);
    bool cleared_setup(const SetupRecord& setup, const std::vector<Node>& betas);
    struct ClearedSetup {
        std::size_t i = 0;
        SetupRecord setup;
    };
    std::optional<ClearedSetup> find_cleared_setup(const Node& alpha,
                                                   const std::vector<Node>& betas);

    Node do_pick_witness(const Node& alpha, NodeParams& ap);          // 2.2.1
    Node do_diagonalize(const Node& alpha, NodeParams& ap,            // 2.2.3.1
                        const Realization& real, const std::vector<Node>& betas);
    Node do_stream_diagonalize(const Node& alpha, NodeParams& ap,     // 2.2.3.2
                               const ClearedSetup& cs);
    Node do_setup(const Node& alpha, NodeParams& ap, const Realization& real,
                  const std::vector<Node>& betas, std::size_t i);     // 2.2.3.3

    // -- set mutation (mode-aware) ------------------------------------------
    void extract_from_a(std::uint64_t x, const std::optional<std::uint64_t>& use,
                        const std::string& reason);
    void extract_from_d(std::uint64_t d, const std::string& reason);
    void enum_into_d(std::uint64_t d, const std::string& reason);
    FiniteSet omega_restraints() const;

    // -- data ----------------------------------------------------------------
    EngineConfig config_;
    StrategyTree tree_;
    std::map<std::uint64_t, OperatorSchedule> schedules_;
    std::map<std::uint64_t, MaterializedOperator> operators_;
    TrackedSet a_{"A"};
    TrackedSet d_{"D"};
    std::map<Node, NodeParams> params_;
    std::vector<MarkerRecord> markers_;
    std::map<std::uint64_t, std::size_t> marker_by_value_;
    // Defined markers per owner, keyed by pair; kept in step with the registry.
    std::map<Node, std::map<std::pair<std::uint64_t, std::uint64_t>, std::size_t>>
        defined_index_;
    std::uint64_t mention_ = 0;
    std::uint64_t live_setups_ = 0;  // setup records not yet wiped by initialization
    std::vector<Node> f_history_;    // f_history_[s] = f_s; f_0 = root
    Trace trace_;
    std::vector<Snapshot> snapshots_;
    std::uint64_t stage_ = 0;
    std::uint64_t substage_ = 0;
    bool stage_stopped_ = false;
    bool ran_ = false;
};

}  // namespace sdeg
