#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sdeg/engine.hpp"
#include "sdeg/event.hpp"
#include "sdeg/strategy_tree.hpp"

namespace sdeg {

// A trace replayed into queryable state. Replay never throws on corrupt
// traces: discipline breaks stay visible in the raw logs and anomaly list
// so the audits can report them as failures.
class ReplayState {
public:
    struct Change {
        std::uint64_t stage = 0;
        std::uint64_t substage = 0;
        bool extract = true;
    };
    struct ElementLog {
        std::vector<Change> changes;
        bool member_now() const {
            return changes.empty() || !changes.back().extract;
        }
        bool member_at_end(std::uint64_t stage) const;
    };
    struct MarkerReplay {
        Node owner;
        std::uint64_t z = 0, x = 0, value = 0;
        std::uint64_t stage_defined = 0;
        std::optional<std::uint64_t> stage_canceled;
        std::uint64_t definitions = 1;  // >1 flags a corrupt trace
    };
    struct NodeReplay {
        std::map<std::uint64_t, std::uint64_t> stream;  // element -> stage added
        std::optional<std::uint64_t> witness;
        std::vector<StoredAxiom> gamma;
        std::vector<StoredAxiom> delta;
        std::vector<SetupRecord> setups;
        std::optional<DiagRecord> diag;
        std::optional<std::uint64_t> last_outcome_stage;
        std::string last_outcome_case;
    };
    struct OutcomeRecord {
        std::uint64_t stage = 0;
        Node node;  // the appointed child
        std::string label;
    };

    static ReplayState build(const Trace& trace);

    Mode mode = Mode::theorem2;
    std::uint64_t budget = 0;
    RequirementOrdering ordering = RequirementOrdering::s_first;
    StrategyTree tree;

    std::map<std::uint64_t, ElementLog> a_log;  // derived events in corollary3 mode
    std::map<std::uint64_t, ElementLog> d_log;
    std::map<Node, NodeReplay> nodes;
    std::map<std::uint64_t, MarkerReplay> markers;           // by value
    std::map<std::uint64_t, std::vector<StoredAxiom>> operators;  // by listing id
    std::vector<Node> f_history;  // f_history[s] = f_s
    std::vector<OutcomeRecord> outcomes;
    std::vector<std::string> anomalies;  // build-time inconsistencies
    std::uint64_t quiet_after = 0;  // last stage with a quiescence-breaking event

    bool a_member_now(std::uint64_t x) const;
    bool a_member_at_end(std::uint64_t x, std::uint64_t stage) const;
    bool d_member_now(std::uint64_t x) const;
    bool d_member_at_end(std::uint64_t x, std::uint64_t stage) const;

    // max(|node|, last initialization stage before s), from the f history.
    std::uint64_t p_of(const Node& node, std::uint64_t s) const;
    std::uint64_t last_init_before(const Node& node, std::uint64_t s) const;

    std::size_t count_case(const std::string& label) const;
    const std::vector<StoredAxiom>& op_axioms(std::uint64_t listing_id) const;
};

struct AuditReport {
    std::string name;
    bool pass = true;
    bool verdict = true;  // false: preconditions unmet, no claim either way
    std::vector<std::string> notes;
    nlohmann::json stats = nlohmann::json::object();
};

struct VerifierOptions {
    std::uint64_t window = 25;
    std::uint64_t zbound = 64;
};

AuditReport audit_change_counts(const ReplayState& rs);
AuditReport audit_markers(const ReplayState& rs);
AuditReport audit_streams(const ReplayState& rs);
AuditReport true_path_estimate(const ReplayState& rs, const VerifierOptions& opt);
AuditReport check_r_outcomes(const ReplayState& rs);
AuditReport check_s_at_quiescence(const ReplayState& rs, const VerifierOptions& opt);
AuditReport omega_consistency(const ReplayState& rs);

std::vector<AuditReport> run_all_audits(const ReplayState& rs,
                                        const VerifierOptions& opt);

// The final exception lists as the event log alone determines them; must
// coincide with the engine's stored snapshot.
Snapshot snapshot_from_replay(const ReplayState& rs);

nlohmann::json reports_to_json(const std::vector<AuditReport>& reports);

}  // namespace sdeg
