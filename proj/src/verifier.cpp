#include "sdeg/verifier.hpp"

#include <algorithm>
#include <sstream>

#include "sdeg/omega.hpp"

namespace sdeg {

namespace {

FiniteSet body_from_data(const nlohmann::json& j) {
    FiniteSet f;
    for (const auto& v : j) f.insert(v.get<std::uint64_t>());
    return f;
}

std::string describe(const Node& n) { return n.to_string(); }

}  // namespace

bool ReplayState::ElementLog::member_at_end(std::uint64_t stage) const {
    bool member = true;
    for (const auto& c : changes) {
        if (c.stage > stage) break;
        member = !c.extract;
    }
    return member;
}

ReplayState ReplayState::build(const Trace& trace) {
    ReplayState rs;
    bool have_header = false;
    auto note = [&rs](const std::string& msg) { rs.anomalies.push_back(msg); };

    for (const auto& e : trace) {
        Node node = Node::from_names(e.node).value_or(root());
        switch (e.kind) {
            case EventKind::header: {
                have_header = true;
                if (auto m = parse_mode(e.data.value("mode", "theorem2"))) rs.mode = *m;
                rs.budget = e.data.value("stages", std::uint64_t{0});
                rs.ordering = e.data.value("ordering", "s-first") == std::string("r-first")
                                  ? RequirementOrdering::r_first
                                  : RequirementOrdering::s_first;
                rs.tree = StrategyTree(rs.ordering);
                break;
            }
            case EventKind::axiom_entered: {
                std::uint64_t op = e.data.at("op").get<std::uint64_t>();
                rs.operators[op].push_back({e.data.at("x").get<std::uint64_t>(),
                                            body_from_data(e.data.at("body")), e.stage});
                rs.quiet_after = std::max(rs.quiet_after, e.stage);
                break;
            }
            case EventKind::warning:
                break;
            case EventKind::witness_appointed:
                rs.nodes[node].witness = e.data.at("x").get<std::uint64_t>();
                break;
            case EventKind::realized:
                break;
            case EventKind::extractA: {
                std::uint64_t x = e.data.at("x").get<std::uint64_t>();
                auto& log = rs.a_log[x];
                if (!log.member_now())
                    note("extractA of absent element " + std::to_string(x));
                log.changes.push_back({e.stage, e.substage, true});
                rs.quiet_after = std::max(rs.quiet_after, e.stage);
                break;
            }
            case EventKind::extractD: {
                std::uint64_t d = e.data.at("d").get<std::uint64_t>();
                auto& log = rs.d_log[d];
                if (!log.member_now())
                    note("extractD of absent element " + std::to_string(d));
                log.changes.push_back({e.stage, e.substage, true});
                rs.quiet_after = std::max(rs.quiet_after, e.stage);
                break;
            }
            case EventKind::enumD: {
                std::uint64_t d = e.data.at("d").get<std::uint64_t>();
                auto& log = rs.d_log[d];
                if (log.member_now())
                    note("enumD of present element " + std::to_string(d));
                log.changes.push_back({e.stage, e.substage, false});
                rs.quiet_after = std::max(rs.quiet_after, e.stage);
                break;
            }
            case EventKind::marker_defined: {
                std::uint64_t value = e.data.at("marker").get<std::uint64_t>();
                auto it = rs.markers.find(value);
                if (it != rs.markers.end()) {
                    it->second.definitions++;
                } else {
                    MarkerReplay m;
                    m.owner = node;
                    m.z = e.data.at("z").get<std::uint64_t>();
                    m.x = e.data.at("x").get<std::uint64_t>();
                    m.value = value;
                    m.stage_defined = e.stage;
                    rs.markers.emplace(value, std::move(m));
                }
                rs.quiet_after = std::max(rs.quiet_after, e.stage);
                break;
            }
            case EventKind::marker_canceled: {
                std::uint64_t value = e.data.at("marker").get<std::uint64_t>();
                auto it = rs.markers.find(value);
                if (it == rs.markers.end())
                    note("cancel of unknown marker " + std::to_string(value));
                else
                    it->second.stage_canceled = e.stage;
                rs.quiet_after = std::max(rs.quiet_after, e.stage);
                break;
            }
            case EventKind::gamma_axiom:
                rs.nodes[node].gamma.push_back({e.data.at("z").get<std::uint64_t>(),
                                                body_from_data(e.data.at("body")),
                                                e.stage});
                rs.quiet_after = std::max(rs.quiet_after, e.stage);
                break;
            case EventKind::delta_axiom:
                rs.nodes[node].delta.push_back({e.data.at("x").get<std::uint64_t>(),
                                                body_from_data(e.data.at("body")),
                                                e.stage});
                rs.quiet_after = std::max(rs.quiet_after, e.stage);
                break;
            case EventKind::stream_add:
                rs.nodes[node].stream.emplace(e.data.at("x").get<std::uint64_t>(),
                                              e.stage);
                break;
            case EventKind::outcome_taken: {
                auto& nr = rs.nodes[node];
                nr.last_outcome_stage = e.stage;
                nr.last_outcome_case = e.data.value("case", "");
                rs.outcomes.push_back({e.stage, node, nr.last_outcome_case});
                if (e.data.contains("witness")) {
                    DiagRecord diag;
                    diag.witness = e.data.at("witness").get<std::uint64_t>();
                    diag.restraint = body_from_data(e.data.at("restraint"));
                    diag.stage = e.stage;
                    diag.via = nr.last_outcome_case;
                    rs.nodes[node.parent()].diag = diag;
                }
                if (e.data.contains("st")) {
                    std::uint64_t expect = e.data.at("st").get<std::uint64_t>();
                    if (expect != nr.stream.size())
                        note("stream size mismatch at " + describe(node) + " stage " +
                             std::to_string(e.stage) + ": trace says " +
                             std::to_string(expect) + ", replay has " +
                             std::to_string(nr.stream.size()));
                }
                break;
            }
            case EventKind::setup_created: {
                auto& nr = rs.nodes[node];
                SetupRecord setup;
                setup.edge_index = e.data.at("i").get<std::uint64_t>();
                setup.witness = e.data.at("x").get<std::uint64_t>();
                setup.z = e.data.at("z").get<std::uint64_t>();
                setup.marker = e.data.at("marker").get<std::uint64_t>();
                setup.stage = e.stage;
                nr.setups.push_back(setup);
                if (!node.is_root()) rs.nodes[node.parent()].witness.reset();
                rs.quiet_after = std::max(rs.quiet_after, e.stage);
                break;
            }
            case EventKind::gamma_killed:
                break;
            case EventKind::initialize: {
                auto& nr = rs.nodes[node];
                nr.stream.clear();
                nr.witness.reset();
                nr.gamma.clear();
                nr.delta.clear();
                nr.setups.clear();
                nr.diag.reset();
                nr.last_outcome_stage.reset();
                nr.last_outcome_case.clear();
                for (auto& [value, m] : rs.markers)
                    if (m.owner == node && !m.stage_canceled) m.stage_canceled = e.stage;
                break;
            }
            case EventKind::stage_end: {
                auto f = Node::from_names(
                    e.data.at("f").get<std::vector<std::string>>());
                rs.f_history.push_back(f.value_or(root()));
                if (e.data.contains("st")) {
                    std::uint64_t expect = e.data.at("st").get<std::uint64_t>();
                    std::uint64_t got = rs.nodes.count(root())
                                            ? rs.nodes.at(root()).stream.size()
                                            : 0;
                    if (expect != got)
                        note("stream size mismatch at the root, stage " +
                             std::to_string(e.stage));
                }
                break;
            }
        }
    }
    if (!have_header) note("trace has no header record");
    return rs;
}

bool ReplayState::a_member_now(std::uint64_t x) const {
    if (mode == Mode::corollary3)
        return d_member_now(4 * x) && d_member_now(4 * x + 2);
    auto it = a_log.find(x);
    return it == a_log.end() || it->second.member_now();
}

bool ReplayState::a_member_at_end(std::uint64_t x, std::uint64_t stage) const {
    if (mode == Mode::corollary3)
        return d_member_at_end(4 * x, stage) && d_member_at_end(4 * x + 2, stage);
    auto it = a_log.find(x);
    return it == a_log.end() || it->second.member_at_end(stage);
}

bool ReplayState::d_member_now(std::uint64_t x) const {
    auto it = d_log.find(x);
    return it == d_log.end() || it->second.member_now();
}

bool ReplayState::d_member_at_end(std::uint64_t x, std::uint64_t stage) const {
    auto it = d_log.find(x);
    return it == d_log.end() || it->second.member_at_end(stage);
}

std::uint64_t ReplayState::last_init_before(const Node& node, std::uint64_t s) const {
    std::uint64_t bound = std::min<std::uint64_t>(s, f_history.size());
    for (std::uint64_t u = bound; u-- > 0;)
        if (compare_priority(f_history[u], node) == PriorityCmp::higher) return u;
    return 0;
}

std::uint64_t ReplayState::p_of(const Node& node, std::uint64_t s) const {
    return std::max<std::uint64_t>(node.depth(), last_init_before(node, s));
}

std::size_t ReplayState::count_case(const std::string& label) const {
    std::size_t n = 0;
    for (const auto& o : outcomes)
        if (o.label == label) ++n;
    return n;
}

const std::vector<StoredAxiom>& ReplayState::op_axioms(std::uint64_t listing_id) const {
    static const std::vector<StoredAxiom> empty;
    auto it = operators.find(listing_id);
    return it == operators.end() ? empty : it->second;
}

// ---------------------------------------------------------------------------
// audits

AuditReport audit_change_counts(const ReplayState& rs) {
    AuditReport report;
    report.name = "change_counts";
    std::uint64_t a_changes = 0, d_changes = 0;
    for (const auto& [x, log] : rs.a_log) {
        a_changes += log.changes.size();
        if (log.changes.size() > 1 ||
            (log.changes.size() == 1 && !log.changes[0].extract)) {
            report.pass = false;
            report.notes.push_back("element " + std::to_string(x) +
                                   ": A log is not a single extraction (" +
                                   std::to_string(log.changes.size()) + " changes)");
        }
    }
    for (const auto& [x, log] : rs.d_log) {
        d_changes += log.changes.size();
        bool ok = log.changes.empty() ||
                  (log.changes.size() == 1 && log.changes[0].extract) ||
                  (log.changes.size() == 2 && log.changes[0].extract &&
                   !log.changes[1].extract);
        if (!ok) {
            report.pass = false;
            std::ostringstream msg;
            msg << "element " << x << ": D log breaks the out/back-in pattern:";
            for (const auto& c : log.changes)
                msg << " " << (c.extract ? "extract" : "enumerate") << "@" << c.stage;
            report.notes.push_back(msg.str());
        }
    }
    for (const auto& a : rs.anomalies)
        if (a.find("extract") != std::string::npos ||
            a.find("enumD") != std::string::npos) {
            report.pass = false;
            report.notes.push_back(a);
        }
    report.stats = {{"a_changes", a_changes}, {"d_changes", d_changes}};
    return report;
}

AuditReport audit_markers(const ReplayState& rs) {
    AuditReport report;
    report.name = "markers";
    for (const auto& [value, m] : rs.markers) {
        if (m.definitions != 1) {
            report.pass = false;
            report.notes.push_back("marker value " + std::to_string(value) +
                                   " defined " + std::to_string(m.definitions) +
                                   " times");
        }
        // While defined and its use still sits in A, the marker sits in D.
        std::uint64_t until = m.stage_canceled ? *m.stage_canceled : rs.budget + 1;
        for (std::uint64_t s = m.stage_defined; s <= rs.budget && s < until; ++s) {
            if (!rs.a_member_at_end(m.x, s)) continue;
            if (!rs.d_member_at_end(value, s)) {
                report.pass = false;
                report.notes.push_back("marker " + std::to_string(value) +
                                       " out of D at stage " + std::to_string(s) +
                                       " while defined with its use in A");
                break;
            }
        }
    }
    for (const auto& a : rs.anomalies)
        if (a.find("marker") != std::string::npos) {
            report.pass = false;
            report.notes.push_back(a);
        }
    report.stats = {{"markers", rs.markers.size()}};
    return report;
}

AuditReport audit_streams(const ReplayState& rs) {
    AuditReport report;
    report.name = "streams";
    // Bound at every true stage; replay/engine size agreement came free
    // during the build pass. Initialization stamps are carried forward
    // stage by stage instead of rescanning the history per query.
    std::map<Node, std::uint64_t> last_init;
    for (const auto& [node, nr] : rs.nodes) last_init[node] = 0;
    for (std::uint64_t s = 1; s < rs.f_history.size(); ++s) {
        const Node& prev = rs.f_history[s - 1];
        for (auto& [node, stamp] : last_init)
            if (compare_priority(prev, node) == PriorityCmp::higher) stamp = s - 1;
        const Node& f = rs.f_history[s];
        for (std::size_t len = 0; len <= f.depth(); ++len) {
            Node prefix = f.prefix(len);
            auto it = rs.nodes.find(prefix);
            if (it == rs.nodes.end()) continue;
            std::uint64_t p = std::max<std::uint64_t>(len, last_init[prefix]);
            for (const auto& [elem, added] : it->second.stream) {
                if (added > s) continue;
                if (elem < p || elem >= s) {
                    report.pass = false;
                    report.notes.push_back(
                        "stream of " + describe(prefix) + " breaks its bound at stage " +
                        std::to_string(s) + ": element " + std::to_string(elem) +
                        " outside [" + std::to_string(p) + "," + std::to_string(s) + ")");
                }
            }
        }
    }
    for (const auto& a : rs.anomalies)
        if (a.find("stream") != std::string::npos) {
            report.pass = false;
            report.notes.push_back(a);
        }
    return report;
}

AuditReport true_path_estimate(const ReplayState& rs, const VerifierOptions& opt) {
    AuditReport report;
    report.name = "true_path_estimate";
    std::uint64_t stages = rs.f_history.empty() ? 0 : rs.f_history.size() - 1;
    std::uint64_t window = std::min<std::uint64_t>(opt.window, stages);
    if (stages < 2) {
        report.verdict = false;
        report.notes.push_back("budget too small for a stability estimate");
        return report;
    }
    std::uint64_t from = stages - window + 1;

    // Leftmost prefix that still gets appointed inside the window, grown
    // depth by depth.
    Node estimate;
    for (std::size_t len = 1;; ++len) {
        std::optional<Node> best;
        for (std::uint64_t s = from; s <= stages; ++s) {
            const Node& f = rs.f_history[s];
            if (f.depth() < len || !estimate.is_prefix_of(f)) continue;
            Node cand = f.prefix(len);
            if (!best || left_of(cand, *best)) best = cand;
        }
        if (!best) break;
        estimate = *best;
    }

    // Depth to which the estimate is settled: its prefixes up to there saw
    // no initialization inside the window. The tail of a healthy estimate
    // is always young, so stability is a depth, not a flag.
    nlohmann::json per_prefix = nlohmann::json::array();
    std::size_t stable_depth = 0;
    bool still_stable = true;
    for (std::size_t len = 0; len <= estimate.depth(); ++len) {
        Node prefix = estimate.prefix(len);
        std::uint64_t true_stages = 0, inits = 0, last_init = 0;
        for (std::uint64_t s = 1; s <= stages; ++s) {
            if (prefix.is_prefix_of(rs.f_history[s])) ++true_stages;
            if (compare_priority(rs.f_history[s], prefix) == PriorityCmp::higher) {
                ++inits;
                last_init = s;
            }
        }
        if (last_init >= from) still_stable = false;
        if (still_stable) stable_depth = len;
        per_prefix.push_back({{"node", prefix.names()},
                              {"true_stages", true_stages},
                              {"initializations", inits},
                              {"last_initialization", last_init}});
    }
    report.stats = {{"estimate", estimate.names()},
                    {"window", window},
                    {"stable_depth", stable_depth},
                    {"prefixes", per_prefix}};
    report.notes.push_back("leftmost window-cofinal string: " + describe(estimate) +
                           ", settled to depth " + std::to_string(stable_depth));
    return report;
}

AuditReport check_r_outcomes(const ReplayState& rs) {
    AuditReport report;
    report.name = "r_outcomes";
    std::uint64_t checked = 0;
    for (const auto& [child, nr] : rs.nodes) {
        if (!nr.last_outcome_stage || child.is_root()) continue;
        Node alpha = child.parent();
        if (rs.tree.requirement(alpha).is_s()) continue;
        // Only the node's standing outcome counts: skip if it was
        // initialized after this outcome.
        if (rs.last_init_before(alpha, rs.budget + 1) > *nr.last_outcome_stage)
            continue;
        auto alpha_it = rs.nodes.find(alpha);
        const ReplayState::NodeReplay* ar =
            alpha_it == rs.nodes.end() ? nullptr : &alpha_it->second;
        const Outcome& o = child.path.back();
        std::uint64_t phi_id =
            listing_index_of(rs.ordering, rs.tree.requirement(alpha));
        auto phi = rs.op_axioms(phi_id);
        auto in_phi_d_now = [&](std::uint64_t x) {
            for (const auto& ax : phi)
                if (ax.head == x &&
                    ax.body.subset_of([&](std::uint64_t v) { return rs.d_member_now(v); }))
                    return true;
            return false;
        };

        // Also require this outcome to be the node's most recent one.
        bool is_last = true;
        for (const auto& [other, onr] : rs.nodes) {
            if (other.is_root() || other.parent() != alpha) continue;
            if (onr.last_outcome_stage &&
                *onr.last_outcome_stage > *nr.last_outcome_stage)
                is_last = false;
        }
        if (!is_last) continue;

        if (o == Outcome::stop()) {
            ++checked;
            if (!ar || !ar->diag) {
                report.pass = false;
                report.notes.push_back(describe(alpha) +
                                       " stopped without a diagonalization record");
                continue;
            }
            std::uint64_t x = ar->diag->witness;
            if (rs.a_member_now(x)) {
                report.pass = false;
                report.notes.push_back(describe(alpha) + ": extracted witness " +
                                       std::to_string(x) + " is back in A");
            }
            if (!in_phi_d_now(x)) {
                report.pass = false;
                report.notes.push_back(describe(alpha) + ": stopped witness " +
                                       std::to_string(x) +
                                       " is not in Phi(D) at the budget");
            }
            for (std::uint64_t s = ar->diag->stage; s <= rs.budget; ++s)
                for (auto v : ar->diag->restraint)
                    if (!rs.d_member_at_end(v, s)) {
                        report.pass = false;
                        report.notes.push_back(describe(alpha) + ": restrained use " +
                                               std::to_string(v) +
                                               " left D at stage " + std::to_string(s));
                        s = rs.budget;
                        break;
                    }
        } else if (o == Outcome::wait()) {
            ++checked;
            if (!ar || !ar->witness) continue;  // still hunting for a witness
            std::uint64_t x = *ar->witness;
            if (!rs.a_member_now(x)) {
                report.pass = false;
                report.notes.push_back(describe(alpha) + ": waiting witness " +
                                       std::to_string(x) + " left A");
            }
            if (in_phi_d_now(x)) {
                report.pass = false;
                report.notes.push_back(describe(alpha) + ": waiting witness " +
                                       std::to_string(x) +
                                       " is realized at the budget");
            }
        }
    }
    report.stats = {{"nodes_checked", checked}};
    return report;
}

AuditReport check_s_at_quiescence(const ReplayState& rs, const VerifierOptions& opt) {
    AuditReport report;
    report.name = "s_at_quiescence";
    if (rs.budget < opt.window || rs.quiet_after > rs.budget - opt.window) {
        report.verdict = false;
        report.notes.push_back(
            "not quiescent: last set/operator/marker change at stage " +
            std::to_string(rs.quiet_after) + ", window " + std::to_string(opt.window));
        return report;
    }
    if (rs.f_history.size() <= rs.budget) {
        report.verdict = false;
        report.notes.push_back("trace is missing stage records");
        return report;
    }
    const Node& f = rs.f_history[rs.budget];
    auto a_now = [&](std::uint64_t v) { return rs.a_member_now(v); };
    auto d_now = [&](std::uint64_t v) { return rs.d_member_now(v); };
    Oracle joined = join(a_now, d_now);

    std::uint64_t s_checked = 0, delta_checked = 0;
    for (std::size_t len = 0; len < f.depth(); ++len) {
        Node beta = f.prefix(len);
        if (!rs.tree.requirement(beta).is_s()) continue;
        if (rs.tree.status_along(beta, f) != Status::active) continue;
        ++s_checked;
        std::uint64_t phi_id = listing_index_of(rs.ordering, rs.tree.requirement(beta));
        auto phi = rs.op_axioms(phi_id);
        auto it = rs.nodes.find(beta);
        const std::vector<StoredAxiom> empty_store;
        const auto& gamma = it == rs.nodes.end() ? empty_store : it->second.gamma;
        for (std::uint64_t z = 0; z < opt.zbound; ++z) {
            bool lhs = false;
            for (const auto& ax : phi)
                if (ax.head == z && ax.head < rs.budget && ax.body.subset_of(joined))
                    lhs = true;
            bool rhs = false;
            for (const auto& ax : gamma)
                if (ax.head == z && ax.body.subset_of(d_now)) rhs = true;
            if (lhs != rhs) {
                report.pass = false;
                report.notes.push_back(
                    describe(beta) + ": Phi(A+D) and Gamma(D) disagree at head " +
                    std::to_string(z) + " (" + std::to_string(lhs) + " vs " +
                    std::to_string(rhs) + ")");
            }
        }
    }

    // Delta equalities along edges of the final path.
    for (std::size_t len = 1; len <= f.depth(); ++len) {
        Node edge = f.prefix(len);
        const Outcome& o = edge.path.back();
        if (o.tag != Outcome::Tag::i) continue;
        Node alpha = edge.parent();
        auto betas = rs.tree.active_s_ancestors(alpha);
        if (o.index >= betas.size()) continue;
        ++delta_checked;
        std::uint64_t phi_id =
            listing_index_of(rs.ordering, rs.tree.requirement(betas[o.index]));
        auto phi = rs.op_axioms(phi_id);
        // Z = Phi_i(A+D) at the budget, heads below the budget.
        auto z_member = [&](std::uint64_t z) {
            for (const auto& ax : phi)
                if (ax.head == z && ax.body.subset_of(joined)) return true;
            return false;
        };
        auto it = rs.nodes.find(edge);
        const std::vector<StoredAxiom> empty_store;
        const auto& delta = it == rs.nodes.end() ? empty_store : it->second.delta;
        for (std::uint64_t x = 0; x < opt.zbound; ++x) {
            bool covered = false, value = false;
            for (const auto& ax : delta) {
                if (ax.head != x) continue;
                covered = true;
                if (ax.body.subset_of(z_member)) value = true;
            }
            if (!covered) continue;
            if (value != rs.a_member_now(x)) {
                report.pass = false;
                report.notes.push_back(describe(edge) + ": Delta(Phi(A+D)) and A " +
                                       "disagree at " + std::to_string(x));
            }
        }
    }
    report.stats = {{"s_nodes_checked", s_checked},
                    {"delta_edges_checked", delta_checked},
                    {"quiet_after", rs.quiet_after}};
    return report;
}

AuditReport omega_consistency(const ReplayState& rs) {
    AuditReport report;
    report.name = "omega_consistency";
    if (rs.mode != Mode::corollary3) {
        report.pass = false;
        report.notes.push_back("not a corollary3 trace; nothing to check");
        return report;
    }
    for (const auto& [value, m] : rs.markers)
        if (value % 2 == 0) {
            report.pass = false;
            report.notes.push_back("even marker " + std::to_string(value));
        }
    // Blocks: at most one extraction, no re-entry of block elements.
    std::map<std::uint64_t, std::uint64_t> block_hits;
    for (const auto& [v, log] : rs.d_log) {
        if (log.changes.empty()) continue;
        std::uint64_t n = 0;
        if (!omega_block_member(v, n)) continue;
        for (const auto& c : log.changes) {
            if (!c.extract) {
                report.pass = false;
                report.notes.push_back("block element " + std::to_string(v) +
                                       " re-entered D");
            }
        }
        block_hits[n] += 1;
    }
    for (const auto& [n, hits] : block_hits)
        if (hits > 1) {
            report.pass = false;
            report.notes.push_back("block " + std::to_string(n) + " lost " +
                                   std::to_string(hits) + " elements");
        }
    // The derived A events must match Omega(D) at every stage end, on every
    // touched block.
    for (const auto& [n, hits] : block_hits) {
        (void)hits;
        for (std::uint64_t s = 0; s <= rs.budget; ++s) {
            bool via_blocks = rs.d_member_at_end(4 * n, s) && rs.d_member_at_end(4 * n + 2, s);
            auto it = rs.a_log.find(n);
            bool via_events = it == rs.a_log.end() || it->second.member_at_end(s);
            if (via_blocks != via_events) {
                report.pass = false;
                report.notes.push_back("A(" + std::to_string(n) + ") and Omega(D)(" +
                                       std::to_string(n) + ") disagree at stage " +
                                       std::to_string(s));
                break;
            }
        }
    }
    // And the A events must only ever name touched blocks.
    for (const auto& [x, log] : rs.a_log) {
        if (log.changes.empty()) continue;
        if (!block_hits.count(x)) {
            report.pass = false;
            report.notes.push_back("derived A extraction of " + std::to_string(x) +
                                   " without a block extraction");
        }
    }
    report.stats = {{"blocks_touched", block_hits.size()}};
    return report;
}

std::vector<AuditReport> run_all_audits(const ReplayState& rs,
                                        const VerifierOptions& opt) {
    std::vector<AuditReport> out;
    out.push_back(audit_change_counts(rs));
    out.push_back(audit_markers(rs));
    out.push_back(audit_streams(rs));
    out.push_back(true_path_estimate(rs, opt));
    out.push_back(check_r_outcomes(rs));
    out.push_back(check_s_at_quiescence(rs, opt));
    if (rs.mode == Mode::corollary3) out.push_back(omega_consistency(rs));
    return out;
}

Snapshot snapshot_from_replay(const ReplayState& rs) {
    Snapshot s;
    s.stage = rs.budget;
    for (const auto& [x, log] : rs.a_log) {
        if (log.changes.empty() || log.member_now()) continue;
        s.a_extracted.push_back(x);
        s.a_stable_since[x] = log.changes.back().stage;
    }
    for (const auto& [v, log] : rs.d_log) {
        if (log.changes.empty()) continue;
        if (!log.member_now())
            s.d_extracted.push_back(v);
        else
            s.d_reentered.push_back(v);
        s.d_stable_since[v] = log.changes.back().stage;
    }
    return s;
}

nlohmann::json reports_to_json(const std::vector<AuditReport>& reports) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : reports)
        out.push_back({{"name", r.name},
                       {"pass", r.pass},
                       {"verdict", r.verdict},
                       {"notes", r.notes},
                       {"stats", r.stats}});
    return out;
}

}  // namespace sdeg
