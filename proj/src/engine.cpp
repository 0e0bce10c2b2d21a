#include "sdeg/engine.hpp"

#include <algorithm>

#include "sdeg/omega.hpp"

namespace sdeg {

const char* mode_name(Mode m) {
    return m == Mode::theorem2 ? "theorem2" : "corollary3";
}

std::optional<Mode> parse_mode(const std::string& name) {
    if (name == "theorem2") return Mode::theorem2;
    if (name == "corollary3") return Mode::corollary3;
    return std::nullopt;
}

bool AxiomStore::add(std::uint64_t head, FiniteSet body, std::uint64_t stage) {
    if (!index_.emplace(head, body).second) return false;
    axioms_.push_back({head, std::move(body), stage});
    return true;
}

bool AxiomStore::contains(std::uint64_t head, const FiniteSet& body) const {
    return index_.count({head, body}) != 0;
}

bool AxiomStore::member(std::uint64_t head, const Oracle& oracle) const {
    for (const auto& ax : axioms_)
        if (ax.head == head && ax.body.subset_of(oracle)) return true;
    return false;
}

bool NodeParams::clean() const {
    return !witness && witness_history.empty() && stream.empty() && !stopped &&
           gamma.empty() && delta.empty() && setups.empty() && !diag;
}

namespace {

nlohmann::json stability_to_json(const std::map<std::uint64_t, std::uint64_t>& m) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [elem, stage] : m) j[std::to_string(elem)] = stage;
    return j;
}

std::map<std::uint64_t, std::uint64_t> stability_from_json(const nlohmann::json& j) {
    std::map<std::uint64_t, std::uint64_t> m;
    for (const auto& [key, value] : j.items())
        m[std::stoull(key)] = value.get<std::uint64_t>();
    return m;
}

}  // namespace

nlohmann::json Snapshot::to_json() const {
    return {{"stage", stage},
            {"a_extracted", a_extracted},
            {"d_extracted", d_extracted},
            {"d_reentered", d_reentered},
            {"a_stable_since", stability_to_json(a_stable_since)},
            {"d_stable_since", stability_to_json(d_stable_since)}};
}

Snapshot Snapshot::from_json(const nlohmann::json& j) {
    Snapshot s;
    s.stage = j.at("stage").get<std::uint64_t>();
    s.a_extracted = j.at("a_extracted").get<std::vector<std::uint64_t>>();
    s.d_extracted = j.at("d_extracted").get<std::vector<std::uint64_t>>();
    s.d_reentered = j.at("d_reentered").get<std::vector<std::uint64_t>>();
    if (j.contains("a_stable_since"))
        s.a_stable_since = stability_from_json(j.at("a_stable_since"));
    if (j.contains("d_stable_since"))
        s.d_stable_since = stability_from_json(j.at("d_stable_since"));
    return s;
}

Engine::Engine(EngineConfig config, std::vector<OperatorSchedule> schedules)
    : config_(config), tree_(config.ordering) {
    for (auto& sched : schedules) {
        if (sched.kind != OperatorKind::s())
            throw ScheduleError("operator " + std::to_string(sched.id) +
                                ": the construction consumes s-operators only");
        if (auto v = validate(sched))
            throw ScheduleError("operator " + std::to_string(sched.id) + " stage " +
                                std::to_string(v->stage) + ": " + v->message);
        if (schedules_.count(sched.id))
            throw ScheduleError("duplicate operator id " + std::to_string(sched.id));
        std::uint64_t id = sched.id;
        schedules_.emplace(id, std::move(sched));
    }
}

// ---------------------------------------------------------------------------
// state access

NodeParams& Engine::node_params(const Node& n) {
    auto it = params_.find(n);
    if (it != params_.end()) return it->second;
    NodeParams np;
    np.last_init_stage = scan_last_init(n);
    return params_.emplace(n, std::move(np)).first->second;
}

const NodeParams* Engine::find_params(const Node& n) const {
    auto it = params_.find(n);
    return it == params_.end() ? nullptr : &it->second;
}

std::uint64_t Engine::scan_last_init(const Node& n) const {
    // Initializations happen at stage ends; stage u initialized n iff f_u has
    // higher priority than n. f_0 = root covers "everything starts initialized".
    for (std::size_t u = f_history_.size(); u-- > 0;)
        if (compare_priority(f_history_[u], n) == PriorityCmp::higher)
            return u;
    return 0;
}

std::uint64_t Engine::last_init(const Node& n) { return node_params(n).last_init_stage; }

std::uint64_t Engine::p_of(const Node& n) {
    return std::max<std::uint64_t>(n.depth(), last_init(n));
}

void Engine::mention(std::uint64_t v) { mention_ = std::max(mention_, v); }

std::uint64_t Engine::new_number() {
    std::uint64_t v = mention_ + 1;
    if (config_.mode == Mode::corollary3 && v % 2 == 0) ++v;  // markers stay odd
    mention_ = v;
    return v;
}

Oracle Engine::a_oracle() const {
    return [this](std::uint64_t x) { return a_contains(x); };
}

Oracle Engine::d_oracle() const {
    return [this](std::uint64_t x) { return d_.contains(x); };
}

bool Engine::a_contains(std::uint64_t x) const {
    if (config_.mode == Mode::corollary3)
        return d_.contains(4 * x) && d_.contains(4 * x + 2);
    return a_.contains(x);
}

const MaterializedOperator& Engine::op_for(const Requirement& req) {
    return op_for_listing(listing_index_of(config_.ordering, req));
}

const MaterializedOperator& Engine::op_for_listing(std::uint64_t listing_index) {
    auto it = operators_.find(listing_index);
    if (it != operators_.end()) return it->second;
    MaterializedOperator empty;
    empty.id = listing_index;
    return operators_.emplace(listing_index, std::move(empty)).first->second;
}

// ---------------------------------------------------------------------------
// markers

const MarkerRecord* Engine::defined_marker(const Node& owner, std::uint64_t z,
                                           std::uint64_t x) const {
    auto oit = defined_index_.find(owner);
    if (oit == defined_index_.end()) return nullptr;
    auto it = oit->second.find({z, x});
    return it == oit->second.end() ? nullptr : &markers_[it->second];
}

const MarkerRecord* Engine::defined_marker_by_value(std::uint64_t value) const {
    auto it = marker_by_value_.find(value);
    if (it == marker_by_value_.end()) return nullptr;
    const MarkerRecord& m = markers_[it->second];
    return m.defined ? &m : nullptr;
}

std::vector<const MarkerRecord*> Engine::defined_markers_of(const Node& owner) const {
    std::vector<const MarkerRecord*> out;
    auto oit = defined_index_.find(owner);
    if (oit == defined_index_.end()) return out;
    for (const auto& [pair, idx] : oit->second) out.push_back(&markers_[idx]);
    std::sort(out.begin(), out.end(),
              [](const MarkerRecord* a, const MarkerRecord* b) {
                  return a->value < b->value;
              });
    return out;
}

MarkerRecord& Engine::define_marker(const Node& owner, std::uint64_t z,
                                    std::uint64_t x) {
    if (defined_marker(owner, z, x))
        throw InvariantTrap("marker for pair (" + std::to_string(z) + "," +
                            std::to_string(x) + ") already defined");
    MarkerRecord rec;
    rec.owner = owner;
    rec.z = z;
    rec.x = x;
    rec.value = new_number();
    rec.stage_appointed = stage_;
    if (marker_by_value_.count(rec.value))
        throw InvariantTrap("marker value reused: " + std::to_string(rec.value));
    marker_by_value_[rec.value] = markers_.size();
    defined_index_[owner][{z, x}] = markers_.size();
    markers_.push_back(rec);
    emit(EventKind::marker_defined, owner,
         {{"marker", rec.value}, {"z", z}, {"x", x}});
    return markers_.back();
}

void Engine::cancel_marker(std::uint64_t value, const std::string& reason) {
    auto it = marker_by_value_.find(value);
    if (it == marker_by_value_.end() || !markers_[it->second].defined)
        throw InvariantTrap("cancel of undefined marker " + std::to_string(value));
    MarkerRecord& m = markers_[it->second];
    m.defined = false;
    m.stage_canceled = stage_;
    defined_index_[m.owner].erase({m.z, m.x});
    emit(EventKind::marker_canceled, m.owner,
         {{"marker", value}, {"z", m.z}, {"x", m.x}, {"reason", reason}});
}

FiniteSet Engine::dhat_for(const std::vector<Node>& betas, std::uint64_t x) const {
    FiniteSet out;
    for (const auto& beta : betas) {
        auto oit = defined_index_.find(beta);
        if (oit == defined_index_.end()) continue;
        for (const auto& [pair, idx] : oit->second)
            if (pair.second == x) out.insert(markers_[idx].value);
    }
    return out;
}

// ---------------------------------------------------------------------------
// events

void Engine::emit(EventKind kind, const Node& node, nlohmann::json data) {
    Event e;
    e.kind = kind;
    e.stage = stage_;
    e.substage = substage_;
    e.node = node.names();
    e.data = std::move(data);
    trace_.push_back(std::move(e));
}

void Engine::emit_plain(EventKind kind, nlohmann::json data) {
    emit(kind, root(), std::move(data));
}

// ---------------------------------------------------------------------------
// run loop

void Engine::run() {
    if (ran_) throw std::logic_error("Engine::run called twice");
    ran_ = true;

    emit_plain(EventKind::header,
               {{"mode", mode_name(config_.mode)},
                {"stages", config_.stage_budget},
                {"ordering", config_.ordering == RequirementOrdering::s_first
                                 ? "s-first"
                                 : "r-first"},
                {"format", 1}});

    // Stage 0: both sets start as all of omega, everything initialized.
    f_history_.push_back(root());
    emit_plain(EventKind::stage_end, {{"f", root().names()}, {"stopped", false}});

    for (std::uint64_t s = 1; s <= config_.stage_budget; ++s) run_stage(s);

    if (snapshots_.empty() || snapshots_.back().stage != config_.stage_budget)
        snapshots_.push_back(snapshot(config_.stage_budget));
}

void Engine::run_stage(std::uint64_t s) {
    stage_ = s;
    substage_ = 0;
    stage_stopped_ = false;
    mention(s);
    materialize_entries(s);

    // Substage 0: the root is appointed and its stream refreshed to [0, s).
    // The root is never initialized after stage 0, so the only novelty is s-1.
    NodeParams& rp = node_params(root());
    rp.last_active_stage = s;
    if (!rp.stream.count(s - 1)) {
        rp.stream.insert(s - 1);
        emit(EventKind::stream_add, root(), {{"x", s - 1}});
    }

    Node tip = root();
    for (std::uint64_t t = 1; t < s && !stage_stopped_; ++t) {
        substage_ = t;
        tip = act(tip);
    }

    end_of_stage(tip);
}

void Engine::materialize_entries(std::uint64_t s) {
    for (auto& [id, sched] : schedules_) {
        auto it = sched.entries.find(s);
        if (it == sched.entries.end()) continue;
        std::string why;
        auto resolved = resolve_axiom(sched, it->second, s, why);
        if (!resolved) {
            emit_plain(EventKind::warning,
                       {{"op", id}, {"reason", why}, {"what", "axiom_dropped"}});
            continue;
        }
        MaterializedOperator& op = operators_[id];
        op.id = id;
        op.kind = sched.kind;
        bool dup = false;
        for (const auto& ax : op.axioms)
            if (ax.head == resolved->head && ax.body == resolved->body) dup = true;
        if (dup) {
            emit_plain(EventKind::warning,
                       {{"op", id}, {"reason", "duplicate axiom"}, {"what", "axiom_dropped"}});
            continue;
        }
        mention(resolved->head);
        for (auto v : resolved->body) mention(v);
        op.axioms.push_back({resolved->head, resolved->body, s});
        emit_plain(EventKind::axiom_entered,
                   {{"op", id},
                    {"x", resolved->head},
                    {"body", resolved->body.elements()}});
    }
}

std::optional<std::uint64_t> Engine::resolve_witness_ref(const WitnessRef& ref,
                                                         std::string& why_not) {
    auto node = Node::from_names(ref.node);
    if (!node || !tree_.valid(*node)) {
        why_not = "witness reference names no tree node";
        return std::nullopt;
    }
    const NodeParams* np = find_params(*node);
    if (!np || !np->witness) {
        why_not = "referenced node has no current witness";
        return std::nullopt;
    }
    return *np->witness;
}

std::optional<LiteralAxiom> Engine::resolve_axiom(const OperatorSchedule& sched,
                                                  const Axiom& axiom, std::uint64_t s,
                                                  std::string& why_not) {
    LiteralAxiom out;
    if (auto* h = std::get_if<std::uint64_t>(&axiom.head)) {
        out.head = *h;
    } else {
        auto v = resolve_witness_ref(std::get<WitnessRef>(axiom.head), why_not);
        if (!v) return std::nullopt;
        out.head = *v;
    }
    if (out.head >= s) {
        why_not = "resolved head not below entry stage";
        return std::nullopt;
    }

    if (auto* f = std::get_if<FiniteSet>(&axiom.body)) {
        out.body = *f;
    } else {
        const auto& sym = std::get<SymbolicBody>(axiom.body);
        std::uint64_t v = 0;
        if (auto* wref = std::get_if<WitnessRef>(&sym.ref)) {
            auto w = resolve_witness_ref(*wref, why_not);
            if (!w) return std::nullopt;
            switch (sym.side) {
                case JoinSide::none: v = *w; break;
                case JoinSide::a_side: v = 2 * *w; break;
                case JoinSide::d_side: v = 2 * *w + 1; break;
            }
        } else {
            const auto& mref = std::get<MarkerRef>(sym.ref);
            std::uint64_t pair_x = 0;
            if (auto* lit = std::get_if<std::uint64_t>(&mref.x)) {
                pair_x = *lit;
            } else {
                auto w = resolve_witness_ref(std::get<WitnessRef>(mref.x), why_not);
                if (!w) return std::nullopt;
                pair_x = *w;
            }
            // The marker slot of the operator's own strategy: any node
            // assigned the requirement at listing position op_id. Most
            // recently appointed wins when several incarnations exist.
            const MarkerRecord* found = nullptr;
            for (const auto& m : markers_) {
                if (!m.defined || m.z != mref.z || m.x != pair_x) continue;
                Requirement owner_req = tree_.requirement(m.owner);
                if (listing_index_of(config_.ordering, owner_req) != mref.op_id) continue;
                if (!found || m.stage_appointed >= found->stage_appointed) found = &m;
            }
            if (!found) {
                why_not = "no defined marker for the referenced pair";
                return std::nullopt;
            }
            v = found->value;
        }
        out.body = FiniteSet{v};
    }

    if (!out.body.empty() && out.body.max() >= s) {
        why_not = "resolved body not below entry stage";
        return std::nullopt;
    }
    if (!sched.kind.body_ok(out.body)) {
        why_not = "resolved body breaks operator kind";
        return std::nullopt;
    }
    return out;
}

// ---------------------------------------------------------------------------
// substage dispatch

Node Engine::act(const Node& node) {
    if (tree_.requirement(node).is_s()) return act_s(node);
    return act_r(node);
}

Node Engine::appoint(const Node& parent, const Outcome& outcome,
                     const std::string& label, bool trim_stream,
                     nlohmann::json extra) {
    Node child = parent.child(outcome);
    NodeParams& cp = node_params(child);
    if (trim_stream) {
        // St(child) = St(parent) intersect [p, s). Stream additions are
        // strictly increasing per node and p moves only on initialization
        // (which empties the stream), so the intersection grows from the
        // child's current maximum.
        std::uint64_t p = std::max<std::uint64_t>(child.depth(), cp.last_init_stage);
        const NodeParams& pp = node_params(parent);
        if (!cp.stream.empty() && *cp.stream.begin() < p)
            throw InvariantTrap("stream element dropped at " + child.to_string());
        auto it = cp.stream.empty() ? pp.stream.lower_bound(p)
                                    : pp.stream.upper_bound(*cp.stream.rbegin());
        for (; it != pp.stream.end() && *it < stage_; ++it) {
            if (*it < p) continue;
            cp.stream.insert(cp.stream.end(), *it);
            emit(EventKind::stream_add, child, {{"x", *it}});
        }
    }
    cp.last_active_stage = stage_;
    extra["case"] = label;
    extra["st"] = cp.stream.size();
    emit(EventKind::outcome_taken, child, std::move(extra));
    return child;
}

// Maintaining Gamma: sweep the operator's axioms, decoded over the join.
Node Engine::act_s(const Node& beta) {
    NodeParams& bp = node_params(beta);
    const MaterializedOperator& phi = op_for(tree_.requirement(beta));
    for (const auto& ax : phi.axioms) {
        FiniteSet a_part, d_part;
        split_join_body(ax.body, a_part, d_part);
        if (a_part.empty()) {
            if (bp.gamma.add(ax.head, d_part, stage_))
                emit(EventKind::gamma_axiom, beta,
                     {{"z", ax.head}, {"body", d_part.elements()}});
            continue;
        }
        if (a_part.size() != 1)
            throw InvariantTrap("s-operator axiom with a non-singleton use");
        std::uint64_t x = *a_part.begin();
        if (a_contains(x) && x < stage_) {
            if (!defined_marker(beta, ax.head, x)) {
                MarkerRecord& m = define_marker(beta, ax.head, x);
                if (bp.gamma.add(ax.head, FiniteSet{m.value}, stage_))
                    emit(EventKind::gamma_axiom, beta,
                         {{"z", ax.head}, {"body", FiniteSet{m.value}.elements()}});
            }
        } else if (!a_contains(x)) {
            if (const MarkerRecord* m = defined_marker(beta, ax.head, x)) {
                std::uint64_t value = m->value;
                extract_from_d(value, "correction");
                cancel_marker(value, "correction");
            }
        }
    }
    return appoint(beta, Outcome::infty(), "1", true);
}

Node Engine::act_r(const Node& alpha) {
    NodeParams& ap = node_params(alpha);
    // A stopped node holds its extracted witness; anywhere else a defined
    // witness outside A means someone extracted it without cancellation.
    if (ap.witness && !ap.stopped && !a_contains(*ap.witness))
        throw InvariantTrap("witness of " + alpha.to_string() +
                            " left A without cancellation");

    const std::vector<Node> betas = tree_.active_s_ancestors(alpha);
    const MaterializedOperator& phi = op_for(tree_.requirement(alpha));

    const bool stopped = ap.stopped;
    const bool has_witness = ap.witness.has_value();
    std::optional<Realization> real;
    if (!stopped && has_witness) real = realization_of(phi, *ap.witness);
    bool all_cleared = false;
    if (real) {
        all_cleared = true;
        for (std::size_t i = 0; i < betas.size(); ++i)
            if (!cleared_current(*ap.witness, real->f, betas, i)) all_cleared = false;
    }
    std::optional<ClearedSetup> cs;
    if (!stopped && has_witness) cs = find_cleared_setup(alpha, betas);

    const bool g_stopped = stopped;
    const bool g_pick = !stopped && !has_witness;
    const bool g_diag = !stopped && has_witness && real.has_value() && all_cleared;
    const bool g_stream = !stopped && has_witness && cs.has_value() && !g_diag;
    const bool g_wait = !stopped && has_witness && !real.has_value() && !cs.has_value();
    const bool g_setup = !stopped && has_witness && real.has_value() && !all_cleared &&
                         !cs.has_value();

    int fired = int(g_stopped) + int(g_pick) + int(g_diag) + int(g_stream) +
                int(g_wait) + int(g_setup);
    if (fired != 1)
        throw InvariantTrap("R-dispatch guards not mutually exclusive at " +
                            alpha.to_string());

    if (g_stopped) return appoint(alpha, Outcome::stop(), "2.1", true);
    if (g_pick) return do_pick_witness(alpha, ap);
    if (g_diag) return do_diagonalize(alpha, ap, *real, betas);
    if (g_stream) return do_stream_diagonalize(alpha, ap, *cs);
    if (g_wait) return appoint(alpha, Outcome::wait(), "2.2.2", true);
    // Setup: exactly one i < n must be uncleared.
    std::vector<std::size_t> uncleared;
    for (std::size_t i = 0; i < betas.size(); ++i)
        if (!cleared_current(*ap.witness, real->f, betas, i)) uncleared.push_back(i);
    if (uncleared.size() != 1)
        throw InvariantTrap("setup without a unique blocking strategy at " +
                            alpha.to_string());
    return do_setup(alpha, ap, *real, betas, uncleared.front());
}

std::optional<Engine::Realization> Engine::realization_of(
    const MaterializedOperator& phi, std::uint64_t x) const {
    // Among the axioms currently placing x into Phi(D), select the body that
    // has sat inside D for the longest time; canonical-index order breaks ties.
    std::optional<Realization> best;
    std::vector<FiniteSet> seen;
    for (const auto& ax : phi.axioms) {
        if (ax.head != x) continue;
        if (!ax.body.subset_of([&](std::uint64_t v) { return d_.contains(v); }))
            continue;
        if (std::find(seen.begin(), seen.end(), ax.body) != seen.end()) continue;
        seen.push_back(ax.body);
        std::uint64_t since = 0;
        for (auto v : ax.body) {
            auto cs = d_.contained_since(v);
            since = std::max(since, *cs);  // subset_of guarantees presence
        }
        if (!best || since < best->since ||
            (since == best->since && ax.body < best->f))
            best = Realization{ax.body, since};
    }
    return best;
}

bool Engine::cleared_current(std::uint64_t x, const FiniteSet& fx,
                             const std::vector<Node>& betas, std::size_t i) {
    if (fx.empty()) return true;
    std::uint64_t d = *fx.begin();
    const MarkerRecord* m = defined_marker_by_value(d);
    if (!m || m->owner != betas[i] || m->x != x) return true;  // d outside D-hat_{i,x}
    // d = gamma_i(z, x): extraction of x forces extracting d unless z keeps
    // its place through the corrected sets.
    FiniteSet dhat = dhat_for(betas, x);
    const MaterializedOperator& phi_i = op_for(tree_.requirement(betas[i]));
    Oracle a2 = [this, x](std::uint64_t v) { return v != x && a_contains(v); };
    Oracle d2 = [this, &dhat, &fx](std::uint64_t v) {
        if (fx.contains(v)) return true;
        if (dhat.contains(v)) return false;
        return d_.contains(v);
    };
    Oracle joined = join(a2, d2);
    for (const auto& ax : phi_i.axioms)
        if (ax.head == m->z && ax.body.subset_of(joined)) return true;
    return false;
}

bool Engine::cleared_setup(const SetupRecord& setup, const std::vector<Node>& betas) {
    // Would z_x survive extracting x, killing its remaining markers, and
    // restoring the setup's use into D?
    FiniteSet dhat = dhat_for(betas, setup.witness);
    FiniteSet fx{setup.marker};
    const MaterializedOperator& phi_i = op_for(tree_.requirement(betas[setup.edge_index]));
    std::uint64_t x = setup.witness;
    Oracle a2 = [this, x](std::uint64_t v) { return v != x && a_contains(v); };
    Oracle d2 = [this, &dhat, &fx](std::uint64_t v) {
        if (fx.contains(v)) return true;
        if (dhat.contains(v)) return false;
        return d_.contains(v);
    };
    Oracle joined = join(a2, d2);
    for (const auto& ax : phi_i.axioms)
        if (ax.head == setup.z && ax.body.subset_of(joined)) return true;
    return false;
}

std::optional<Engine::ClearedSetup> Engine::find_cleared_setup(
    const Node& alpha, const std::vector<Node>& betas) {
    if (live_setups_ == 0) return std::nullopt;
    for (std::size_t i = 0; i < betas.size(); ++i) {
        const NodeParams* ep = find_params(alpha.child(Outcome::i(i)));
        if (!ep) continue;
        std::vector<SetupRecord> sorted = ep->setups;
        std::sort(sorted.begin(), sorted.end(),
                  [](const SetupRecord& a, const SetupRecord& b) {
                      return a.witness < b.witness;
                  });
        for (const auto& setup : sorted)
            if (cleared_setup(setup, betas)) return ClearedSetup{i, setup};
    }
    return std::nullopt;
}

// Case 2.2.1: appoint the least suitable number, if any; either way the
// stage stops here.
Node Engine::do_pick_witness(const Node& alpha, NodeParams& ap) {
    std::uint64_t p = p_of(alpha.child(Outcome::wait()));
    std::optional<std::uint64_t> pick;
    for (auto v : ap.stream) {
        if (v < p) continue;
        if (!a_contains(v)) continue;
        pick = v;
        break;
    }
    if (pick) {
        for (const auto& w : ap.witness_history)
            if (*pick <= w.value)
                throw InvariantTrap("witness appointments must increase at " +
                                    alpha.to_string());
        ap.witness = *pick;
        ap.witness_history.push_back({*pick, stage_, false});
        mention(*pick);
        emit(EventKind::witness_appointed, alpha, {{"x", *pick}, {"via", "pick"}});
    }
    stage_stopped_ = true;
    return appoint(alpha, Outcome::wait(), "2.2.1", true);
}

// Case 2.2.3.1: the witness is cleared everywhere; diagonalize with it.
Node Engine::do_diagonalize(const Node& alpha, NodeParams& ap,
                            const Realization& real, const std::vector<Node>& betas) {
    std::uint64_t x = *ap.witness;
    emit(EventKind::realized, alpha,
         {{"x", x}, {"f", real.f.elements()}, {"since", real.since}});
    std::optional<std::uint64_t> use;
    if (!real.f.empty()) use = *real.f.begin();
    extract_from_a(x, use, "2.2.3.1");
    if (use) {
        // If the use is a live marker for (z, x), cancel it so later
        // correction never pulls it out of D; uniqueness by injectivity.
        const MarkerRecord* m = defined_marker_by_value(*use);
        if (m && m->x == x) {
            bool of_active = false;
            for (const auto& beta : betas)
                if (m->owner == beta) of_active = true;
            if (of_active) cancel_marker(*use, "2.2.3.1");
        }
    }
    ap.diag = DiagRecord{x, real.f, stage_, "2.2.3.1"};
    ap.stopped = true;
    stage_stopped_ = true;
    return appoint(alpha, Outcome::stop(), "2.2.3.1", true,
                   {{"witness", x}, {"restraint", real.f.elements()}});
}

// Case 2.2.3.2: a stream witness with a setup has come clear; diagonalize
// with it and put its use back into D.
Node Engine::do_stream_diagonalize(const Node& alpha, NodeParams& ap,
                                   const ClearedSetup& cs) {
    std::uint64_t x = cs.setup.witness;
    if (ap.witness && *ap.witness != x) {
        for (auto& w : ap.witness_history)
            if (w.value == *ap.witness) w.canceled = true;
    }
    if (!ap.witness || *ap.witness != x) {
        ap.witness = x;
        ap.witness_history.push_back({x, stage_, false});
        emit(EventKind::witness_appointed, alpha, {{"x", x}, {"via", "stream"}});
    }
    if (a_contains(x)) extract_from_a(x, cs.setup.marker, "2.2.3.2");
    if (defined_marker_by_value(cs.setup.marker))
        cancel_marker(cs.setup.marker, "2.2.3.2");
    if (!d_.contains(cs.setup.marker)) enum_into_d(cs.setup.marker, "2.2.3.2");
    ap.diag = DiagRecord{x, FiniteSet{cs.setup.marker}, stage_, "2.2.3.2"};
    ap.stopped = true;
    stage_stopped_ = true;
    return appoint(alpha, Outcome::stop(), "2.2.3.2", true,
                   {{"witness", x}, {"restraint", FiniteSet{cs.setup.marker}.elements()}});
}

// Case 2.2.3.3: record the setup, feed the stream, kill the blocked
// strategies' fresh markers, and take the infinitary outcome.
Node Engine::do_setup(const Node& alpha, NodeParams& ap, const Realization& real,
                      const std::vector<Node>& betas, std::size_t i) {
    std::uint64_t x = *ap.witness;
    emit(EventKind::realized, alpha,
         {{"x", x}, {"f", real.f.elements()}, {"since", real.since}});
    std::uint64_t d = *real.f.begin();
    const MarkerRecord* m = defined_marker_by_value(d);
    if (!m || m->owner != betas[i] || m->x != x)
        throw InvariantTrap("setup use is not the blocking marker at " +
                            alpha.to_string());
    std::uint64_t z = m->z;

    Node edge = alpha.child(Outcome::i(i));
    NodeParams& ep = node_params(edge);

    // (a) the stream gains x; Delta_i gains <x, {z}>.
    if (!ep.stream.count(x)) {
        ep.stream.insert(x);
        emit(EventKind::stream_add, edge, {{"x", x}});
    }
    if (ep.delta.add(x, FiniteSet{z}, stage_))
        emit(EventKind::delta_axiom, edge,
             {{"x", x}, {"body", FiniteSet{z}.elements()}});
    ep.setups.push_back({i, x, z, d, stage_});
    ++live_setups_;
    emit(EventKind::setup_created, edge,
         {{"x", x}, {"z", z}, {"marker", d}, {"i", i}});

    // (b) kill every fresh marker of the strategies at or below rank i.
    std::uint64_t window =
        std::max(ep.last_active_stage, ep.last_init_stage);
    std::vector<std::uint64_t> killed;
    for (std::size_t j = i; j < betas.size(); ++j) {
        for (const MarkerRecord* rec : defined_markers_of(betas[j])) {
            if (rec->x <= alpha.depth()) continue;
            if (rec->stage_appointed <= window) continue;
            std::uint64_t value = rec->value;
            extract_from_d(value, "kill");
            cancel_marker(value, "kill");
            killed.push_back(value);
        }
    }
    emit(EventKind::gamma_killed, edge,
         {{"markers", killed}, {"i", i}, {"window", window}});

    // (c) everything small currently in A and off the stream enters
    // Delta_i unconditionally.
    for (std::uint64_t y = 0; y < stage_; ++y) {
        if (!a_contains(y)) continue;
        if (ep.stream.count(y)) continue;
        if (ep.delta.add(y, FiniteSet{}, stage_))
            emit(EventKind::delta_axiom, edge, {{"x", y}, {"body", nlohmann::json::array()}});
    }

    // (d) the witness is spent.
    for (auto& w : ap.witness_history)
        if (w.value == x) w.canceled = true;
    ap.witness.reset();

    // (e) end the substage; the stream is cumulative here, no trim.
    return appoint(alpha, Outcome::i(i), "2.2.3.3", false);
}

// ---------------------------------------------------------------------------
// set mutation

void Engine::extract_from_a(std::uint64_t x, const std::optional<std::uint64_t>& use,
                            const std::string& reason) {
    if (config_.mode == Mode::theorem2) {
        a_.extract(x, stage_, substage_);
        emit(EventKind::extractA, root(), {{"x", x}, {"reason", reason}});
        return;
    }
    // corollary3: removing x from A means breaking its block, one element
    // only, never the realization use.
    FiniteSet block = omega_block(x);
    for (auto v : block)
        if (!d_.contains(v))
            throw InvariantTrap("block of " + std::to_string(x) + " already broken");
    std::optional<std::uint64_t> target;
    if (use && *use % 2 == 0 && block.contains(*use)) {
        for (auto v : block)
            if (v != *use) target = v;
    } else {
        FiniteSet restrained = omega_restraints();
        for (auto v : block)
            if (!restrained.contains(v)) {
                target = v;
                break;
            }
        if (!target)
            throw InvariantTrap("both elements of block " + std::to_string(x) +
                                " are restrained");
    }
    d_.extract(*target, stage_, substage_);
    emit(EventKind::extractD, root(),
         {{"d", *target}, {"reason", "omega_block"}, {"for", x}});
    emit(EventKind::extractA, root(),
         {{"x", x}, {"reason", reason}, {"derived", true}});
}

void Engine::extract_from_d(std::uint64_t d, const std::string& reason) {
    d_.extract(d, stage_, substage_);
    emit(EventKind::extractD, root(), {{"d", d}, {"reason", reason}});
}

void Engine::enum_into_d(std::uint64_t d, const std::string& reason) {
    d_.enumerate(d, stage_, substage_);
    emit(EventKind::enumD, root(), {{"d", d}, {"reason", reason}});
}

FiniteSet Engine::omega_restraints() const {
    FiniteSet out;
    for (const auto& [node, np] : params_) {
        if (!np.diag || !np.stopped) continue;
        for (auto v : np.diag->restraint)
            if (v % 2 == 0) out.insert(v);
    }
    return out;
}

// ---------------------------------------------------------------------------
// end of stage

void Engine::end_of_stage(const Node& f) {
    f_history_.push_back(f);

    // Initialize everything of lower priority than f_s. Nodes in their
    // blank state just advance their initialization stamp silently.
    for (auto& [node, np] : params_) {
        if (compare_priority(f, node) != PriorityCmp::higher) continue;
        np.last_init_stage = stage_;
        auto oit = defined_index_.find(node);
        bool owns_markers = oit != defined_index_.end() && !oit->second.empty();
        if (np.clean() && !owns_markers) continue;
        initialize_node(node, np);
    }

    emit_plain(EventKind::stage_end,
               {{"f", f.names()},
                {"stopped", stage_stopped_},
                {"st", node_params(root()).stream.size()}});

    if (config_.snapshot_every > 0 && stage_ % config_.snapshot_every == 0)
        snapshots_.push_back(snapshot(stage_));
}

void Engine::initialize_node(const Node& node, NodeParams& np) {
    np.witness.reset();
    np.witness_history.clear();
    np.stream.clear();
    np.stopped = false;
    np.gamma.clear();
    np.delta.clear();
    live_setups_ -= np.setups.size();
    np.setups.clear();
    np.diag.reset();
    auto oit = defined_index_.find(node);
    if (oit != defined_index_.end()) {
        for (const auto& [pair, idx] : oit->second) {
            markers_[idx].defined = false;
            markers_[idx].stage_canceled = stage_;
        }
        defined_index_.erase(oit);
    }
    emit(EventKind::initialize, node, {});
}

Snapshot Engine::snapshot(std::uint64_t stage) const {
    Snapshot s;
    s.stage = stage;
    if (config_.mode == Mode::theorem2) {
        for (const auto& [x, log] : a_.logs())
            if (!log.empty() && log.back().kind == TrackedSet::Transition::extract) {
                s.a_extracted.push_back(x);
                s.a_stable_since[x] = log.back().stage;
            }
    } else {
        // Derived: blocks touched by any D change, no longer full.
        std::map<std::uint64_t, std::uint64_t> candidates;  // block -> change stage
        for (const auto& [v, log] : d_.logs()) {
            std::uint64_t n = 0;
            if (!log.empty() && omega_block_member(v, n)) {
                auto it = candidates.find(n);
                std::uint64_t at = log.back().stage;
                candidates[n] = it == candidates.end() ? at : std::max(it->second, at);
            }
        }
        for (const auto& [n, at] : candidates)
            if (!a_contains(n)) {
                s.a_extracted.push_back(n);
                s.a_stable_since[n] = at;
            }
    }
    for (const auto& [v, log] : d_.logs()) {
        if (log.empty()) continue;
        if (log.back().kind == TrackedSet::Transition::extract)
            s.d_extracted.push_back(v);
        else
            s.d_reentered.push_back(v);
        s.d_stable_since[v] = log.back().stage;
    }
    return s;
}

}  // namespace sdeg
