#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sdeg/engine.hpp"
#include "sdeg/scenarios.hpp"
#include "sdeg/verifier.hpp"

using namespace sdeg;

namespace {

Engine run_scenario(const std::string& name, std::uint64_t stages,
                    Mode mode = Mode::theorem2) {
    EngineConfig cfg;
    cfg.mode = mode;
    cfg.stage_budget = stages;
    Engine engine(cfg, *builtin_scenario(name));
    engine.run();
    return engine;
}

std::size_t count_events(const Trace& t, EventKind kind) {
    std::size_t n = 0;
    for (const auto& e : t)
        if (e.kind == kind) ++n;
    return n;
}

std::vector<Event> events_of(const Trace& t, EventKind kind) {
    std::vector<Event> out;
    for (const auto& e : t)
        if (e.kind == kind) out.push_back(e);
    return out;
}

const Node kFirstR = Node{}.child(Outcome::infty());

}  // namespace

TEST_CASE("budget 0 leaves only the header and stage 0") {
    EngineConfig cfg;
    cfg.stage_budget = 0;
    Engine engine(cfg, {});
    engine.run();
    REQUIRE(engine.trace().size() == 2);
    CHECK(engine.trace()[0].kind == EventKind::header);
    CHECK(engine.trace()[1].kind == EventKind::stage_end);
    CHECK(engine.f_history().size() == 1);
}

TEST_CASE("budget 1 runs one stage with the root substage only") {
    EngineConfig cfg;
    cfg.stage_budget = 1;
    Engine engine(cfg, {});
    engine.run();
    CHECK(engine.f_history().back() == root());
    CHECK(count_events(engine.trace(), EventKind::outcome_taken) == 0);
    CHECK(count_events(engine.trace(), EventKind::stream_add) == 1);  // {0} into the root
}

TEST_CASE("empty adversary never touches the sets") {
    Engine engine = run_scenario("empty", 50);
    CHECK(count_events(engine.trace(), EventKind::extractA) == 0);
    CHECK(count_events(engine.trace(), EventKind::extractD) == 0);
    CHECK(count_events(engine.trace(), EventKind::enumD) == 0);
    CHECK(count_events(engine.trace(), EventKind::marker_defined) == 0);

    SUBCASE("the first R-node appoints witness 2 at stage 3 and waits") {
        auto picks = events_of(engine.trace(), EventKind::witness_appointed);
        REQUIRE(!picks.empty());
        CHECK(picks[0].stage == 3);
        CHECK(picks[0].node == kFirstR.names());
        CHECK(picks[0].data.at("x") == 2);
        CHECK(engine.f_history()[3] == kFirstR.child(Outcome::wait()));
    }
    SUBCASE("witness appointments strictly increase per node") {
        std::map<std::vector<std::string>, std::uint64_t> last;
        for (const auto& e : events_of(engine.trace(), EventKind::witness_appointed)) {
            auto it = last.find(e.node);
            if (it != last.end()) CHECK(e.data.at("x").get<std::uint64_t>() > it->second);
            last[e.node] = e.data.at("x").get<std::uint64_t>();
        }
    }
}

TEST_CASE("identical configurations give byte-identical traces") {
    Engine a = run_scenario("setup-then-release", 40);
    Engine b = run_scenario("setup-then-release", 40);
    CHECK(trace_to_text(a.trace()) == trace_to_text(b.trace()));
}

TEST_CASE("diag1 diagonalizes once and stops") {
    Engine engine = run_scenario("diag1", 60);
    auto extracts = events_of(engine.trace(), EventKind::extractA);
    REQUIRE(extracts.size() == 1);
    CHECK(extracts[0].stage == 5);
    CHECK(extracts[0].data.at("x") == 2);
    CHECK(!engine.a_contains(2));

    std::size_t diag_fires = 0;
    for (const auto& e : events_of(engine.trace(), EventKind::outcome_taken))
        if (e.data.at("case") == "2.2.3.1") ++diag_fires;
    CHECK(diag_fires == 1);

    // From the diagonalization on, the stop edge stays on the stage path.
    Node stop_edge = kFirstR.child(Outcome::stop());
    for (std::uint64_t s = 5; s < engine.f_history().size(); ++s)
        CHECK(stop_edge.is_prefix_of(engine.f_history()[s]));
}

TEST_CASE("maintaining Gamma: unconditional, use-carrying, and corrected axioms") {
    // One operator for the root strategy: first the witness as a use, then an
    // unconditional head. One operator for the first R-node realizing the
    // witness with an empty set, so the witness leaves A and the marker needs
    // correction.
    auto schedules = *builtin_scenario("empty");
    OperatorSchedule phi_s;
    phi_s.id = 0;
    {
        SymbolicBody body;
        body.ref = WitnessRef{{"infty"}};
        body.side = JoinSide::a_side;
        phi_s.entries.emplace(5, Axiom{std::uint64_t{0}, body});
        phi_s.entries.emplace(6, Axiom{std::uint64_t{5}, FiniteSet{}});
        phi_s.entries.emplace(8, Axiom{std::uint64_t{4}, FiniteSet{7}});  // D-use 3
    }
    OperatorSchedule phi_r;
    phi_r.id = 1;
    phi_r.entries.emplace(6, Axiom{WitnessRef{{"infty"}}, FiniteSet{}});

    EngineConfig cfg;
    cfg.stage_budget = 12;
    Engine engine(cfg, {phi_s, phi_r});
    engine.run();

    // Stage 5: marker 6 appointed for the pair (0, 2); stage 6: the witness
    // is extracted; stage 7: correction pulls the marker out of D.
    auto defined = events_of(engine.trace(), EventKind::marker_defined);
    REQUIRE(defined.size() == 1);
    CHECK(defined[0].stage == 5);
    CHECK(defined[0].data.at("marker") == 6);
    CHECK(defined[0].data.at("z") == 0);
    CHECK(defined[0].data.at("x") == 2);

    auto extracts_a = events_of(engine.trace(), EventKind::extractA);
    REQUIRE(extracts_a.size() == 1);
    CHECK(extracts_a[0].stage == 6);

    auto extracts_d = events_of(engine.trace(), EventKind::extractD);
    REQUIRE(extracts_d.size() == 1);
    CHECK(extracts_d[0].stage == 7);
    CHECK(extracts_d[0].data.at("d") == 6);
    CHECK(extracts_d[0].data.at("reason") == "correction");
    CHECK(!engine.d_set().contains(6));

    // The root's Gamma holds the marker axiom, the unconditional one, and
    // the self-correcting copy of the odd-side use.
    const auto& gamma = engine.params().at(root()).gamma;
    CHECK(gamma.contains(0, FiniteSet{6}));
    CHECK(gamma.contains(5, FiniteSet{}));
    CHECK(gamma.contains(4, FiniteSet{3}));
}

TEST_CASE("setup1: the blocked witness becomes a setup and the marker is killed") {
    Engine engine = run_scenario("setup1", 80);
    Node edge = kFirstR.child(Outcome::i(0));

    auto setups = events_of(engine.trace(), EventKind::setup_created);
    REQUIRE(setups.size() == 1);
    CHECK(setups[0].stage == 8);
    CHECK(setups[0].node == edge.names());
    CHECK(setups[0].data.at("x") == 2);
    CHECK(setups[0].data.at("z") == 0);
    CHECK(setups[0].data.at("marker") == 6);

    SUBCASE("the killed marker leaves D exactly once and stays out") {
        const auto* log = engine.d_set().log_for(6);
        REQUIRE(log);
        REQUIRE(log->size() == 1);
        CHECK((*log)[0].kind == TrackedSet::Transition::extract);
        CHECK((*log)[0].stage == 8);
    }
    SUBCASE("the stream and Delta hold the setup witness") {
        const auto& ep = engine.params().at(edge);
        CHECK(ep.stream.count(2) == 1);
        CHECK(ep.delta.contains(2, FiniteSet{0}));
        REQUIRE(ep.setups.size() == 1);
        CHECK(ep.setups[0].witness == 2);
        CHECK(ep.setups[0].marker == 6);
    }
    SUBCASE("small A-members off the stream enter Delta unconditionally") {
        const auto& ep = engine.params().at(edge);
        for (std::uint64_t y : {0u, 1u, 3u, 4u, 5u, 6u, 7u})
            CHECK(ep.delta.contains(y, FiniteSet{}));
        CHECK(!ep.delta.contains(2, FiniteSet{}));
    }
    SUBCASE("the setup witness stays in A; the strategy re-arms with a larger one") {
        CHECK(engine.a_contains(2));
        auto picks = events_of(engine.trace(), EventKind::witness_appointed);
        bool repicked = false;
        for (const auto& e : picks)
            if (e.node == kFirstR.names() && e.stage == 9) {
                repicked = true;
                CHECK(e.data.at("x") == 8);
            }
        CHECK(repicked);
    }
    SUBCASE("the strategy repairs its marker at the next stage") {
        auto defined = events_of(engine.trace(), EventKind::marker_defined);
        REQUIRE(defined.size() == 2);
        CHECK(defined[0].data.at("marker") == 6);
        CHECK(defined[1].stage == 9);
        CHECK(defined[1].data.at("marker") == 10);
        CHECK(engine.d_set().contains(10));
    }
    SUBCASE("the infinitary edge shows up on the stage path once") {
        std::size_t on_path = 0;
        for (const auto& f : engine.f_history())
            if (edge.is_prefix_of(f)) ++on_path;
        CHECK(on_path == 1);
    }
}

TEST_CASE("a cyclic adversary grows the stream through repeated setups") {
    // Each round: the root sees the current witness as a use (head k), the
    // R-operator realizes that witness through the resulting marker, a setup
    // fires, and the strategy re-arms. Entry stages double because the
    // join-encoded use 2w must sit below its entry stage.
    OperatorSchedule phi_s, phi_r;
    phi_s.id = 0;
    phi_r.id = 1;
    std::uint64_t entry = 5;
    std::vector<std::uint64_t> setup_stages;
    for (std::uint64_t k = 0; k < 5; ++k) {
        SymbolicBody use;
        use.ref = WitnessRef{{"infty"}};
        use.side = JoinSide::a_side;
        phi_s.entries.emplace(entry, Axiom{k, use});

        SymbolicBody marker;
        marker.ref = MarkerRef{0, k, WitnessRef{{"infty"}}};
        phi_r.entries.emplace(entry + 3, Axiom{WitnessRef{{"infty"}}, marker});
        setup_stages.push_back(entry + 3);
        entry = 2 * entry + 7;
    }

    EngineConfig cfg;
    cfg.stage_budget = 200;
    Engine engine(cfg, {phi_s, phi_r});
    engine.run();

    auto setups = events_of(engine.trace(), EventKind::setup_created);
    REQUIRE(setups.size() == 5);
    for (std::size_t k = 0; k < 5; ++k) CHECK(setups[k].stage == setup_stages[k]);

    SUBCASE("the stream accumulates every setup witness") {
        Node edge = kFirstR.child(Outcome::i(0));
        const auto& ep = engine.params().at(edge);
        CHECK(ep.stream == std::set<std::uint64_t>{2, 8, 20, 44, 92});
        CHECK(ep.setups.size() == 5);
        for (std::uint64_t x : {2u, 8u, 20u, 44u, 92u}) {
            CHECK(engine.a_contains(x));  // setups never extract
            bool covered = false;
            for (const auto& ax : ep.delta.axioms())
                if (ax.head == x && !ax.body.empty()) covered = true;
            CHECK(covered);
        }
    }
    SUBCASE("every kill takes exactly the markers born since the last visit") {
        // After each kill the root re-defines markers for the witnesses
        // still in A, so each later setup sweeps all repairs born since the
        // edge was last active: 5 + 4 + 3 + 2 + 1 killed, 5 repairs alive.
        std::size_t killed = 0, alive = 0;
        for (const auto& m : engine.markers()) {
            const auto* log = engine.d_set().log_for(m.value);
            if (m.defined) {
                ++alive;
                CHECK(log == nullptr);  // fresh and untouched inside D
            } else {
                ++killed;
                REQUIRE(log);
                REQUIRE(log->size() == 1);
                CHECK((*log)[0].kind == TrackedSet::Transition::extract);
                CHECK((*log)[0].stage == m.stage_canceled);
                CHECK(std::find(setup_stages.begin(), setup_stages.end(),
                                m.stage_canceled) != setup_stages.end());
            }
        }
        CHECK(killed == 15);
        CHECK(alive == 5);
    }
    SUBCASE("the full audit battery accepts the run") {
        ReplayState rs = ReplayState::build(engine.trace());
        for (const auto& report : run_all_audits(rs, {25, 64})) {
            CAPTURE(report.name);
            if (report.verdict) CHECK(report.pass);
        }
    }
    SUBCASE("the same cycle holds in corollary3 mode") {
        EngineConfig ocfg;
        ocfg.mode = Mode::corollary3;
        ocfg.stage_budget = 200;
        Engine omega(ocfg, {phi_s, phi_r});
        omega.run();
        auto osetups = events_of(omega.trace(), EventKind::setup_created);
        CHECK(osetups.size() == 5);
        ReplayState rs = ReplayState::build(omega.trace());
        CHECK(omega_consistency(rs).pass);
    }
}

TEST_CASE("setup-then-release: the stream witness diagonalizes") {
    Engine engine = run_scenario("setup-then-release", 80);

    std::size_t stream_diag = 0;
    std::uint64_t fire_stage = 0;
    for (const auto& e : events_of(engine.trace(), EventKind::outcome_taken))
        if (e.data.at("case") == "2.2.3.2") {
            ++stream_diag;
            fire_stage = e.stage;
        }
    REQUIRE(stream_diag == 1);
    CHECK(fire_stage == 10);

    SUBCASE("the setup use leaves D once and comes back once") {
        const auto* log = engine.d_set().log_for(6);
        REQUIRE(log);
        REQUIRE(log->size() == 2);
        CHECK((*log)[0].kind == TrackedSet::Transition::extract);
        CHECK((*log)[0].stage == 8);
        CHECK((*log)[1].kind == TrackedSet::Transition::enumerate);
        CHECK((*log)[1].stage == 10);
    }
    SUBCASE("the witness is out of A and realized through the restored use") {
        CHECK(!engine.a_contains(2));
        CHECK(engine.d_set().contains(6));
        const auto* alog = engine.a_set().log_for(2);
        REQUIRE(alog);
        CHECK(alog->size() == 1);
    }
    SUBCASE("the repaired marker is corrected away afterwards") {
        const auto* log = engine.d_set().log_for(10);
        REQUIRE(log);
        REQUIRE(log->size() == 1);
        CHECK((*log)[0].stage == 11);
    }
    SUBCASE("the infinitary edge was initialized when the strategy stopped") {
        Node edge = kFirstR.child(Outcome::i(0));
        const auto* ep = &engine.params().at(edge);
        CHECK(ep->stream.empty());
        CHECK(ep->setups.empty());
        CHECK(ep->delta.empty());
        CHECK(ep->last_init_stage >= 10);
    }
}

TEST_CASE("a cleared marker is canceled but its value stays inside D") {
    // The witness is realized through a live marker, but the marker's head
    // also has an unconditional axiom, so extraction is safe: the strategy
    // diagonalizes, cancels the marker, and restrains its value in D.
    OperatorSchedule phi_s, phi_r;
    phi_s.id = 0;
    {
        SymbolicBody use;
        use.ref = WitnessRef{{"infty"}};
        use.side = JoinSide::a_side;
        phi_s.entries.emplace(5, Axiom{std::uint64_t{0}, use});
        phi_s.entries.emplace(6, Axiom{std::uint64_t{0}, FiniteSet{}});
    }
    phi_r.id = 1;
    {
        SymbolicBody marker;
        marker.ref = MarkerRef{0, 0, WitnessRef{{"infty"}}};
        phi_r.entries.emplace(8, Axiom{WitnessRef{{"infty"}}, marker});
    }
    EngineConfig cfg;
    cfg.stage_budget = 60;
    Engine engine(cfg, {phi_s, phi_r});
    engine.run();

    auto diags = events_of(engine.trace(), EventKind::outcome_taken);
    bool fired = false;
    for (const auto& e : diags)
        if (e.data.at("case") == "2.2.3.1") {
            fired = true;
            CHECK(e.stage == 8);
            CHECK(e.data.at("witness") == 2);
            CHECK(e.data.at("restraint") == std::vector<std::uint64_t>{6});
        }
    REQUIRE(fired);
    CHECK(count_events(engine.trace(), EventKind::setup_created) == 0);

    // Canceled, never extracted: the D log of the marker stays empty.
    REQUIRE(engine.markers().size() == 1);
    CHECK(!engine.markers()[0].defined);
    CHECK(engine.d_set().log_for(6) == nullptr);
    CHECK(engine.d_set().contains(6));
    CHECK(!engine.a_contains(2));

    ReplayState rs = ReplayState::build(engine.trace());
    for (const auto& report : run_all_audits(rs, {25, 64})) {
        CAPTURE(report.name);
        if (report.verdict) CHECK(report.pass);
    }
}

TEST_CASE("a setup below two active strategies spares the higher one") {
    // diag1 stops the first R-node, so the second S-strategy activates and
    // the R-node below it runs under two active strategies. Both hold
    // markers for the same witness; the realization goes through the deeper
    // one, so the setup takes outcome i(1), kills only the deeper
    // strategy's marker, and leaves the root's alone.
    Node r1 = Node{}.child(Outcome::infty()).child(Outcome::stop()).child(Outcome::infty());
    WitnessRef r1_witness{r1.names()};

    OperatorSchedule phi_r0;
    phi_r0.id = 1;
    phi_r0.entries.emplace(5, Axiom{WitnessRef{{"infty"}}, FiniteSet{}});

    OperatorSchedule phi_s0;
    phi_s0.id = 0;
    {
        SymbolicBody use;
        use.ref = r1_witness;
        use.side = JoinSide::a_side;
        phi_s0.entries.emplace(11, Axiom{std::uint64_t{0}, use});
    }
    OperatorSchedule phi_s1;
    phi_s1.id = 2;
    {
        SymbolicBody use;
        use.ref = r1_witness;
        use.side = JoinSide::a_side;
        phi_s1.entries.emplace(11, Axiom{std::uint64_t{0}, use});
    }
    OperatorSchedule phi_r1;
    phi_r1.id = 3;
    {
        SymbolicBody marker;
        marker.ref = MarkerRef{2, 0, r1_witness};
        phi_r1.entries.emplace(14, Axiom{r1_witness, marker});
    }

    EngineConfig cfg;
    cfg.stage_budget = 60;
    Engine engine(cfg, {phi_s0, phi_r0, phi_s1, phi_r1});
    engine.run();

    // Root marker 12 for (0,5), deeper strategy's marker 13 for the same
    // witness; the setup at stage 14 must kill 13 only.
    auto setups = events_of(engine.trace(), EventKind::setup_created);
    REQUIRE(setups.size() == 1);
    CHECK(setups[0].stage == 14);
    CHECK(setups[0].data.at("i") == 1);
    CHECK(setups[0].data.at("x") == 5);
    CHECK(setups[0].data.at("marker") == 13);
    CHECK(setups[0].node == r1.child(Outcome::i(1)).names());

    bool root_marker_alive = false;
    for (const auto& m : engine.markers()) {
        if (m.value == 12) {
            CHECK(m.owner == root());
            root_marker_alive = m.defined;
        }
        if (m.value == 13) CHECK(!m.defined);
    }
    CHECK(root_marker_alive);
    CHECK(engine.d_set().contains(12));
    const auto* log13 = engine.d_set().log_for(13);
    REQUIRE(log13);
    CHECK(log13->size() == 1);

    bool i1_on_path = false;
    for (const auto& f : engine.f_history())
        if (r1.child(Outcome::i(1)).is_prefix_of(f)) i1_on_path = true;
    CHECK(i1_on_path);

    ReplayState rs = ReplayState::build(engine.trace());
    for (const auto& report : run_all_audits(rs, {25, 64})) {
        CAPTURE(report.name);
        if (report.verdict) CHECK(report.pass);
    }
}

TEST_CASE("realization ties break towards the least canonical body") {
    // The witness is 2; realization is first checked at stage 4, where a
    // singleton use alone or together with a competing empty body decides
    // the restraint.
    auto diag_restraint = [](std::vector<OperatorSchedule> schedules) {
        EngineConfig cfg;
        cfg.stage_budget = 20;
        Engine engine(cfg, std::move(schedules));
        engine.run();
        for (const auto& e : engine.trace())
            if (e.kind == EventKind::outcome_taken && e.data.at("case") == "2.2.3.1") {
                REQUIRE(e.stage == 4);
                return e.data.at("restraint").get<std::vector<std::uint64_t>>();
            }
        FAIL("no diagonalization fired");
        return std::vector<std::uint64_t>{};
    };

    OperatorSchedule lone;
    lone.id = 1;
    lone.entries.emplace(4, Axiom{std::uint64_t{2}, FiniteSet{3}});
    CHECK(diag_restraint({lone}) == std::vector<std::uint64_t>{3});

    OperatorSchedule both;
    both.id = 1;
    both.entries.emplace(3, Axiom{std::uint64_t{2}, FiniteSet{}});
    both.entries.emplace(4, Axiom{std::uint64_t{2}, FiniteSet{3}});
    // Both bodies have sat inside D since the start; the empty set wins.
    CHECK(diag_restraint({both}).empty());
}

TEST_CASE("initialization resets everything right of the stage path") {
    Engine engine = run_scenario("diag1", 20);
    // At stage 5 the strategy stopped; the wait subtree to the right lost its
    // parameters (the R1 node below it had witness 4).
    Node r1 = kFirstR.child(Outcome::wait()).child(Outcome::infty());
    const auto* rp = engine.params().count(r1) ? &engine.params().at(r1) : nullptr;
    REQUIRE(rp);
    CHECK(rp->last_init_stage >= 5);
    bool witness_at_4_canceled = true;
    for (const auto& w : rp->witness_history)
        if (w.value == 4) witness_at_4_canceled = false;
    CHECK(witness_at_4_canceled);  // history cleared by initialization
}

TEST_CASE("new numbers outrun everything mentioned") {
    Engine engine = run_scenario("setup1", 40);
    std::uint64_t budget = 40;
    CHECK(engine.mention_counter() >= budget);
    std::vector<std::uint64_t> values;
    for (const auto& m : engine.markers()) {
        CHECK(m.value > m.stage_appointed);
        values.push_back(m.value);
    }
    std::sort(values.begin(), values.end());
    CHECK(std::adjacent_find(values.begin(), values.end()) == values.end());
}

TEST_CASE("the r-first ordering puts an R-strategy at the root") {
    EngineConfig cfg;
    cfg.ordering = RequirementOrdering::r_first;
    cfg.stage_budget = 40;
    Engine engine(cfg, {});
    engine.run();

    // The root has no active S-ancestors, so it waits on a witness it picks
    // at stage 2 (the least stream element at or above its wait child's p).
    auto picks = std::vector<Event>{};
    for (const auto& e : engine.trace())
        if (e.kind == EventKind::witness_appointed) picks.push_back(e);
    REQUIRE(!picks.empty());
    CHECK(picks[0].stage == 2);
    CHECK(picks[0].node.empty());
    CHECK(picks[0].data.at("x") == 1);
    CHECK(engine.f_history()[2] == root().child(Outcome::wait()));

    ReplayState rs = ReplayState::build(engine.trace());
    for (const auto& report : run_all_audits(rs, {25, 64})) {
        CAPTURE(report.name);
        if (report.verdict) CHECK(report.pass);
    }
}

TEST_CASE("unresolvable symbolic axioms drop with a warning") {
    OperatorSchedule phi;
    phi.id = 1;
    SymbolicBody body;
    body.ref = MarkerRef{0, 9, std::uint64_t{3}};  // no such marker will exist
    phi.entries.emplace(4, Axiom{std::uint64_t{1}, body});
    EngineConfig cfg;
    cfg.stage_budget = 10;
    Engine engine(cfg, {phi});
    engine.run();
    CHECK(count_events(engine.trace(), EventKind::axiom_entered) == 0);
    CHECK(count_events(engine.trace(), EventKind::warning) == 1);
}

TEST_CASE("schedule validation gates construction") {
    OperatorSchedule bad;
    bad.id = 0;
    bad.entries.emplace(3, Axiom{std::uint64_t{7}, FiniteSet{}});  // head 7 >= 3
    EngineConfig cfg;
    CHECK_THROWS_AS(Engine(cfg, {bad}), ScheduleError);

    OperatorSchedule wrong_kind;
    wrong_kind.id = 0;
    wrong_kind.kind = OperatorKind::e2();
    CHECK_THROWS_AS(Engine(cfg, {wrong_kind}), ScheduleError);

    OperatorSchedule dup;
    dup.id = 0;
    CHECK_THROWS_AS(Engine(cfg, {dup, dup}), ScheduleError);
}

TEST_CASE("replay rebuilds the final sets") {
    Engine engine = run_scenario("setup-then-release", 60);
    ReplayState rs = ReplayState::build(engine.trace());
    for (std::uint64_t v = 0; v < 40; ++v) {
        CHECK(rs.a_member_now(v) == engine.a_contains(v));
        CHECK(rs.d_member_now(v) == engine.d_set().contains(v));
    }
    CHECK(rs.f_history.size() == engine.f_history().size());
    for (std::size_t s = 0; s < rs.f_history.size(); ++s)
        CHECK(rs.f_history[s] == engine.f_history()[s]);
}

TEST_CASE("snapshots list the exceptions and their settling stages exactly") {
    Engine engine = run_scenario("setup-then-release", 60);
    Snapshot s = engine.snapshot(60);
    CHECK(s.a_extracted == std::vector<std::uint64_t>{2});
    CHECK(s.d_extracted == std::vector<std::uint64_t>{10});
    CHECK(s.d_reentered == std::vector<std::uint64_t>{6});
    CHECK(s.a_stable_since.at(2) == 10);
    CHECK(s.d_stable_since.at(6) == 10);
    CHECK(s.d_stable_since.at(10) == 11);
    CHECK(engine.snapshots().back() == s);
    CHECK(Snapshot::from_json(s.to_json()) == s);
}
