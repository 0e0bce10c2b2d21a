#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "sdeg/adversary.hpp"
#include "sdeg/engine.hpp"
#include "sdeg/scenarios.hpp"
#include "sdeg/verifier.hpp"

using namespace sdeg;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/sdeg_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("adversary documents round-trip through JSON") {
    auto schedules = *builtin_scenario("setup-then-release");
    nlohmann::json doc = adversary_to_json(schedules);
    auto back = adversary_from_json(doc);
    REQUIRE(back.size() == schedules.size());
    for (std::size_t k = 0; k < back.size(); ++k) {
        CHECK(back[k].id == schedules[k].id);
        CHECK(back[k].kind == schedules[k].kind);
        CHECK(back[k].entries == schedules[k].entries);
    }
}

TEST_CASE("adversary files load and drive the engine identically") {
    TempFile file("adversary.json");
    {
        std::ofstream out(file.path);
        out << adversary_to_json(*builtin_scenario("setup1")).dump(2);
    }
    auto loaded = load_adversary_file(file.path);

    EngineConfig cfg;
    cfg.stage_budget = 40;
    Engine from_file(cfg, loaded);
    from_file.run();
    Engine from_builtin(cfg, *builtin_scenario("setup1"));
    from_builtin.run();
    CHECK(trace_to_text(from_file.trace()) == trace_to_text(from_builtin.trace()));
}

TEST_CASE("malformed adversary documents are rejected with a reason") {
    CHECK_THROWS_AS(adversary_from_json(nlohmann::json::array()), AdversaryParseError);
    CHECK_THROWS_AS(
        adversary_from_json(nlohmann::json::parse(
            R"({"operators":[{"id":0,"axioms":[{"stage":3,"x":1,"body":"oops"}]}]})")),
        AdversaryParseError);
    CHECK_THROWS_AS(
        adversary_from_json(nlohmann::json::parse(
            R"({"operators":[{"id":0,"axioms":[
                {"stage":3,"x":1,"body":[]},{"stage":3,"x":2,"body":[]}]}]})")),
        AdversaryParseError);
}

TEST_CASE("trace files round-trip byte for byte") {
    EngineConfig cfg;
    cfg.stage_budget = 30;
    Engine engine(cfg, *builtin_scenario("diag1"));
    engine.run();

    TempFile file("trace.jsonl");
    write_trace_file(engine.trace(), file.path);
    Trace back = read_trace_file(file.path);
    CHECK(trace_to_text(back) == trace_to_text(engine.trace()));
}

TEST_CASE("random adversaries always validate") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        RandomAdversaryOptions opt;
        opt.seed = seed;
        opt.stages = 60;
        for (const auto& sched : random_adversary(opt)) {
            auto v = validate(sched);
            CAPTURE(seed);
            CAPTURE(sched.id);
            CHECK(!v);
        }
    }
}

TEST_CASE("seeded adversaries replay to identical traces and snapshots") {
    RandomAdversaryOptions opt;
    opt.seed = 13;
    opt.stages = 60;
    EngineConfig cfg;
    cfg.stage_budget = 60;
    cfg.snapshot_every = 20;

    Engine a(cfg, random_adversary(opt));
    a.run();
    Engine b(cfg, random_adversary(opt));
    b.run();
    CHECK(trace_to_text(a.trace()) == trace_to_text(b.trace()));
    REQUIRE(a.snapshots().size() == b.snapshots().size());
    for (std::size_t k = 0; k < a.snapshots().size(); ++k)
        CHECK(a.snapshots()[k] == b.snapshots()[k]);

    SUBCASE("the replayed exception lists match the stored snapshots") {
        Snapshot replayed = snapshot_from_replay(ReplayState::build(a.trace()));
        CHECK(replayed == a.snapshots().back());
    }
}

TEST_CASE("scenario library lists its contents") {
    auto list = scenario_list();
    REQUIRE(list.size() == 4);
    for (const auto& info : list) CHECK(builtin_scenario(info.name).has_value());
    CHECK(!builtin_scenario("nope"));
}
