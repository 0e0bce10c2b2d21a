#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdeg/operator_schedule.hpp"
#include "sdeg/strategy_tree.hpp"

namespace sdeg {

// Adversary files describe finite operator enumerations:
//   {"operators":[{"id":1,"kind":"s","axioms":[
//       {"stage":5,"x":7,"body":[3]},
//       {"stage":6,"x":{"sym":"witness","node":["infty"]},"body":[]},
//       {"stage":9,"x":3,"body":{"sym":"marker","e":0,"z":0,
//                                "xRef":{"sym":"witness","node":["infty"]}}}]}]}
// "id" is the operator's position in the priority listing (id 0 serves U_0,
// id 1 serves U_1, ...). Symbolic heads/bodies resolve when the axiom
// enters; witness bodies accept "side":"A"/"D" for the join encoding.
struct AdversaryParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<OperatorSchedule> adversary_from_json(const nlohmann::json& j);
nlohmann::json adversary_to_json(const std::vector<OperatorSchedule>& schedules);
std::vector<OperatorSchedule> load_adversary_file(const std::string& path);

// Seeded generator of valid random schedules: literal axioms only, at most
// one per stage with the given density, heads and bodies below their entry
// stage, s-operator bodies shaped for the requirement each id serves
// (join-space for S-slots, plain for R-slots).
struct RandomAdversaryOptions {
    std::uint64_t seed = 0;
    std::uint64_t operator_count = 6;
    std::uint64_t stages = 150;
    double density = 0.25;
    RequirementOrdering ordering = RequirementOrdering::s_first;
};
std::vector<OperatorSchedule> random_adversary(const RandomAdversaryOptions& opt);

// splitmix64: tiny, stable across platforms (trace bytes must not depend on
// the standard library's distribution internals).
struct SplitMix64 {
    std::uint64_t state = 0;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next();
    std::uint64_t below(std::uint64_t bound);  // uniform-ish in [0, bound)
    double unit();                             // [0, 1)
};

}  // namespace sdeg
