#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sdeg/axiom.hpp"
#include "sdeg/finite_set.hpp"

namespace sdeg {

// Membership oracle over the naturals.
using Oracle = std::function<bool(std::uint64_t)>;

// Axiom-body shape restriction of an enumeration operator family.
struct OperatorKind {
    enum class Tag { e, s, e2, be };
    Tag tag = Tag::s;
    std::uint64_t bound = 0;  // only for be(n)

    static OperatorKind e() { return {Tag::e, 0}; }
    static OperatorKind s() { return {Tag::s, 0}; }
    static OperatorKind e2() { return {Tag::e2, 0}; }
    static OperatorKind be(std::uint64_t n) { return {Tag::be, n}; }

    // Does a literal body satisfy this kind's cardinality constraint?
    bool body_ok(const FiniteSet& f) const;
    std::string name() const;
    bool operator==(const OperatorKind&) const = default;
};

std::optional<OperatorKind> parse_operator_kind(const std::string& name,
                                                std::uint64_t be_bound);

// One adversary operator: a staged enumeration with at most one axiom
// entering per stage, empty at stage 0, heads and literal body elements
// bounded by the entry stage.
struct OperatorSchedule {
    std::uint64_t id = 0;
    OperatorKind kind = OperatorKind::s();
    std::map<std::uint64_t, Axiom> entries;  // stage -> the entering axiom

    std::uint64_t last_entry_stage() const {
        return entries.empty() ? 0 : entries.rbegin()->first;
    }
};

struct ScheduleViolation {
    enum class Reason { kind, bound, stage_zero };
    Reason reason;
    std::uint64_t op_id = 0;
    std::uint64_t stage = 0;
    std::string message;
};

// First violated constraint, or nullopt when the schedule is well formed.
std::optional<ScheduleViolation> validate(const OperatorSchedule& schedule);

// {x < head_bound : some <x,F> among axioms has F subseteq B}.
FiniteSet apply(const std::vector<LiteralAxiom>& axioms, const Oracle& b,
                std::uint64_t head_bound);

// A Sigma^0_2-style stagewise description of a set, for exercising staged
// application outside an engine: X_s is listed explicitly per stage.
struct SetApproxSequence {
    std::vector<FiniteSet> stages;  // stages[s] = X_s; last value repeats
    const FiniteSet& at(std::uint64_t s) const;
};

// Phi_e(X)[s]: the stage-s axioms applied to X_s, heads below s. All axioms
// entered by stage s must be literal; symbolic ones only make sense inside
// a running engine and raise logic_error here.
FiniteSet staged_apply(const OperatorSchedule& schedule,
                       const SetApproxSequence& approx, std::uint64_t s);

// The even/odd join: (A+D)(2a) = A(a), (A+D)(2d+1) = D(d).
Oracle join(Oracle a, Oracle d);

// Split a join-space body into its A-part and D-part.
void split_join_body(const FiniteSet& body, FiniteSet& a_part, FiniteSet& d_part);

// Exhaustive search for an s-operator carrying B to A on [0,n): per head
// x in A, candidate bodies are {} (when allowed) and the singletons {b}
// with b in B below body_bound. Ties resolve to the least operator; the
// multiple flag reports whether another witness existed.
struct SReduceResult {
    std::optional<std::vector<LiteralAxiom>> op;
    bool multiple = false;
};
SReduceResult brute_force_s_reduce(const FiniteSet& a, const FiniteSet& b,
                                   std::uint64_t universe, std::uint64_t body_bound,
                                   bool allow_empty_bodies = true);

}  // namespace sdeg
