#include "sdeg/operator_schedule.hpp"

#include <sstream>

namespace sdeg {

bool OperatorKind::body_ok(const FiniteSet& f) const {
    switch (tag) {
        case Tag::e: return true;
        case Tag::s: return f.size() <= 1;
        case Tag::e2: return f.empty() || f.size() == 2;
        case Tag::be: return f.size() <= bound;
    }
    return false;
}

std::string OperatorKind::name() const {
    switch (tag) {
        case Tag::e: return "e";
        case Tag::s: return "s";
        case Tag::e2: return "e2";
        case Tag::be: return "be" + std::to_string(bound);
    }
    return "?";
}

std::optional<OperatorKind> parse_operator_kind(const std::string& name,
                                                std::uint64_t be_bound) {
    if (name == "e") return OperatorKind::e();
    if (name == "s") return OperatorKind::s();
    if (name == "e2") return OperatorKind::e2();
    if (name == "be") {
        if (be_bound == 0) return std::nullopt;
        return OperatorKind::be(be_bound);
    }
    return std::nullopt;
}

std::string to_string(const Axiom& a) {
    std::ostringstream out;
    out << "<";
    if (auto* h = std::get_if<std::uint64_t>(&a.head))
        out << *h;
    else
        out << "witness";
    out << ",";
    if (auto* f = std::get_if<FiniteSet>(&a.body))
        out << f->to_string();
    else
        out << "sym";
    out << ">";
    return out.str();
}

std::optional<ScheduleViolation> validate(const OperatorSchedule& schedule) {
    for (const auto& [stage, axiom] : schedule.entries) {
        auto fail = [&](ScheduleViolation::Reason r, const std::string& msg) {
            return ScheduleViolation{r, schedule.id, stage, msg};
        };
        if (stage == 0)
            return fail(ScheduleViolation::Reason::stage_zero,
                        "operators start empty: no axiom may enter at stage 0");
        if (auto* h = std::get_if<std::uint64_t>(&axiom.head)) {
            if (*h >= stage)
                return fail(ScheduleViolation::Reason::bound,
                            "head " + std::to_string(*h) + " not below entry stage");
        }
        if (auto* f = std::get_if<FiniteSet>(&axiom.body)) {
            if (!schedule.kind.body_ok(*f))
                return fail(ScheduleViolation::Reason::kind,
                            "body " + f->to_string() + " breaks " +
                                schedule.kind.name() + "-operator constraint");
            if (!f->empty() && f->max() >= stage)
                return fail(ScheduleViolation::Reason::bound,
                            "body element " + std::to_string(f->max()) +
                                " not below entry stage");
        } else {
            // Symbolic singleton bodies fit every kind here; the actual value
            // is checked against the entry stage at resolution time. A
            // declared bound lets us reject statically.
            const auto& sym = std::get<SymbolicBody>(axiom.body);
            if (sym.declared_bound && *sym.declared_bound >= stage)
                return fail(ScheduleViolation::Reason::bound,
                            "declared symbolic bound not below entry stage");
        }
    }
    return std::nullopt;
}

FiniteSet apply(const std::vector<LiteralAxiom>& axioms, const Oracle& b,
                std::uint64_t head_bound) {
    FiniteSet out;
    for (const auto& ax : axioms) {
        if (ax.head >= head_bound) continue;
        if (out.contains(ax.head)) continue;
        if (ax.body.subset_of(b)) out.insert(ax.head);
    }
    return out;
}

const FiniteSet& SetApproxSequence::at(std::uint64_t s) const {
    static const FiniteSet empty;
    if (stages.empty()) return empty;
    if (s < stages.size()) return stages[s];
    return stages.back();
}

FiniteSet staged_apply(const OperatorSchedule& schedule,
                       const SetApproxSequence& approx, std::uint64_t s) {
    std::vector<LiteralAxiom> axioms;
    for (const auto& [stage, axiom] : schedule.entries) {
        if (stage > s) break;
        if (!axiom.literal())
            throw std::logic_error(
                "staged_apply: symbolic axiom is only resolvable inside a running engine");
        axioms.push_back({axiom.literal_head(), axiom.literal_body()});
    }
    const FiniteSet& xs = approx.at(s);
    return apply(axioms, [&](std::uint64_t v) { return xs.contains(v); }, s);
}

Oracle join(Oracle a, Oracle d) {
    return [a = std::move(a), d = std::move(d)](std::uint64_t v) {
        return (v % 2 == 0) ? a(v / 2) : d(v / 2);
    };
}

void split_join_body(const FiniteSet& body, FiniteSet& a_part, FiniteSet& d_part) {
    for (auto v : body) {
        if (v % 2 == 0)
            a_part.insert(v / 2);
        else
            d_part.insert(v / 2);
    }
}

SReduceResult brute_force_s_reduce(const FiniteSet& a, const FiniteSet& b,
                                   std::uint64_t universe, std::uint64_t body_bound,
                                   bool allow_empty_bodies) {
    SReduceResult result;
    std::vector<LiteralAxiom> op;
    for (auto x : a) {
        if (x >= universe) continue;
        // Candidate bodies in canonical-index order: {} first, then the
        // singletons drawn from B.
        std::vector<FiniteSet> candidates;
        if (allow_empty_bodies) candidates.push_back({});
        for (auto e : b)
            if (e < body_bound) candidates.push_back({e});
        if (candidates.empty()) return result;  // x in A unreachable: no operator
        if (candidates.size() > 1) result.multiple = true;
        op.push_back({x, candidates.front()});
    }
    result.op = std::move(op);
    return result;
}

}  // namespace sdeg
