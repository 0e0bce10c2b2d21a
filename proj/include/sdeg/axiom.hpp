#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sdeg/finite_set.hpp"

namespace sdeg {

// Symbolic references let a schedule name values that only exist once the
// construction is running: the current witness of a tree node, or the
// current marker value some strategy holds for a pair (z, x). They are
// resolved by the engine when the axiom enters; outside an engine they are
// an error.

// A tree node spelled as its outcome path, e.g. {"infty","i0","wait"}.
using NodePath = std::vector<std::string>;

// Which side of the A(+)D join a resolved witness lands on.
enum class JoinSide { none, a_side, d_side };

struct WitnessRef {
    NodePath node;
    bool operator==(const WitnessRef&) const = default;
};

// The A-index of a marker pair: either a literal number or a witness ref.
using PairIndex = std::variant<std::uint64_t, WitnessRef>;

struct MarkerRef {
    std::uint64_t op_id = 0;  // operator (= requirement listing) index
    std::uint64_t z = 0;
    PairIndex x;
    bool operator==(const MarkerRef&) const = default;
};

// A symbolic singleton body. Witness bodies may ask for the join-encoded
// form (2x or 2x+1).
struct SymbolicBody {
    std::variant<MarkerRef, WitnessRef> ref;
    JoinSide side = JoinSide::none;
    std::optional<std::uint64_t> declared_bound;  // for static validation
    bool operator==(const SymbolicBody&) const = default;
};

using Head = std::variant<std::uint64_t, WitnessRef>;
using Body = std::variant<FiniteSet, SymbolicBody>;

struct Axiom {
    Head head;
    Body body;

    bool literal() const {
        return std::holds_alternative<std::uint64_t>(head) &&
               std::holds_alternative<FiniteSet>(body);
    }
    std::uint64_t literal_head() const { return std::get<std::uint64_t>(head); }
    const FiniteSet& literal_body() const { return std::get<FiniteSet>(body); }
    bool operator==(const Axiom&) const = default;
};

// An axiom with all symbols resolved; what engines and evaluators consume.
struct LiteralAxiom {
    std::uint64_t head = 0;
    FiniteSet body;
    bool operator==(const LiteralAxiom&) const = default;
};

std::string to_string(const Axiom& a);

}  // namespace sdeg
