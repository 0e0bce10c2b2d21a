#pragma once

#include <cstdint>

#include "sdeg/finite_set.hpp"
#include "sdeg/operator_schedule.hpp"

namespace sdeg {

// The strong disjoint array behind corollary3 mode: blocks F_n = {4n, 4n+2}
// partition the evens, two elements each. A is not tracked separately in
// that mode; it is the view A = Omega(D) = {n : F_n subseteq D}.

inline FiniteSet omega_block(std::uint64_t n) { return FiniteSet{4 * n, 4 * n + 2}; }

// Is v an element of some block, and of which?
inline bool omega_block_member(std::uint64_t v, std::uint64_t& n_out) {
    if (v % 2 != 0) return false;
    n_out = v / 4;
    return v == 4 * n_out || v == 4 * n_out + 2;
}

inline bool omega_contains(const Oracle& d, std::uint64_t n) {
    return d(4 * n) && d(4 * n + 2);
}

// {n < bound : F_n subseteq D}.
FiniteSet project_a(const Oracle& d, std::uint64_t bound);

}  // namespace sdeg
