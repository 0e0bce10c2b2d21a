#include "sdeg/omega.hpp"

namespace sdeg {

FiniteSet project_a(const Oracle& d, std::uint64_t bound) {
    FiniteSet out;
    for (std::uint64_t n = 0; n < bound; ++n)
        if (omega_contains(d, n)) out.insert(n);
    return out;
}

}  // namespace sdeg
