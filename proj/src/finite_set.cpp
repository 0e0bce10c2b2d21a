#include "sdeg/finite_set.hpp"

#include <algorithm>
#include <sstream>

namespace sdeg {

bool FiniteSet::contains(std::uint64_t x) const {
    return std::binary_search(elems_.begin(), elems_.end(), x);
}

void FiniteSet::insert(std::uint64_t x) {
    auto it = std::lower_bound(elems_.begin(), elems_.end(), x);
    if (it == elems_.end() || *it != x) elems_.insert(it, x);
}

void FiniteSet::erase(std::uint64_t x) {
    auto it = std::lower_bound(elems_.begin(), elems_.end(), x);
    if (it != elems_.end() && *it == x) elems_.erase(it);
}

std::uint64_t FiniteSet::max() const {
    if (elems_.empty()) throw std::logic_error("max() of empty FiniteSet");
    return elems_.back();
}

bool FiniteSet::subset_of(const FiniteSet& other) const {
    return std::includes(other.elems_.begin(), other.elems_.end(),
                         elems_.begin(), elems_.end());
}

bool FiniteSet::operator<(const FiniteSet& other) const {
    // Canonical-index order: compare highest differing element.
    auto a = elems_.rbegin(), b = other.elems_.rbegin();
    while (a != elems_.rend() && b != other.elems_.rend()) {
        if (*a != *b) return *a < *b;
        ++a;
        ++b;
    }
    return a == elems_.rend() && b != other.elems_.rend();
}

std::string FiniteSet::to_string() const {
    std::ostringstream out;
    out << "{";
    for (std::size_t i = 0; i < elems_.size(); ++i) {
        if (i) out << ",";
        out << elems_[i];
    }
    out << "}";
    return out.str();
}

std::uint64_t encode(const FiniteSet& f) {
    std::uint64_t u = 0;
    for (auto x : f) {
        if (x >= 64) throw std::range_error("canonical index overflow: element " + std::to_string(x));
        u |= (std::uint64_t{1} << x);
    }
    return u;
}

FiniteSet decode(std::uint64_t u) {
    FiniteSet f;
    for (std::uint64_t x = 0; u != 0; ++x, u >>= 1)
        if (u & 1) f.insert(x);
    return f;
}

FiniteSet star_transform(const FiniteSet& x) {
    if (x.size() >= 64) throw std::range_error("star_transform: too many subsets");
    const auto& xs = x.elements();
    std::uint64_t count = std::uint64_t{1} << x.size();
    FiniteSet out;
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        FiniteSet sub;
        for (std::size_t i = 0; i < xs.size(); ++i)
            if (mask & (std::uint64_t{1} << i)) sub.insert(xs[i]);
        out.insert(encode(sub));  // throws range_error on overflow
    }
    return out;
}

}  // namespace sdeg
