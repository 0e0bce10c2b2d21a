#pragma once

#include <concepts>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdeg {

// A finite set of naturals, kept sorted and duplicate-free. Doubles as the
// canonical-index carrier: encode() maps F to u = sum of 2^x over x in F,
// decode() inverts it. encode is only defined for elements < 64.
class FiniteSet {
public:
    FiniteSet() = default;
    FiniteSet(std::initializer_list<std::uint64_t> xs) {
        for (auto x : xs) insert(x);
    }
    explicit FiniteSet(std::vector<std::uint64_t> xs) {
        for (auto x : xs) insert(x);
    }

    bool contains(std::uint64_t x) const;
    void insert(std::uint64_t x);
    void erase(std::uint64_t x);

    bool empty() const { return elems_.empty(); }
    std::size_t size() const { return elems_.size(); }
    std::uint64_t max() const;  // undefined on empty sets (throws)

    const std::vector<std::uint64_t>& elements() const { return elems_; }
    auto begin() const { return elems_.begin(); }
    auto end() const { return elems_.end(); }

    // F subseteq of an arbitrary membership predicate.
    template <typename Oracle>
        requires std::invocable<Oracle&, std::uint64_t>
    bool subset_of(Oracle&& in) const {
        for (auto x : elems_)
            if (!in(x)) return false;
        return true;
    }
    bool subset_of(const FiniteSet& other) const;

    bool operator==(const FiniteSet&) const = default;
    // Order by canonical index without materializing it: compare as sets.
    bool operator<(const FiniteSet& other) const;

    std::string to_string() const;

private:
    std::vector<std::uint64_t> elems_;
};

// Canonical index u = sum 2^x. Throws std::range_error once any element
// is >= 64, since the index no longer fits the platform word.
std::uint64_t encode(const FiniteSet& f);
FiniteSet decode(std::uint64_t u);

// X* = set of canonical indices of all subsets of X. Range-errors when
// 2^|X| or any index overflows.
FiniteSet star_transform(const FiniteSet& x);

}  // namespace sdeg
