#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sdeg {

// A cofinite set (starts as all of omega) with an exact per-element change
// log. Per element the log alternates extract / enumerate, starting with
// extract; membership at any (stage, substage) point is derivable.
class TrackedSet {
public:
    enum class Transition { extract, enumerate };
    struct Change {
        std::uint64_t stage = 0;
        std::uint64_t substage = 0;
        Transition kind = Transition::extract;
    };

    explicit TrackedSet(std::string identity = "?") : identity_(std::move(identity)) {}

    const std::string& identity() const { return identity_; }

    bool contains(std::uint64_t x) const;

    // Log-discipline violations (extracting an absent element, enumerating a
    // present one) throw logic_error: they indicate an engine bug.
    void extract(std::uint64_t x, std::uint64_t stage, std::uint64_t substage);
    void enumerate(std::uint64_t x, std::uint64_t stage, std::uint64_t substage);

    // Membership as of the end of the given stage (changes at stage t count
    // for ends >= t).
    bool member_at_end_of_stage(std::uint64_t x, std::uint64_t stage) const;

    // Least stage u such that x was in the set at the end of every stage in
    // [u, now) and is in it now; nullopt when x is currently out. Same-stage
    // extract/enumerate pairs do not break end-of-stage containment.
    std::optional<std::uint64_t> contained_since(std::uint64_t x) const;

    const std::vector<Change>* log_for(std::uint64_t x) const;
    const std::map<std::uint64_t, std::vector<Change>>& logs() const { return log_; }

private:
    std::string identity_;
    std::map<std::uint64_t, std::vector<Change>> log_;
};

}  // namespace sdeg
