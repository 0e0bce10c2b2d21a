#include "sdeg/tracked_set.hpp"

#include <stdexcept>

namespace sdeg {

bool TrackedSet::contains(std::uint64_t x) const {
    auto it = log_.find(x);
    if (it == log_.end() || it->second.empty()) return true;
    return it->second.back().kind == Transition::enumerate;
}

void TrackedSet::extract(std::uint64_t x, std::uint64_t stage, std::uint64_t substage) {
    if (!contains(x))
        throw std::logic_error(identity_ + ": extract of absent element " + std::to_string(x));
    log_[x].push_back({stage, substage, Transition::extract});
}

void TrackedSet::enumerate(std::uint64_t x, std::uint64_t stage, std::uint64_t substage) {
    if (contains(x))
        throw std::logic_error(identity_ + ": enumerate of present element " + std::to_string(x));
    log_[x].push_back({stage, substage, Transition::enumerate});
}

bool TrackedSet::member_at_end_of_stage(std::uint64_t x, std::uint64_t stage) const {
    auto it = log_.find(x);
    if (it == log_.end()) return true;
    bool member = true;
    for (const auto& c : it->second) {
        if (c.stage > stage) break;
        member = (c.kind == Transition::enumerate);
    }
    return member;
}

std::optional<std::uint64_t> TrackedSet::contained_since(std::uint64_t x) const {
    if (!contains(x)) return std::nullopt;
    auto it = log_.find(x);
    if (it == log_.end() || it->second.empty()) return 0;
    // Currently in, so the log ends with an enumerate. Walk back across
    // extract/enumerate pairs that happened within a single stage: those
    // never show at a stage end.
    std::uint64_t since = 0;
    const auto& log = it->second;
    for (std::size_t k = log.size(); k >= 2; k -= 2) {
        const Change& en = log[k - 1];
        const Change& ex = log[k - 2];
        if (ex.stage == en.stage) continue;  // out only mid-stage
        since = en.stage;
        break;
    }
    return since;
}

const std::vector<TrackedSet::Change>* TrackedSet::log_for(std::uint64_t x) const {
    auto it = log_.find(x);
    return it == log_.end() ? nullptr : &it->second;
}

}  // namespace sdeg
