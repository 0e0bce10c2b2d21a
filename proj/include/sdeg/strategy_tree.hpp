#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sdeg {

// One outcome from the lattice stop < i(0) < i(1) < ... < wait < infty.
struct Outcome {
    enum class Tag { stop, i, wait, infty };
    Tag tag = Tag::stop;
    std::uint64_t index = 0;  // only for i(n)

    static Outcome stop() { return {Tag::stop, 0}; }
    static Outcome i(std::uint64_t n) { return {Tag::i, n}; }
    static Outcome wait() { return {Tag::wait, 0}; }
    static Outcome infty() { return {Tag::infty, 0}; }

    // Lattice position as one integer: stop < i(0) < i(1) < ... < wait < infty.
    std::uint64_t packed() const {
        switch (tag) {
            case Tag::stop: return 0;
            case Tag::i: return index + 1;
            case Tag::wait: return ~std::uint64_t{1};
            case Tag::infty: return ~std::uint64_t{0};
        }
        return 0;
    }

    bool operator==(const Outcome&) const = default;
    std::string name() const;
};

// Strict total order on outcomes.
bool outcome_lt(const Outcome& a, const Outcome& b);

// A node of the strategy tree, named by its outcome path from the root.
struct Node {
    std::vector<Outcome> path;

    std::size_t depth() const { return path.size(); }
    bool is_root() const { return path.empty(); }
    Node child(const Outcome& o) const;
    Node prefix(std::size_t len) const;
    Node parent() const;
    bool is_prefix_of(const Node& other) const;  // reflexive

    bool operator==(const Node&) const = default;
    // Lexicographic in the outcome order with prefixes first. This
    // coincides with the priority order: a < b iff a <_L b or a proper
    // prefix of b.
    bool operator<(const Node& other) const;

    std::string to_string() const;
    std::vector<std::string> names() const;
    static std::optional<Node> from_names(const std::vector<std::string>& names);
};

inline Node root() { return Node{}; }

// a strictly left of b: they differ at some position both have, and a's
// first differing outcome is smaller.
bool left_of(const Node& a, const Node& b);

enum class PriorityCmp { higher, lower, equal, incomparable };
// higher iff a <_L b or a proper prefix of b.
PriorityCmp compare_priority(const Node& a, const Node& b);

struct Requirement {
    enum class Type { S, R };
    Type type = Type::S;
    std::uint64_t index = 0;

    bool is_s() const { return type == Type::S; }
    bool operator==(const Requirement&) const = default;
    std::string name() const;
};

// How S- and R-requirements interleave into the priority listing U_0, U_1, ...
enum class RequirementOrdering {
    s_first,  // U_{2i} = S_i, U_{2i+1} = R_i (default; makes the root an S-node)
    r_first,  // U_{2i} = R_i, U_{2i+1} = S_i
};
Requirement requirement_at(RequirementOrdering ordering, std::uint64_t listing_index);
std::uint64_t listing_index_of(RequirementOrdering ordering, const Requirement& req);

enum class Status { active, satisfied, neither };

// The lazily built tree: requirement assignment and ancestor statuses are
// pure functions of the path, memoized per node. Queries are read-only
// after memoization.
class StrategyTree {
public:
    explicit StrategyTree(RequirementOrdering ordering = RequirementOrdering::s_first)
        : ordering_(ordering) {}

    RequirementOrdering ordering() const { return ordering_; }

    // Is this path a node of T (every step a legal successor)?
    bool valid(const Node& node) const;

    Requirement requirement(const Node& node) const;

    // Ordered successor outcomes: [infty] for S-nodes, [stop, i(0), ...,
    // i(n-1), wait] for R-nodes with n active S-ancestors.
    std::vector<Outcome> successors(const Node& node) const;

    // Status of proper ancestor beta along alpha.
    Status status_along(const Node& beta, const Node& alpha) const;

    // The S-ancestors beta_0 c beta_1 c ... active along an R-node.
    std::vector<Node> active_s_ancestors(const Node& node) const;

private:
    // Self-contained per-node record: child construction reads only the
    // parent's Info, so a cold lookup costs one memo probe per level.
    struct Info {
        Requirement requirement;
        std::vector<Status> ancestor_status;  // status of prefix(k) along this node
        std::vector<Requirement> ancestor_req;  // requirement of prefix(k)
    };
    const Info& info(const Node& node) const;

    RequirementOrdering ordering_;
    mutable std::map<Node, Info> memo_;
};

}  // namespace sdeg
