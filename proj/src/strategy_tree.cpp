#include "sdeg/strategy_tree.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace sdeg {

std::string Outcome::name() const {
    switch (tag) {
        case Tag::stop: return "stop";
        case Tag::i: return "i" + std::to_string(index);
        case Tag::wait: return "wait";
        case Tag::infty: return "infty";
    }
    return "?";
}

bool outcome_lt(const Outcome& a, const Outcome& b) { return a.packed() < b.packed(); }

Node Node::child(const Outcome& o) const {
    Node c{path};
    c.path.push_back(o);
    return c;
}

Node Node::prefix(std::size_t len) const {
    return Node{std::vector<Outcome>(path.begin(), path.begin() + len)};
}

Node Node::parent() const {
    if (path.empty()) throw std::logic_error("root has no parent");
    return prefix(path.size() - 1);
}

bool Node::is_prefix_of(const Node& other) const {
    if (path.size() > other.path.size()) return false;
    return std::equal(path.begin(), path.end(), other.path.begin());
}

bool Node::operator<(const Node& other) const {
    std::size_t n = std::min(path.size(), other.path.size());
    for (std::size_t k = 0; k < n; ++k) {
        std::uint64_t a = path[k].packed(), b = other.path[k].packed();
        if (a != b) return a < b;
    }
    return path.size() < other.path.size();
}

std::string Node::to_string() const {
    if (path.empty()) return "<root>";
    std::ostringstream out;
    for (std::size_t k = 0; k < path.size(); ++k) {
        if (k) out << ".";
        out << path[k].name();
    }
    return out.str();
}

std::vector<std::string> Node::names() const {
    std::vector<std::string> out;
    out.reserve(path.size());
    for (const auto& o : path) out.push_back(o.name());
    return out;
}

std::optional<Node> Node::from_names(const std::vector<std::string>& names) {
    Node node;
    for (const auto& s : names) {
        if (s == "stop")
            node.path.push_back(Outcome::stop());
        else if (s == "wait")
            node.path.push_back(Outcome::wait());
        else if (s == "infty")
            node.path.push_back(Outcome::infty());
        else if (s.size() > 1 && s[0] == 'i' &&
                 s.find_first_not_of("0123456789", 1) == std::string::npos)
            node.path.push_back(Outcome::i(std::stoull(s.substr(1))));
        else
            return std::nullopt;
    }
    return node;
}

bool left_of(const Node& a, const Node& b) {
    std::size_t n = std::min(a.path.size(), b.path.size());
    for (std::size_t k = 0; k < n; ++k) {
        std::uint64_t x = a.path[k].packed(), y = b.path[k].packed();
        if (x != y) return x < y;
    }
    return false;
}

PriorityCmp compare_priority(const Node& a, const Node& b) {
    if (a == b) return PriorityCmp::equal;
    if (left_of(a, b) || a.is_prefix_of(b)) return PriorityCmp::higher;
    if (left_of(b, a) || b.is_prefix_of(a)) return PriorityCmp::lower;
    return PriorityCmp::incomparable;
}

std::string Requirement::name() const {
    return (is_s() ? "S" : "R") + std::to_string(index);
}

Requirement requirement_at(RequirementOrdering ordering, std::uint64_t j) {
    bool even = (j % 2 == 0);
    bool is_s = (ordering == RequirementOrdering::s_first) ? even : !even;
    return Requirement{is_s ? Requirement::Type::S : Requirement::Type::R, j / 2};
}

std::uint64_t listing_index_of(RequirementOrdering ordering, const Requirement& req) {
    bool s_even = (ordering == RequirementOrdering::s_first);
    bool at_even = req.is_s() ? s_even : !s_even;
    return 2 * req.index + (at_even ? 0 : 1);
}

const StrategyTree::Info& StrategyTree::info(const Node& node) const {
    auto it = memo_.find(node);
    if (it != memo_.end()) return it->second;

    Info out;
    if (node.is_root()) {
        out.requirement = requirement_at(ordering_, 0);
        return memo_.emplace(node, std::move(out)).first->second;
    }

    const Info& pinfo = info(node.parent());
    const Outcome& o = node.path.back();
    const std::size_t pd = node.depth() - 1;

    // Statuses and requirements of all proper ancestors along this node,
    // derived from the parent's record plus the parent's own new status.
    out.ancestor_status = pinfo.ancestor_status;
    out.ancestor_status.push_back(Status::neither);
    out.ancestor_req = pinfo.ancestor_req;
    out.ancestor_req.push_back(pinfo.requirement);

    if (pinfo.requirement.is_s()) {
        if (o != Outcome::infty())
            throw std::logic_error("S-node successor must be infty: " + node.to_string());
        out.ancestor_status[pd] = Status::active;
    } else {
        // The active S-ancestors beta_0 c ... c beta_{n-1} of the parent.
        std::vector<std::size_t> betas;
        for (std::size_t k = 0; k < pd; ++k)
            if (pinfo.ancestor_status[k] == Status::active &&
                pinfo.ancestor_req[k].is_s())
                betas.push_back(k);
        std::size_t n = betas.size();
        if (o == Outcome::stop() || o == Outcome::wait()) {
            out.ancestor_status[pd] = Status::satisfied;
        } else if (o.tag == Outcome::Tag::i && o.index < n) {
            out.ancestor_status[pd] = Status::neither;
            for (std::size_t j = 0; j < n; ++j) {
                if (j < o.index)
                    out.ancestor_status[betas[j]] = Status::active;
                else if (j == o.index)
                    out.ancestor_status[betas[j]] = Status::satisfied;
                else
                    out.ancestor_status[betas[j]] = Status::neither;
            }
        } else {
            throw std::logic_error("illegal R-node successor: " + node.to_string());
        }
    }

    // Highest-priority requirement not assigned to an ancestor that is
    // active or satisfied along this node.
    for (std::uint64_t j = 0;; ++j) {
        Requirement cand = requirement_at(ordering_, j);
        bool blocked = false;
        for (std::size_t k = 0; k < node.depth(); ++k) {
            if (out.ancestor_status[k] == Status::neither) continue;
            if (out.ancestor_req[k] == cand) {
                blocked = true;
                break;
            }
        }
        if (!blocked) {
            out.requirement = cand;
            break;
        }
    }

    return memo_.emplace(node, std::move(out)).first->second;
}

bool StrategyTree::valid(const Node& node) const {
    for (std::size_t k = 0; k < node.depth(); ++k) {
        auto succ = successors(node.prefix(k));
        if (std::find(succ.begin(), succ.end(), node.path[k]) == succ.end())
            return false;
    }
    return true;
}

Requirement StrategyTree::requirement(const Node& node) const {
    return info(node).requirement;
}

std::vector<Outcome> StrategyTree::successors(const Node& node) const {
    const Info& i = info(node);
    if (i.requirement.is_s()) return {Outcome::infty()};
    std::vector<Outcome> out{Outcome::stop()};
    std::size_t n = active_s_ancestors(node).size();
    for (std::size_t k = 0; k < n; ++k) out.push_back(Outcome::i(k));
    out.push_back(Outcome::wait());
    return out;
}

Status StrategyTree::status_along(const Node& beta, const Node& alpha) const {
    if (!beta.is_prefix_of(alpha) || beta == alpha)
        throw std::logic_error("status_along expects a proper ancestor");
    return info(alpha).ancestor_status[beta.depth()];
}

std::vector<Node> StrategyTree::active_s_ancestors(const Node& node) const {
    const Info& i = info(node);
    std::vector<Node> out;
    for (std::size_t k = 0; k < node.depth(); ++k)
        if (i.ancestor_status[k] == Status::active && i.ancestor_req[k].is_s())
            out.push_back(node.prefix(k));
    return out;
}

}  // namespace sdeg
