#include "sdeg/adversary.hpp"

#include <fstream>

#include "sdeg/strategy_tree.hpp"

namespace sdeg {

namespace {

WitnessRef witness_ref_from_json(const nlohmann::json& j) {
    WitnessRef ref;
    ref.node = j.at("node").get<std::vector<std::string>>();
    return ref;
}

Head head_from_json(const nlohmann::json& j) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_object() && j.value("sym", "") == "witness")
        return witness_ref_from_json(j);
    throw AdversaryParseError("bad axiom head: " + j.dump());
}

Body body_from_json(const nlohmann::json& j) {
    if (j.is_array()) {
        FiniteSet f;
        for (const auto& v : j) {
            if (!v.is_number_unsigned())
                throw AdversaryParseError("bad body element: " + v.dump());
            f.insert(v.get<std::uint64_t>());
        }
        return f;
    }
    if (!j.is_object()) throw AdversaryParseError("bad axiom body: " + j.dump());
    SymbolicBody sym;
    std::string tag = j.value("sym", "");
    if (tag == "marker") {
        MarkerRef mref;
        mref.op_id = j.at("e").get<std::uint64_t>();
        mref.z = j.at("z").get<std::uint64_t>();
        const auto& xr = j.at("xRef");
        if (xr.is_number_unsigned())
            mref.x = xr.get<std::uint64_t>();
        else
            mref.x = witness_ref_from_json(xr);
        sym.ref = mref;
    } else if (tag == "witness") {
        sym.ref = witness_ref_from_json(j);
        std::string side = j.value("side", "");
        if (side == "A")
            sym.side = JoinSide::a_side;
        else if (side == "D")
            sym.side = JoinSide::d_side;
        else if (!side.empty())
            throw AdversaryParseError("bad witness side: " + side);
    } else {
        throw AdversaryParseError("bad symbolic body: " + j.dump());
    }
    if (j.contains("bound")) sym.declared_bound = j.at("bound").get<std::uint64_t>();
    return sym;
}

nlohmann::json head_to_json(const Head& h) {
    if (auto* v = std::get_if<std::uint64_t>(&h)) return *v;
    const auto& ref = std::get<WitnessRef>(h);
    return {{"sym", "witness"}, {"node", ref.node}};
}

nlohmann::json body_to_json(const Body& b) {
    if (auto* f = std::get_if<FiniteSet>(&b)) return f->elements();
    const auto& sym = std::get<SymbolicBody>(b);
    nlohmann::json j;
    if (auto* mref = std::get_if<MarkerRef>(&sym.ref)) {
        j["sym"] = "marker";
        j["e"] = mref->op_id;
        j["z"] = mref->z;
        if (auto* lit = std::get_if<std::uint64_t>(&mref->x))
            j["xRef"] = *lit;
        else
            j["xRef"] = {{"sym", "witness"},
                         {"node", std::get<WitnessRef>(mref->x).node}};
    } else {
        const auto& wref = std::get<WitnessRef>(sym.ref);
        j["sym"] = "witness";
        j["node"] = wref.node;
        if (sym.side == JoinSide::a_side) j["side"] = "A";
        if (sym.side == JoinSide::d_side) j["side"] = "D";
    }
    if (sym.declared_bound) j["bound"] = *sym.declared_bound;
    return j;
}

}  // namespace

std::vector<OperatorSchedule> adversary_from_json(const nlohmann::json& j) {
    std::vector<OperatorSchedule> out;
    if (!j.is_object() || !j.contains("operators"))
        throw AdversaryParseError("adversary document needs an \"operators\" array");
    for (const auto& jop : j.at("operators")) {
        OperatorSchedule sched;
        sched.id = jop.at("id").get<std::uint64_t>();
        auto kind = parse_operator_kind(jop.value("kind", "s"), jop.value("n", 0));
        if (!kind) throw AdversaryParseError("bad operator kind");
        sched.kind = *kind;
        for (const auto& jax : jop.value("axioms", nlohmann::json::array())) {
            std::uint64_t stage = jax.at("stage").get<std::uint64_t>();
            if (sched.entries.count(stage))
                throw AdversaryParseError("operator " + std::to_string(sched.id) +
                                          ": two axioms enter at stage " +
                                          std::to_string(stage));
            Axiom ax;
            ax.head = head_from_json(jax.at("x"));
            ax.body = body_from_json(jax.at("body"));
            sched.entries.emplace(stage, std::move(ax));
        }
        out.push_back(std::move(sched));
    }
    return out;
}

nlohmann::json adversary_to_json(const std::vector<OperatorSchedule>& schedules) {
    nlohmann::json ops = nlohmann::json::array();
    for (const auto& sched : schedules) {
        nlohmann::json axioms = nlohmann::json::array();
        for (const auto& [stage, ax] : sched.entries)
            axioms.push_back({{"stage", stage},
                              {"x", head_to_json(ax.head)},
                              {"body", body_to_json(ax.body)}});
        ops.push_back({{"id", sched.id},
                       {"kind", sched.kind.name()},
                       {"axioms", std::move(axioms)}});
    }
    return {{"operators", std::move(ops)}};
}

std::vector<OperatorSchedule> load_adversary_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw AdversaryParseError("cannot open adversary file: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const std::exception& e) {
        throw AdversaryParseError(std::string("adversary parse error: ") + e.what());
    }
    return adversary_from_json(j);
}

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t SplitMix64::below(std::uint64_t bound) {
    return bound == 0 ? 0 : next() % bound;
}

double SplitMix64::unit() { return double(next() >> 11) / 9007199254740992.0; }

std::vector<OperatorSchedule> random_adversary(const RandomAdversaryOptions& opt) {
    std::vector<OperatorSchedule> out;
    for (std::uint64_t id = 0; id < opt.operator_count; ++id) {
        OperatorSchedule sched;
        sched.id = id;
        sched.kind = OperatorKind::s();
        bool s_slot = requirement_at(opt.ordering, id).is_s();
        SplitMix64 rng(opt.seed * 0x100000001b3ULL + id + 1);
        for (std::uint64_t stage = 2; stage <= opt.stages; ++stage) {
            if (rng.unit() >= opt.density) continue;
            std::uint64_t head = rng.below(stage);
            FiniteSet body;
            std::uint64_t shape = rng.below(3);
            if (shape != 0) {
                // Singleton use below the entry stage; for an S-slot it lives
                // in join space (even = A-use, odd = D-use).
                std::uint64_t raw = rng.below(stage);
                if (s_slot) {
                    std::uint64_t half = rng.below(stage / 2 == 0 ? 1 : stage / 2);
                    raw = (shape == 1) ? 2 * half : 2 * half + 1;
                    if (raw >= stage) raw = stage - 1;
                }
                body.insert(raw);
            }
            Axiom ax;
            ax.head = head;
            ax.body = body;
            sched.entries.emplace(stage, std::move(ax));
        }
        out.push_back(std::move(sched));
    }
    return out;
}

}  // namespace sdeg
