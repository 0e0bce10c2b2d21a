#include "sdeg/event.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sdeg {

namespace {

struct KindName {
    EventKind kind;
    const char* name;
};

constexpr KindName kKindNames[] = {
    {EventKind::header, "header"},
    {EventKind::axiom_entered, "axiom_entered"},
    {EventKind::warning, "warning"},
    {EventKind::witness_appointed, "witness_appointed"},
    {EventKind::realized, "realized"},
    {EventKind::extractA, "extractA"},
    {EventKind::extractD, "extractD"},
    {EventKind::enumD, "enumD"},
    {EventKind::marker_defined, "marker_defined"},
    {EventKind::marker_canceled, "marker_canceled"},
    {EventKind::gamma_axiom, "gamma_axiom"},
    {EventKind::delta_axiom, "delta_axiom"},
    {EventKind::stream_add, "stream_add"},
    {EventKind::outcome_taken, "outcome_taken"},
    {EventKind::setup_created, "setup_created"},
    {EventKind::gamma_killed, "gamma_killed"},
    {EventKind::initialize, "initialize"},
    {EventKind::stage_end, "stage_end"},
};

}  // namespace

const char* event_kind_name(EventKind k) {
    for (const auto& e : kKindNames)
        if (e.kind == k) return e.name;
    return "?";
}

std::optional<EventKind> parse_event_kind(const std::string& name) {
    for (const auto& e : kKindNames)
        if (name == e.name) return e.kind;
    return std::nullopt;
}

nlohmann::json Event::to_json() const {
    nlohmann::json j = data;
    j["kind"] = event_kind_name(kind);
    j["stage"] = stage;
    j["substage"] = substage;
    j["node"] = node;
    return j;
}

Event Event::from_json(const nlohmann::json& j) {
    Event e;
    auto kind = parse_event_kind(j.at("kind").get<std::string>());
    if (!kind) throw std::runtime_error("unknown event kind: " + j.at("kind").dump());
    e.kind = *kind;
    e.stage = j.at("stage").get<std::uint64_t>();
    e.substage = j.at("substage").get<std::uint64_t>();
    e.node = j.at("node").get<std::vector<std::string>>();
    e.data = j;
    e.data.erase("kind");
    e.data.erase("stage");
    e.data.erase("substage");
    e.data.erase("node");
    return e;
}

std::string Event::to_line() const { return to_json().dump(); }

std::string trace_to_text(const Trace& trace) {
    std::ostringstream out;
    for (const auto& e : trace) out << e.to_line() << "\n";
    return out.str();
}

Trace trace_from_text(const std::string& text) {
    Trace trace;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            trace.push_back(Event::from_json(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            throw std::runtime_error("trace line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return trace;
}

void write_trace_file(const Trace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open trace file for writing: " + path);
    out << trace_to_text(trace);
}

Trace read_trace_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open trace file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return trace_from_text(buf.str());
}

}  // namespace sdeg
