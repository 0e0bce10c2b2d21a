#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace sdeg {

// Every construction action is logged as one event; the trace is the
// replayable record the verifier and CLI consume. Trace files are JSON
// lines, one event per line, keys in sorted order so identical runs are
// byte-identical.
enum class EventKind {
    header,
    axiom_entered,
    warning,
    witness_appointed,
    realized,
    extractA,
    extractD,
    enumD,
    marker_defined,
    marker_canceled,
    gamma_axiom,
    delta_axiom,
    stream_add,
    outcome_taken,
    setup_created,
    gamma_killed,
    initialize,
    stage_end,
};

const char* event_kind_name(EventKind k);
std::optional<EventKind> parse_event_kind(const std::string& name);

struct Event {
    EventKind kind = EventKind::header;
    std::uint64_t stage = 0;
    std::uint64_t substage = 0;
    std::vector<std::string> node;  // outcome path; empty = root
    nlohmann::json data;            // kind-specific payload

    nlohmann::json to_json() const;
    static Event from_json(const nlohmann::json& j);
    std::string to_line() const;
};

using Trace = std::vector<Event>;

std::string trace_to_text(const Trace& trace);
Trace trace_from_text(const std::string& text);
void write_trace_file(const Trace& trace, const std::string& path);
Trace read_trace_file(const std::string& path);

}  // namespace sdeg
