#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcomp/engine.hpp"
#include "mcomp/model.hpp"
#include "mcomp/model_io.hpp"

namespace mcomp {

enum class LinkKind { Merging, Transformation };
enum class Origin { Explicit, Implicit };
enum class Side { Left, Right, Target };

std::string_view to_string(LinkKind kind);
std::string_view to_string(Origin origin);
std::string_view to_string(Side side);
std::optional<LinkKind> parse_link_kind(std::string_view text);
std::optional<Origin> parse_origin(std::string_view text);
std::optional<Side> parse_side(std::string_view text);

struct ContextAttribute {
    std::string name;
    std::string value;

    friend bool operator==(const ContextAttribute&, const ContextAttribute&) = default;
};

/// Free-form metadata attached to a link. Stored and serialized, never interpreted.
struct Context {
    std::vector<ContextAttribute> attributes;

    const std::string* find(std::string_view name) const;

    friend bool operator==(const Context&, const Context&) = default;
};

struct TraceLink {
    std::string id;
    LinkKind kind = LinkKind::Merging;
    ElementIds left;
    ElementIds right;
    ElementIds targets;
    std::optional<Context> context;

    friend bool operator==(const TraceLink&, const TraceLink&) = default;
};

struct TraceRelationship {
    std::string parent;
    std::string child;
    Origin origin = Origin::Implicit;

    friend bool operator==(const TraceRelationship&, const TraceRelationship&) = default;
    friend auto operator<=>(const TraceRelationship&, const TraceRelationship&) = default;
};

struct TraceModel {
    std::vector<TraceLink> links;
    std::vector<TraceRelationship> relationships;

    const TraceLink* find_link(std::string_view id) const;

    friend bool operator==(const TraceModel&, const TraceModel&) = default;
};

/// One link per merge/transform activation, in activation order. Link ids are "l<seq>";
/// each context records the rule name and activation seq.
/// Throws IntegrityError when a merge activation is not 1-1-1.
TraceModel build_trace(const ExecutionResult& result);

/// Adds the nesting relationships justified by the call records, in call order.
/// Duplicate (parent, child, origin) triples and self-references are dropped.
/// Throws IntegrityError on a call record no activation accounts for.
TraceModel nest_links(TraceModel trace, const ExecutionResult& result);

/// build_trace followed by nest_links.
TraceModel generate_trace(const ExecutionResult& result);

/// Throw QueryError on an unknown link id.
std::vector<std::string> children(const TraceModel& trace, std::string_view link_id);
std::vector<std::string> parents(const TraceModel& trace, std::string_view link_id);
std::vector<std::string> roots(const TraceModel& trace);

std::vector<std::string> links_for_element(const TraceModel& trace, std::string_view element_id, Side side);

/// Graphviz rendering. Link nodes are boxes, element nodes ellipses labeled type:name.
std::string export_dot(const TraceModel& trace, const Model& left, const Model& right, const Model& composed);

Json trace_to_json(const TraceModel& trace);
/// Throws ParseError on schema violations.
TraceModel trace_from_json(const Json& doc);
TraceModel load_trace(std::string_view text);

}  // namespace mcomp
