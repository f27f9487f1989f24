#include "mcomp/trace.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace mcomp {

std::string_view to_string(LinkKind kind)
{
    return kind == LinkKind::Merging ? "merging" : "transformation";
}

std::string_view to_string(Origin origin)
{
    return origin == Origin::Explicit ? "explicit" : "implicit";
}

std::string_view to_string(Side side)
{
    switch (side) {
    case Side::Left:
        return "left";
    case Side::Right:
        return "right";
    default:
        return "target";
    }
}

std::optional<LinkKind> parse_link_kind(std::string_view text)
{
    if (text == "merging") {
        return LinkKind::Merging;
    }
    if (text == "transformation") {
        return LinkKind::Transformation;
    }
    return std::nullopt;
}

std::optional<Origin> parse_origin(std::string_view text)
{
    if (text == "explicit") {
        return Origin::Explicit;
    }
    if (text == "implicit") {
        return Origin::Implicit;
    }
    return std::nullopt;
}

std::optional<Side> parse_side(std::string_view text)
{
    if (text == "left") {
        return Side::Left;
    }
    if (text == "right") {
        return Side::Right;
    }
    if (text == "target") {
        return Side::Target;
    }
    return std::nullopt;
}

const std::string* Context::find(std::string_view name) const
{
    for (const auto& a : attributes) {
        if (a.name == name) {
            return &a.value;
        }
    }
    return nullptr;
}

const TraceLink* TraceModel::find_link(std::string_view id) const
{
    for (const auto& l : links) {
        if (l.id == id) {
            return &l;
        }
    }
    return nullptr;
}

TraceModel build_trace(const ExecutionResult& result)
{
    TraceModel trace;
    for (const auto& a : result.activations) {
        if (a.kind == RuleKind::Match) {
            continue;
        }
        TraceLink link;
        link.id = "l" + std::to_string(a.seq);
        link.kind = a.kind == RuleKind::Merge ? LinkKind::Merging : LinkKind::Transformation;
        if (link.kind == LinkKind::Merging && (a.left.size() != 1 || a.right.size() != 1 || a.composed.size() != 1)) {
            throw IntegrityError("merge activation #" + std::to_string(a.seq) + " of " + a.rule + " is not 1-1-1 (" +
                                 std::to_string(a.left.size()) + ", " + std::to_string(a.right.size()) + ", " +
                                 std::to_string(a.composed.size()) + ")");
        }
        link.left = a.left;
        link.right = a.right;
        link.targets = a.composed;
        link.context = Context{{{"rule", a.rule}, {"activation", std::to_string(a.seq)}}};
        trace.links.push_back(std::move(link));
    }
    return trace;
}

namespace {

// activation seq -> link id, via the context written by build_trace
std::map<std::size_t, std::string> links_by_activation(const TraceModel& trace)
{
    std::map<std::size_t, std::string> out;
    for (const auto& l : trace.links) {
        const std::string* seq = l.context ? l.context->find("activation") : nullptr;
        if (seq != nullptr) {
            out[std::stoul(*seq)] = l.id;
        }
    }
    return out;
}

}  // namespace

TraceModel nest_links(TraceModel trace, const ExecutionResult& result)
{
    const auto link_of = links_by_activation(trace);
    auto link_for = [&](std::size_t seq, const std::string& what) -> const std::string& {
        auto it = link_of.find(seq);
        if (it == link_of.end()) {
            throw IntegrityError(what + ": activation #" + std::to_string(seq) + " has no trace link");
        }
        return it->second;
    };

    struct Pending {
        std::size_t event;
        TraceRelationship rel;
    };
    std::vector<Pending> pending;

    for (const auto& call : result.explicit_calls) {
        const std::string what = "explicit call #" + std::to_string(call.event) + " to " + call.callee;
        const Activation* target = nullptr;
        for (const auto& a : result.activations) {
            if (a.rule == call.callee && a.left == call.left && a.right == call.right) {
                if (target != nullptr) {
                    throw IntegrityError(what + " matches more than one activation");
                }
                target = &a;
            }
        }
        if (target == nullptr) {
            throw IntegrityError(what + " matches no activation");
        }
        pending.push_back({call.event, {link_for(call.caller, what), link_for(target->seq, what), Origin::Explicit}});
    }

    for (const auto& call : result.implicit_calls) {
        const std::string what = "implicit call #" + std::to_string(call.event);
        bool any = false;
        for (const auto& a : result.activations) {
            if (a.source_set() == call.resolved) {
                pending.push_back({call.event, {link_for(call.caller, what), link_for(a.seq, what), Origin::Implicit}});
                any = true;
            }
        }
        if (!any) {
            throw IntegrityError(what + " resolved a source set no activation consumed");
        }
    }

    std::stable_sort(pending.begin(), pending.end(),
                     [](const Pending& a, const Pending& b) { return a.event < b.event; });
    std::set<TraceRelationship> seen(trace.relationships.begin(), trace.relationships.end());
    for (auto& p : pending) {
        if (p.rel.parent == p.rel.child || !seen.insert(p.rel).second) {
            continue;
        }
        trace.relationships.push_back(std::move(p.rel));
    }
    return trace;
}

TraceModel generate_trace(const ExecutionResult& result)
{
    return nest_links(build_trace(result), result);
}

namespace {

void require_link(const TraceModel& trace, std::string_view id)
{
    if (trace.find_link(id) == nullptr) {
        throw QueryError("unknown link '" + std::string(id) + "'");
    }
}

void push_unique(std::vector<std::string>& out, const std::string& id)
{
    if (std::find(out.begin(), out.end(), id) == out.end()) {
        out.push_back(id);
    }
}

}  // namespace

std::vector<std::string> children(const TraceModel& trace, std::string_view link_id)
{
    require_link(trace, link_id);
    std::vector<std::string> out;
    for (const auto& r : trace.relationships) {
        if (r.parent == link_id) {
            push_unique(out, r.child);
        }
    }
    return out;
}

std::vector<std::string> parents(const TraceModel& trace, std::string_view link_id)
{
    require_link(trace, link_id);
    std::vector<std::string> out;
    for (const auto& r : trace.relationships) {
        if (r.child == link_id) {
            push_unique(out, r.parent);
        }
    }
    return out;
}

std::vector<std::string> roots(const TraceModel& trace)
{
    std::set<std::string, std::less<>> has_parent;
    for (const auto& r : trace.relationships) {
        has_parent.insert(r.child);
    }
    std::vector<std::string> out;
    for (const auto& l : trace.links) {
        if (!has_parent.contains(l.id)) {
            out.push_back(l.id);
        }
    }
    return out;
}

std::vector<std::string> links_for_element(const TraceModel& trace, std::string_view element_id, Side side)
{
    std::vector<std::string> out;
    for (const auto& l : trace.links) {
        const ElementIds& ids = side == Side::Left ? l.left : side == Side::Right ? l.right : l.targets;
        if (std::find(ids.begin(), ids.end(), element_id) != ids.end()) {
            out.push_back(l.id);
        }
    }
    return out;
}

namespace {

std::string quote(std::string_view text)
{
    std::string out = "\"";
    for (char c : text) {
        if (c == '"' || c == '\\') {
            out += '\\';
        }
        out += c;
    }
    out += '"';
    return out;
}

std::string element_label(const Model& model, const std::string& id)
{
    const ModelElement* el = model.find(id);
    if (el == nullptr) {
        return id;
    }
    const Value* name = el->attrs.find("name");
    if (name != nullptr && std::holds_alternative<std::string>(*name)) {
        return el->type + ":" + std::get<std::string>(*name);
    }
    return el->type + ":" + id;
}

}  // namespace

std::string export_dot(const TraceModel& trace, const Model& left, const Model& right, const Model& composed)
{
    struct Side3 {
        const char* prefix;
        const char* color;
        const Model* model;
        const ElementIds TraceLink::*ids;
    };
    const Side3 sides[] = {
        {"left", "blue", &left, &TraceLink::left},
        {"right", "green", &right, &TraceLink::right},
        {"comp", "red", &composed, &TraceLink::targets},
    };

    std::ostringstream out;
    out << "digraph trace {\n";
    for (const auto& l : trace.links) {
        const char* type = l.kind == LinkKind::Merging ? "MergingLink" : "TransformationLink";
        out << "  " << quote(l.id) << " [shape=box, label=" << quote(std::string(type) + " " + l.id) << "];\n";
    }
    std::set<std::string> declared;
    for (const auto& l : trace.links) {
        for (const auto& s : sides) {
            for (const auto& id : l.*(s.ids)) {
                std::string node = std::string(s.prefix) + ":" + id;
                if (declared.insert(node).second) {
                    out << "  " << quote(node) << " [shape=ellipse, label=" << quote(element_label(*s.model, id))
                        << "];\n";
                }
            }
        }
    }
    for (const auto& r : trace.relationships) {
        out << "  " << quote(r.parent) << " -> " << quote(r.child) << ";\n";
    }
    for (const auto& l : trace.links) {
        for (const auto& s : sides) {
            for (const auto& id : l.*(s.ids)) {
                out << "  " << quote(l.id) << " -> " << quote(std::string(s.prefix) + ":" + id)
                    << " [style=dashed, color=" << s.color << "];\n";
            }
        }
    }
    out << "}\n";
    return out.str();
}

Json trace_to_json(const TraceModel& trace)
{
    Json links = Json::array();
    for (const auto& l : trace.links) {
        Json j = {{"id", l.id},
                  {"kind", std::string(to_string(l.kind))},
                  {"left", l.left},
                  {"right", l.right},
                  {"targets", l.targets}};
        if (l.context) {
            Json ctx = Json::object();
            for (const auto& a : l.context->attributes) {
                ctx[a.name] = a.value;
            }
            j["context"] = std::move(ctx);
        }
        links.push_back(std::move(j));
    }
    Json rels = Json::array();
    for (const auto& r : trace.relationships) {
        rels.push_back({{"parent", r.parent}, {"child", r.child}, {"origin", std::string(to_string(r.origin))}});
    }
    return {{"links", links}, {"relationships", rels}};
}

namespace {

const Json& field(const Json& obj, const char* name, const char* where)
{
    if (!obj.is_object() || !obj.contains(name)) {
        throw ParseError(std::string(where) + ": missing field '" + name + "'");
    }
    return obj.at(name);
}

std::string string_field(const Json& obj, const char* name, const char* where)
{
    const Json& v = field(obj, name, where);
    if (!v.is_string()) {
        throw ParseError(std::string(where) + ": field '" + name + "' must be a string");
    }
    return v.get<std::string>();
}

ElementIds ids_field(const Json& obj, const char* name, const char* where)
{
    const Json& v = field(obj, name, where);
    if (!v.is_array()) {
        throw ParseError(std::string(where) + ": field '" + name + "' must be an array");
    }
    ElementIds out;
    for (const auto& id : v) {
        if (!id.is_string()) {
            throw ParseError(std::string(where) + ": field '" + name + "' must hold strings");
        }
        out.push_back(id.get<std::string>());
    }
    return out;
}

}  // namespace

TraceModel trace_from_json(const Json& doc)
{
    TraceModel trace;
    const Json& links = field(doc, "links", "trace");
    const Json& rels = field(doc, "relationships", "trace");
    if (!links.is_array() || !rels.is_array()) {
        throw ParseError("trace: links and relationships must be arrays");
    }
    std::set<std::string> ids;
    for (const auto& j : links) {
        TraceLink l;
        l.id = string_field(j, "id", "link");
        auto kind = parse_link_kind(string_field(j, "kind", "link"));
        if (!kind) {
            throw ParseError("link " + l.id + ": unknown kind");
        }
        l.kind = *kind;
        l.left = ids_field(j, "left", "link");
        l.right = ids_field(j, "right", "link");
        l.targets = ids_field(j, "targets", "link");
        if (j.contains("context")) {
            const Json& ctx = j.at("context");
            if (!ctx.is_object()) {
                throw ParseError("link " + l.id + ": context must be an object");
            }
            Context c;
            for (const auto& [name, value] : ctx.items()) {
                if (!value.is_string()) {
                    throw ParseError("link " + l.id + ": context values must be strings");
                }
                c.attributes.push_back({name, value.get<std::string>()});
            }
            l.context = std::move(c);
        }
        if (!ids.insert(l.id).second) {
            throw ParseError("duplicate link id '" + l.id + "'");
        }
        trace.links.push_back(std::move(l));
    }
    for (const auto& j : rels) {
        TraceRelationship r;
        r.parent = string_field(j, "parent", "relationship");
        r.child = string_field(j, "child", "relationship");
        auto origin = parse_origin(string_field(j, "origin", "relationship"));
        if (!origin) {
            throw ParseError("relationship " + r.parent + " -> " + r.child + ": unknown origin");
        }
        r.origin = *origin;
        if (!ids.contains(r.parent) || !ids.contains(r.child)) {
            throw ParseError("relationship " + r.parent + " -> " + r.child + " references an unknown link");
        }
        trace.relationships.push_back(std::move(r));
    }
    return trace;
}

TraceModel load_trace(std::string_view text)
{
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("trace: ") + e.what());
    }
    return trace_from_json(doc);
}

}  // namespace mcomp
