#include "mcomp/model_io.hpp"

#include <fstream>
#include <sstream>

namespace mcomp {

namespace {

Json parse_json(std::string_view text)
{
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what());
    }
}

const Json& require(const Json& obj, const char* key, const std::string& where)
{
    if (!obj.is_object()) {
        throw ParseError(where + ": expected an object");
    }
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw ParseError(where + ": missing field '" + key + "'");
    }
    return *it;
}

std::string require_string(const Json& obj, const char* key, const std::string& where)
{
    const Json& v = require(obj, key, where);
    if (!v.is_string()) {
        throw ParseError(where + ": field '" + key + "' must be a string");
    }
    return v.get<std::string>();
}

bool require_bool(const Json& obj, const char* key, const std::string& where)
{
    const Json& v = require(obj, key, where);
    if (!v.is_boolean()) {
        throw ParseError(where + ": field '" + key + "' must be a boolean");
    }
    return v.get<bool>();
}

const Json& require_array(const Json& obj, const char* key, const std::string& where)
{
    const Json& v = require(obj, key, where);
    if (!v.is_array()) {
        throw ParseError(where + ": field '" + key + "' must be an array");
    }
    return v;
}

Value value_from_json(const Json& v, const std::string& where)
{
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_boolean()) {
        return v.get<bool>();
    }
    if (v.is_number_integer()) {
        return v.get<std::int64_t>();
    }
    throw ParseError(where + ": attribute values must be strings, booleans or integers");
}

Json value_to_json(const Value& v)
{
    return std::visit([](const auto& x) { return Json(x); }, v);
}

}  // namespace

Metamodel metamodel_from_json(const Json& doc)
{
    Metamodel mm;
    mm.name = require_string(doc, "name", "metamodel");
    for (const auto& t : require_array(doc, "types", "metamodel")) {
        MetaType type;
        type.name = require_string(t, "name", "type");
        const std::string where = "type " + type.name;
        for (const auto& a : require_array(t, "attributes", where)) {
            AttributeDecl attr;
            attr.name = require_string(a, "name", where);
            const std::string kind = require_string(a, "kind", where);
            auto parsed = parse_primitive_kind(kind);
            if (!parsed) {
                throw ParseError(where + ": unknown attribute kind '" + kind + "'");
            }
            attr.kind = *parsed;
            type.attributes.push_back(std::move(attr));
        }
        for (const auto& r : require_array(t, "references", where)) {
            ReferenceDecl ref;
            ref.name = require_string(r, "name", where);
            ref.target = require_string(r, "target", where);
            if (ref.target.empty()) {
                throw ParseError(where + ": reference '" + ref.name + "' has an empty target");
            }
            ref.many = require_bool(r, "many", where);
            ref.containment = require_bool(r, "containment", where);
            type.references.push_back(std::move(ref));
        }
        mm.types.push_back(std::move(type));
    }
    return mm;
}

Metamodel load_metamodel(std::string_view text)
{
    Metamodel mm = metamodel_from_json(parse_json(text));
    auto problems = validate_metamodel(mm);
    if (!problems.empty()) {
        throw ValidationError("metamodel '" + mm.name + "': " + problems.front());
    }
    return mm;
}

Json metamodel_to_json(const Metamodel& mm)
{
    Json types = Json::array();
    for (const auto& t : mm.types) {
        Json attributes = Json::array();
        for (const auto& a : t.attributes) {
            attributes.push_back({{"name", a.name}, {"kind", std::string(to_string(a.kind))}});
        }
        Json references = Json::array();
        for (const auto& r : t.references) {
            references.push_back({{"name", r.name},
                                  {"target", r.target},
                                  {"many", r.many},
                                  {"containment", r.containment}});
        }
        types.push_back({{"name", t.name}, {"attributes", attributes}, {"references", references}});
    }
    return Json{{"name", mm.name}, {"types", types}};
}

Model model_from_json(const Json& doc)
{
    const std::string role_text = require_string(doc, "role", "model");
    auto role = parse_model_role(role_text);
    if (!role) {
        throw ParseError("model: unknown role '" + role_text + "'");
    }
    Model model(require_string(doc, "id", "model"), require_string(doc, "metamodel", "model"), *role);
    for (const auto& e : require_array(doc, "elements", "model")) {
        ModelElement el;
        el.id = require_string(e, "id", "element");
        el.type = require_string(e, "type", "element " + el.id);
        const std::string where = "element " + el.id;
        if (auto it = e.find("attrs"); it != e.end()) {
            if (!it->is_object()) {
                throw ParseError(where + ": 'attrs' must be an object");
            }
            for (const auto& [name, v] : it->items()) {
                el.attrs.set(name, value_from_json(v, where));
            }
        }
        if (auto it = e.find("refs"); it != e.end()) {
            if (!it->is_object()) {
                throw ParseError(where + ": 'refs' must be an object");
            }
            for (const auto& [name, ids] : it->items()) {
                if (!ids.is_array()) {
                    throw ParseError(where + ": reference '" + name + "' must be an array of ids");
                }
                std::vector<std::string> list;
                for (const auto& id : ids) {
                    if (!id.is_string()) {
                        throw ParseError(where + ": reference '" + name + "' holds a non-string id");
                    }
                    list.push_back(id.get<std::string>());
                }
                el.refs.set(name, std::move(list));
            }
        }
        model.add(std::move(el));
    }
    return model;
}

Model load_model(std::string_view text, const Metamodel& mm)
{
    Model model = model_from_json(parse_json(text));
    auto violations = conforms(model, mm);
    if (!violations.empty()) {
        std::string what = "model '" + model.id() + "' does not conform to '" + mm.name +
                           "': " + format_violation(violations.front());
        throw ConformanceError(std::move(what), std::move(violations));
    }
    return model;
}

Json model_to_json(const Model& model)
{
    Json elements = Json::array();
    for (const auto& el : model.elements()) {
        Json attrs = Json::object();
        for (const auto& [name, v] : el.attrs) {
            attrs[name] = value_to_json(v);
        }
        Json refs = Json::object();
        for (const auto& [name, ids] : el.refs) {
            refs[name] = ids;
        }
        elements.push_back({{"id", el.id}, {"type", el.type}, {"attrs", attrs}, {"refs", refs}});
    }
    return Json{{"id", model.id()},
                {"metamodel", model.metamodel()},
                {"role", std::string(to_string(model.role()))},
                {"elements", elements}};
}

std::string dump_json(const Json& doc)
{
    return doc.dump(2) + "\n";
}

std::string serialize_model(const Model& model)
{
    return dump_json(model_to_json(model));
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot read '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write '" + path.string() + "'");
    }
    out << contents;
}

}  // namespace mcomp
