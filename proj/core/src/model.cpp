#include "mcomp/model.hpp"

#include <set>

namespace mcomp {

std::string_view to_string(PrimitiveKind kind)
{
    switch (kind) {
    case PrimitiveKind::String:
        return "string";
    case PrimitiveKind::Boolean:
        return "boolean";
    case PrimitiveKind::Integer:
        return "integer";
    }
    return "?";
}

std::optional<PrimitiveKind> parse_primitive_kind(std::string_view text)
{
    if (text == "string") {
        return PrimitiveKind::String;
    }
    if (text == "boolean") {
        return PrimitiveKind::Boolean;
    }
    if (text == "integer") {
        return PrimitiveKind::Integer;
    }
    return std::nullopt;
}

PrimitiveKind kind_of(const Value& value)
{
    switch (value.index()) {
    case 0:
        return PrimitiveKind::String;
    case 1:
        return PrimitiveKind::Boolean;
    default:
        return PrimitiveKind::Integer;
    }
}

std::string format_value(const Value& value)
{
    if (const auto* s = std::get_if<std::string>(&value)) {
        return '"' + *s + '"';
    }
    if (const auto* b = std::get_if<bool>(&value)) {
        return *b ? "true" : "false";
    }
    return std::to_string(std::get<std::int64_t>(value));
}

const AttributeDecl* MetaType::find_attribute(std::string_view attr) const
{
    for (const auto& a : attributes) {
        if (a.name == attr) {
            return &a;
        }
    }
    return nullptr;
}

const ReferenceDecl* MetaType::find_reference(std::string_view ref) const
{
    for (const auto& r : references) {
        if (r.name == ref) {
            return &r;
        }
    }
    return nullptr;
}

const MetaType* Metamodel::find_type(std::string_view type) const
{
    for (const auto& t : types) {
        if (t.name == type) {
            return &t;
        }
    }
    return nullptr;
}

std::string_view to_string(ModelRole role)
{
    switch (role) {
    case ModelRole::Left:
        return "left";
    case ModelRole::Right:
        return "right";
    case ModelRole::Composed:
        return "composed";
    case ModelRole::Trace:
        return "trace";
    }
    return "?";
}

std::optional<ModelRole> parse_model_role(std::string_view text)
{
    if (text == "left") {
        return ModelRole::Left;
    }
    if (text == "right") {
        return ModelRole::Right;
    }
    if (text == "composed") {
        return ModelRole::Composed;
    }
    if (text == "trace") {
        return ModelRole::Trace;
    }
    return std::nullopt;
}

Model::Model(std::string id, std::string metamodel, ModelRole role)
    : id_(std::move(id)), metamodel_(std::move(metamodel)), role_(role)
{
}

const ModelElement* Model::find(std::string_view element_id) const
{
    auto it = index_.find(std::string(element_id));
    return it == index_.end() ? nullptr : &elements_[it->second];
}

ModelElement* Model::find(std::string_view element_id)
{
    auto it = index_.find(std::string(element_id));
    return it == index_.end() ? nullptr : &elements_[it->second];
}

ModelElement& Model::add(ModelElement element)
{
    index_.try_emplace(element.id, elements_.size());
    elements_.push_back(std::move(element));
    return elements_.back();
}

std::string format_violation(const Violation& v)
{
    std::string out = v.element_id.empty() ? std::string("<model>") : v.element_id;
    out += " [" + v.rule + "] " + v.message;
    return out;
}

std::vector<Violation> conforms(const Model& model, const Metamodel& mm)
{
    std::vector<Violation> out;
    auto report = [&](const std::string& element, std::string rule, std::string message) {
        out.push_back({element, std::move(rule), std::move(message)});
    };

    if (model.metamodel() != mm.name) {
        report("", "metamodel", "model declares metamodel '" + model.metamodel() +
                                    "' but is checked against '" + mm.name + "'");
    }

    std::set<std::string, std::less<>> seen;
    for (const auto& el : model.elements()) {
        if (!seen.insert(el.id).second) {
            report(el.id, "duplicate-id", "element id is not unique");
        }
    }

    for (const auto& el : model.elements()) {
        const MetaType* type = mm.find_type(el.type);
        if (type == nullptr) {
            report(el.id, "unknown-type", "type '" + el.type + "' is not declared in '" + mm.name + "'");
            continue;
        }
        for (const auto& [name, value] : el.attrs) {
            const AttributeDecl* decl = type->find_attribute(name);
            if (decl == nullptr) {
                report(el.id, "undeclared-attribute",
                       "attribute '" + name + "' is not declared on " + type->name);
            } else if (decl->kind != kind_of(value)) {
                report(el.id, "attribute-kind",
                       "attribute '" + name + "' expects " + std::string(to_string(decl->kind)) +
                           ", got " + format_value(value));
            }
        }
        for (const auto& [name, ids] : el.refs) {
            const ReferenceDecl* decl = type->find_reference(name);
            if (decl == nullptr) {
                report(el.id, "undeclared-reference",
                       "reference '" + name + "' is not declared on " + type->name);
                continue;
            }
            if (!decl->many && ids.size() > 1) {
                report(el.id, "multiplicity",
                       "reference '" + name + "' holds " + std::to_string(ids.size()) +
                           " ids but has multiplicity one");
            }
            if (decl->external) {
                continue;
            }
            for (const auto& target_id : ids) {
                const ModelElement* target = model.find(target_id);
                if (target == nullptr) {
                    report(el.id, "dangling-reference",
                           "reference '" + name + "' points at missing element '" + target_id + "'");
                } else if (!decl->target.empty() && target->type != decl->target) {
                    report(el.id, "reference-type",
                           "reference '" + name + "' expects " + decl->target + ", element '" +
                               target_id + "' is a " + target->type);
                }
            }
        }
    }
    return out;
}

std::vector<std::string> validate_metamodel(const Metamodel& mm)
{
    std::vector<std::string> out;
    std::set<std::string, std::less<>> type_names;
    for (const auto& t : mm.types) {
        if (!type_names.insert(t.name).second) {
            out.push_back("duplicate type name '" + t.name + "'");
        }
    }
    for (const auto& t : mm.types) {
        std::set<std::string, std::less<>> features;
        for (const auto& a : t.attributes) {
            if (!features.insert(a.name).second) {
                out.push_back("duplicate feature '" + a.name + "' on " + t.name);
            }
        }
        for (const auto& r : t.references) {
            if (!features.insert(r.name).second) {
                out.push_back("duplicate feature '" + r.name + "' on " + t.name);
            }
            if (!r.target.empty() && !r.external && mm.find_type(r.target) == nullptr) {
                out.push_back("reference " + t.name + "." + r.name + " targets undeclared type '" +
                              r.target + "'");
            }
        }
    }
    return out;
}

}  // namespace mcomp
