#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "mcomp/errors.hpp"

namespace mcomp {

enum class PrimitiveKind { String, Boolean, Integer };

std::string_view to_string(PrimitiveKind kind);
std::optional<PrimitiveKind> parse_primitive_kind(std::string_view text);

using Value = std::variant<std::string, bool, std::int64_t>;

PrimitiveKind kind_of(const Value& value);
std::string format_value(const Value& value);

struct AttributeDecl {
    std::string name;
    PrimitiveKind kind = PrimitiveKind::String;

    friend bool operator==(const AttributeDecl&, const AttributeDecl&) = default;
};

struct ReferenceDecl {
    std::string name;
    /// Empty target means "any type" (only used by the built-in trace metamodel).
    std::string target;
    bool many = false;
    bool containment = false;
    /// External references point into other models and are not resolvable locally.
    /// Only the built-in trace metamodel declares them.
    bool external = false;

    friend bool operator==(const ReferenceDecl&, const ReferenceDecl&) = default;
};

struct MetaType {
    std::string name;
    std::vector<AttributeDecl> attributes;
    std::vector<ReferenceDecl> references;

    const AttributeDecl* find_attribute(std::string_view attr) const;
    const ReferenceDecl* find_reference(std::string_view ref) const;

    friend bool operator==(const MetaType&, const MetaType&) = default;
};

struct Metamodel {
    std::string name;
    std::vector<MetaType> types;

    const MetaType* find_type(std::string_view type) const;

    friend bool operator==(const Metamodel&, const Metamodel&) = default;
};

/// Metamodels addressable by name.
using MetamodelRegistry = std::map<std::string, Metamodel, std::less<>>;

enum class ModelRole { Left, Right, Composed, Trace };

std::string_view to_string(ModelRole role);
std::optional<ModelRole> parse_model_role(std::string_view text);

/// Insertion-ordered name -> value table. Feature maps are tiny, so a vector beats a map.
template <typename V>
class FeatureMap {
public:
    using Entry = std::pair<std::string, V>;

    const V* find(std::string_view name) const
    {
        for (const auto& [key, value] : entries_) {
            if (key == name) {
                return &value;
            }
        }
        return nullptr;
    }

    V* find(std::string_view name)
    {
        for (auto& [key, value] : entries_) {
            if (key == name) {
                return &value;
            }
        }
        return nullptr;
    }

    V& operator[](std::string_view name)
    {
        if (V* existing = find(name)) {
            return *existing;
        }
        entries_.emplace_back(std::string(name), V{});
        return entries_.back().second;
    }

    void set(std::string_view name, V value) { (*this)[name] = std::move(value); }

    bool erase(std::string_view name)
    {
        for (auto it = entries_.begin(); it != entries_.end(); ++it) {
            if (it->first == name) {
                entries_.erase(it);
                return true;
            }
        }
        return false;
    }

    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    friend bool operator==(const FeatureMap&, const FeatureMap&) = default;

private:
    std::vector<Entry> entries_;
};

struct ModelElement {
    std::string id;
    std::string type;
    FeatureMap<Value> attrs;
    FeatureMap<std::vector<std::string>> refs;

    friend bool operator==(const ModelElement&, const ModelElement&) = default;
};

/// A model: an ordered table of elements with unique ids. Elements keep document
/// (or creation) order.
class Model {
public:
    Model() = default;
    Model(std::string id, std::string metamodel, ModelRole role);

    const std::string& id() const noexcept { return id_; }
    const std::string& metamodel() const noexcept { return metamodel_; }
    ModelRole role() const noexcept { return role_; }

    const std::vector<ModelElement>& elements() const noexcept { return elements_; }
    std::size_t size() const noexcept { return elements_.size(); }
    bool empty() const noexcept { return elements_.empty(); }

    const ModelElement* find(std::string_view element_id) const;
    ModelElement* find(std::string_view element_id);
    bool contains(std::string_view element_id) const { return find(element_id) != nullptr; }

    /// Appends an element. Duplicate ids are kept so that conformance can report them;
    /// lookups then return the first occurrence.
    ModelElement& add(ModelElement element);

    friend bool operator==(const Model& a, const Model& b)
    {
        return a.id_ == b.id_ && a.metamodel_ == b.metamodel_ && a.role_ == b.role_ &&
               a.elements_ == b.elements_;
    }

private:
    std::string id_;
    std::string metamodel_;
    ModelRole role_ = ModelRole::Left;
    std::vector<ModelElement> elements_;
    std::unordered_map<std::string, std::size_t> index_;
};

struct Violation {
    std::string element_id;  ///< empty for model-level violations
    std::string rule;        ///< short machine-readable rule tag
    std::string message;

    friend bool operator==(const Violation&, const Violation&) = default;
};

std::string format_violation(const Violation& v);

/// A model document that parses but does not conform to its metamodel.
class ConformanceError : public Error {
public:
    ConformanceError(const std::string& message, std::vector<Violation> violations)
        : Error(message), violations_(std::move(violations))
    {
    }

    const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
    std::vector<Violation> violations_;
};

/// Checks a model against a metamodel. Never throws; every problem is reported.
std::vector<Violation> conforms(const Model& model, const Metamodel& mm);

/// Structural problems of a metamodel (duplicate names, dangling reference targets).
std::vector<std::string> validate_metamodel(const Metamodel& mm);

}  // namespace mcomp
