#include "mcomp/engine.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "mcomp/spec_dsl.hpp"
#include "mcomp/trace_metamodel.hpp"

namespace mcomp {

ElementIds Activation::source_set() const
{
    ElementIds out = left;
    out.insert(out.end(), right.begin(), right.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

const Activation* ExecutionResult::find_activation(std::size_t seq) const
{
    if (seq == 0 || seq > activations.size()) {
        return nullptr;
    }
    return &activations[seq - 1];
}

ElementIds resolve(const ElementIds& source, const std::vector<Activation>& log)
{
    ElementIds wanted = source;
    std::sort(wanted.begin(), wanted.end());
    wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
    ElementIds out;
    for (const auto& a : log) {
        if (a.source_set() == wanted) {
            out.insert(out.end(), a.composed.begin(), a.composed.end());
        }
    }
    return out;
}

namespace {

// Model slots of an execution.
constexpr int kLeft = 0;
constexpr int kRight = 1;
constexpr int kPrimary = 2;
constexpr int kSecondary = 3;

struct ElemRef {
    int model = kLeft;
    std::string id;

    friend bool operator==(const ElemRef&, const ElemRef&) = default;
};

struct Null {
    friend bool operator==(const Null&, const Null&) = default;
};

using RtValue = std::variant<Null, std::string, bool, std::int64_t, ElemRef, std::vector<ElemRef>>;

std::string join(const ElementIds& ids)
{
    std::string out;
    for (const auto& id : ids) {
        if (!out.empty()) {
            out += ", ";
        }
        out += id;
    }
    return out;
}

std::string describe(const RtValue& v)
{
    switch (v.index()) {
    case 0:
        return "null";
    case 1:
        return '"' + std::get<std::string>(v) + '"';
    case 2:
        return std::get<bool>(v) ? "true" : "false";
    case 3:
        return std::to_string(std::get<std::int64_t>(v));
    case 4:
        return "element " + std::get<ElemRef>(v).id;
    default:
        return "collection of " + std::to_string(std::get<std::vector<ElemRef>>(v).size()) + " elements";
    }
}

// Variable bindings; exists() pushes and pops bound variables.
class Env {
public:
    void bind(std::string name, RtValue v) { vars_.emplace_back(std::move(name), std::move(v)); }
    void pop() { vars_.pop_back(); }

    const RtValue* find(std::string_view name) const
    {
        for (auto it = vars_.rbegin(); it != vars_.rend(); ++it) {
            if (it->first == name) {
                return &it->second;
            }
        }
        return nullptr;
    }

private:
    std::vector<std::pair<std::string, RtValue>> vars_;
};

// Identifies the rule and elements being evaluated, for error messages.
struct EvalSite {
    const CompositionRule* rule = nullptr;
    ElementIds elements;

    std::string text() const { return "rule " + rule->name + " on (" + join(elements) + ")"; }
};

}  // namespace

struct Execution::State {
    const CompositionSpec* spec;
    MetamodelRegistry mms;
    const Model* left;
    const Model* right;
    ExecutionResult result;

    // alias -> model slot
    std::map<std::string, int, std::less<>> slots;
    const Metamodel* slot_mm[4] = {nullptr, nullptr, nullptr, nullptr};
    std::size_t counters[4] = {0, 0, 0, 0};

    std::set<std::string, std::less<>> left_matched;
    std::set<std::string, std::less<>> right_matched;
    std::set<std::pair<std::string, std::string>> corresponding;

    std::vector<bool> initialized;
    std::map<std::pair<int, std::string>, std::vector<std::size_t>> producers;
    std::map<std::tuple<std::string, ElementIds, ElementIds>, std::size_t> memo;
    std::size_t events = 0;
    bool matched = false;
    bool allocated = false;

    const Model* model(int slot) const
    {
        switch (slot) {
        case kLeft:
            return left;
        case kRight:
            return right;
        case kPrimary:
            return &result.composed;
        default:
            return result.secondary ? &*result.secondary : nullptr;
        }
    }

    Model* mutable_model(int slot)
    {
        if (slot == kPrimary) {
            return &result.composed;
        }
        if (slot == kSecondary && result.secondary) {
            return &*result.secondary;
        }
        return nullptr;
    }

    const MetaType* type_of(const ElemRef& ref) const
    {
        const Model* m = model(ref.model);
        const ModelElement* el = m ? m->find(ref.id) : nullptr;
        if (el == nullptr || slot_mm[ref.model] == nullptr) {
            return nullptr;
        }
        return slot_mm[ref.model]->find_type(el->type);
    }

    const std::string& element_type(const ElemRef& ref) const
    {
        static const std::string none;
        const Model* m = model(ref.model);
        const ModelElement* el = m ? m->find(ref.id) : nullptr;
        return el ? el->type : none;
    }

    int slot_of(const std::string& alias) const
    {
        auto it = slots.find(alias);
        return it == slots.end() ? -1 : it->second;
    }

    // ---- evaluation -------------------------------------------------------

    RtValue eval(const Expr& e, const Env& env, const EvalSite& site) const
    {
        switch (e.kind) {
        case Expr::Kind::Literal:
            return std::visit([](const auto& v) -> RtValue { return v; }, e.literal);
        case Expr::Kind::Var: {
            const RtValue* v = env.find(e.name);
            if (v == nullptr) {
                throw EvaluationError(site.text() + ": unbound variable '" + e.name + "'");
            }
            return *v;
        }
        case Expr::Kind::Member:
            return member(eval(e.operands[0], env, site), e.name, site);
        case Expr::Kind::Eq:
            return equals(eval(e.operands[0], env, site), eval(e.operands[1], env, site), site);
        case Expr::Kind::And:
            return truth(e.operands[0], env, site) && truth(e.operands[1], env, site);
        case Expr::Kind::Or:
            return truth(e.operands[0], env, site) || truth(e.operands[1], env, site);
        case Expr::Kind::Not:
            return !truth(e.operands[0], env, site);
        case Expr::Kind::Exists: {
            RtValue coll = eval(e.operands[0], env, site);
            if (std::holds_alternative<Null>(coll)) {
                return false;
            }
            const auto* items = std::get_if<std::vector<ElemRef>>(&coll);
            if (items == nullptr) {
                throw EvaluationError(site.text() + ": exists over " + describe(coll));
            }
            Env inner = env;
            for (const auto& item : *items) {
                inner.bind(e.name, item);
                const bool hit = truth(e.operands[1], inner, site);
                inner.pop();
                if (hit) {
                    return true;
                }
            }
            return false;
        }
        case Expr::Kind::HasMatch: {
            const RtValue* v = env.find(e.name);
            const auto* ref = v ? std::get_if<ElemRef>(v) : nullptr;
            if (ref == nullptr) {
                throw EvaluationError(site.text() + ": hasMatch needs a bound source element");
            }
            if (ref->model == kLeft) {
                return left_matched.contains(ref->id);
            }
            if (ref->model == kRight) {
                return right_matched.contains(ref->id);
            }
            return false;
        }
        }
        return Null{};
    }

    bool truth(const Expr& e, const Env& env, const EvalSite& site) const
    {
        RtValue v = eval(e, env, site);
        if (const auto* b = std::get_if<bool>(&v)) {
            return *b;
        }
        throw EvaluationError(site.text() + ": expected a boolean, got " + describe(v));
    }

    RtValue member(const RtValue& base, const std::string& name, const EvalSite& site) const
    {
        if (std::holds_alternative<Null>(base)) {
            return Null{};
        }
        const auto* ref = std::get_if<ElemRef>(&base);
        if (ref == nullptr) {
            throw EvaluationError(site.text() + ": cannot access '" + name + "' on " + describe(base));
        }
        const ModelElement* el = model(ref->model)->find(ref->id);
        const MetaType* type = type_of(*ref);
        if (el == nullptr || type == nullptr) {
            throw EvaluationError(site.text() + ": element '" + ref->id + "' has no known type");
        }
        if (type->find_attribute(name) != nullptr) {
            const Value* v = el->attrs.find(name);
            if (v == nullptr) {
                return Null{};
            }
            return std::visit([](const auto& x) -> RtValue { return x; }, *v);
        }
        if (const ReferenceDecl* decl = type->find_reference(name)) {
            if (decl->external) {
                throw EvaluationError(site.text() + ": reference '" + name + "' cannot be navigated");
            }
            const ElementIds* ids = el->refs.find(name);
            if (decl->many) {
                std::vector<ElemRef> out;
                if (ids != nullptr) {
                    for (const auto& id : *ids) {
                        out.push_back({ref->model, id});
                    }
                }
                return out;
            }
            if (ids == nullptr || ids->empty()) {
                return Null{};
            }
            return ElemRef{ref->model, ids->front()};
        }
        throw EvaluationError(site.text() + ": '" + name + "' is not a feature of " + type->name);
    }

    RtValue equals(const RtValue& a, const RtValue& b, const EvalSite& site) const
    {
        const bool a_null = std::holds_alternative<Null>(a);
        const bool b_null = std::holds_alternative<Null>(b);
        if (a_null || b_null) {
            return a_null && b_null;
        }
        if (a.index() != b.index() || std::holds_alternative<std::vector<ElemRef>>(a)) {
            throw EvaluationError(site.text() + ": cannot compare " + describe(a) + " with " + describe(b));
        }
        return a == b;
    }

    std::vector<ElemRef> as_elements(const RtValue& v, const EvalSite& site) const
    {
        if (std::holds_alternative<Null>(v)) {
            return {};
        }
        if (const auto* r = std::get_if<ElemRef>(&v)) {
            return {*r};
        }
        if (const auto* rs = std::get_if<std::vector<ElemRef>>(&v)) {
            return *rs;
        }
        throw EvaluationError(site.text() + ": expected elements, got " + describe(v));
    }

    // ---- match phase ------------------------------------------------------

    std::vector<const ModelElement*> of_type(const Model& m, const std::string& type) const
    {
        std::vector<const ModelElement*> out;
        for (const auto& el : m.elements()) {
            if (el.type == type) {
                out.push_back(&el);
            }
        }
        return out;
    }

    void run_match_phase()
    {
        if (matched) {
            return;
        }
        matched = true;
        for (const auto& rule : spec->rules) {
            if (rule.kind != RuleKind::Match) {
                continue;
            }
            const Param& lp = rule.in_left.front();
            const Param& rp = rule.in_right.front();
            for (const ModelElement* l : of_type(*left, lp.type)) {
                for (const ModelElement* r : of_type(*right, rp.type)) {
                    Env env;
                    env.bind(lp.name, ElemRef{kLeft, l->id});
                    env.bind(rp.name, ElemRef{kRight, r->id});
                    EvalSite site{&rule, {l->id, r->id}};
                    if (rule.guard && truth(*rule.guard, env, site)) {
                        result.match_trace.push_back({rule.name, l->id, r->id});
                        left_matched.insert(l->id);
                        right_matched.insert(r->id);
                        corresponding.insert({l->id, r->id});
                    }
                }
            }
        }
    }

    // ---- allocation -------------------------------------------------------

    std::size_t allocate_activation(const CompositionRule& rule, ElementIds lefts, ElementIds rights)
    {
        Activation a;
        a.seq = result.activations.size() + 1;
        a.rule = rule.name;
        a.kind = rule.kind;
        a.left = std::move(lefts);
        a.right = std::move(rights);
        for (const auto& p : rule.out) {
            const int slot = slot_of(p.alias);
            Model* target = mutable_model(slot);
            ModelElement el;
            el.id = "t" + std::to_string(++counters[slot]);
            el.type = p.type;
            target->add(el);
            (slot == kPrimary ? a.composed : a.secondary).push_back(el.id);
        }
        const std::size_t index = result.activations.size();
        memo.emplace(std::make_tuple(rule.name, a.left, a.right), index);
        for (const auto& id : a.left) {
            auto& list = producers[{kLeft, id}];
            if (list.empty() || list.back() != index) {
                list.push_back(index);
            }
        }
        for (const auto& id : a.right) {
            auto& list = producers[{kRight, id}];
            if (list.empty() || list.back() != index) {
                list.push_back(index);
            }
        }
        result.activations.push_back(std::move(a));
        initialized.push_back(false);
        return index;
    }

    bool guard_holds(const CompositionRule& rule, const ElementIds& lefts, const ElementIds& rights) const
    {
        if (!rule.guard) {
            return true;
        }
        Env env;
        bind_inputs(rule, lefts, rights, env);
        ElementIds all = lefts;
        all.insert(all.end(), rights.begin(), rights.end());
        return truth(*rule.guard, env, EvalSite{&rule, all});
    }

    static void bind_inputs(const CompositionRule& rule, const ElementIds& lefts, const ElementIds& rights, Env& env)
    {
        for (std::size_t i = 0; i < rule.in_left.size(); ++i) {
            env.bind(rule.in_left[i].name, ElemRef{kLeft, lefts[i]});
        }
        for (std::size_t i = 0; i < rule.in_right.size(); ++i) {
            env.bind(rule.in_right[i].name, ElemRef{kRight, rights[i]});
        }
    }

    void allocate()
    {
        if (allocated) {
            return;
        }
        run_match_phase();
        allocated = true;

        std::set<std::pair<std::string, std::string>> merged;
        for (const auto& c : result.match_trace) {
            if (!merged.insert({c.left, c.right}).second) {
                continue;
            }
            const std::string& lt = left->find(c.left)->type;
            const std::string& rt = right->find(c.right)->type;
            const CompositionRule* chosen = nullptr;
            for (const auto& rule : spec->rules) {
                if (rule.kind != RuleKind::Merge || rule.in_left.front().type != lt ||
                    rule.in_right.front().type != rt) {
                    continue;
                }
                if (chosen != nullptr) {
                    throw AmbiguityError("merge rules " + chosen->name + " and " + rule.name +
                                         " both apply to the correspondence (" + c.left + ", " + c.right + ")");
                }
                chosen = &rule;
            }
            if (chosen != nullptr) {
                allocate_activation(*chosen, {c.left}, {c.right});
            }
        }

        std::map<std::tuple<std::vector<std::string>, ElementIds, ElementIds>, std::string> claimed;
        for (const auto& rule : spec->rules) {
            if (rule.kind != RuleKind::Transform) {
                continue;
            }
            std::vector<std::string> signature;
            std::vector<std::vector<const ModelElement*>> domains;
            for (const auto& p : rule.in_left) {
                signature.push_back("L!" + p.type);
                domains.push_back(of_type(*left, p.type));
            }
            for (const auto& p : rule.in_right) {
                signature.push_back("R!" + p.type);
                domains.push_back(of_type(*right, p.type));
            }
            for_each_tuple(domains, [&](const std::vector<const ModelElement*>& tuple) {
                ElementIds lefts;
                ElementIds rights;
                for (std::size_t i = 0; i < tuple.size(); ++i) {
                    (i < rule.in_left.size() ? lefts : rights).push_back(tuple[i]->id);
                }
                if (!guard_holds(rule, lefts, rights)) {
                    return;
                }
                auto [it, fresh] = claimed.try_emplace({signature, lefts, rights}, rule.name);
                if (!fresh) {
                    ElementIds all = lefts;
                    all.insert(all.end(), rights.begin(), rights.end());
                    throw AmbiguityError("transform rules " + it->second + " and " + rule.name +
                                         " both apply to (" + join(all) + ")");
                }
                allocate_activation(rule, std::move(lefts), std::move(rights));
            });
        }
    }

    template <typename Fn>
    static void for_each_tuple(const std::vector<std::vector<const ModelElement*>>& domains, Fn&& fn)
    {
        if (domains.empty()) {
            return;
        }
        for (const auto& d : domains) {
            if (d.empty()) {
                return;
            }
        }
        std::vector<std::size_t> idx(domains.size(), 0);
        std::vector<const ModelElement*> tuple(domains.size());
        for (;;) {
            for (std::size_t i = 0; i < domains.size(); ++i) {
                tuple[i] = domains[i][idx[i]];
            }
            fn(tuple);
            std::size_t k = domains.size();
            while (k > 0) {
                --k;
                if (++idx[k] < domains[k].size()) {
                    break;
                }
                idx[k] = 0;
                if (k == 0) {
                    return;
                }
            }
        }
    }

    // ---- initialization ---------------------------------------------------

    void initialize()
    {
        allocate();
        for (std::size_t i = 0; i < result.activations.size(); ++i) {
            if (!initialized[i]) {
                initialize_activation(i);
            }
        }
    }

    void initialize_activation(std::size_t index)
    {
        initialized[index] = true;
        const Activation snapshot = result.activations[index];
        const CompositionRule& rule = *spec->find_rule(snapshot.rule);
        Env env;
        bind_inputs(rule, snapshot.left, snapshot.right, env);
        std::size_t composed_i = 0;
        std::size_t secondary_i = 0;
        for (const auto& p : rule.out) {
            const int slot = slot_of(p.alias);
            const std::string& id =
                slot == kPrimary ? snapshot.composed[composed_i++] : snapshot.secondary[secondary_i++];
            env.bind(p.name, ElemRef{slot, id});
        }
        ElementIds all = snapshot.left;
        all.insert(all.end(), snapshot.right.begin(), snapshot.right.end());
        EvalSite site{&rule, all};
        for (const auto& st : rule.body) {
            execute_statement(snapshot.seq, rule, st, env, site);
        }
    }

    struct Destination {
        ElemRef owner;
        const ReferenceDecl* ref = nullptr;
    };

    Destination destination(const CompositionRule& rule, const Statement& st, const Env& env,
                            const EvalSite& site) const
    {
        const RtValue* v = env.find(st.param);
        const auto* owner = v ? std::get_if<ElemRef>(v) : nullptr;
        if (owner == nullptr || rule.find_out(st.param) == nullptr) {
            throw EvaluationError(site.text() + ": '" + st.param + "' is not an output parameter");
        }
        return {*owner, nullptr};
    }

    // Created elements of activation `index` that may be wired into `dest`.
    std::vector<ElemRef> candidates(std::size_t index, const Destination& dest) const
    {
        const Activation& a = result.activations[index];
        const int slot = dest.ref->external ? kPrimary : dest.owner.model;
        const ElementIds& ids = slot == kPrimary ? a.composed : a.secondary;
        std::vector<ElemRef> out;
        for (const auto& id : ids) {
            ElemRef r{slot, id};
            if (dest.ref->external || dest.ref->target.empty() || element_type(r) == dest.ref->target) {
                out.push_back(std::move(r));
            }
        }
        return out;
    }

    void wire(const Destination& dest, const std::vector<ElemRef>& values, const EvalSite& site)
    {
        Model* m = mutable_model(dest.owner.model);
        ModelElement* owner = m->find(dest.owner.id);
        const ReferenceDecl& ref = *dest.ref;
        for (const auto& v : values) {
            if (ref.external) {
                continue;
            }
            if (v.model != dest.owner.model) {
                throw EvaluationError(site.text() + ": reference '" + ref.name + "' cannot point at '" + v.id +
                                      "' in another model");
            }
            if (!ref.target.empty() && element_type(v) != ref.target) {
                throw EvaluationError(site.text() + ": reference '" + ref.name + "' expects " + ref.target +
                                      ", element '" + v.id + "' is a " + element_type(v));
            }
        }
        if (!ref.many && values.size() > 1) {
            throw EvaluationError(site.text() + ": reference '" + ref.name + "' holds one element, got " +
                                  std::to_string(values.size()));
        }
        if (values.empty()) {
            return;
        }
        auto& ids = owner->refs[ref.name];
        if (!ref.many) {
            ids.clear();
        }
        for (const auto& v : values) {
            ids.push_back(v.id);
        }
    }

    void execute_statement(std::size_t caller, const CompositionRule& rule, const Statement& st, const Env& env,
                           const EvalSite& site)
    {
        if (st.kind == Statement::Kind::Call) {
            evaluate_call(caller, st.call, env, site, nullptr);
            return;
        }
        Destination dest = destination(rule, st, env, site);
        const MetaType* type = type_of(dest.owner);
        const AttributeDecl* attr = type ? type->find_attribute(st.feature) : nullptr;
        dest.ref = type ? type->find_reference(st.feature) : nullptr;
        if (attr == nullptr && dest.ref == nullptr) {
            throw EvaluationError(site.text() + ": '" + st.feature + "' is not a feature of output '" + st.param + "'");
        }

        switch (st.kind) {
        case Statement::Kind::SetFeature: {
            RtValue v = eval(st.value, env, site);
            if (attr != nullptr) {
                if (std::holds_alternative<Null>(v)) {
                    return;
                }
                Value value;
                if (const auto* s = std::get_if<std::string>(&v)) {
                    value = *s;
                } else if (const auto* b = std::get_if<bool>(&v)) {
                    value = *b;
                } else if (const auto* n = std::get_if<std::int64_t>(&v)) {
                    value = *n;
                } else {
                    throw EvaluationError(site.text() + ": attribute '" + st.feature + "' cannot hold " + describe(v));
                }
                if (kind_of(value) != attr->kind) {
                    throw EvaluationError(site.text() + ": attribute '" + st.feature + "' expects " +
                                          std::string(to_string(attr->kind)) + ", got " + describe(v));
                }
                mutable_model(dest.owner.model)->find(dest.owner.id)->attrs.set(st.feature, std::move(value));
                return;
            }
            wire_direct(dest, as_elements(v, site), site);
            return;
        }
        case Statement::Kind::SetResolve: {
            require_reference(dest, st, site);
            std::vector<ElemRef> sources = as_elements(eval(st.value, env, site), site);
            wire(dest, resolve_elements(caller, sources, &dest, site), site);
            return;
        }
        case Statement::Kind::SetCall:
            require_reference(dest, st, site);
            wire(dest, evaluate_call(caller, st.call, env, site, &dest), site);
            return;
        case Statement::Kind::Call:
            return;
        }
    }

    void require_reference(const Destination& dest, const Statement& st, const EvalSite& site) const
    {
        if (dest.ref == nullptr) {
            throw EvaluationError(site.text() + ": '" + st.feature + "' is not a reference");
        }
    }

    void wire_direct(const Destination& dest, const std::vector<ElemRef>& values, const EvalSite& site)
    {
        if (dest.ref->external) {
            if (!dest.ref->many && values.size() > 1) {
                throw EvaluationError(site.text() + ": reference '" + dest.ref->name + "' holds one element");
            }
            auto& ids = mutable_model(dest.owner.model)->find(dest.owner.id)->refs[dest.ref->name];
            for (const auto& v : values) {
                ids.push_back(v.id);
            }
            return;
        }
        wire(dest, values, site);
    }

    // Per-element resolution. Records one implicit call per distinct producing source set.
    std::vector<ElemRef> resolve_elements(std::size_t caller, const std::vector<ElemRef>& sources,
                                          const Destination* dest, const EvalSite& site)
    {
        std::vector<ElemRef> wired;
        std::vector<std::size_t> record_of_group;  // index into implicit_calls, aligned with groups
        std::vector<ElementIds> groups;
        std::set<std::size_t> recorded;  // activations already accounted for in a record
        for (const auto& e : sources) {
            if (e.model != kLeft && e.model != kRight) {
                throw EvaluationError(site.text() + ": equivalent() applies to source elements, '" + e.id +
                                      "' is not one");
            }
            auto it = producers.find({e.model, e.id});
            if (it == producers.end() || it->second.empty()) {
                throw UnresolvedEquivalentError(site.text() + ": element '" + e.id +
                                                "' was not consumed by any merge or transform activation");
            }
            std::size_t before = wired.size();
            for (std::size_t index : it->second) {
                ElementIds group = result.activations[index].source_set();
                std::size_t g = 0;
                while (g < groups.size() && groups[g] != group) {
                    ++g;
                }
                if (g == groups.size()) {
                    groups.push_back(group);
                    ImplicitCallRecord rec;
                    rec.event = ++events;
                    rec.caller = caller;
                    rec.resolved = group;
                    result.implicit_calls.push_back(std::move(rec));
                    record_of_group.push_back(result.implicit_calls.size() - 1);
                }
                std::vector<ElemRef> found;
                if (dest != nullptr) {
                    found = candidates(index, *dest);
                } else {
                    for (const auto& id : result.activations[index].composed) {
                        found.push_back({kPrimary, id});
                    }
                }
                const bool first = recorded.insert(index).second;
                auto& rec = result.implicit_calls[record_of_group[g]];
                for (const auto& f : found) {
                    if (first) {
                        rec.wired.push_back(f.id);
                    }
                    wired.push_back(f);
                }
            }
            if (wired.size() == before) {
                throw UnresolvedEquivalentError(site.text() + ": element '" + e.id + "' has no equivalent" +
                                                (dest ? " for reference '" + dest->ref->name + "'" : std::string()));
            }
        }
        return wired;
    }

    // Applies a call statement to every applicable argument tuple.
    std::vector<ElemRef> evaluate_call(std::size_t caller, const CallExpr& call, const Env& env, const EvalSite& site,
                                       const Destination* dest)
    {
        const CompositionRule* callee = spec->find_rule(call.callee);
        if (callee == nullptr || callee->kind == RuleKind::Match) {
            throw CallError(site.text() + ": '" + call.callee + "' is not a callable rule");
        }
        const std::size_t arity = callee->in_left.size() + callee->in_right.size();
        if (call.args.size() != arity) {
            throw CallError(site.text() + ": rule '" + call.callee + "' expects " + std::to_string(arity) +
                            " arguments, got " + std::to_string(call.args.size()));
        }
        std::vector<std::vector<ElemRef>> domains;
        for (const auto& arg : call.args) {
            domains.push_back(as_elements(eval(arg, env, site), site));
        }
        std::vector<ElemRef> out;
        if (domains.empty()) {
            return out;
        }
        for (const auto& d : domains) {
            if (d.empty()) {
                return out;
            }
        }
        std::vector<std::size_t> idx(domains.size(), 0);
        for (;;) {
            ElementIds lefts;
            ElementIds rights;
            for (std::size_t i = 0; i < domains.size(); ++i) {
                const ElemRef& r = domains[i][idx[i]];
                const bool is_left = i < callee->in_left.size();
                const Param& p = is_left ? callee->in_left[i] : callee->in_right[i - callee->in_left.size()];
                check_argument(*callee, p, r, is_left ? kLeft : kRight);
                (is_left ? lefts : rights).push_back(r.id);
            }
            if (applicable(*callee, lefts, rights)) {
                std::size_t index = call_explicit(caller, *callee, lefts, rights);
                if (dest != nullptr) {
                    for (auto& r : candidates(index, *dest)) {
                        out.push_back(std::move(r));
                    }
                } else {
                    for (const auto& id : result.activations[index].composed) {
                        out.push_back({kPrimary, id});
                    }
                }
            }
            std::size_t k = domains.size();
            bool done = false;
            while (k > 0) {
                --k;
                if (++idx[k] < domains[k].size()) {
                    break;
                }
                idx[k] = 0;
                if (k == 0) {
                    done = true;
                }
            }
            if (done) {
                return out;
            }
        }
    }

    bool applicable(const CompositionRule& callee, const ElementIds& lefts, const ElementIds& rights) const
    {
        if (callee.kind == RuleKind::Merge) {
            return corresponding.contains({lefts.front(), rights.front()});
        }
        return guard_holds(callee, lefts, rights);
    }

    void check_argument(const CompositionRule& callee, const Param& p, const ElemRef& r, int slot) const
    {
        const Model* m = model(slot);
        const ModelElement* el = r.model == slot ? m->find(r.id) : nullptr;
        if (el == nullptr) {
            throw CallError("call to " + callee.name + ": argument for '" + p.name + "' must be an element of model '" +
                            p.alias + "', got '" + r.id + "'");
        }
        if (el->type != p.type) {
            throw CallError("call to " + callee.name + ": argument for '" + p.name + "' expects " + p.type +
                            ", element '" + r.id + "' is a " + el->type);
        }
    }

    std::size_t call_explicit(std::size_t caller, const CompositionRule& callee, const ElementIds& lefts,
                              const ElementIds& rights)
    {
        ExplicitCallRecord rec;
        rec.event = ++events;
        rec.caller = caller;
        rec.callee = callee.name;
        rec.left = lefts;
        rec.right = rights;
        result.explicit_calls.push_back(std::move(rec));

        auto it = memo.find(std::make_tuple(callee.name, lefts, rights));
        if (it != memo.end()) {
            return it->second;
        }
        std::size_t index = allocate_activation(callee, lefts, rights);
        initialize_activation(index);
        return index;
    }
};

Execution::Execution(const CompositionSpec& spec, const Model& left, const Model& right, const MetamodelRegistry& mms)
    : state_(std::make_unique<State>())
{
    State& s = *state_;
    s.spec = &spec;
    s.left = &left;
    s.right = &right;
    s.mms = mms;
    if (spec.targets.empty()) {
        throw ValidationError("composition '" + spec.name + "' declares no target model");
    }
    for (const auto& t : spec.targets) {
        if (t.metamodel == trace_mm::kName) {
            s.mms = trace_mm::with_trace_metamodel(std::move(s.mms));
        }
    }
    auto lookup = [&](const ModelDecl& d) -> const Metamodel* {
        auto it = s.mms.find(d.metamodel);
        if (it == s.mms.end()) {
            throw ValidationError("no metamodel '" + d.metamodel + "' for model '" + d.alias + "'");
        }
        return &it->second;
    };
    if (left.metamodel() != spec.left.metamodel) {
        throw ValidationError("left model '" + left.id() + "' conforms to '" + left.metamodel() + "', composition expects '" +
                              spec.left.metamodel + "'");
    }
    if (right.metamodel() != spec.right.metamodel) {
        throw ValidationError("right model '" + right.id() + "' conforms to '" + right.metamodel() +
                              "', composition expects '" + spec.right.metamodel + "'");
    }
    s.slots[spec.left.alias] = kLeft;
    s.slots[spec.right.alias] = kRight;
    s.slot_mm[kLeft] = lookup(spec.left);
    s.slot_mm[kRight] = lookup(spec.right);
    s.slots[spec.targets[0].alias] = kPrimary;
    s.slot_mm[kPrimary] = lookup(spec.targets[0]);
    s.result.composed = Model(spec.targets[0].alias, spec.targets[0].metamodel, ModelRole::Composed);
    if (spec.targets.size() > 1) {
        const ModelDecl& d = spec.targets[1];
        s.slots[d.alias] = kSecondary;
        s.slot_mm[kSecondary] = lookup(d);
        s.result.secondary =
            Model(d.alias, d.metamodel, d.metamodel == trace_mm::kName ? ModelRole::Trace : ModelRole::Composed);
    }
}

Execution::~Execution() = default;
Execution::Execution(Execution&&) noexcept = default;
Execution& Execution::operator=(Execution&&) noexcept = default;

void Execution::run_match_phase()
{
    state_->run_match_phase();
}

void Execution::allocate()
{
    state_->allocate();
}

void Execution::initialize()
{
    state_->initialize();
}

ElementIds Execution::call_explicit(std::size_t caller, const std::string& callee, const ElementIds& lefts,
                                    const ElementIds& rights)
{
    State& s = *state_;
    s.allocate();
    if (s.result.find_activation(caller) == nullptr) {
        throw CallError("call to " + callee + ": no calling activation #" + std::to_string(caller));
    }
    const CompositionRule* rule = s.spec->find_rule(callee);
    if (rule == nullptr) {
        throw CallError("call to unknown rule '" + callee + "'");
    }
    if (rule->kind == RuleKind::Match) {
        throw CallError("match rule '" + callee + "' is not callable");
    }
    if (lefts.size() != rule->in_left.size() || rights.size() != rule->in_right.size()) {
        throw CallError("call to " + callee + ": expected " + std::to_string(rule->in_left.size()) + " left and " +
                        std::to_string(rule->in_right.size()) + " right arguments");
    }
    for (std::size_t i = 0; i < lefts.size(); ++i) {
        s.check_argument(*rule, rule->in_left[i], ElemRef{kLeft, lefts[i]}, kLeft);
    }
    for (std::size_t i = 0; i < rights.size(); ++i) {
        s.check_argument(*rule, rule->in_right[i], ElemRef{kRight, rights[i]}, kRight);
    }
    std::size_t index = s.call_explicit(caller, *rule, lefts, rights);
    return s.result.activations[index].composed;
}

ElementIds Execution::resolve_each(std::size_t caller, const ElementIds& elements)
{
    State& s = *state_;
    s.allocate();
    std::vector<ElemRef> refs;
    for (const auto& id : elements) {
        if (s.left->contains(id)) {
            refs.push_back({kLeft, id});
        } else if (s.right->contains(id)) {
            refs.push_back({kRight, id});
        } else {
            throw UnresolvedEquivalentError("'" + id + "' is not an element of either source model");
        }
    }
    const CompositionRule* rule = nullptr;
    if (const Activation* a = s.result.find_activation(caller)) {
        rule = s.spec->find_rule(a->rule);
    }
    if (rule == nullptr) {
        throw CallError("resolve: no calling activation #" + std::to_string(caller));
    }
    ElementIds out;
    for (const auto& r : s.resolve_elements(caller, refs, nullptr, EvalSite{rule, {}})) {
        out.push_back(r.id);
    }
    return out;
}

const ExecutionResult& Execution::result() const
{
    return state_->result;
}

ExecutionResult Execution::take_result()
{
    return std::move(state_->result);
}

std::vector<Correspondence> run_match_phase(const CompositionSpec& spec, const Model& left, const Model& right,
                                            const MetamodelRegistry& mms)
{
    Execution exec(spec, left, right, mms);
    exec.run_match_phase();
    return exec.take_result().match_trace;
}

ExecutionResult execute(const CompositionSpec& spec, const Model& left, const Model& right,
                        const MetamodelRegistry& mms)
{
    Execution exec(spec, left, right, mms);
    exec.initialize();
    return exec.take_result();
}

Json correspondences_to_json(const std::vector<Correspondence>& match_trace)
{
    Json out = Json::array();
    for (const auto& c : match_trace) {
        out.push_back({{"rule", c.rule}, {"left", c.left}, {"right", c.right}});
    }
    return out;
}

Json execution_to_json(const ExecutionResult& result)
{
    Json activations = Json::array();
    for (const auto& a : result.activations) {
        Json j = {{"seq", a.seq},
                  {"rule", a.rule},
                  {"kind", std::string(to_string(a.kind))},
                  {"left", a.left},
                  {"right", a.right},
                  {"composed", a.composed}};
        if (!a.secondary.empty()) {
            j["secondary"] = a.secondary;
        }
        activations.push_back(std::move(j));
    }
    Json explicit_calls = Json::array();
    for (const auto& c : result.explicit_calls) {
        explicit_calls.push_back({{"event", c.event},
                                  {"caller", c.caller},
                                  {"callee", c.callee},
                                  {"left", c.left},
                                  {"right", c.right}});
    }
    Json implicit_calls = Json::array();
    for (const auto& c : result.implicit_calls) {
        implicit_calls.push_back(
            {{"event", c.event}, {"caller", c.caller}, {"resolved", c.resolved}, {"wired", c.wired}});
    }
    Json out = {{"composed", model_to_json(result.composed)},
                {"matchTrace", correspondences_to_json(result.match_trace)},
                {"activations", activations},
                {"explicitCalls", explicit_calls},
                {"implicitCalls", implicit_calls}};
    if (result.secondary) {
        out["secondary"] = model_to_json(*result.secondary);
    }
    return out;
}

}  // namespace mcomp
