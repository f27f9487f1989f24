#include <map>
#include <set>

#include "mcomp/spec_dsl.hpp"
#include "mcomp/trace_metamodel.hpp"

namespace mcomp {

namespace {

using Severity = SpecDiagnostic::Severity;

class DiagnosticSink {
public:
    void error(const SourceLocation& loc, std::string message)
    {
        out.push_back({Severity::Error, loc, std::move(message)});
    }

    std::vector<SpecDiagnostic> out;
};

const SourceLocation kHeader{1, 1};

// Variables visible in an expression; false means "bound by exists", true "rule param".
using Scope = std::map<std::string, bool, std::less<>>;

void check_vars(const Expr& e, const CompositionRule& rule, Scope& scope, DiagnosticSink& sink)
{
    switch (e.kind) {
    case Expr::Kind::Var:
        if (!scope.contains(e.name)) {
            sink.error(e.location, "unknown parameter '" + e.name + "' in rule " + rule.name);
        }
        return;
    case Expr::Kind::HasMatch:
        if (!rule.is_input(e.name)) {
            sink.error(e.location, "hasMatch expects an input parameter of rule " + rule.name +
                                       ", got '" + e.name + "'");
        }
        return;
    case Expr::Kind::Exists: {
        check_vars(e.operands[0], rule, scope, sink);
        auto previous = scope.find(e.name);
        std::optional<bool> saved;
        if (previous != scope.end()) {
            saved = previous->second;
        }
        scope[e.name] = false;
        check_vars(e.operands[1], rule, scope, sink);
        if (saved) {
            scope[e.name] = *saved;
        } else {
            scope.erase(e.name);
        }
        return;
    }
    default:
        for (const auto& op : e.operands) {
            check_vars(op, rule, scope, sink);
        }
    }
}

Scope rule_scope(const CompositionRule& rule, bool with_outputs)
{
    Scope scope;
    for (const auto& p : rule.in_left) {
        scope[p.name] = true;
    }
    for (const auto& p : rule.in_right) {
        scope[p.name] = true;
    }
    if (with_outputs) {
        for (const auto& p : rule.out) {
            scope[p.name] = true;
        }
    }
    return scope;
}

bool is_target_alias(const CompositionSpec& spec, std::string_view alias)
{
    for (const auto& t : spec.targets) {
        if (t.alias == alias) {
            return true;
        }
    }
    return false;
}

void check_call_shape(const CompositionSpec& spec, const CompositionRule& rule, const CallExpr& call,
                      Scope& scope, DiagnosticSink& sink)
{
    const CompositionRule* callee = spec.find_rule(call.callee);
    if (callee == nullptr) {
        sink.error(call.location, "call to unknown rule '" + call.callee + "'");
    } else if (callee->kind == RuleKind::Match) {
        sink.error(call.location, "match rule '" + call.callee + "' is not callable: it has no outputs");
    } else {
        const std::size_t arity = callee->in_left.size() + callee->in_right.size();
        if (call.args.size() != arity) {
            sink.error(call.location, "rule '" + call.callee + "' expects " + std::to_string(arity) +
                                          " arguments, got " + std::to_string(call.args.size()));
        }
    }
    for (const auto& arg : call.args) {
        check_vars(arg, rule, scope, sink);
    }
}

}  // namespace

std::size_t primary_out_count(const CompositionSpec& spec, const CompositionRule& rule)
{
    if (spec.targets.empty()) {
        return 0;
    }
    std::size_t n = 0;
    for (const auto& p : rule.out) {
        if (p.alias == spec.targets.front().alias) {
            ++n;
        }
    }
    return n;
}

std::vector<SpecDiagnostic> check_structure(const CompositionSpec& spec)
{
    DiagnosticSink sink;

    if (spec.targets.empty() || spec.targets.size() > 2) {
        sink.error(kHeader, "a composition declares one or two target models, found " +
                                std::to_string(spec.targets.size()));
    }
    std::set<std::string, std::less<>> aliases;
    for (const ModelDecl* d : {&spec.left, &spec.right}) {
        if (!aliases.insert(d->alias).second) {
            sink.error(kHeader, "model alias '" + d->alias + "' is declared twice");
        }
    }
    for (const auto& t : spec.targets) {
        if (!aliases.insert(t.alias).second) {
            sink.error(kHeader, "model alias '" + t.alias + "' is declared twice");
        }
    }

    std::set<std::string, std::less<>> rule_names;
    for (const auto& rule : spec.rules) {
        if (!rule_names.insert(rule.name).second) {
            sink.error(rule.location, "duplicate rule name '" + rule.name + "'");
        }

        std::set<std::string, std::less<>> param_names;
        for (const auto* group : {&rule.in_left, &rule.in_right, &rule.out}) {
            for (const auto& p : *group) {
                if (!param_names.insert(p.name).second) {
                    sink.error(p.location, "duplicate parameter '" + p.name + "' in rule " + rule.name);
                }
            }
        }
        for (const auto& p : rule.in_left) {
            if (p.alias != spec.left.alias) {
                sink.error(p.location, "left parameter '" + p.name + "' must come from model '" +
                                           spec.left.alias + "', not '" + p.alias + "'");
            }
        }
        for (const auto& p : rule.in_right) {
            if (p.alias != spec.right.alias) {
                sink.error(p.location, "right parameter '" + p.name + "' must come from model '" +
                                           spec.right.alias + "', not '" + p.alias + "'");
            }
        }
        for (const auto& p : rule.out) {
            if (!is_target_alias(spec, p.alias)) {
                sink.error(p.location, "output parameter '" + p.name + "' must target a declared target model, not '" +
                                           p.alias + "'");
            }
        }

        const std::string where = std::string(to_string(rule.kind)) + " rule " + rule.name;
        switch (rule.kind) {
        case RuleKind::Match:
            if (rule.in_left.size() != 1 || rule.in_right.size() != 1) {
                sink.error(rule.location, where + " takes exactly one left and one right parameter");
            }
            if (!rule.out.empty() || !rule.body.empty()) {
                sink.error(rule.location, where + " has no outputs and no body");
            }
            if (!rule.guard) {
                sink.error(rule.location, where + " needs a compare predicate");
            }
            break;
        case RuleKind::Merge:
            if (rule.in_left.size() != 1 || rule.in_right.size() != 1) {
                sink.error(rule.location, where + " takes exactly one left and one right parameter");
            }
            if (primary_out_count(spec, rule) != 1) {
                sink.error(rule.location, where + " must produce exactly one element of the primary target, got " +
                                              std::to_string(primary_out_count(spec, rule)));
            }
            if (rule.guard) {
                sink.error(rule.guard->location, where + " cannot have a guard; merge applicability comes from matching");
            }
            break;
        case RuleKind::Transform:
            if (rule.in_left.empty() && rule.in_right.empty()) {
                sink.error(rule.location, where + " needs at least one source parameter");
            }
            if (rule.out.empty()) {
                sink.error(rule.location, where + " needs at least one output parameter");
            }
            break;
        }

        if (rule.guard) {
            Scope scope = rule_scope(rule, false);
            check_vars(*rule.guard, rule, scope, sink);
        }
        Scope scope = rule_scope(rule, true);
        for (const auto& st : rule.body) {
            if (st.kind != Statement::Kind::Call && rule.find_out(st.param) == nullptr) {
                sink.error(st.location, "'" + st.param + "' is not an output parameter of rule " + rule.name);
            }
            if (st.kind == Statement::Kind::SetFeature || st.kind == Statement::Kind::SetResolve) {
                check_vars(st.value, rule, scope, sink);
            } else {
                check_call_shape(spec, rule, st.call, scope, sink);
            }
        }
    }
    return sink.out;
}

namespace {

struct Ty {
    enum class Tag { Error, Prim, Elem, Coll };

    Tag tag = Tag::Error;
    PrimitiveKind prim = PrimitiveKind::String;
    std::string alias;
    std::string type;  ///< empty: any type

    static Ty error() { return {}; }
    static Ty primitive(PrimitiveKind k) { return {Tag::Prim, k, {}, {}}; }
    static Ty element(std::string alias, std::string type) { return {Tag::Elem, {}, std::move(alias), std::move(type)}; }
    static Ty collection(std::string alias, std::string type) { return {Tag::Coll, {}, std::move(alias), std::move(type)}; }

    bool is_elements() const { return tag == Tag::Elem || tag == Tag::Coll; }
};

std::string describe(const Ty& t)
{
    switch (t.tag) {
    case Ty::Tag::Error:
        return "<error>";
    case Ty::Tag::Prim:
        return std::string(to_string(t.prim));
    case Ty::Tag::Elem:
        return t.alias + "!" + (t.type.empty() ? "*" : t.type);
    case Ty::Tag::Coll:
        return "collection of " + t.alias + "!" + (t.type.empty() ? "*" : t.type);
    }
    return "?";
}

class TypeChecker {
public:
    TypeChecker(const CompositionSpec& spec, const MetamodelRegistry& mms, DiagnosticSink& sink)
        : spec_(spec), mms_(mms), sink_(sink)
    {
        bind(spec.left);
        bind(spec.right);
        for (const auto& t : spec.targets) {
            bind(t);
        }
    }

    void check_rule(const CompositionRule& rule)
    {
        rule_ = &rule;
        vars_.clear();
        bool params_ok = true;
        for (const auto* group : {&rule.in_left, &rule.in_right, &rule.out}) {
            for (const auto& p : *group) {
                params_ok &= check_param(p);
                vars_[p.name] = Ty::element(p.alias, p.type);
            }
        }
        if (!params_ok) {
            return;
        }
        if (rule.guard) {
            std::map<std::string, Ty, std::less<>> saved = vars_;
            for (const auto& p : rule.out) {
                vars_.erase(p.name);
            }
            Ty g = type_of(*rule.guard);
            if (g.tag != Ty::Tag::Error && !(g.tag == Ty::Tag::Prim && g.prim == PrimitiveKind::Boolean)) {
                sink_.error(rule.guard->location, "guard of rule " + rule.name + " must be boolean, got " + describe(g));
            }
            vars_ = std::move(saved);
        }
        for (const auto& st : rule.body) {
            check_statement(st);
        }
    }

private:
    void bind(const ModelDecl& d)
    {
        auto it = mms_.find(d.metamodel);
        if (it == mms_.end()) {
            sink_.error(kHeader, "unknown metamodel '" + d.metamodel + "' for model '" + d.alias + "'");
            return;
        }
        models_[d.alias] = &it->second;
    }

    const MetaType* metatype(const std::string& alias, const std::string& type) const
    {
        auto it = models_.find(alias);
        if (it == models_.end() || type.empty()) {
            return nullptr;
        }
        return it->second->find_type(type);
    }

    bool check_param(const Param& p)
    {
        auto it = models_.find(p.alias);
        if (it == models_.end()) {
            sink_.error(p.location, "parameter '" + p.name + "' uses undeclared or unresolved model '" + p.alias + "'");
            return false;
        }
        if (it->second->find_type(p.type) == nullptr) {
            sink_.error(p.location, "unknown metatype '" + p.type + "' in metamodel '" + it->second->name + "'");
            return false;
        }
        return true;
    }

    Ty type_of(const Expr& e)
    {
        switch (e.kind) {
        case Expr::Kind::Literal:
            return Ty::primitive(kind_of(e.literal));
        case Expr::Kind::Var: {
            auto it = vars_.find(e.name);
            if (it == vars_.end()) {
                sink_.error(e.location, "unknown parameter '" + e.name + "'");
                return Ty::error();
            }
            return it->second;
        }
        case Expr::Kind::HasMatch:
            if (!rule_->is_input(e.name)) {
                sink_.error(e.location, "hasMatch expects an input parameter, got '" + e.name + "'");
            }
            return Ty::primitive(PrimitiveKind::Boolean);
        case Expr::Kind::Member:
            return member_type(e);
        case Expr::Kind::Eq: {
            Ty a = type_of(e.operands[0]);
            Ty b = type_of(e.operands[1]);
            if (a.tag == Ty::Tag::Error || b.tag == Ty::Tag::Error) {
                return Ty::primitive(PrimitiveKind::Boolean);
            }
            const bool prims = a.tag == Ty::Tag::Prim && b.tag == Ty::Tag::Prim && a.prim == b.prim;
            const bool elems = a.tag == Ty::Tag::Elem && b.tag == Ty::Tag::Elem;
            if (!prims && !elems) {
                sink_.error(e.location, "cannot compare " + describe(a) + " with " + describe(b));
            }
            return Ty::primitive(PrimitiveKind::Boolean);
        }
        case Expr::Kind::And:
        case Expr::Kind::Or:
        case Expr::Kind::Not:
            for (const auto& op : e.operands) {
                expect_boolean(op);
            }
            return Ty::primitive(PrimitiveKind::Boolean);
        case Expr::Kind::Exists: {
            Ty coll = type_of(e.operands[0]);
            if (coll.tag != Ty::Tag::Coll) {
                if (coll.tag != Ty::Tag::Error) {
                    sink_.error(e.location, "exists needs a collection, got " + describe(coll));
                }
                coll = Ty::collection("", "");
            }
            auto saved = vars_.find(e.name) == vars_.end() ? std::optional<Ty>{} : std::optional<Ty>{vars_[e.name]};
            vars_[e.name] = coll.alias.empty() ? Ty::error() : Ty::element(coll.alias, coll.type);
            expect_boolean(e.operands[1]);
            if (saved) {
                vars_[e.name] = *saved;
            } else {
                vars_.erase(e.name);
            }
            return Ty::primitive(PrimitiveKind::Boolean);
        }
        }
        return Ty::error();
    }

    void expect_boolean(const Expr& e)
    {
        Ty t = type_of(e);
        if (t.tag != Ty::Tag::Error && !(t.tag == Ty::Tag::Prim && t.prim == PrimitiveKind::Boolean)) {
            sink_.error(e.location, "expected a boolean expression, got " + describe(t));
        }
    }

    Ty member_type(const Expr& e)
    {
        Ty base = type_of(e.operands[0]);
        if (base.tag == Ty::Tag::Error) {
            return base;
        }
        if (base.tag != Ty::Tag::Elem) {
            sink_.error(e.location, "cannot access '" + e.name + "' on " + describe(base));
            return Ty::error();
        }
        const MetaType* type = metatype(base.alias, base.type);
        if (type == nullptr) {
            sink_.error(e.location, "cannot access '" + e.name + "' on an element of unknown type");
            return Ty::error();
        }
        if (const auto* attr = type->find_attribute(e.name)) {
            return Ty::primitive(attr->kind);
        }
        if (const auto* ref = type->find_reference(e.name)) {
            if (ref->external) {
                sink_.error(e.location, "reference '" + e.name + "' points outside its model and cannot be navigated");
                return Ty::error();
            }
            return ref->many ? Ty::collection(base.alias, ref->target) : Ty::element(base.alias, ref->target);
        }
        sink_.error(e.location, "'" + e.name + "' is not a feature of " + type->name);
        return Ty::error();
    }

    bool type_matches(const std::string& declared, const std::string& actual) const
    {
        return declared.empty() || declared == actual;
    }

    void check_statement(const Statement& st)
    {
        if (st.kind == Statement::Kind::Call) {
            check_call(st.call);
            return;
        }
        const Param* owner = rule_->find_out(st.param);
        if (owner == nullptr) {
            sink_.error(st.location, "'" + st.param + "' is not an output parameter of rule " + rule_->name);
            return;
        }
        const MetaType* type = metatype(owner->alias, owner->type);
        if (type == nullptr) {
            return;
        }
        const AttributeDecl* attr = type->find_attribute(st.feature);
        const ReferenceDecl* ref = type->find_reference(st.feature);
        if (attr == nullptr && ref == nullptr) {
            sink_.error(st.location, "'" + st.feature + "' is not a feature of " + type->name);
            if (st.kind == Statement::Kind::SetCall) {
                check_call(st.call);
            } else {
                type_of(st.value);
            }
            return;
        }
        if (st.kind != Statement::Kind::SetFeature && ref == nullptr) {
            sink_.error(st.location, "'" + st.feature + "' is an attribute; only references can receive resolved elements");
        }

        switch (st.kind) {
        case Statement::Kind::SetFeature: {
            Ty v = type_of(st.value);
            if (v.tag == Ty::Tag::Error) {
                return;
            }
            if (attr != nullptr) {
                if (v.tag != Ty::Tag::Prim || v.prim != attr->kind) {
                    sink_.error(st.location, "attribute " + type->name + "." + attr->name + " expects " +
                                                 std::string(to_string(attr->kind)) + ", got " + describe(v));
                }
                return;
            }
            if (!v.is_elements()) {
                sink_.error(st.location, "reference " + type->name + "." + ref->name + " expects elements, got " + describe(v));
                return;
            }
            if (!ref->many && v.tag == Ty::Tag::Coll) {
                sink_.error(st.location, "reference " + type->name + "." + ref->name + " holds a single element");
            }
            if (!ref->external && (v.alias != owner->alias || !type_matches(ref->target, v.type))) {
                sink_.error(st.location, "reference " + type->name + "." + ref->name + " expects " + owner->alias + "!" +
                                             (ref->target.empty() ? "*" : ref->target) + ", got " + describe(v));
            }
            return;
        }
        case Statement::Kind::SetResolve: {
            Ty v = type_of(st.value);
            if (v.tag == Ty::Tag::Error || ref == nullptr) {
                return;
            }
            if (!v.is_elements() || (v.alias != spec_.left.alias && v.alias != spec_.right.alias)) {
                sink_.error(st.location, "equivalent() resolves source elements, got " + describe(v));
                return;
            }
            if (!ref->many && v.tag == Ty::Tag::Coll) {
                sink_.error(st.location, "reference " + type->name + "." + ref->name + " holds a single element");
            }
            return;
        }
        case Statement::Kind::SetCall: {
            const CompositionRule* callee = check_call(st.call);
            if (callee == nullptr || ref == nullptr) {
                return;
            }
            bool produces = false;
            for (const auto& p : callee->out) {
                produces |= p.alias == owner->alias && type_matches(ref->target, p.type);
            }
            if (!produces) {
                sink_.error(st.call.location, "rule '" + callee->name + "' produces no " + owner->alias + "!" +
                                                  (ref->target.empty() ? "*" : ref->target) + " for " + type->name +
                                                  "." + ref->name);
            }
            return;
        }
        case Statement::Kind::Call:
            return;
        }
    }

    const CompositionRule* check_call(const CallExpr& call)
    {
        std::vector<Ty> args;
        for (const auto& a : call.args) {
            args.push_back(type_of(a));
        }
        const CompositionRule* callee = spec_.find_rule(call.callee);
        if (callee == nullptr) {
            sink_.error(call.location, "call to unknown rule '" + call.callee + "'");
            return nullptr;
        }
        if (callee->kind == RuleKind::Match) {
            sink_.error(call.location, "match rule '" + call.callee + "' is not callable: it has no outputs");
            return nullptr;
        }
        std::vector<const Param*> params;
        for (const auto& p : callee->in_left) {
            params.push_back(&p);
        }
        for (const auto& p : callee->in_right) {
            params.push_back(&p);
        }
        if (params.size() != args.size()) {
            sink_.error(call.location, "rule '" + call.callee + "' expects " + std::to_string(params.size()) +
                                           " arguments, got " + std::to_string(args.size()));
            return callee;
        }
        for (std::size_t i = 0; i < args.size(); ++i) {
            const Ty& a = args[i];
            if (a.tag == Ty::Tag::Error) {
                continue;
            }
            if (!a.is_elements() || a.alias != params[i]->alias || a.type != params[i]->type) {
                sink_.error(call.args[i].location, "argument " + std::to_string(i + 1) + " of call to '" +
                                                       call.callee + "' expects " + params[i]->alias + "!" +
                                                       params[i]->type + ", got " + describe(a));
            }
        }
        return callee;
    }

    const CompositionSpec& spec_;
    const MetamodelRegistry& mms_;
    DiagnosticSink& sink_;
    std::map<std::string, const Metamodel*, std::less<>> models_;
    std::map<std::string, Ty, std::less<>> vars_;
    const CompositionRule* rule_ = nullptr;
};

}  // namespace

std::vector<SpecDiagnostic> check_spec(const CompositionSpec& spec, const MetamodelRegistry& mms)
{
    DiagnosticSink sink;
    sink.out = check_structure(spec);
    if (!sink.out.empty()) {
        return sink.out;
    }
    MetamodelRegistry registry = mms;
    for (const auto& t : spec.targets) {
        if (t.metamodel == trace_mm::kName) {
            registry = trace_mm::with_trace_metamodel(std::move(registry));
        }
    }
    TypeChecker checker(spec, registry, sink);
    for (const auto& rule : spec.rules) {
        checker.check_rule(rule);
    }
    return sink.out;
}

}  // namespace mcomp
