#include "mcomp/spec.hpp"

namespace mcomp {

std::string format_location(const SourceLocation& loc)
{
    return std::to_string(loc.line) + ":" + std::to_string(loc.column);
}

std::string_view to_string(RuleKind kind)
{
    switch (kind) {
    case RuleKind::Match:
        return "match";
    case RuleKind::Merge:
        return "merge";
    case RuleKind::Transform:
        return "transform";
    }
    return "?";
}

Expr Expr::make_literal(Value v, SourceLocation loc)
{
    Expr e;
    e.kind = Kind::Literal;
    e.literal = std::move(v);
    e.location = loc;
    return e;
}

Expr Expr::make_var(std::string name, SourceLocation loc)
{
    Expr e;
    e.kind = Kind::Var;
    e.name = std::move(name);
    e.location = loc;
    return e;
}

Expr Expr::make_member(Expr base, std::string member, SourceLocation loc)
{
    Expr e;
    e.kind = Kind::Member;
    e.name = std::move(member);
    e.operands.push_back(std::move(base));
    e.location = loc;
    return e;
}

Expr Expr::make_binary(Kind kind, Expr lhs, Expr rhs, SourceLocation loc)
{
    Expr e;
    e.kind = kind;
    e.operands.push_back(std::move(lhs));
    e.operands.push_back(std::move(rhs));
    e.location = loc;
    return e;
}

Expr Expr::make_not(Expr operand, SourceLocation loc)
{
    Expr e;
    e.kind = Kind::Not;
    e.operands.push_back(std::move(operand));
    e.location = loc;
    return e;
}

Expr Expr::make_exists(Expr collection, std::string var, Expr predicate, SourceLocation loc)
{
    Expr e;
    e.kind = Kind::Exists;
    e.name = std::move(var);
    e.operands.push_back(std::move(collection));
    e.operands.push_back(std::move(predicate));
    e.location = loc;
    return e;
}

Expr Expr::make_has_match(std::string param, SourceLocation loc)
{
    Expr e;
    e.kind = Kind::HasMatch;
    e.name = std::move(param);
    e.location = loc;
    return e;
}

const Param* CompositionRule::find_param(std::string_view param) const
{
    for (const auto* group : {&in_left, &in_right, &out}) {
        for (const auto& p : *group) {
            if (p.name == param) {
                return &p;
            }
        }
    }
    return nullptr;
}

const Param* CompositionRule::find_out(std::string_view param) const
{
    for (const auto& p : out) {
        if (p.name == param) {
            return &p;
        }
    }
    return nullptr;
}

bool CompositionRule::is_input(std::string_view param) const
{
    for (const auto* group : {&in_left, &in_right}) {
        for (const auto& p : *group) {
            if (p.name == param) {
                return true;
            }
        }
    }
    return false;
}

const CompositionRule* CompositionSpec::find_rule(std::string_view rule) const
{
    for (const auto& r : rules) {
        if (r.name == rule) {
            return &r;
        }
    }
    return nullptr;
}

std::string format_diagnostic(const SpecDiagnostic& d)
{
    const char* severity = d.severity == SpecDiagnostic::Severity::Error ? "error" : "warning";
    return format_location(d.location) + ": " + severity + ": " + d.message;
}

}  // namespace mcomp
