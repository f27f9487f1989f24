#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcomp/model.hpp"

namespace mcomp {

/// Position in DSL source text (1-based).
struct SourceLocation {
    int line = 0;
    int column = 0;

    // Locations never participate in structural equality of the AST.
    friend bool operator==(const SourceLocation&, const SourceLocation&) { return true; }
};

std::string format_location(const SourceLocation& loc);

enum class RuleKind { Match, Merge, Transform };

std::string_view to_string(RuleKind kind);

/// `alias : metamodel` in the composition header.
struct ModelDecl {
    std::string alias;
    std::string metamodel;

    friend bool operator==(const ModelDecl&, const ModelDecl&) = default;
};

/// `name : alias!Type`
struct Param {
    std::string name;
    std::string alias;
    std::string type;
    SourceLocation location;

    friend bool operator==(const Param&, const Param&) = default;
};

struct Expr {
    enum class Kind {
        Literal,   // value
        Var,       // name (rule parameter or exists-bound variable)
        Member,    // operands[0] . name
        Eq,        // operands[0] = operands[1]
        And,       // operands[0] and operands[1]
        Or,        // operands[0] or operands[1]
        Not,       // not operands[0]
        Exists,    // operands[0].exists(name | operands[1])
        HasMatch,  // hasMatch(name)
    };

    Kind kind = Kind::Literal;
    Value literal;
    std::string name;
    std::vector<Expr> operands;
    SourceLocation location;

    static Expr make_literal(Value v, SourceLocation loc = {});
    static Expr make_var(std::string name, SourceLocation loc = {});
    static Expr make_member(Expr base, std::string member, SourceLocation loc = {});
    static Expr make_binary(Kind kind, Expr lhs, Expr rhs, SourceLocation loc = {});
    static Expr make_not(Expr operand, SourceLocation loc = {});
    static Expr make_exists(Expr collection, std::string var, Expr predicate, SourceLocation loc = {});
    static Expr make_has_match(std::string param, SourceLocation loc = {});

    friend bool operator==(const Expr&, const Expr&) = default;
};

/// `call Rule(args)`; arguments bind positionally to the callee's left then right params.
struct CallExpr {
    std::string callee;
    std::vector<Expr> args;
    SourceLocation location;

    friend bool operator==(const CallExpr&, const CallExpr&) = default;
};

struct Statement {
    enum class Kind {
        SetFeature,  // p.f = expr;
        SetResolve,  // p.r = equivalent(expr);
        SetCall,     // p.r = call R(args);
        Call,        // call R(args);
    };

    Kind kind = Kind::SetFeature;
    std::string param;    ///< out parameter (unused for Call)
    std::string feature;  ///< attribute or reference (unused for Call)
    Expr value;           ///< SetFeature / SetResolve
    CallExpr call;        ///< SetCall / Call
    SourceLocation location;

    friend bool operator==(const Statement&, const Statement&) = default;
};

struct CompositionRule {
    std::string name;
    RuleKind kind = RuleKind::Match;
    std::vector<Param> in_left;
    std::vector<Param> in_right;
    std::vector<Param> out;
    std::optional<Expr> guard;
    std::vector<Statement> body;
    SourceLocation location;

    const Param* find_param(std::string_view name) const;
    const Param* find_out(std::string_view name) const;
    bool is_input(std::string_view name) const;

    friend bool operator==(const CompositionRule&, const CompositionRule&) = default;
};

struct CompositionSpec {
    std::string name;
    ModelDecl left;
    ModelDecl right;
    std::vector<ModelDecl> targets;  ///< one or two
    std::vector<CompositionRule> rules;

    const CompositionRule* find_rule(std::string_view name) const;

    friend bool operator==(const CompositionSpec&, const CompositionSpec&) = default;
};

struct SpecDiagnostic {
    enum class Severity { Error, Warning };

    Severity severity = Severity::Error;
    SourceLocation location;
    std::string message;
};

/// `line:col: error: message`
std::string format_diagnostic(const SpecDiagnostic& d);

}  // namespace mcomp
