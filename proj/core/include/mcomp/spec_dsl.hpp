#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcomp/model.hpp"
#include "mcomp/spec.hpp"

namespace mcomp {

struct ParseResult {
    std::optional<CompositionSpec> spec;  ///< set iff diagnostics is empty
    std::vector<SpecDiagnostic> diagnostics;

    bool ok() const { return spec.has_value(); }
};

/// Parses `.mcomp` text. Besides syntax, reports the checks that need no metamodel:
/// unknown aliases and parameters, duplicate names and kind-arity violations.
ParseResult parse_spec(std::string_view text);

/// Canonical text form; parse_spec(print_spec(s)) is structurally equal to s.
std::string print_spec(const CompositionSpec& spec);
std::string print_expr(const Expr& expr);

/// Metamodel-independent checks, also run by parse_spec.
std::vector<SpecDiagnostic> check_structure(const CompositionSpec& spec);

/// Full static check against the declared metamodels. The built-in trace metamodel
/// is supplied automatically when a declaration names it.
std::vector<SpecDiagnostic> check_spec(const CompositionSpec& spec, const MetamodelRegistry& mms);

/// Number of out params of `rule` that produce elements in the primary target.
std::size_t primary_out_count(const CompositionSpec& spec, const CompositionRule& rule);

}  // namespace mcomp
