#pragma once

#include <map>
#include <string>
#include <vector>

#include "mcomp/model.hpp"
#include "mcomp/model_io.hpp"
#include "mcomp/spec.hpp"
#include "mcomp/trace.hpp"

namespace mcomp {

struct InstrumentedRule {
    std::string rule;
    std::string param;  ///< the added link out param

    friend bool operator==(const InstrumentedRule&, const InstrumentedRule&) = default;
};

struct NestingSite {
    std::string rule;
    std::size_t statement = 0;  ///< index in the original body
    Origin origin = Origin::Implicit;

    friend bool operator==(const NestingSite&, const NestingSite&) = default;
};

struct WeaveReport {
    ModelDecl added_target;
    std::vector<InstrumentedRule> instrumented_rules;
    std::vector<NestingSite> nesting_sites;
};

struct WeaveResult {
    CompositionSpec spec;
    WeaveReport report;
};

/// Rewrites `spec` so that executing it also produces the trace model as a second target:
///   1. declares `target Trace : trace-mm`;
///   2. gives every merge/transform rule a `link` out param and statements filling its
///      left, right and targets references;
///   3. after every equivalent()/call site, wires the resolved links into the enclosing
///      link's implicitChildren/explicitChildren.
/// Throws WeaveError unless `spec` has exactly one target.
WeaveResult weave_traceability(const CompositionSpec& spec);

Json weave_report_to_json(const WeaveReport& report);

/// Reads the trace graph out of the second target model of a woven execution.
TraceModel trace_from_woven(const Model& woven_trace);

/// Pairs composed elements by creation order: woven id -> native id.
std::map<std::string, std::string> creation_order_map(const Model& native_composed, const Model& woven_composed);

struct EquivalenceVerdict {
    bool equivalent = true;
    std::vector<std::string> mismatches;
};

/// Isomorphism check between a natively built trace and the trace model of a woven run.
/// Links are paired by (kind, left, right, targets); `target_ids` maps woven composed ids
/// to native ones when the two runs numbered them differently.
EquivalenceVerdict check_equivalence(const TraceModel& native, const Model& woven_output,
                                     const std::map<std::string, std::string>& target_ids = {});

}  // namespace mcomp
