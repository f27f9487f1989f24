#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mcomp/model.hpp"
#include "mcomp/model_io.hpp"
#include "mcomp/spec.hpp"

namespace mcomp {

using ElementIds = std::vector<std::string>;

/// A pair of elements found equivalent by a match rule.
struct Correspondence {
    std::string rule;
    std::string left;
    std::string right;

    friend bool operator==(const Correspondence&, const Correspondence&) = default;
};

/// One firing of a merge or transform rule.
///
/// `left`/`right` hold the bound source elements in parameter order. `composed` holds
/// the elements created in the primary target model, `secondary` those created in the
/// second target model (only present for two-target compositions).
struct Activation {
    std::size_t seq = 0;  ///< 1-based firing order
    std::string rule;
    RuleKind kind = RuleKind::Merge;
    ElementIds left;
    ElementIds right;
    ElementIds composed;
    ElementIds secondary;

    /// left ∪ right, sorted and deduplicated.
    ElementIds source_set() const;

    friend bool operator==(const Activation&, const Activation&) = default;
};

struct ExplicitCallRecord {
    std::size_t event = 0;  ///< position among all call records of the run
    std::size_t caller = 0; ///< Activation::seq of the calling activation
    std::string callee;
    ElementIds left;
    ElementIds right;

    friend bool operator==(const ExplicitCallRecord&, const ExplicitCallRecord&) = default;
};

/// One resolution through equivalent(). `resolved` is the source set of the activation
/// group that produced the equivalents; `wired` the ids actually assigned at the call site.
struct ImplicitCallRecord {
    std::size_t event = 0;
    std::size_t caller = 0;
    ElementIds resolved;
    ElementIds wired;

    friend bool operator==(const ImplicitCallRecord&, const ImplicitCallRecord&) = default;
};

struct ExecutionResult {
    Model composed;
    std::optional<Model> secondary;
    std::vector<Correspondence> match_trace;
    std::vector<Activation> activations;
    std::vector<ExplicitCallRecord> explicit_calls;
    std::vector<ImplicitCallRecord> implicit_calls;

    const Activation* find_activation(std::size_t seq) const;
};

/// Runs every match rule over left x right in document order.
std::vector<Correspondence> run_match_phase(const CompositionSpec& spec, const Model& left, const Model& right,
                                            const MetamodelRegistry& mms);

/// Executes a checked specification: match, allocate (merge then transform), initialize.
/// Throws AmbiguityError, UnresolvedEquivalentError, EvaluationError or CallError.
ExecutionResult execute(const CompositionSpec& spec, const Model& left, const Model& right,
                        const MetamodelRegistry& mms);

/// Strict set-equality resolve over an activation log: the union of the composed
/// elements of every activation whose source set equals `source`.
ElementIds resolve(const ElementIds& source, const std::vector<Activation>& log);

/// Step-wise execution. execute() is the usual entry point; this class exists so that
/// callers (and tests) can issue explicit calls against a live activation log.
class Execution {
public:
    Execution(const CompositionSpec& spec, const Model& left, const Model& right, const MetamodelRegistry& mms);
    ~Execution();
    Execution(Execution&&) noexcept;
    Execution& operator=(Execution&&) noexcept;

    void run_match_phase();
    void allocate();
    void initialize();

    /// Applies `callee` to exactly (lefts, rights) on behalf of activation `caller`.
    /// Returns the existing activation's targets when one exists, otherwise fires
    /// (allocates and initializes) a fresh activation. Always appends a call record.
    ElementIds call_explicit(std::size_t caller, const std::string& callee, const ElementIds& lefts,
                             const ElementIds& rights);

    /// Per-element resolution used by equivalent(): each element resolves through every
    /// activation whose source set contains it, in activation order.
    ElementIds resolve_each(std::size_t caller, const ElementIds& elements);

    const ExecutionResult& result() const;
    ExecutionResult take_result();

private:
    struct State;
    std::unique_ptr<State> state_;
};

/// {composed, matchTrace, activations, explicitCalls, implicitCalls}
Json execution_to_json(const ExecutionResult& result);
Json correspondences_to_json(const std::vector<Correspondence>& match_trace);

}  // namespace mcomp
