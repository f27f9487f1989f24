#pragma once

#include <set>
#include <string>
#include <vector>

#include "mcomp/engine.hpp"
#include "mcomp/trace.hpp"

// Checks written against the definitions directly, without reusing the library's
// own lookup structures.
namespace mcomp::testing {

/// System x Vocabulary always corresponds; Entity x Term when the names agree or a
/// term alias carries the entity's name.
std::vector<Correspondence> library_match_oracle(const Model& left, const Model& right);

/// Strict set-equality resolve by linear scan.
ElementIds resolve_scan(const ElementIds& source, const std::vector<Activation>& log);

/// Relationship set rebuilt from the call logs. Activations are paired with links by
/// field equality; explicit calls by exact callee and arguments, implicit calls by
/// source set.
std::set<TraceRelationship> reconstruct_relationships(const ExecutionResult& result, const TraceModel& trace);

/// One entry per merging link that is not 1-1-1.
std::vector<std::string> merge_cardinality_violations(const TraceModel& trace);

/// Problems with the activation <-> link correspondence (count, kinds, injectivity).
std::vector<std::string> bijection_violations(const ExecutionResult& result, const TraceModel& trace);

/// Composed elements not created by exactly one activation, or created twice.
std::vector<std::string> partition_violations(const ExecutionResult& result);

bool relationship_graph_acyclic(const TraceModel& trace);

/// Element-wise comparison after renaming `b`'s ids to `a`'s by creation order.
std::vector<std::string> model_differences_modulo_ids(const Model& a, const Model& b);

struct DotCounts {
    std::size_t link_nodes = 0;
    std::size_t element_nodes = 0;
    std::size_t solid_edges = 0;
    std::size_t dashed_edges = 0;
    std::size_t blue = 0;
    std::size_t green = 0;
    std::size_t red = 0;
};

DotCounts count_dot(const std::string& dot);

/// Dashed edges a trace should render: one per element reference of every link.
std::size_t expected_dashed_edges(const TraceModel& trace);

}  // namespace mcomp::testing
