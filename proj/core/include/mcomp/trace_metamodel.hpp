#pragma once

#include <string_view>

#include "mcomp/model.hpp"

namespace mcomp::trace_mm {

inline constexpr std::string_view kName = "trace-mm";

inline constexpr std::string_view kMergingLink = "MergingLink";
inline constexpr std::string_view kTransformationLink = "TransformationLink";

// Link features. left/right/targets point into the source and composed models;
// the two child references nest links inside the trace model itself.
inline constexpr std::string_view kLeft = "left";
inline constexpr std::string_view kRight = "right";
inline constexpr std::string_view kTargets = "targets";
inline constexpr std::string_view kImplicitChildren = "implicitChildren";
inline constexpr std::string_view kExplicitChildren = "explicitChildren";

/// The built-in traceability metamodel that woven specifications target.
const Metamodel& metamodel();

/// Returns `mms` plus the trace metamodel when it is not already present.
MetamodelRegistry with_trace_metamodel(MetamodelRegistry mms);

}  // namespace mcomp::trace_mm
