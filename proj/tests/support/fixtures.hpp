#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mcomp/engine.hpp"
#include "mcomp/model.hpp"
#include "mcomp/spec.hpp"

namespace mcomp::testing {

std::filesystem::path fixture_path(const std::string& name);
std::filesystem::path golden_path(const std::string& name);
std::string read_fixture(const std::string& name);

/// Parses a fixture spec; fails loudly on diagnostics.
CompositionSpec load_spec_fixture(const std::string& name);
MetamodelRegistry load_metamodels(const std::vector<std::string>& names);
Model load_model_fixture(const std::string& name, const MetamodelRegistry& mms);

/// A ready-to-run composition.
struct Case {
    CompositionSpec spec;
    MetamodelRegistry mms;
    Model left;
    Model right;

    ExecutionResult run() const { return execute(spec, left, right, mms); }
};

/// Entities/vocabulary composition with the given spec and right model.
Case library_case(const std::string& spec = "scenario.mcomp", const std::string& right = "right.json",
                  const std::string& left = "left.json");
Case diamond_case();

/// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& tag);

}  // namespace mcomp::testing
