#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "mcomp/model.hpp"

namespace mcomp {

using Json = nlohmann::ordered_json;

/// Parses a metamodel document and validates it.
/// Throws ParseError on malformed JSON or schema violations, ValidationError on
/// duplicate type names or dangling reference targets.
Metamodel load_metamodel(std::string_view text);
Metamodel metamodel_from_json(const Json& doc);
Json metamodel_to_json(const Metamodel& mm);

/// Parses a model document and checks it against `mm`.
/// Throws ParseError or ConformanceError (whose message names the first offending element).
Model load_model(std::string_view text, const Metamodel& mm);

/// Reads a model document without checking conformance.
Model model_from_json(const Json& doc);
Json model_to_json(const Model& model);

/// Serialized form used for every emitted file: two-space indent, trailing newline.
std::string dump_json(const Json& doc);
std::string serialize_model(const Model& model);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace mcomp
