#include "cli.hpp"

#include <filesystem>
#include <ostream>

#include "CLI11.hpp"
#include "mcomp/engine.hpp"
#include "mcomp/model_io.hpp"
#include "mcomp/spec_dsl.hpp"
#include "mcomp/trace.hpp"
#include "mcomp/weaver.hpp"

namespace fs = std::filesystem;

namespace mcomp::cli {

namespace {

struct ComposeOptions {
    std::string spec;
    std::string left;
    std::string right;
    std::vector<std::string> mms;
    std::string out;
    bool dot = false;
    bool match_trace = false;
    bool via_weaver = false;
};

// Signals an input problem already reported on the error stream.
struct Reported {};

void print_diagnostics(std::ostream& err, const std::string& path, const std::vector<SpecDiagnostic>& diags)
{
    for (const auto& d : diags) {
        err << path << ":" << format_diagnostic(d) << "\n";
    }
}

CompositionSpec load_spec(const std::string& path, std::ostream& err)
{
    ParseResult parsed = parse_spec(read_text_file(path));
    if (!parsed.ok()) {
        print_diagnostics(err, path, parsed.diagnostics);
        throw Reported{};
    }
    return std::move(*parsed.spec);
}

MetamodelRegistry load_metamodels(const std::vector<std::string>& paths)
{
    MetamodelRegistry mms;
    for (const auto& path : paths) {
        Metamodel mm = load_metamodel(read_text_file(path));
        std::string name = mm.name;
        if (!mms.emplace(name, std::move(mm)).second) {
            throw ValidationError(path + ": metamodel '" + name + "' given twice");
        }
    }
    return mms;
}

Model load_model_file(const std::string& path, const MetamodelRegistry& mms)
{
    const std::string text = read_text_file(path);
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("metamodel") || !doc["metamodel"].is_string()) {
        throw ParseError(path + ": missing field 'metamodel'");
    }
    auto it = mms.find(doc["metamodel"].get<std::string>());
    if (it == mms.end()) {
        throw ValidationError(path + ": no metamodel '" + doc["metamodel"].get<std::string>() + "' was supplied");
    }
    try {
        return load_model(text, it->second);
    } catch (const Error& e) {
        throw Error(path + ": " + e.what());
    }
}

int compose(const ComposeOptions& o, std::ostream& out, std::ostream& err)
{
    CompositionSpec spec = load_spec(o.spec, err);
    const MetamodelRegistry mms = load_metamodels(o.mms);
    auto diags = check_spec(spec, mms);
    if (!diags.empty()) {
        print_diagnostics(err, o.spec, diags);
        return kDiagnostics;
    }
    const Model left = load_model_file(o.left, mms);
    const Model right = load_model_file(o.right, mms);

    ExecutionResult result;
    TraceModel trace;
    if (o.via_weaver) {
        WeaveResult woven = weave_traceability(spec);
        result = execute(woven.spec, left, right, mms);
        trace = trace_from_woven(*result.secondary);
    } else {
        result = execute(spec, left, right, mms);
        trace = generate_trace(result);
    }

    const fs::path dir(o.out);
    fs::create_directories(dir);
    write_text_file(dir / "composed.json", serialize_model(result.composed));
    write_text_file(dir / "trace.json", dump_json(trace_to_json(trace)));
    write_text_file(dir / "execution-log.json", dump_json(execution_to_json(result)));
    if (o.dot) {
        write_text_file(dir / "trace.dot", export_dot(trace, left, right, result.composed));
    }
    if (o.match_trace) {
        write_text_file(dir / "match-trace.json", dump_json(correspondences_to_json(result.match_trace)));
    }
    out << "composed " << result.composed.size() << " elements, " << trace.links.size() << " links, "
        << trace.relationships.size() << " relationships -> " << dir.string() << "\n";
    return kOk;
}

int weave(const std::string& spec_path, const std::string& out_path, std::ostream& out, std::ostream& err)
{
    CompositionSpec spec = load_spec(spec_path, err);
    WeaveResult woven = weave_traceability(spec);
    const fs::path target(out_path);
    if (target.has_parent_path()) {
        fs::create_directories(target.parent_path());
    }
    write_text_file(target, print_spec(woven.spec));
    write_text_file(target.parent_path() / "weave-report.json", dump_json(weave_report_to_json(woven.report)));
    out << "woven " << woven.report.instrumented_rules.size() << " rules, " << woven.report.nesting_sites.size()
        << " nesting sites -> " << target.string() << "\n";
    return kOk;
}

int validate(const std::string& spec_path, const std::vector<std::string>& mm_paths, std::ostream& out,
             std::ostream& err)
{
    CompositionSpec spec = load_spec(spec_path, err);
    auto diags = check_spec(spec, load_metamodels(mm_paths));
    if (!diags.empty()) {
        print_diagnostics(err, spec_path, diags);
        return kDiagnostics;
    }
    out << spec_path << ": ok\n";
    return kOk;
}

void print_ids(std::ostream& out, const std::vector<std::string>& ids)
{
    for (const auto& id : ids) {
        out << id << "\n";
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Rule-based model composition with traceability", "mcomp"};
    app.require_subcommand(1);

    ComposeOptions co;
    auto* compose_cmd = app.add_subcommand("compose", "Compose two models and emit the trace");
    compose_cmd->add_option("--spec", co.spec, "Composition specification (.mcomp)")->required();
    compose_cmd->add_option("--left", co.left, "Left model")->required();
    compose_cmd->add_option("--right", co.right, "Right model")->required();
    compose_cmd->add_option("--mm", co.mms, "Metamodel documents")->required()->expected(1, -1);
    compose_cmd->add_option("--out", co.out, "Output directory")->required();
    compose_cmd->add_flag("--dot", co.dot, "Also write trace.dot");
    compose_cmd->add_flag("--match-trace", co.match_trace, "Also write match-trace.json");
    compose_cmd->add_flag("--via-weaver", co.via_weaver, "Produce the trace by executing the woven specification");

    std::string weave_spec;
    std::string weave_out;
    auto* weave_cmd = app.add_subcommand("weave", "Instrument a specification for trace generation");
    weave_cmd->add_option("--spec", weave_spec, "Composition specification")->required();
    weave_cmd->add_option("--out", weave_out, "Woven specification to write")->required();

    std::string trace_path;
    std::string query_id;
    std::string query_side;
    auto* query_cmd = app.add_subcommand("query", "Query a trace file");
    query_cmd->add_option("--trace", trace_path, "trace.json")->required();
    query_cmd->require_subcommand(1);
    auto* children_cmd = query_cmd->add_subcommand("children", "Child links of a link");
    children_cmd->add_option("id", query_id)->required();
    auto* parents_cmd = query_cmd->add_subcommand("parents", "Parent links of a link");
    parents_cmd->add_option("id", query_id)->required();
    auto* element_cmd = query_cmd->add_subcommand("element", "Links touching an element");
    element_cmd->add_option("id", query_id)->required();
    element_cmd->add_option("side", query_side)->required()->check(CLI::IsMember({"left", "right", "target"}));

    std::string validate_spec;
    std::vector<std::string> validate_mms;
    auto* validate_cmd = app.add_subcommand("validate", "Parse and type-check a specification");
    validate_cmd->add_option("--spec", validate_spec, "Composition specification")->required();
    validate_cmd->add_option("--mm", validate_mms, "Metamodel documents")->required()->expected(1, -1);

    try {
        app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kDiagnostics;
    }

    try {
        if (compose_cmd->parsed()) {
            return compose(co, out, err);
        }
        if (weave_cmd->parsed()) {
            return weave(weave_spec, weave_out, out, err);
        }
        if (validate_cmd->parsed()) {
            return validate(validate_spec, validate_mms, out, err);
        }
        if (query_cmd->parsed()) {
            const TraceModel trace = load_trace(read_text_file(trace_path));
            if (children_cmd->parsed()) {
                print_ids(out, children(trace, query_id));
            } else if (parents_cmd->parsed()) {
                print_ids(out, parents(trace, query_id));
            } else {
                print_ids(out, links_for_element(trace, query_id, *parse_side(query_side)));
            }
            return kOk;
        }
    } catch (const Reported&) {
        return kDiagnostics;
    } catch (const CompositionError& e) {
        err << "composition failed: " << e.what() << "\n";
        return kCompositionFailed;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kDiagnostics;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kDiagnostics;
    }
    return kDiagnostics;
}

}  // namespace mcomp::cli
