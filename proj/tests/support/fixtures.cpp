#include "fixtures.hpp"

#include <atomic>
#include <stdexcept>

#include <unistd.h>

#include "mcomp/model_io.hpp"
#include "mcomp/spec_dsl.hpp"

namespace mcomp::testing {

std::filesystem::path fixture_path(const std::string& name)
{
    return std::filesystem::path(MCOMP_TEST_DATA_DIR) / "fixtures" / name;
}

std::filesystem::path golden_path(const std::string& name)
{
    return std::filesystem::path(MCOMP_TEST_DATA_DIR) / "golden" / name;
}

std::string read_fixture(const std::string& name)
{
    return read_text_file(fixture_path(name));
}

CompositionSpec load_spec_fixture(const std::string& name)
{
    ParseResult parsed = parse_spec(read_fixture(name));
    if (!parsed.ok()) {
        std::string msg = name + " does not parse:";
        for (const auto& d : parsed.diagnostics) {
            msg += " " + format_diagnostic(d);
        }
        throw std::runtime_error(msg);
    }
    return *parsed.spec;
}

MetamodelRegistry load_metamodels(const std::vector<std::string>& names)
{
    MetamodelRegistry mms;
    for (const auto& n : names) {
        Metamodel mm = load_metamodel(read_fixture(n));
        std::string key = mm.name;
        mms.emplace(key, std::move(mm));
    }
    return mms;
}

Model load_model_fixture(const std::string& name, const MetamodelRegistry& mms)
{
    const std::string text = read_fixture(name);
    const std::string mm = Json::parse(text).at("metamodel").get<std::string>();
    return load_model(text, mms.at(mm));
}

Case library_case(const std::string& spec, const std::string& right, const std::string& left)
{
    MetamodelRegistry mms = load_metamodels({"entities.mm.json", "vocabulary.mm.json"});
    Model l = load_model_fixture(left, mms);
    Model r = load_model_fixture(right, mms);
    return Case{load_spec_fixture(spec), std::move(mms), std::move(l), std::move(r)};
}

Case diamond_case()
{
    MetamodelRegistry mms = load_metamodels({"catalog.mm.json", "groups.mm.json"});
    Model l = load_model_fixture("diamond-left.json", mms);
    Model r = load_model_fixture("diamond-right.json", mms);
    return Case{load_spec_fixture("diamond.mcomp"), std::move(mms), std::move(l), std::move(r)};
}

std::filesystem::path scratch_dir(const std::string& tag)
{
    static std::atomic<int> counter{0};
    auto dir = std::filesystem::temp_directory_path() /
               ("mcomp-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace mcomp::testing
