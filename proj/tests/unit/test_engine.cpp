#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "mcomp/engine.hpp"
#include "mcomp/spec_dsl.hpp"
#include "oracles.hpp"

using namespace mcomp;
using namespace mcomp::testing;

namespace {

std::string attr_string(const Model& m, const std::string& id, const char* name)
{
    return std::get<std::string>(*m.find(id)->attrs.find(name));
}

bool attr_bool(const Model& m, const std::string& id, const char* name)
{
    return std::get<bool>(*m.find(id)->attrs.find(name));
}

const ModelElement* composed_named(const Model& m, const std::string& name)
{
    for (const auto& el : m.elements()) {
        const Value* v = el.attrs.find("name");
        if (v && std::get<std::string>(*v) == name) {
            return &el;
        }
    }
    return nullptr;
}

std::size_t count_rule(const ExecutionResult& r, const std::string& rule)
{
    std::size_t n = 0;
    for (const auto& a : r.activations) {
        n += a.rule == rule;
    }
    return n;
}

}  // namespace

TEST(MatchPhase, ScenarioCorrespondences)
{
    Case c = library_case();
    auto corr = run_match_phase(c.spec, c.left, c.right, c.mms);
    EXPECT_EQ(corr, library_match_oracle(c.left, c.right));
    ASSERT_EQ(corr.size(), 4u);
    EXPECT_EQ(corr[0].left, "sys");
    EXPECT_EQ(corr[0].right, "voc");
    EXPECT_EQ(corr[1].left, "e-author");
    EXPECT_EQ(corr[2].left, "e-publisher");
    EXPECT_EQ(corr[3].left, "e-book");
    for (const auto& x : corr) {
        EXPECT_NE(x.left, "e-chapter");
    }
}

TEST(MatchPhase, NoTermsLeavesOnlyTheRootPair)
{
    Case c = library_case("scenario.mcomp", "right-empty.json");
    auto corr = run_match_phase(c.spec, c.left, c.right, c.mms);
    ASSERT_EQ(corr.size(), 1u);
    EXPECT_EQ(corr[0].rule, "MatchSystemWithVocabulary");
}

TEST(MatchPhase, AliasMakesChapterCorrespond)
{
    Case c = library_case("scenario.mcomp", "right-alias.json");
    auto corr = run_match_phase(c.spec, c.left, c.right, c.mms);
    EXPECT_EQ(corr, library_match_oracle(c.left, c.right));
    ASSERT_EQ(corr.size(), 5u);
    EXPECT_EQ(corr[4].left, "e-chapter");
    EXPECT_EQ(corr[4].right, "t-book");
}

TEST(MatchPhase, SoundnessOverEveryPair)
{
    for (const char* right : {"right.json", "right-alias.json", "right-empty.json"}) {
        Case c = library_case("scenario.mcomp", right);
        auto corr = run_match_phase(c.spec, c.left, c.right, c.mms);
        auto oracle = library_match_oracle(c.left, c.right);
        // Every same-typed pair is either in both lists or in neither.
        for (const auto& l : c.left.elements()) {
            for (const auto& r : c.right.elements()) {
                auto in = [&](const std::vector<Correspondence>& v) {
                    return std::any_of(v.begin(), v.end(),
                                       [&](const Correspondence& x) { return x.left == l.id && x.right == r.id; });
                };
                EXPECT_EQ(in(corr), in(oracle)) << l.id << " x " << r.id << " in " << right;
            }
        }
    }
}

TEST(Execute, ScenarioComposedModel)
{
    Case c = library_case();
    ExecutionResult r = c.run();
    const Model& m = r.composed;
    ASSERT_EQ(m.size(), 5u);
    EXPECT_EQ(m.elements()[0].type, "System");
    const auto oracle = library_match_oracle(c.left, c.right);
    for (const auto& el : c.left.elements()) {
        if (el.type != "Entity") {
            continue;
        }
        const std::string name = std::get<std::string>(*el.attrs.find("name"));
        const Correspondence* match = nullptr;
        for (const auto& x : oracle) {
            if (x.left == el.id) {
                match = &x;
            }
        }
        const std::string expected_name =
            match ? std::get<std::string>(*c.right.find(match->right)->attrs.find("name")) : name;
        const ModelElement* out = composed_named(m, expected_name);
        ASSERT_NE(out, nullptr) << name;
        EXPECT_EQ(std::get<bool>(*out->attrs.find("inDomain")), match != nullptr) << name;
    }
    EXPECT_EQ(count_rule(r, "MergeSystemWithVocabulary"), 1u);
    EXPECT_EQ(count_rule(r, "MergeEntityWithTerm"), 3u);
    EXPECT_EQ(count_rule(r, "TransformEntity"), 1u);
    EXPECT_FALSE(attr_bool(m, "t5", "inDomain"));
    EXPECT_EQ(attr_string(m, "t5", "name"), "Chapter");
}

TEST(Execute, ComposedElementsFollowActivationOrder)
{
    ExecutionResult r = library_case().run();
    std::vector<std::string> order;
    for (const auto& a : r.activations) {
        order.insert(order.end(), a.composed.begin(), a.composed.end());
    }
    std::vector<std::string> ids;
    for (const auto& el : r.composed.elements()) {
        ids.push_back(el.id);
    }
    EXPECT_EQ(order, ids);
}

TEST(Execute, EmptyModels)
{
    Case c = library_case("scenario.mcomp", "right-none.json", "left-empty.json");
    ExecutionResult r = c.run();
    EXPECT_TRUE(r.composed.empty());
    EXPECT_TRUE(r.activations.empty());
    EXPECT_TRUE(r.match_trace.empty());
}

TEST(Execute, AmbiguousMergeRulesNameBoth)
{
    Case c = library_case("ambiguous.mcomp");
    try {
        c.run();
        FAIL() << "expected an ambiguity error";
    } catch (const AmbiguityError& e) {
        EXPECT_NE(std::string(e.what()).find("MergeEntityWithTerm "), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("MergeEntityWithTermAgain"), std::string::npos);
    }
}

TEST(Execute, AmbiguousTransformRules)
{
    Case c = library_case();
    CompositionRule twin = *c.spec.find_rule("TransformEntity");
    twin.name = "TransformEntityAgain";
    c.spec.rules.push_back(twin);
    EXPECT_THROW(c.run(), AmbiguityError);
}

TEST(Execute, NoDuplicationUnderMerge)
{
    for (const char* right : {"right.json", "right-alias.json", "right-empty.json"}) {
        Case c = library_case("scenario.mcomp", right);
        ExecutionResult r = c.run();
        std::size_t left_entities = 0;
        std::size_t composed_entities = 0;
        for (const auto& el : c.left.elements()) {
            left_entities += el.type == "Entity";
        }
        for (const auto& el : r.composed.elements()) {
            composed_entities += el.type == "Entity";
        }
        EXPECT_EQ(composed_entities, left_entities) << right;
    }
}

TEST(Execute, MultipleCorrespondencesForOneLeftElement)
{
    Case c = library_case("multi.mcomp", "right-multi.json", "left-multi.json");
    ExecutionResult r = c.run();
    ASSERT_EQ(count_rule(r, "MergeEntityWithTerm"), 2u);
    EXPECT_EQ(r.activations[1].right, ElementIds{"t-x1"});
    EXPECT_EQ(r.activations[2].right, ElementIds{"t-x2"});
    // The system resolves its single entity to both merged targets.
    EXPECT_EQ(*r.composed.find("t1")->refs.find("entity"), (ElementIds{"t2", "t3"}));
    EXPECT_EQ(r.implicit_calls.size(), 2u);
}

TEST(Execute, PartitionAndMergeCardinality)
{
    for (const char* spec : {"scenario.mcomp", "scenario-explicit.mcomp", "two-sources.mcomp"}) {
        ExecutionResult r = library_case(spec).run();
        EXPECT_TRUE(partition_violations(r).empty()) << spec;
        for (const auto& a : r.activations) {
            if (a.kind == RuleKind::Merge) {
                EXPECT_EQ(a.left.size(), 1u);
                EXPECT_EQ(a.right.size(), 1u);
                EXPECT_EQ(a.composed.size(), 1u);
            }
        }
    }
}

TEST(Execute, Deterministic)
{
    Case c = library_case();
    EXPECT_EQ(dump_json(execution_to_json(c.run())), dump_json(execution_to_json(c.run())));
}

TEST(Execute, IdentityStability)
{
    Case c = library_case();
    ExecutionResult r = c.run();
    for (const auto& a : r.activations) {
        for (const auto& id : a.left) {
            EXPECT_TRUE(c.left.contains(id));
        }
        for (const auto& id : a.right) {
            EXPECT_TRUE(c.right.contains(id));
        }
        for (const auto& id : a.composed) {
            EXPECT_TRUE(r.composed.contains(id));
        }
    }
    for (const auto& x : r.match_trace) {
        EXPECT_TRUE(c.left.contains(x.left));
        EXPECT_TRUE(c.right.contains(x.right));
    }
}

TEST(Execute, GuardTypeErrorAtRuntimeNamesRuleAndElements)
{
    Case c = library_case();
    // Bypass the checker: compare a string with a boolean.
    CompositionRule& m = c.spec.rules[1];
    m.guard = Expr::make_binary(Expr::Kind::Eq, Expr::make_member(Expr::make_var("s"), "name"),
                                Expr::make_member(Expr::make_var("s"), "inDomain"));
    try {
        c.run();
        FAIL() << "expected an evaluation error";
    } catch (const EvaluationError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("MatchEntityWithTerm"), std::string::npos);
        EXPECT_NE(msg.find("e-author"), std::string::npos);
    }
}

TEST(Resolve, EquivalentOfTheSystemEntities)
{
    ExecutionResult r = library_case().run();
    EXPECT_EQ(*r.composed.find("t1")->refs.find("entity"), (ElementIds{"t2", "t3", "t4", "t5"}));
    ASSERT_EQ(r.implicit_calls.size(), 4u);
    for (const auto& c : r.implicit_calls) {
        EXPECT_EQ(c.caller, 1u);
        EXPECT_FALSE(c.resolved.empty());
    }
}

TEST(Resolve, SingleMatchedElement)
{
    Case c = library_case();
    Execution exec(c.spec, c.left, c.right, c.mms);
    exec.initialize();
    const auto before = exec.result().implicit_calls.size();
    ElementIds got = exec.resolve_each(1, {"e-book"});
    // brute-force scan: the activation whose source set contains e-book
    ElementIds expected;
    for (const auto& a : exec.result().activations) {
        if (std::find(a.left.begin(), a.left.end(), "e-book") != a.left.end()) {
            expected.insert(expected.end(), a.composed.begin(), a.composed.end());
        }
    }
    EXPECT_EQ(got, expected);
    ASSERT_EQ(got.size(), 1u);
    EXPECT_EQ(exec.result().implicit_calls.size(), before + 1);
}

TEST(Resolve, EmptyCollectionLeavesNoRecord)
{
    Case c = library_case();
    Execution exec(c.spec, c.left, c.right, c.mms);
    exec.initialize();
    const auto before = exec.result().implicit_calls.size();
    EXPECT_TRUE(exec.resolve_each(1, {}).empty());
    EXPECT_EQ(exec.result().implicit_calls.size(), before);
}

TEST(Resolve, UnconsumedElementIsAnError)
{
    Case c = library_case();
    c.spec.rules.pop_back();  // drop TransformEntity: Chapter is consumed by nothing
    try {
        c.run();
        FAIL() << "expected an unresolved-equivalent error";
    } catch (const UnresolvedEquivalentError& e) {
        EXPECT_NE(std::string(e.what()).find("e-chapter"), std::string::npos);
    }
}

TEST(Resolve, StrictSetEquality)
{
    ExecutionResult r = library_case().run();
    EXPECT_EQ(resolve({"e-book", "t-book"}, r.activations), ElementIds{"t4"});
    EXPECT_EQ(resolve({"t-book", "e-book"}, r.activations), ElementIds{"t4"});
    EXPECT_TRUE(resolve({"e-book"}, r.activations).empty());
    EXPECT_EQ(resolve({"e-chapter"}, r.activations), ElementIds{"t5"});
    for (const auto& a : r.activations) {
        EXPECT_EQ(resolve(a.source_set(), r.activations), resolve_scan(a.source_set(), r.activations));
    }
}

TEST(Resolve, RecordsMatchPostHocResolve)
{
    for (const char* spec : {"scenario.mcomp", "multi.mcomp"}) {
        Case c = std::string(spec) == "multi.mcomp" ? library_case(spec, "right-multi.json", "left-multi.json")
                                                    : library_case(spec);
        ExecutionResult r = c.run();
        for (const auto& call : r.implicit_calls) {
            EXPECT_EQ(resolve_scan(call.resolved, r.activations), call.wired) << spec;
        }
    }
}

TEST(ExplicitCall, VariantComposesTheSameModel)
{
    ExecutionResult implicit = library_case().run();
    ExecutionResult explicit_ = library_case("scenario-explicit.mcomp").run();
    EXPECT_EQ(serialize_model(explicit_.composed), serialize_model(implicit.composed));
    EXPECT_EQ(explicit_.explicit_calls.size(), 4u);
    EXPECT_TRUE(explicit_.implicit_calls.empty());
    const ExplicitCallRecord& last = explicit_.explicit_calls.back();
    EXPECT_EQ(last.callee, "TransformEntity");
    EXPECT_EQ(last.left, ElementIds{"e-chapter"});
    EXPECT_EQ(last.caller, 1u);
}

TEST(ExplicitCall, TransformChapterFromTheRoot)
{
    Case c = library_case();
    Execution exec(c.spec, c.left, c.right, c.mms);
    exec.initialize();
    const auto activations = exec.result().activations.size();
    ElementIds got = exec.call_explicit(1, "TransformEntity", {"e-chapter"}, {});
    EXPECT_EQ(got, ElementIds{"t5"});
    EXPECT_EQ(exec.result().activations.size(), activations);
    ASSERT_EQ(exec.result().explicit_calls.size(), 1u);
    EXPECT_EQ(exec.result().explicit_calls[0].caller, 1u);
}

TEST(ExplicitCall, Idempotent)
{
    Case c = library_case();
    Execution exec(c.spec, c.left, c.right, c.mms);
    exec.allocate();
    const auto activations = exec.result().activations.size();
    // Author is matched, so TransformEntity never fired on it: the first call fires it.
    ElementIds first = exec.call_explicit(1, "TransformEntity", {"e-author"}, {});
    ElementIds second = exec.call_explicit(1, "TransformEntity", {"e-author"}, {});
    EXPECT_EQ(first, second);
    EXPECT_EQ(exec.result().activations.size(), activations + 1);
    EXPECT_EQ(exec.result().explicit_calls.size(), 2u);
    // fired activations are initialized on the spot
    EXPECT_EQ(attr_string(exec.result().composed, first[0], "name"), "Author");
}

TEST(ExplicitCall, Errors)
{
    Case c = library_case();
    Execution exec(c.spec, c.left, c.right, c.mms);
    exec.initialize();
    EXPECT_THROW(exec.call_explicit(1, "TransformEntity", {"sys"}, {}), CallError);
    EXPECT_THROW(exec.call_explicit(1, "Nope", {"e-book"}, {}), CallError);
    EXPECT_THROW(exec.call_explicit(1, "MatchEntityWithTerm", {"e-book"}, {"t-book"}), CallError);
    EXPECT_THROW(exec.call_explicit(1, "TransformEntity", {"e-book", "e-author"}, {}), CallError);
    EXPECT_THROW(exec.call_explicit(1, "MergeEntityWithTerm", {"e-book"}, {"voc"}), CallError);
    EXPECT_THROW(exec.call_explicit(99, "TransformEntity", {"e-book"}, {}), CallError);
}

TEST(ExecutionLog, JsonShape)
{
    Json j = execution_to_json(library_case().run());
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) {
        keys.push_back(k);
    }
    EXPECT_EQ(keys, (std::vector<std::string>{"composed", "matchTrace", "activations", "explicitCalls", "implicitCalls"}));
    EXPECT_EQ(j["activations"].size(), 5u);
    EXPECT_EQ(j["matchTrace"].size(), 4u);
    EXPECT_EQ(j["activations"][4]["kind"], "transform");
}

TEST(Execute, RejectsModelsOfTheWrongMetamodel)
{
    Case c = library_case();
    EXPECT_THROW(execute(c.spec, c.right, c.left, c.mms), ValidationError);
}
