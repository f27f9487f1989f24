#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "mcomp/trace.hpp"
#include "oracles.hpp"

using namespace mcomp;
using namespace mcomp::testing;

namespace {

std::size_t count_kind(const TraceModel& t, LinkKind k)
{
    return static_cast<std::size_t>(
        std::count_if(t.links.begin(), t.links.end(), [k](const TraceLink& l) { return l.kind == k; }));
}

std::set<std::pair<std::string, std::string>> pairs(const TraceModel& t)
{
    std::set<std::pair<std::string, std::string>> out;
    for (const auto& r : t.relationships) {
        out.insert({r.parent, r.child});
    }
    return out;
}

// Scan oracle: link ids whose side contains the element.
std::vector<std::string> scan(const TraceModel& t, const std::string& id, Side side)
{
    std::vector<std::string> out;
    for (const auto& l : t.links) {
        const ElementIds& ids = side == Side::Left ? l.left : side == Side::Right ? l.right : l.targets;
        for (const auto& x : ids) {
            if (x == id) {
                out.push_back(l.id);
                break;
            }
        }
    }
    return out;
}

}  // namespace

TEST(BuildTrace, ScenarioLinks)
{
    ExecutionResult r = library_case().run();
    TraceModel t = build_trace(r);
    ASSERT_EQ(t.links.size(), 5u);
    EXPECT_EQ(count_kind(t, LinkKind::Merging), 4u);
    EXPECT_EQ(count_kind(t, LinkKind::Transformation), 1u);
    EXPECT_EQ(t.links[0].left, ElementIds{"sys"});
    EXPECT_EQ(t.links[0].right, ElementIds{"voc"});
    EXPECT_EQ(t.links[0].targets, ElementIds{"t1"});
    EXPECT_EQ(t.links[4].left, ElementIds{"e-chapter"});
    EXPECT_TRUE(t.links[4].right.empty());
    EXPECT_TRUE(t.relationships.empty());
    EXPECT_TRUE(bijection_violations(r, t).empty());
    ASSERT_TRUE(t.links[0].context.has_value());
    EXPECT_EQ(*t.links[0].context->find("rule"), "MergeSystemWithVocabulary");
}

TEST(BuildTrace, NoActivations)
{
    Case c = library_case("scenario.mcomp", "right-none.json", "left-empty.json");
    TraceModel t = generate_trace(c.run());
    EXPECT_TRUE(t.links.empty());
    EXPECT_TRUE(t.relationships.empty());
}

TEST(BuildTrace, TwoSourceTransform)
{
    ExecutionResult r = library_case("two-sources.mcomp").run();
    TraceModel t = build_trace(r);
    ASSERT_EQ(t.links.size(), 1u);
    EXPECT_EQ(t.links[0].kind, LinkKind::Transformation);
    EXPECT_EQ(t.links[0].left.size(), 2u);
    // brute force: link fields equal activation fields
    ASSERT_EQ(r.activations.size(), 1u);
    EXPECT_EQ(t.links[0].left, r.activations[0].left);
    EXPECT_EQ(t.links[0].right, r.activations[0].right);
    EXPECT_EQ(t.links[0].targets, r.activations[0].composed);
    EXPECT_EQ(t.links[0].left, (ElementIds{"e-book", "e-chapter"}));
}

TEST(BuildTrace, MergeCardinalityViolationIsAnIntegrityError)
{
    ExecutionResult r = library_case().run();
    r.activations[1].composed.push_back("t5");
    EXPECT_THROW(build_trace(r), IntegrityError);
}

TEST(NestLinks, ImplicitScenario)
{
    ExecutionResult r = library_case().run();
    TraceModel t = generate_trace(r);
    ASSERT_EQ(t.relationships.size(), 4u);
    for (const auto& rel : t.relationships) {
        EXPECT_EQ(rel.parent, "l1");
        EXPECT_EQ(rel.origin, Origin::Implicit);
    }
    EXPECT_EQ(children(t, "l1"), (std::vector<std::string>{"l2", "l3", "l4", "l5"}));
    const auto rebuilt = reconstruct_relationships(r, t);
    EXPECT_EQ(rebuilt, std::set<TraceRelationship>(t.relationships.begin(), t.relationships.end()));
}

TEST(NestLinks, NoCallRecords)
{
    ExecutionResult r = library_case().run();
    r.implicit_calls.clear();
    EXPECT_TRUE(generate_trace(r).relationships.empty());
}

TEST(NestLinks, ExplicitVariantHasTheSameShape)
{
    TraceModel implicit = generate_trace(library_case().run());
    ExecutionResult r = library_case("scenario-explicit.mcomp").run();
    TraceModel explicit_ = generate_trace(r);
    EXPECT_EQ(pairs(explicit_), pairs(implicit));
    for (const auto& rel : explicit_.relationships) {
        EXPECT_EQ(rel.origin, Origin::Explicit);
    }
    EXPECT_EQ(reconstruct_relationships(r, explicit_),
              std::set<TraceRelationship>(explicit_.relationships.begin(), explicit_.relationships.end()));
}

TEST(NestLinks, DuplicateCallsAreRecordedOnce)
{
    ExecutionResult r = library_case("scenario-explicit.mcomp").run();
    r.explicit_calls.push_back(r.explicit_calls.back());
    r.explicit_calls.back().event = 1000;
    EXPECT_EQ(generate_trace(r).relationships.size(), 4u);
}

TEST(NestLinks, DanglingCallRecord)
{
    ExecutionResult r = library_case("scenario-explicit.mcomp").run();
    r.explicit_calls.back().left = {"e-author"};
    EXPECT_THROW(generate_trace(r), IntegrityError);

    ExecutionResult r2 = library_case().run();
    r2.implicit_calls.back().resolved = {"nothing"};
    EXPECT_THROW(generate_trace(r2), IntegrityError);
}

TEST(NestLinks, RelationshipsFollowCallOrder)
{
    ExecutionResult r = library_case("scenario-explicit.mcomp").run();
    TraceModel t = generate_trace(r);
    std::vector<std::string> order;
    for (const auto& rel : t.relationships) {
        order.push_back(rel.child);
    }
    EXPECT_EQ(order, (std::vector<std::string>{"l2", "l3", "l4", "l5"}));
}

TEST(Queries, ChildrenAndParents)
{
    TraceModel t = generate_trace(library_case().run());
    EXPECT_EQ(children(t, "l1").size(), 4u);
    EXPECT_TRUE(children(t, "l5").empty());
    EXPECT_EQ(parents(t, "l5"), std::vector<std::string>{"l1"});
    EXPECT_TRUE(parents(t, "l1").empty());
    EXPECT_EQ(roots(t), std::vector<std::string>{"l1"});
    EXPECT_THROW(children(t, "l99"), QueryError);
    EXPECT_THROW(parents(t, ""), QueryError);
}

TEST(Queries, DiamondChildHasTwoParents)
{
    TraceModel t = generate_trace(diamond_case().run());
    // link of the shared entity: the one whose left side holds e1
    const auto shared = scan(t, "e1", Side::Left);
    ASSERT_EQ(shared.size(), 1u);
    std::vector<std::string> expected;
    for (const auto& rel : t.relationships) {
        if (rel.child == shared[0]) {
            expected.push_back(rel.parent);
        }
    }
    EXPECT_EQ(parents(t, shared[0]), expected);
    EXPECT_EQ(expected.size(), 2u);
    EXPECT_TRUE(relationship_graph_acyclic(t));
}

TEST(Queries, LinksForElement)
{
    TraceModel t = generate_trace(library_case().run());
    for (const char* id : {"e-book", "sys", "e-chapter", "t-book", "voc", "t1", "t5", "nope"}) {
        for (Side side : {Side::Left, Side::Right, Side::Target}) {
            EXPECT_EQ(links_for_element(t, id, side), scan(t, id, side)) << id;
        }
    }
    EXPECT_EQ(links_for_element(t, "e-book", Side::Left), std::vector<std::string>{"l4"});
    EXPECT_EQ(links_for_element(t, "t1", Side::Target), std::vector<std::string>{"l1"});
    EXPECT_TRUE(links_for_element(t, "nope", Side::Left).empty());
}

TEST(ExportDot, ScenarioCounts)
{
    Case c = library_case();
    ExecutionResult r = c.run();
    TraceModel t = generate_trace(r);
    const std::string dot = export_dot(t, c.left, c.right, r.composed);
    DotCounts n = count_dot(dot);
    EXPECT_EQ(n.link_nodes, 5u);
    EXPECT_EQ(n.solid_edges, 4u);
    EXPECT_EQ(n.dashed_edges, expected_dashed_edges(t));
    EXPECT_EQ(n.dashed_edges, 14u);
    EXPECT_EQ(n.blue, 5u);
    EXPECT_EQ(n.green, 4u);
    EXPECT_EQ(n.red, 5u);
    EXPECT_NE(dot.find("label=\"Entity:Chapter\""), std::string::npos);
    EXPECT_NE(dot.find("label=\"MergingLink l1\""), std::string::npos);
    EXPECT_EQ(dot, export_dot(t, c.left, c.right, r.composed));
}

TEST(ExportDot, EmptyTrace)
{
    EXPECT_EQ(export_dot(TraceModel{}, Model{}, Model{}, Model{}), "digraph trace {\n}\n");
}

TEST(ExportDot, MatchesGoldenFile)
{
    Case c = library_case();
    ExecutionResult r = c.run();
    EXPECT_EQ(export_dot(generate_trace(r), c.left, c.right, r.composed), read_text_file(golden_path("trace.dot")));
}

TEST(TraceJson, RoundTrip)
{
    for (TraceModel t : {generate_trace(library_case().run()), generate_trace(diamond_case().run()), TraceModel{}}) {
        EXPECT_EQ(trace_from_json(trace_to_json(t)), t);
        EXPECT_EQ(load_trace(dump_json(trace_to_json(t))), t);
    }
}

TEST(TraceJson, MatchesGoldenFile)
{
    EXPECT_EQ(dump_json(trace_to_json(generate_trace(library_case().run()))), read_text_file(golden_path("trace.json")));
}

TEST(TraceJson, RejectsMalformedDocuments)
{
    EXPECT_THROW(load_trace("{"), ParseError);
    EXPECT_THROW(load_trace(R"({"links":[]})"), ParseError);
    EXPECT_THROW(load_trace(R"({"links":[{"id":"l1","kind":"odd","left":[],"right":[],"targets":[]}],
                               "relationships":[]})"),
                 ParseError);
    EXPECT_THROW(load_trace(R"({"links":[],"relationships":[{"parent":"a","child":"b","origin":"implicit"}]})"),
                 ParseError);
}
