#include "mcomp/weaver.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "mcomp/trace_metamodel.hpp"

namespace mcomp {

namespace {

std::string fresh_name(const std::string& base, const std::set<std::string>& taken)
{
    if (!taken.contains(base)) {
        return base;
    }
    for (int i = 2;; ++i) {
        std::string candidate = base + std::to_string(i);
        if (!taken.contains(candidate)) {
            return candidate;
        }
    }
}

Statement set_feature(const std::string& param, std::string_view feature, Expr value)
{
    Statement st;
    st.kind = Statement::Kind::SetFeature;
    st.param = param;
    st.feature = std::string(feature);
    st.value = std::move(value);
    return st;
}

}  // namespace

WeaveResult weave_traceability(const CompositionSpec& spec)
{
    if (spec.targets.size() != 1) {
        throw WeaveError("composition '" + spec.name + "' has " + std::to_string(spec.targets.size()) +
                         " target models; weaving needs exactly one");
    }
    WeaveResult out;
    out.spec = spec;
    WeaveReport& report = out.report;

    std::set<std::string> aliases{spec.left.alias, spec.right.alias, spec.targets[0].alias};
    const ModelDecl trace_decl{fresh_name("Trace", aliases), std::string(trace_mm::kName)};
    out.spec.targets.push_back(trace_decl);
    report.added_target = trace_decl;

    for (auto& rule : out.spec.rules) {
        if (rule.kind == RuleKind::Match) {
            continue;
        }
        std::set<std::string> names;
        for (const auto* group : {&rule.in_left, &rule.in_right, &rule.out}) {
            for (const auto& p : *group) {
                names.insert(p.name);
            }
        }
        const std::string link = fresh_name("link", names);
        const bool merge = rule.kind == RuleKind::Merge;
        std::vector<Param> primary_outs = rule.out;
        rule.out.push_back(Param{link, trace_decl.alias,
                                 std::string(merge ? trace_mm::kMergingLink : trace_mm::kTransformationLink), {}});
        report.instrumented_rules.push_back({rule.name, link});

        std::vector<Statement> body;
        for (const auto& p : rule.in_left) {
            body.push_back(set_feature(link, trace_mm::kLeft, Expr::make_var(p.name)));
        }
        for (const auto& p : rule.in_right) {
            body.push_back(set_feature(link, trace_mm::kRight, Expr::make_var(p.name)));
        }
        for (const auto& p : primary_outs) {
            body.push_back(set_feature(link, trace_mm::kTargets, Expr::make_var(p.name)));
        }
        for (std::size_t i = 0; i < rule.body.size(); ++i) {
            const Statement& st = rule.body[i];
            body.push_back(st);
            Statement nest;
            nest.param = link;
            if (st.kind == Statement::Kind::SetResolve) {
                nest.kind = Statement::Kind::SetResolve;
                nest.feature = std::string(trace_mm::kImplicitChildren);
                nest.value = st.value;
                report.nesting_sites.push_back({rule.name, i, Origin::Implicit});
            } else if (st.kind == Statement::Kind::SetCall || st.kind == Statement::Kind::Call) {
                nest.kind = Statement::Kind::SetCall;
                nest.feature = std::string(trace_mm::kExplicitChildren);
                nest.call = st.call;
                report.nesting_sites.push_back({rule.name, i, Origin::Explicit});
            } else {
                continue;
            }
            body.push_back(std::move(nest));
        }
        rule.body = std::move(body);
    }
    return out;
}

Json weave_report_to_json(const WeaveReport& report)
{
    Json rules = Json::array();
    for (const auto& r : report.instrumented_rules) {
        rules.push_back({{"rule", r.rule}, {"param", r.param}});
    }
    Json sites = Json::array();
    for (const auto& s : report.nesting_sites) {
        sites.push_back({{"rule", s.rule}, {"statement", s.statement}, {"origin", std::string(to_string(s.origin))}});
    }
    return {{"addedTarget", {{"alias", report.added_target.alias}, {"metamodel", report.added_target.metamodel}}},
            {"instrumentedRules", rules},
            {"nestingSites", sites}};
}

TraceModel trace_from_woven(const Model& woven_trace)
{
    TraceModel trace;
    std::set<TraceRelationship> seen;
    auto ids = [](const ModelElement& el, std::string_view ref) {
        const ElementIds* v = el.refs.find(ref);
        return v ? *v : ElementIds{};
    };
    for (const auto& el : woven_trace.elements()) {
        TraceLink l;
        l.id = el.id;
        if (el.type == trace_mm::kMergingLink) {
            l.kind = LinkKind::Merging;
        } else if (el.type == trace_mm::kTransformationLink) {
            l.kind = LinkKind::Transformation;
        } else {
            continue;
        }
        l.left = ids(el, trace_mm::kLeft);
        l.right = ids(el, trace_mm::kRight);
        l.targets = ids(el, trace_mm::kTargets);
        trace.links.push_back(std::move(l));
    }
    for (const auto& el : woven_trace.elements()) {
        for (auto [ref, origin] : {std::pair{trace_mm::kImplicitChildren, Origin::Implicit},
                                   std::pair{trace_mm::kExplicitChildren, Origin::Explicit}}) {
            for (const auto& child : ids(el, ref)) {
                TraceRelationship r{el.id, child, origin};
                if (r.parent != r.child && seen.insert(r).second) {
                    trace.relationships.push_back(std::move(r));
                }
            }
        }
    }
    return trace;
}

std::map<std::string, std::string> creation_order_map(const Model& native_composed, const Model& woven_composed)
{
    std::map<std::string, std::string> out;
    const auto& a = native_composed.elements();
    const auto& b = woven_composed.elements();
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
        out[b[i].id] = a[i].id;
    }
    return out;
}

namespace {

using LinkKey = std::tuple<LinkKind, ElementIds, ElementIds, ElementIds>;

std::string describe(const LinkKey& key)
{
    auto list = [](const ElementIds& ids) {
        std::string s = "[";
        for (std::size_t i = 0; i < ids.size(); ++i) {
            s += (i ? "," : "") + ids[i];
        }
        return s + "]";
    };
    return std::string(to_string(std::get<0>(key))) + " " + list(std::get<1>(key)) + " " + list(std::get<2>(key)) +
           " -> " + list(std::get<3>(key));
}

}  // namespace

EquivalenceVerdict check_equivalence(const TraceModel& native, const Model& woven_output,
                                     const std::map<std::string, std::string>& target_ids)
{
    EquivalenceVerdict verdict;
    const TraceModel woven = trace_from_woven(woven_output);

    std::map<LinkKey, std::vector<std::string>> unpaired;
    for (const auto& l : native.links) {
        unpaired[{l.kind, l.left, l.right, l.targets}].push_back(l.id);
    }
    for (auto& [key, ids] : unpaired) {
        std::reverse(ids.begin(), ids.end());
    }

    std::map<std::string, std::string> to_native;
    for (const auto& l : woven.links) {
        ElementIds targets;
        for (const auto& id : l.targets) {
            auto it = target_ids.find(id);
            targets.push_back(it == target_ids.end() ? id : it->second);
        }
        LinkKey key{l.kind, l.left, l.right, targets};
        auto it = unpaired.find(key);
        if (it == unpaired.end() || it->second.empty()) {
            verdict.mismatches.push_back("woven link " + l.id + " (" + describe(key) + ") has no native counterpart");
            continue;
        }
        to_native[l.id] = it->second.back();
        it->second.pop_back();
    }
    for (const auto& [key, ids] : unpaired) {
        for (auto it = ids.rbegin(); it != ids.rend(); ++it) {
            verdict.mismatches.push_back("native link " + *it + " (" + describe(key) + ") has no woven counterpart");
        }
    }

    std::set<TraceRelationship> expected(native.relationships.begin(), native.relationships.end());
    std::set<TraceRelationship> actual;
    for (const auto& r : woven.relationships) {
        auto p = to_native.find(r.parent);
        auto c = to_native.find(r.child);
        if (p == to_native.end() || c == to_native.end()) {
            verdict.mismatches.push_back("woven relationship " + r.parent + " -> " + r.child +
                                         " involves an unpaired link");
            continue;
        }
        actual.insert({p->second, c->second, r.origin});
    }
    for (const auto& r : expected) {
        if (!actual.contains(r)) {
            verdict.mismatches.push_back("relationship " + r.parent + " -> " + r.child + " (" +
                                         std::string(to_string(r.origin)) + ") missing from woven trace");
        }
    }
    for (const auto& r : actual) {
        if (!expected.contains(r)) {
            verdict.mismatches.push_back("relationship " + r.parent + " -> " + r.child + " (" +
                                         std::string(to_string(r.origin)) + ") absent from native trace");
        }
    }
    verdict.equivalent = verdict.mismatches.empty();
    return verdict;
}

}  // namespace mcomp
