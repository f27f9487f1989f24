#include "mcomp/trace_metamodel.hpp"

namespace mcomp::trace_mm {

namespace {

MetaType link_type(std::string_view name)
{
    MetaType t;
    t.name = std::string(name);
    for (auto ref : {kLeft, kRight, kTargets}) {
        t.references.push_back({std::string(ref), "", true, false, true});
    }
    for (auto ref : {kImplicitChildren, kExplicitChildren}) {
        t.references.push_back({std::string(ref), "", true, false, false});
    }
    return t;
}

}  // namespace

const Metamodel& metamodel()
{
    static const Metamodel mm = [] {
        Metamodel m;
        m.name = std::string(kName);
        m.types.push_back(link_type(kMergingLink));
        m.types.push_back(link_type(kTransformationLink));
        return m;
    }();
    return mm;
}

MetamodelRegistry with_trace_metamodel(MetamodelRegistry mms)
{
    mms.try_emplace(std::string(kName), metamodel());
    return mms;
}

}  // namespace mcomp::trace_mm
