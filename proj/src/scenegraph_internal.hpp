#pragma once

// Helpers shared between the graph-core and inference translation units.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "splatgraph/scenegraph.hpp"

namespace splatgraph {
namespace detail {

struct GeomBox {
    Vec3 lo, hi;
};

// Contact rules shared by the reconstruction-backed and primitive-backed
// relation oracles: support within a 2 cm band below a surface with >= 30%
// footprint overlap (highest surface wins, ties to the lowest id), otherwise
// nearest side or wall contact within 2 cm. Children are processed in
// ascending id order; ids without a box are skipped. At most one triplet
// per child.
std::vector<RelationTriplet> relations_from_boxes(const std::vector<int>& children,
                                                  const std::set<int>& parents,
                                                  const std::map<int, GeomBox>& boxes,
                                                  const std::vector<double>& floor_levels,
                                                  const std::vector<BaseEntity>& walls);

// Tolerant of invalid ids, unlike node_name: diagnostics must never throw.
inline std::string node_label(int id) {
    if (id == kFloorNode) return "Floor";
    if (id == kWallNode) return "Wall";
    return std::to_string(id);
}

inline std::string edge_str(const RelationTriplet& e) {
    return "(" + node_label(e.child) + ", " + relation_name(e.relation) + ", " +
           node_label(e.parent) + ")";
}

// True when a directed child -> parent path of at least one edge leads from
// `from` to `to`.
bool directed_path(const SceneGraph& g, int from, int to);

// A parent may take children only when the edge keeps them base-reaching.
bool parent_grounded(const SceneGraph& g, int parent);

// Render the region viewpoint, call the backend (two retries on
// BackendError), filter triplets against the allowed sets, and return them
// sorted. Empty allowed sets mean "visible objects" (children) and "visible
// objects plus present base nodes" (parents). `visible_out`, when given,
// receives the ids with nonzero composited contribution.
std::vector<RelationTriplet> run_inference(const Scene& scene, const Region& region,
                                           InferenceBackend& backend,
                                           const SynthesisConfig& config,
                                           InferencePurpose purpose,
                                           const std::vector<int>& allowed_children,
                                           const std::vector<int>& allowed_parents,
                                           SynthesisReport* report,
                                           std::vector<int>* visible_out = nullptr);

}  // namespace detail
}  // namespace splatgraph
