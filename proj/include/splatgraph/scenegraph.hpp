#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "splatgraph/avo.hpp"
#include "splatgraph/json_util.hpp"
#include "splatgraph/types.hpp"

namespace splatgraph {

// Node ids: positive values are object instance ids; the two base planes get
// fixed negative ids. 0 is never a node.
constexpr int kFloorNode = -1;
constexpr int kWallNode = -2;

inline bool is_base_node(int id) { return id == kFloorNode || id == kWallNode; }

// "Floor", "Wall", or the decimal object id.
std::string node_name(int id);
int node_from_name(const std::string& name);  // ParseError on anything else

enum class Relation { SupportedBy, AttachedTo };

std::string relation_name(Relation r);
Relation relation_from_name(const std::string& name);

// Directed child -> parent relation. Children are always objects; parents may
// be objects or base nodes.
struct RelationTriplet {
    int child = 0;
    Relation relation = Relation::SupportedBy;
    int parent = 0;
};

inline bool operator==(const RelationTriplet& a, const RelationTriplet& b) {
    return a.child == b.child && a.relation == b.relation && a.parent == b.parent;
}
inline bool operator!=(const RelationTriplet& a, const RelationTriplet& b) { return !(a == b); }
// Canonical order: ascending child, then parent, then relation.
inline bool operator<(const RelationTriplet& a, const RelationTriplet& b) {
    if (a.child != b.child) return a.child < b.child;
    if (a.parent != b.parent) return a.parent < b.parent;
    return int(a.relation) < int(b.relation);
}

struct SceneGraph {
    std::set<int> nodes;
    std::set<RelationTriplet> edges;

    bool has_node(int id) const { return nodes.count(id) != 0; }
    bool has_edge(const RelationTriplet& e) const { return edges.count(e) != 0; }

    // Inserts the edge and both endpoint nodes.
    void add(const RelationTriplet& e);
    void remove(const RelationTriplet& e) { edges.erase(e); }

    // The unique SupportedBy out-edge of `child`, if any.
    std::optional<RelationTriplet> support_edge(int child) const;
    std::vector<RelationTriplet> out_edges(int child) const;
};

inline bool graph_equal(const SceneGraph& a, const SceneGraph& b) {
    return a.nodes == b.nodes && a.edges == b.edges;
}

// Throws ValidationError naming the violated invariant:
// - children are objects, parents are distinct nodes of the graph;
// - at most one SupportedBy parent per child;
// - the child -> parent digraph is acyclic;
// - every non-base node incident to an edge reaches a base node by following
//   child -> parent edges.
void validate_graph(const SceneGraph& g);

// {"child": "3", "relation": "supported_by", "parent": "Floor"}. The same
// encoding serves graph files, scripted fixtures, and the service protocol.
Json triplet_to_json(const RelationTriplet& e);
RelationTriplet triplet_from_json(const Json& j);

// {"nodes": ["Floor", "3", ...], "edges": [{"child", "relation", "parent"}]},
// both lists in canonical order so equal graphs serialize byte-identically.
// Parsing does not validate; call validate_graph on the result.
Json graph_to_json(const SceneGraph& g);
SceneGraph graph_from_json(const Json& j);

// Base nodes backed by the scene's entities ("Floor" -> kFloorNode, "Wall" ->
// kWallNode).
std::set<int> base_nodes_present(const Scene& scene);

// Per-instance color-coded composite of a render (golden-angle palette,
// background in gray): the audit image handed to image backends alongside the
// per-pixel instance map.
ImageRGBA8 annotate_instances(const RenderBuffers& buffers);

// ---------------------------------------------------------------------------
// Regions

struct Region {
    int id = 0;
    std::vector<int> member_ids;  // sorted object ids, non-empty
    Camera viewpoint;             // set by region_viewpoint
    bool viewpoint_set = false;
};

// DBSCAN over object centroids. Core point: at least min_points neighbors
// within epsilon (itself included); clusters are the connected components of
// core points, border points join their nearest core's cluster, noise points
// attach to the cluster with the nearest member-centroid mean. Zero clusters
// (impossible with min_points = 1) collapse to a single region. Regions are
// numbered 0..K-1 ascending by smallest member id.
std::vector<Region> cluster_regions(const Scene& scene, double epsilon, int min_points);

// ---------------------------------------------------------------------------
// Inference backends

enum class InferencePurpose { RegionPass, Adjudication };

struct InferenceRequest {
    InferencePurpose purpose = InferencePurpose::RegionPass;
    int region_id = 0;
    const Scene* scene = nullptr;
    Camera camera;
    std::vector<int> member_ids;   // sorted; the region under inspection
    std::vector<int> visible_ids;  // sorted; objects with nonzero contribution
    // Adjudication restriction; empty means visible objects plus base nodes.
    std::vector<int> allowed_children;
    std::vector<int> allowed_parents;
    // Only populated for backends with needs_images() = true.
    const ImageRGBA8* image = nullptr;
    const std::vector<int>* instance_map = nullptr;
};

// Relation inference over one rendered view. Implementations must only emit
// triplets whose ids come from the request (enforced again by the caller).
class InferenceBackend {
  public:
    virtual ~InferenceBackend() = default;
    virtual std::string name() const = 0;
    // When false, infer_region skips the RGBA render and passes null images.
    virtual bool needs_images() const { return false; }
    virtual std::vector<RelationTriplet> infer(const InferenceRequest& request) = 0;
};

// Deterministic geometric stand-in for a vision model. Support: the candidate
// parent whose AABB top face lies within 2 cm below the child's bottom face
// with at least 30% horizontal overlap of the child footprint (highest such
// surface wins, then lowest id). Attachment, only for unsupported children:
// side contact within 2 cm against a Wall plane or a candidate's vertical
// face. Operates on object AABBs; ignores images.
class GeometricOracleBackend : public InferenceBackend {
  public:
    std::string name() const override { return "geometric"; }
    std::vector<RelationTriplet> infer(const InferenceRequest& request) override;
};

// Fixture backend: serves triplets from a JSON file or object of the form
// {"triplets": [...], "adjudication": [...]} (the second list optional,
// answering Adjudication requests; defaults to the first). Lists are returned
// as-is; the caller's validity filter decides what survives.
class ScriptedBackend : public InferenceBackend {
  public:
    explicit ScriptedBackend(const Json& fixture);
    static ScriptedBackend from_file(const std::string& path);

    std::string name() const override { return "scripted"; }
    std::vector<RelationTriplet> infer(const InferenceRequest& request) override;

  private:
    std::vector<RelationTriplet> region_pass_;
    std::vector<RelationTriplet> adjudication_;
};

// JSON-over-HTTP client: POST {image, instance_ids, prompt_version} to the
// given URL, expecting {"triplets": [{"child","relation","parent"}]}. Two
// retries with exponential backoff, then BackendError.
class ExternalServiceBackend : public InferenceBackend {
  public:
    ExternalServiceBackend(const std::string& url, double timeout_seconds = 10.0,
                           std::string prompt_version = "relations_v1");

    std::string name() const override { return "service"; }
    bool needs_images() const override { return true; }
    std::vector<RelationTriplet> infer(const InferenceRequest& request) override;

  private:
    std::string host_;
    std::string path_;
    double timeout_seconds_;
    std::string prompt_version_;
};

// ---------------------------------------------------------------------------
// Synthesis

struct SynthesisConfig {
    double cluster_epsilon = 1.5;  // meters
    int cluster_min_points = 1;
    double fov_y_deg = 60.0;  // intrinsics of generated viewpoints
    ViewOptConfig view;
};

void validate_synthesis_config(const SynthesisConfig& config);

// One record per consequential merge decision, for reports and tests.
struct MergeEvent {
    enum class Outcome {
        Inserted,
        Redundant,
        Adjudicated,      // conflict resolved through the backend
        DroppedConflict,  // conflict with no adjudication path: later edge dropped
        DroppedUngrounded,
        DroppedInvalid  // adjudicated edge violating an invariant
    };
    RelationTriplet edge;
    Outcome outcome = Outcome::Inserted;
    std::vector<int> path_nodes;  // conflict path, when applicable
};

std::string merge_outcome_name(MergeEvent::Outcome outcome);

struct SynthesisReport {
    std::vector<Region> regions;
    std::vector<std::string> warnings;
    std::vector<MergeEvent> events;
};

// Optional machinery for resolving merge conflicts by re-inference. Without a
// backend, conflicts fall back to dropping the incoming edge.
struct MergeContext {
    const Scene* scene = nullptr;
    InferenceBackend* backend = nullptr;
    const SynthesisConfig* config = nullptr;
    SynthesisReport* report = nullptr;
};

// Classification of one incoming edge against the global graph.
struct ConflictCheck {
    enum class Kind { AddNew, Redundant, Conflict };
    Kind kind = Kind::AddNew;
    std::vector<int> path_nodes;  // sorted; non-empty iff Conflict
};

// Redundant for an identical edge or a directed child -> parent chain;
// Conflict for a direct edge with the opposite relation, a second support
// parent (even one not yet in the graph), an inconsistent undirected path, or
// two connected components bridged by an object-parent edge; AddNew when an
// endpoint is missing or the parent is a base node. path_nodes carries the
// examined node set: the contradicting edge's endpoints, the old and new
// support parents, or the shortest undirected path.
ConflictCheck detect_conflict(const SceneGraph& global, const RelationTriplet& edge);

// Merges the local subgraph edge by edge. Edges become eligible once their
// parent is grounded (a base node or base-reaching); eligible edges are
// processed in canonical order, so insertion sweeps outward from the bases.
// Edges whose parents never ground are dropped and reported. The result
// always satisfies the SceneGraph invariants.
SceneGraph merge_subgraph(SceneGraph global, const SceneGraph& local,
                          const MergeContext& ctx = {});

// Re-inference over the conflict path: optimizes a viewpoint for the path's
// objects, re-infers with children limited to those objects and parents to
// the path plus bases, replaces all global edges in that span with the
// adjudicated set (violators dropped with a warning).
SceneGraph resolve_conflict(const Scene& scene, SceneGraph global,
                            const std::vector<int>& path_nodes, InferenceBackend& backend,
                            const SynthesisConfig& config, SynthesisReport* report = nullptr);

// Viewpoint maximizing the summed member information with a depth term
// targeting the member union's diagonal; init chosen from a direction grid.
// Members invisible from the result are recorded as warnings.
Camera region_viewpoint(const Scene& scene, const Region& region, const SynthesisConfig& config,
                        std::vector<std::string>* warnings = nullptr);

// Renders the region viewpoint, determines visible ids, invokes the backend
// (two retries on BackendError), filters invalid triplets, and assembles the
// local subgraph. Backends that need images receive the annotated RGBA render
// and the instance map.
SceneGraph infer_region(const Scene& scene, const Region& region, InferenceBackend& backend,
                        const SynthesisConfig& config, SynthesisReport* report = nullptr);

// cluster -> viewpoint -> infer -> merge, regions in ascending id order.
// Deterministic for a fixed scene, backend, and config.
SceneGraph synthesize(const Scene& scene, InferenceBackend& backend,
                      const SynthesisConfig& config, SynthesisReport* report = nullptr);

}  // namespace splatgraph
