#include "splatgraph/scenegraph.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <numeric>

#include "scenegraph_internal.hpp"
#include "splatgraph/errors.hpp"

namespace splatgraph {

using detail::edge_str;
using detail::node_label;

std::string node_name(int id) {
    if (id == kFloorNode) return "Floor";
    if (id == kWallNode) return "Wall";
    if (id > 0) return std::to_string(id);
    throw ValidationError("invalid node id " + std::to_string(id));
}

int node_from_name(const std::string& name) {
    if (name == "Floor") return kFloorNode;
    if (name == "Wall") return kWallNode;
    if (name.empty() || name.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError("unknown node name '" + name + "'");
    try {
        const long v = std::stol(name);
        if (v > 0 && v <= std::numeric_limits<int>::max()) return int(v);
    } catch (const std::exception&) {
    }
    throw ParseError("node name out of range: '" + name + "'");
}

std::string relation_name(Relation r) {
    return r == Relation::SupportedBy ? "supported_by" : "attached_to";
}

Relation relation_from_name(const std::string& name) {
    if (name == "supported_by") return Relation::SupportedBy;
    if (name == "attached_to") return Relation::AttachedTo;
    throw ParseError("unknown relation '" + name + "'");
}

void SceneGraph::add(const RelationTriplet& e) {
    nodes.insert(e.child);
    nodes.insert(e.parent);
    edges.insert(e);
}

std::optional<RelationTriplet> SceneGraph::support_edge(int child) const {
    for (const auto& e : out_edges(child))
        if (e.relation == Relation::SupportedBy) return e;
    return std::nullopt;
}

std::vector<RelationTriplet> SceneGraph::out_edges(int child) const {
    std::vector<RelationTriplet> out;
    RelationTriplet probe;
    probe.child = child;
    probe.parent = std::numeric_limits<int>::min();
    for (auto it = edges.lower_bound(probe); it != edges.end() && it->child == child; ++it)
        out.push_back(*it);
    return out;
}

namespace detail {

bool directed_path(const SceneGraph& g, int from, int to) {
    std::set<int> seen;
    std::vector<int> stack{from};
    while (!stack.empty()) {
        const int cur = stack.back();
        stack.pop_back();
        if (!seen.insert(cur).second) continue;
        for (const auto& e : g.out_edges(cur)) {
            if (e.parent == to) return true;
            stack.push_back(e.parent);
        }
    }
    return false;
}

bool parent_grounded(const SceneGraph& g, int parent) {
    if (is_base_node(parent)) return true;
    if (!g.has_node(parent)) return false;
    std::set<int> seen;
    std::vector<int> stack{parent};
    while (!stack.empty()) {
        const int cur = stack.back();
        stack.pop_back();
        if (!seen.insert(cur).second) continue;
        for (const auto& e : g.out_edges(cur)) {
            if (is_base_node(e.parent)) return true;
            stack.push_back(e.parent);
        }
    }
    return false;
}

}  // namespace detail

void validate_graph(const SceneGraph& g) {
    for (int n : g.nodes)
        if (n <= 0 && !is_base_node(n))
            throw ValidationError("graph: invalid node id " + std::to_string(n));

    std::map<int, int> support_count;
    for (const auto& e : g.edges) {
        if (e.child <= 0)
            throw ValidationError("graph: edge child must be an object: " + edge_str(e));
        if (e.parent == e.child) throw ValidationError("graph: self edge: " + edge_str(e));
        if (e.parent <= 0 && !is_base_node(e.parent))
            throw ValidationError("graph: invalid parent id: " + edge_str(e));
        if (!g.has_node(e.child) || !g.has_node(e.parent))
            throw ValidationError("graph: edge endpoint missing from node set: " + edge_str(e));
        if (e.relation == Relation::SupportedBy && ++support_count[e.child] > 1)
            throw ValidationError("graph: multiple support parents on node " + node_label(e.child));
    }

    // Acyclicity of child -> parent edges: three-color depth-first walk.
    std::map<int, int> color;  // 0 unseen, 1 on stack, 2 done
    struct Frame {
        int node;
        std::vector<RelationTriplet> out;
        size_t next = 0;
    };
    for (int start : g.nodes) {
        if (color[start] != 0) continue;
        std::vector<Frame> stack;
        stack.push_back({start, g.out_edges(start)});
        color[start] = 1;
        while (!stack.empty()) {
            Frame& f = stack.back();
            if (f.next == f.out.size()) {
                color[f.node] = 2;
                stack.pop_back();
                continue;
            }
            const int p = f.out[f.next++].parent;
            if (color[p] == 1)
                throw ValidationError("graph: support cycle through node " + node_label(p));
            if (color[p] == 0) {
                color[p] = 1;
                stack.push_back({p, g.out_edges(p)});
            }
        }
    }

    // Every node that touches an edge must reach a base by parent links.
    std::set<int> incident;
    for (const auto& e : g.edges) {
        incident.insert(e.child);
        incident.insert(e.parent);
    }
    std::map<int, bool> memo;
    std::function<bool(int)> reaches = [&](int node) -> bool {
        if (is_base_node(node)) return true;
        auto it = memo.find(node);
        if (it != memo.end()) return it->second;
        memo[node] = false;  // acyclic by now, placeholder is never observed
        bool ok = false;
        for (const auto& e : g.out_edges(node))
            if (reaches(e.parent)) {
                ok = true;
                break;
            }
        memo[node] = ok;
        return ok;
    };
    for (int n : incident)
        if (!is_base_node(n) && !reaches(n))
            throw ValidationError("graph: node " + node_label(n) + " cannot reach a base node");
}

Json triplet_to_json(const RelationTriplet& e) {
    Json j;
    j["child"] = node_name(e.child);
    j["relation"] = relation_name(e.relation);
    j["parent"] = node_name(e.parent);
    return j;
}

RelationTriplet triplet_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("child") || !j.contains("relation") || !j.contains("parent"))
        throw ParseError("triplet json: expected {child, relation, parent}");
    for (const char* key : {"child", "relation", "parent"})
        if (!j[key].is_string())
            throw ParseError(std::string("triplet json: '") + key + "' must be a string");
    RelationTriplet e;
    e.child = node_from_name(j["child"].get<std::string>());
    e.relation = relation_from_name(j["relation"].get<std::string>());
    e.parent = node_from_name(j["parent"].get<std::string>());
    return e;
}

Json graph_to_json(const SceneGraph& g) {
    Json nodes = Json::array();
    if (g.has_node(kFloorNode)) nodes.push_back("Floor");
    if (g.has_node(kWallNode)) nodes.push_back("Wall");
    for (int n : g.nodes)
        if (n > 0) nodes.push_back(node_name(n));
    Json edges = Json::array();
    for (const auto& e : g.edges) edges.push_back(triplet_to_json(e));
    Json j;
    j["nodes"] = nodes;
    j["edges"] = edges;
    return j;
}

SceneGraph graph_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("nodes") || !j.contains("edges") || !j["nodes"].is_array() ||
        !j["edges"].is_array())
        throw ParseError("graph json: expected object with 'nodes' and 'edges' arrays");
    SceneGraph g;
    for (const auto& n : j["nodes"]) {
        if (!n.is_string()) throw ParseError("graph json: node entries must be strings");
        g.nodes.insert(node_from_name(n.get<std::string>()));
    }
    for (const auto& e : j["edges"]) g.add(triplet_from_json(e));
    return g;
}

// ---------------------------------------------------------------------------
// Regions

std::vector<Region> cluster_regions(const Scene& scene, double epsilon, int min_points) {
    if (scene.objects.empty()) throw ValidationError("cluster_regions: scene has no objects");
    if (!(epsilon > 0)) throw ValidationError("cluster_regions: epsilon must be positive");
    if (min_points < 1) throw ValidationError("cluster_regions: min_points must be >= 1");

    const int n = int(scene.objects.size());
    std::vector<Vec3> c(n);
    for (int i = 0; i < n; ++i) c[i] = scene.objects[i].centroid;

    // Neighborhoods are inclusive of the point itself.
    std::vector<std::vector<int>> neigh(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if ((c[i] - c[j]).norm() <= epsilon) neigh[i].push_back(j);

    std::vector<bool> core(n, false);
    for (int i = 0; i < n; ++i) core[i] = int(neigh[i].size()) >= min_points;

    // Clusters: connected components of core points under the eps relation.
    std::vector<int> uf(n);
    std::iota(uf.begin(), uf.end(), 0);
    std::function<int(int)> find = [&](int x) { return uf[x] == x ? x : uf[x] = find(uf[x]); };
    for (int i = 0; i < n; ++i)
        if (core[i])
            for (int j : neigh[i])
                if (core[j]) uf[find(i)] = find(j);

    std::vector<int> label(n, -1);
    std::map<int, int> root_to_cluster;
    int clusters = 0;
    for (int i = 0; i < n; ++i) {
        if (!core[i]) continue;
        const int r = find(i);
        auto [it, fresh] = root_to_cluster.try_emplace(r, clusters);
        if (fresh) ++clusters;
        label[i] = it->second;
    }

    // Border points follow their nearest core neighbor (ties: lowest index).
    for (int i = 0; i < n; ++i) {
        if (core[i]) continue;
        double best = std::numeric_limits<double>::infinity();
        for (int j : neigh[i]) {
            if (!core[j]) continue;
            const double d = (c[i] - c[j]).norm();
            if (d < best) {
                best = d;
                label[i] = label[j];
            }
        }
    }

    std::vector<std::vector<int>> members(clusters);  // object indices
    if (clusters == 0) {
        // All noise: a single region holding everything.
        members.emplace_back();
        for (int i = 0; i < n; ++i) members[0].push_back(i);
    } else {
        for (int i = 0; i < n; ++i)
            if (label[i] >= 0) members[label[i]].push_back(i);

        // Remaining noise points attach to the spatially nearest cluster,
        // measured against the pre-attachment member means.
        std::vector<Vec3> mean(clusters, Vec3::Zero());
        for (int k = 0; k < clusters; ++k) {
            for (int i : members[k]) mean[k] += c[i];
            mean[k] /= double(members[k].size());
        }
        for (int i = 0; i < n; ++i) {
            if (label[i] >= 0) continue;
            int bestk = 0;
            double best = std::numeric_limits<double>::infinity();
            for (int k = 0; k < clusters; ++k) {
                const double d = (c[i] - mean[k]).norm();
                if (d < best) {
                    best = d;
                    bestk = k;
                }
            }
            members[bestk].push_back(i);
        }
    }

    std::vector<Region> regions;
    for (const auto& idxs : members) {
        if (idxs.empty()) continue;
        Region r;
        for (int i : idxs) r.member_ids.push_back(scene.objects[i].id);
        std::sort(r.member_ids.begin(), r.member_ids.end());
        regions.push_back(std::move(r));
    }
    std::sort(regions.begin(), regions.end(),
              [](const Region& a, const Region& b) { return a.member_ids[0] < b.member_ids[0]; });
    for (size_t k = 0; k < regions.size(); ++k) regions[k].id = int(k);
    return regions;
}

// ---------------------------------------------------------------------------
// Conflict detection and merging

namespace {

// Shortest undirected path between two nodes, endpoints included; empty when
// disconnected. Neighbors expand in ascending id order, so among equal-length
// paths the lexicographically smallest wins.
std::vector<int> undirected_shortest_path(const SceneGraph& g, int from, int to) {
    std::map<int, std::set<int>> adj;
    for (const auto& e : g.edges) {
        adj[e.child].insert(e.parent);
        adj[e.parent].insert(e.child);
    }
    std::map<int, int> pred;
    std::deque<int> queue{from};
    pred[from] = from;
    while (!queue.empty()) {
        const int cur = queue.front();
        queue.pop_front();
        if (cur == to) break;
        for (int next : adj[cur]) {
            if (pred.count(next)) continue;
            pred[next] = cur;
            queue.push_back(next);
        }
    }
    if (!pred.count(to)) return {};
    std::vector<int> path;
    for (int cur = to;; cur = pred[cur]) {
        path.push_back(cur);
        if (cur == from) break;
    }
    std::sort(path.begin(), path.end());
    return path;
}

ConflictCheck make_conflict(std::vector<int> nodes) {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    ConflictCheck out;
    out.kind = ConflictCheck::Kind::Conflict;
    out.path_nodes = std::move(nodes);
    return out;
}

}  // namespace

ConflictCheck detect_conflict(const SceneGraph& global, const RelationTriplet& edge) {
    ConflictCheck out;

    if (global.has_edge(edge)) {
        out.kind = ConflictCheck::Kind::Redundant;
        return out;
    }

    // Direct edge between the same endpoints with the opposite relation.
    RelationTriplet flipped = edge;
    flipped.relation = edge.relation == Relation::SupportedBy ? Relation::AttachedTo
                                                              : Relation::SupportedBy;
    if (global.has_edge(flipped)) return make_conflict({edge.child, edge.parent});

    // A second support parent contradicts the stored one even when the new
    // parent is not a node yet; adjudication must pick between them.
    if (edge.relation == Relation::SupportedBy) {
        const auto held = global.support_edge(edge.child);
        if (held && held->parent != edge.parent)
            return make_conflict({edge.child, held->parent, edge.parent});
    }

    // A directed chain child -> ... -> parent means the hierarchy already
    // expresses the claim; the shortcut is discarded as redundant.
    if (detail::directed_path(global, edge.child, edge.parent)) {
        out.kind = ConflictCheck::Kind::Redundant;
        return out;
    }

    // Base parents ground rather than bridge: the path rules below exist to
    // catch hierarchy disorder between objects, and the two base roots are
    // never connected to each other.
    if (is_base_node(edge.parent) || !global.has_node(edge.child) ||
        !global.has_node(edge.parent)) {
        out.kind = ConflictCheck::Kind::AddNew;
        return out;
    }

    const std::vector<int> path = undirected_shortest_path(global, edge.child, edge.parent);
    if (!path.empty()) return make_conflict(path);

    // Both endpoints known but in disconnected components: the bridge needs
    // adjudication.
    return make_conflict({edge.child, edge.parent});
}

std::string merge_outcome_name(MergeEvent::Outcome outcome) {
    switch (outcome) {
        case MergeEvent::Outcome::Inserted: return "inserted";
        case MergeEvent::Outcome::Redundant: return "redundant";
        case MergeEvent::Outcome::Adjudicated: return "adjudicated";
        case MergeEvent::Outcome::DroppedConflict: return "dropped_conflict";
        case MergeEvent::Outcome::DroppedUngrounded: return "dropped_ungrounded";
        case MergeEvent::Outcome::DroppedInvalid: return "dropped_invalid";
    }
    return "unknown";
}

SceneGraph merge_subgraph(SceneGraph global, const SceneGraph& local, const MergeContext& ctx) {
    const auto note = [&](const RelationTriplet& e, MergeEvent::Outcome o,
                          std::vector<int> path = {}) {
        if (ctx.report) ctx.report->events.push_back({e, o, std::move(path)});
    };
    const auto warn = [&](const std::string& msg) {
        if (ctx.report) ctx.report->warnings.push_back(msg);
    };

    // Nodes without local edges carry over directly; they cannot affect any
    // path analysis because no edge mentions them.
    std::set<int> incident;
    for (const auto& e : local.edges) {
        incident.insert(e.child);
        incident.insert(e.parent);
    }
    for (int n : local.nodes)
        if (!incident.count(n) && (n > 0 || is_base_node(n))) global.nodes.insert(n);

    std::vector<RelationTriplet> pending;
    for (const auto& e : local.edges) {
        if (e.child <= 0 || e.child == e.parent || (e.parent <= 0 && !is_base_node(e.parent))) {
            note(e, MergeEvent::Outcome::DroppedInvalid);
            warn("merge: malformed edge " + edge_str(e));
            continue;
        }
        pending.push_back(e);  // set order = canonical order
    }

    // Sweep outward from grounded parents. Each pass takes the first eligible
    // edge in canonical order; insertions and adjudications can ground
    // further parents, so the scan restarts after every consumed edge.
    bool progress = true;
    while (progress) {
        progress = false;
        for (size_t i = 0; i < pending.size(); ++i) {
            if (!detail::parent_grounded(global, pending[i].parent)) continue;
            const RelationTriplet e = pending[i];
            pending.erase(pending.begin() + long(i));
            progress = true;

            const ConflictCheck check = detect_conflict(global, e);
            if (check.kind == ConflictCheck::Kind::AddNew) {
                global.add(e);
                note(e, MergeEvent::Outcome::Inserted);
            } else if (check.kind == ConflictCheck::Kind::Redundant) {
                note(e, MergeEvent::Outcome::Redundant);
            } else if (ctx.scene && ctx.backend && ctx.config) {
                global = resolve_conflict(*ctx.scene, std::move(global), check.path_nodes,
                                          *ctx.backend, *ctx.config, ctx.report);
                note(e, MergeEvent::Outcome::Adjudicated, check.path_nodes);
            } else {
                note(e, MergeEvent::Outcome::DroppedConflict, check.path_nodes);
                warn("merge: dropped conflicting edge " + edge_str(e));
            }
            break;
        }
    }

    for (const auto& e : pending) {
        note(e, MergeEvent::Outcome::DroppedUngrounded);
        warn("merge: dropped edge with ungrounded parent " + edge_str(e));
    }

    validate_graph(global);
    return global;
}

void validate_synthesis_config(const SynthesisConfig& config) {
    if (!(config.cluster_epsilon > 0))
        throw ValidationError("synthesis config: cluster_epsilon must be positive");
    if (config.cluster_min_points < 1)
        throw ValidationError("synthesis config: cluster_min_points must be >= 1");
    if (!(config.fov_y_deg > 0.0) || !(config.fov_y_deg < 180.0))
        throw ValidationError("synthesis config: fov_y_deg must lie in (0, 180)");
    validate_config(config.view);
}

}  // namespace splatgraph
