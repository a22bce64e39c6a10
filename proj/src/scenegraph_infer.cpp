#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "scenegraph_internal.hpp"
#include "splatgraph/avo.hpp"
#include "splatgraph/errors.hpp"
#include "splatgraph/losses.hpp"
#include "splatgraph/rasterizer.hpp"
#include "splatgraph/scenegraph.hpp"

// Last: pulls <resolv.h>, whose _res macro corrupts Eigen parameter lists.
#include <httplib.h>
#ifdef _res
#undef _res
#endif

namespace splatgraph {

using detail::edge_str;
using detail::node_label;

std::set<int> base_nodes_present(const Scene& scene) {
    std::set<int> bases;
    for (const auto& b : scene.base_entities)
        bases.insert(b.name == "Floor" ? kFloorNode : kWallNode);
    return bases;
}

// ---------------------------------------------------------------------------
// Annotated render

namespace {

Vec3 instance_color(int id) {
    if (id <= 0) return Vec3(0.5, 0.5, 0.5);
    // Golden-angle hue walk keeps nearby ids visually distinct.
    const double hue = std::fmod(double(id) * 137.50776405003785, 360.0);
    const double s = 0.75, v = 1.0;
    const double c = v * s;
    const double hp = hue / 60.0;
    const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
    double r = 0, g = 0, b = 0;
    if (hp < 1)      { r = c; g = x; }
    else if (hp < 2) { r = x; g = c; }
    else if (hp < 3) { g = c; b = x; }
    else if (hp < 4) { g = x; b = c; }
    else if (hp < 5) { r = x; b = c; }
    else             { r = c; b = x; }
    const double m = v - c;
    return Vec3(r + m, g + m, b + m);
}

std::uint8_t to_byte(double x) { return std::uint8_t(std::lround(255.0 * clamp01(x))); }

}  // namespace

ImageRGBA8 annotate_instances(const RenderBuffers& buffers) {
    ImageRGBA8 img(buffers.width, buffers.height);
    std::vector<Vec3> palette(buffers.channel_ids.size());
    for (size_t c = 0; c < buffers.channel_ids.size(); ++c)
        palette[c] = instance_color(buffers.channel_ids[c]);
    for (int y = 0; y < buffers.height; ++y) {
        for (int x = 0; x < buffers.width; ++x) {
            Vec3 acc = Vec3::Zero();
            for (size_t c = 0; c < palette.size(); ++c)
                acc += buffers.contribution[c].at(x, y) * palette[c];
            const double a = buffers.alpha.at(x, y);
            std::uint8_t* px = img.pixel(x, y);
            if (a > 0) acc /= a;  // premultiplied -> straight
            px[0] = to_byte(acc.x());
            px[1] = to_byte(acc.y());
            px[2] = to_byte(acc.z());
            px[3] = to_byte(a);
        }
    }
    return img;
}

// ---------------------------------------------------------------------------
// Geometric oracle

namespace {

constexpr double kContactBand = 0.02;  // meters
constexpr double kGeomEps = 1e-9;

// True AABB of the member gaussian means. The stored centroid is their mean,
// not the box center, so centroid +- size/2 would shift the box.
detail::GeomBox object_box(const Scene& scene, const ObjectInstance& obj) {
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (int gi : obj.gaussian_indices) {
        const Vec3& m = scene.gaussians.at(size_t(gi)).mean;
        lo = lo.cwiseMin(m);
        hi = hi.cwiseMax(m);
    }
    return {lo, hi};
}

// Horizontal (xy) intersection area of two boxes.
double footprint_overlap(const detail::GeomBox& a, const detail::GeomBox& b) {
    const double w = std::min(a.hi.x(), b.hi.x()) - std::max(a.lo.x(), b.lo.x());
    const double d = std::min(a.hi.y(), b.hi.y()) - std::max(a.lo.y(), b.lo.y());
    if (w <= 0 || d <= 0) return 0;
    return w * d;
}

double aabb_plane_distance(const detail::GeomBox& box, const Vec3& point, const Vec3& normal) {
    const Vec3 center = 0.5 * (box.lo + box.hi);
    const Vec3 half = 0.5 * (box.hi - box.lo);
    const double span = half.x() * std::abs(normal.x()) + half.y() * std::abs(normal.y()) +
                        half.z() * std::abs(normal.z());
    return std::max(0.0, std::abs(normal.dot(center - point)) - span);
}

// Side gap between two boxes given overlapping height ranges: the horizontal
// clearance along the separated axis, infinite for corner-only adjacency.
double side_gap(const detail::GeomBox& a, const detail::GeomBox& b) {
    const double zo = std::min(a.hi.z(), b.hi.z()) - std::max(a.lo.z(), b.lo.z());
    if (zo < -kGeomEps) return std::numeric_limits<double>::infinity();
    const double dx = std::max(b.lo.x() - a.hi.x(), a.lo.x() - b.hi.x());
    const double dy = std::max(b.lo.y() - a.hi.y(), a.lo.y() - b.hi.y());
    if (dx > kGeomEps && dy > kGeomEps) return std::numeric_limits<double>::infinity();
    return std::max({dx, dy, 0.0});
}

}  // namespace

namespace detail {

std::vector<RelationTriplet> relations_from_boxes(const std::vector<int>& children,
                                                  const std::set<int>& parents,
                                                  const std::map<int, GeomBox>& boxes,
                                                  const std::vector<double>& floor_levels,
                                                  const std::vector<BaseEntity>& walls) {
    std::vector<int> order = children;
    std::sort(order.begin(), order.end());
    std::vector<RelationTriplet> out;
    for (int child_id : order) {
        if (child_id <= 0) continue;
        const auto child_it = boxes.find(child_id);
        if (child_it == boxes.end()) continue;
        const GeomBox& cbox = child_it->second;
        const double carea = (cbox.hi.x() - cbox.lo.x()) * (cbox.hi.y() - cbox.lo.y());

        // Support: highest qualifying surface under the child, ties to the
        // lowest node id.
        bool supported = false;
        double best_top = 0;
        int best_parent = 0;
        const auto consider = [&](int parent_id, double top) {
            if (!supported || top > best_top + kGeomEps ||
                (top >= best_top - kGeomEps && parent_id < best_parent)) {
                supported = true;
                best_top = top;
                best_parent = parent_id;
            }
        };
        for (int parent_id : parents) {
            if (parent_id == child_id || parent_id == kWallNode) continue;
            if (parent_id == kFloorNode) {
                for (double level : floor_levels) {
                    const double gap = cbox.lo.z() - level;
                    if (gap >= -kGeomEps && gap <= kContactBand + kGeomEps)
                        consider(kFloorNode, level);
                }
                continue;
            }
            const auto parent_it = boxes.find(parent_id);
            if (parent_it == boxes.end()) continue;
            const GeomBox& pbox = parent_it->second;
            const double gap = cbox.lo.z() - pbox.hi.z();
            if (gap < -kGeomEps || gap > kContactBand + kGeomEps) continue;
            if (footprint_overlap(cbox, pbox) < 0.3 * carea - kGeomEps) continue;
            consider(parent_id, pbox.hi.z());
        }
        if (supported) {
            out.push_back({child_id, Relation::SupportedBy, best_parent});
            continue;
        }

        // Attachment, only without vertical support: nearest side contact.
        bool attached = false;
        double best_dist = std::numeric_limits<double>::infinity();
        int attach_parent = 0;
        const auto consider_attach = [&](int parent_id, double dist) {
            if (dist > kContactBand + kGeomEps) return;
            if (!attached || dist < best_dist - kGeomEps ||
                (dist <= best_dist + kGeomEps && parent_id < attach_parent)) {
                attached = true;
                best_dist = dist;
                attach_parent = parent_id;
            }
        };
        for (int parent_id : parents) {
            if (parent_id == child_id || parent_id == kFloorNode) continue;
            if (parent_id == kWallNode) {
                for (const BaseEntity& wall : walls)
                    consider_attach(kWallNode, aabb_plane_distance(cbox, wall.point, wall.normal));
                continue;
            }
            const auto parent_it = boxes.find(parent_id);
            if (parent_it == boxes.end()) continue;
            consider_attach(parent_id, side_gap(cbox, parent_it->second));
        }
        if (attached) out.push_back({child_id, Relation::AttachedTo, attach_parent});
    }
    return out;
}

}  // namespace detail

std::vector<RelationTriplet> GeometricOracleBackend::infer(const InferenceRequest& req) {
    if (!req.scene) throw ValidationError("geometric backend: request carries no scene");
    const Scene& scene = *req.scene;
    if ((scene.up_axis - Vec3(0, 0, 1)).norm() > 1e-6)
        throw ValidationError("geometric backend: requires a +z up axis");

    const std::set<int> bases = base_nodes_present(scene);
    std::vector<int> children = req.allowed_children;
    if (children.empty()) children = req.visible_ids;
    std::set<int> parents(req.allowed_parents.begin(), req.allowed_parents.end());
    if (parents.empty()) {
        parents.insert(req.visible_ids.begin(), req.visible_ids.end());
        parents.insert(bases.begin(), bases.end());
    }

    std::vector<double> floor_levels;
    std::vector<BaseEntity> walls;
    for (const auto& b : scene.base_entities) {
        if (b.name == "Floor") floor_levels.push_back(b.point.z());
        else walls.push_back(b);
    }

    std::map<int, detail::GeomBox> boxes;
    const auto add_box = [&](int id) {
        if (id <= 0 || boxes.count(id)) return;
        if (const ObjectInstance* obj = scene.find_object(id)) boxes[id] = object_box(scene, *obj);
    };
    for (int id : children) add_box(id);
    for (int id : parents) add_box(id);

    return detail::relations_from_boxes(children, parents, boxes, floor_levels, walls);
}

// ---------------------------------------------------------------------------
// Scripted fixtures

namespace {

std::vector<RelationTriplet> triplet_list(const Json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_array())
        throw ParseError(std::string("scripted backend: fixture needs a '") + key + "' array");
    std::vector<RelationTriplet> out;
    for (const auto& t : j[key]) out.push_back(triplet_from_json(t));
    return out;
}

}  // namespace

ScriptedBackend::ScriptedBackend(const Json& fixture) {
    if (!fixture.is_object()) throw ParseError("scripted backend: fixture must be an object");
    region_pass_ = triplet_list(fixture, "triplets");
    adjudication_ = fixture.contains("adjudication") ? triplet_list(fixture, "adjudication")
                                                     : region_pass_;
}

ScriptedBackend ScriptedBackend::from_file(const std::string& path) {
    return ScriptedBackend(load_json_file(path));
}

std::vector<RelationTriplet> ScriptedBackend::infer(const InferenceRequest& request) {
    return request.purpose == InferencePurpose::Adjudication ? adjudication_ : region_pass_;
}

// ---------------------------------------------------------------------------
// External service

namespace {

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
    static const char table[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    size_t i = 0;
    for (; i + 3 <= bytes.size(); i += 3) {
        const unsigned v = unsigned(bytes[i]) << 16 | unsigned(bytes[i + 1]) << 8 | bytes[i + 2];
        out.push_back(table[v >> 18]);
        out.push_back(table[(v >> 12) & 63]);
        out.push_back(table[(v >> 6) & 63]);
        out.push_back(table[v & 63]);
    }
    if (i + 1 == bytes.size()) {
        const unsigned v = unsigned(bytes[i]) << 16;
        out.push_back(table[v >> 18]);
        out.push_back(table[(v >> 12) & 63]);
        out += "==";
    } else if (i + 2 == bytes.size()) {
        const unsigned v = unsigned(bytes[i]) << 16 | unsigned(bytes[i + 1]) << 8;
        out.push_back(table[v >> 18]);
        out.push_back(table[(v >> 12) & 63]);
        out.push_back(table[(v >> 6) & 63]);
        out += "=";
    }
    return out;
}

}  // namespace

ExternalServiceBackend::ExternalServiceBackend(const std::string& url, double timeout_seconds,
                                               std::string prompt_version)
    : timeout_seconds_(timeout_seconds), prompt_version_(std::move(prompt_version)) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos || url.compare(0, scheme_end, "http") != 0)
        throw ValidationError("service backend: url must start with http://");
    const auto path_pos = url.find('/', scheme_end + 3);
    host_ = path_pos == std::string::npos ? url : url.substr(0, path_pos);
    path_ = path_pos == std::string::npos ? "/infer" : url.substr(path_pos);
    if (host_.size() <= scheme_end + 3)
        throw ValidationError("service backend: url lacks a host");
    if (!(timeout_seconds_ > 0))
        throw ValidationError("service backend: timeout must be positive");
}

std::vector<RelationTriplet> ExternalServiceBackend::infer(const InferenceRequest& request) {
    if (!request.image) throw ValidationError("service backend: request carries no image");

    Json body;
    body["image"] = base64_encode(encode_png(*request.image));
    Json ids = Json::array();
    const std::vector<int>& id_list =
        request.allowed_children.empty() ? request.visible_ids : request.allowed_children;
    for (int id : id_list) ids.push_back(id);
    body["instance_ids"] = ids;
    body["prompt_version"] = prompt_version_;
    const std::string payload = body.dump();

    httplib::Client client(host_);
    const auto timeout = std::chrono::microseconds(std::llround(timeout_seconds_ * 1e6));
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    std::string last_error;
    for (int attempt = 0; attempt < 3; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(100 << (attempt - 1)));
        auto res = client.Post(path_, payload, "application/json");
        if (!res) {
            last_error = "request failed: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "http status " + std::to_string(res->status);
            continue;
        }
        try {
            const Json reply = parse_json(res->body, "service reply");
            if (!reply.is_object() || !reply.contains("triplets") || !reply["triplets"].is_array())
                throw ParseError("service reply lacks a 'triplets' array");
            std::vector<RelationTriplet> out;
            for (const auto& t : reply["triplets"]) out.push_back(triplet_from_json(t));
            return out;
        } catch (const Error& err) {
            last_error = err.what();
        }
    }
    throw BackendError("service backend (" + host_ + path_ + "): " + last_error);
}

// ---------------------------------------------------------------------------
// Region inference

namespace {

std::string region_label(int region_id) {
    return region_id < 0 ? std::string("adjudication") : "region " + std::to_string(region_id);
}

}  // namespace

namespace detail {

std::vector<RelationTriplet> run_inference(const Scene& scene, const Region& region,
                                           InferenceBackend& backend,
                                           const SynthesisConfig& config,
                                           InferencePurpose purpose,
                                           const std::vector<int>& allowed_children,
                                           const std::vector<int>& allowed_parents,
                                           SynthesisReport* report,
                                           std::vector<int>* visible_out) {
    const std::string label = region_label(region.id);
    const RenderBuffers buffers = rasterize(scene.gaussians, region.viewpoint, config.view.render);

    std::vector<int> visible;
    for (int id : buffers.channel_ids)
        if (id > 0 && object_information(buffers, id) > 0) visible.push_back(id);
    if (visible_out) *visible_out = visible;

    const std::set<int> bases = base_nodes_present(scene);
    std::set<int> child_ok(allowed_children.begin(), allowed_children.end());
    if (child_ok.empty()) child_ok.insert(visible.begin(), visible.end());
    std::set<int> parent_ok(allowed_parents.begin(), allowed_parents.end());
    if (parent_ok.empty()) {
        parent_ok.insert(visible.begin(), visible.end());
        parent_ok.insert(bases.begin(), bases.end());
    }

    InferenceRequest req;
    req.purpose = purpose;
    req.region_id = region.id;
    req.scene = &scene;
    req.camera = region.viewpoint;
    req.member_ids = region.member_ids;
    req.visible_ids = visible;
    req.allowed_children = allowed_children;
    req.allowed_parents = allowed_parents;
    ImageRGBA8 annotated;
    if (backend.needs_images()) {
        annotated = annotate_instances(buffers);
        req.image = &annotated;
        req.instance_map = &buffers.instance;
    }

    std::vector<RelationTriplet> raw;
    for (int attempt = 0;; ++attempt) {
        try {
            raw = backend.infer(req);
            break;
        } catch (const BackendError& err) {
            if (attempt >= 2) throw BackendError(label + ": " + err.what());
            if (report)
                report->warnings.push_back(label + ": backend attempt " +
                                           std::to_string(attempt + 1) + " failed: " + err.what());
        }
    }

    std::vector<RelationTriplet> kept;
    for (const auto& t : raw) {
        std::string why;
        if (t.child == t.parent) why = "child equals parent";
        else if (!child_ok.count(t.child)) why = "child not in the allowed set";
        else if (!parent_ok.count(t.parent)) why = "parent not in the allowed set";
        if (!why.empty()) {
            if (report)
                report->warnings.push_back(label + ": dropped triplet " + edge_str(t) + ": " + why);
            continue;
        }
        kept.push_back(t);
    }
    std::sort(kept.begin(), kept.end());
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
    return kept;
}

}  // namespace detail

Camera region_viewpoint(const Scene& scene, const Region& region, const SynthesisConfig& config,
                        std::vector<std::string>* warnings) {
    validate_synthesis_config(config);
    if (region.member_ids.empty()) throw ValidationError("region_viewpoint: empty region");
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (int id : region.member_ids) {
        const ObjectInstance& obj = scene.object_or_throw(id);
        lo = lo.cwiseMin(obj.centroid - 0.5 * obj.size);
        hi = hi.cwiseMax(obj.centroid + 0.5 * obj.size);
    }
    const Vec3 center = 0.5 * (lo + hi);
    const double dist =
        target_distance_for(scene, region.member_ids, config.view.depth_coefficient);

    const double f =
        0.5 * config.view.image_height / std::tan(0.5 * config.fov_y_deg * M_PI / 180.0);
    std::vector<Camera> candidates;
    for (const Vec3& dir : cube_directions()) {
        Camera cam;
        cam.width = config.view.image_width;
        cam.height = config.view.image_height;
        cam.fx = cam.fy = f;
        cam.cx = 0.5 * cam.width;
        cam.cy = 0.5 * cam.height;
        cam.pose = Camera::look_at(center + dist * dir, center, scene.up_axis);
        candidates.push_back(cam);
    }

    Camera init;
    try {
        init = select_init_view(scene, region.member_ids, candidates);
    } catch (const OptimizationError&) {
        init = candidates[0];  // the optimizer's recovery probe takes over
    }
    const OptimizedView view = optimize_single_view(scene, region.member_ids, init, config.view);

    if (warnings) {
        const RenderBuffers buffers = rasterize(scene.gaussians, view.camera, config.view.render);
        for (int id : region.member_ids)
            if (object_information(buffers, id) <= 0)
                warnings->push_back(region_label(region.id) + ": object " + std::to_string(id) +
                                    " is not visible from the optimized viewpoint");
    }
    return view.camera;
}

SceneGraph infer_region(const Scene& scene, const Region& region, InferenceBackend& backend,
                        const SynthesisConfig& config, SynthesisReport* report) {
    if (region.member_ids.empty()) throw ValidationError("infer_region: empty region");
    if (!region.viewpoint_set) throw ValidationError("infer_region: viewpoint not set");

    std::vector<int> visible;
    const std::vector<RelationTriplet> kept = detail::run_inference(
        scene, region, backend, config, InferencePurpose::RegionPass, {}, {}, report, &visible);

    SceneGraph local;
    for (const auto& e : kept) local.add(e);
    for (int id : region.member_ids)
        if (std::binary_search(visible.begin(), visible.end(), id)) local.nodes.insert(id);
    return local;
}

SceneGraph resolve_conflict(const Scene& scene, SceneGraph global,
                            const std::vector<int>& path_nodes, InferenceBackend& backend,
                            const SynthesisConfig& config, SynthesisReport* report) {
    std::set<int> span(path_nodes.begin(), path_nodes.end());
    if (span.size() < 2) throw ValidationError("resolve_conflict: need at least two path nodes");

    std::vector<int> members;
    for (int n : span)
        if (n > 0 && scene.find_object(n)) members.push_back(n);
    if (members.empty()) {
        if (report)
            report->warnings.push_back("adjudication: no scene objects on the conflict path");
        return global;
    }

    const std::set<int> bases = base_nodes_present(scene);
    std::set<int> parent_span = span;
    parent_span.insert(bases.begin(), bases.end());

    Region reg;
    reg.id = -1;
    reg.member_ids = members;
    reg.viewpoint = region_viewpoint(scene, reg, config, report ? &report->warnings : nullptr);
    reg.viewpoint_set = true;

    const std::vector<RelationTriplet> adjudicated = detail::run_inference(
        scene, reg, backend, config, InferencePurpose::Adjudication, members,
        {parent_span.begin(), parent_span.end()}, report);

    // The adjudicated set replaces every edge the backend could have
    // re-derived: children on the path, parents within the span or a base.
    for (auto it = global.edges.begin(); it != global.edges.end();) {
        if (std::binary_search(members.begin(), members.end(), it->child) &&
            parent_span.count(it->parent))
            it = global.edges.erase(it);
        else
            ++it;
    }

    const auto drop = [&](const RelationTriplet& e, const std::string& why) {
        if (report) {
            report->events.push_back({e, MergeEvent::Outcome::DroppedInvalid, {}});
            report->warnings.push_back("adjudication: dropped edge " + edge_str(e) + ": " + why);
        }
    };
    for (const auto& e : adjudicated) {
        if (global.has_edge(e)) continue;
        if (e.relation == Relation::SupportedBy) {
            const auto held = global.support_edge(e.child);
            if (held && held->parent != e.parent) {
                drop(e, "second support parent");
                continue;
            }
        }
        if (detail::directed_path(global, e.parent, e.child)) {
            drop(e, "would close a cycle");
            continue;
        }
        global.add(e);
    }

    // Removal can strand children outside the span; peel until every parent
    // grounds again.
    for (bool removed = true; removed;) {
        removed = false;
        for (auto it = global.edges.begin(); it != global.edges.end();) {
            if (!detail::parent_grounded(global, it->parent)) {
                if (report) {
                    report->events.push_back(
                        {*it, MergeEvent::Outcome::DroppedUngrounded, {}});
                    report->warnings.push_back("adjudication: dropped stranded edge " +
                                               edge_str(*it));
                }
                it = global.edges.erase(it);
                removed = true;
            } else {
                ++it;
            }
        }
    }
    return global;
}

SceneGraph synthesize(const Scene& scene, InferenceBackend& backend, const SynthesisConfig& config,
                      SynthesisReport* report) {
    validate_scene(scene);
    validate_synthesis_config(config);

    SceneGraph global;
    for (int b : base_nodes_present(scene)) global.nodes.insert(b);
    if (scene.objects.empty()) return global;

    std::vector<Region> regions =
        cluster_regions(scene, config.cluster_epsilon, config.cluster_min_points);
    MergeContext ctx{&scene, &backend, &config, report};
    for (Region& region : regions) {
        region.viewpoint =
            region_viewpoint(scene, region, config, report ? &report->warnings : nullptr);
        region.viewpoint_set = true;
        const SceneGraph local = infer_region(scene, region, backend, config, report);
        global = merge_subgraph(std::move(global), local, ctx);
        if (report) report->regions.push_back(region);
    }
    validate_graph(global);
    return global;
}

}  // namespace splatgraph
