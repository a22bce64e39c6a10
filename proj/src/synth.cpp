#include "splatgraph/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "splatgraph/errors.hpp"
#include "splatgraph/losses.hpp"

#include "scenegraph_internal.hpp"

namespace splatgraph {

namespace {

constexpr double kThinRatio = 0.2;        // normal-axis scale over tangent scale
constexpr double kPlaceBorder = 0.02;     // clearance from a supporting surface's rim
constexpr double kItemGap = 0.05;         // xy clearance between placed items
// Floor patches use a fixed density regardless of the scene density: their
// splats must stay small enough that level sight lines half a
// meter up clear the evaluation cutoff, or the patch washes out side views.
constexpr double kCarpetDensity = 100.0;

// Rotation taking local +z to the unit normal `n`.
Quat frame_from_normal(const Vec3& n) {
    const Vec3 z(0, 0, 1);
    const double c = z.dot(n);
    if (c > 1.0 - 1e-12) return Quat(1, 0, 0, 0);
    if (c < -1.0 + 1e-12) return Quat(0, 1, 0, 0);
    const Vec3 axis = z.cross(n).normalized();
    const double angle = std::acos(std::max(-1.0, std::min(1.0, c)));
    return quat_exp(angle * axis);
}

Gaussian3D surface_splat(const Vec3& mean, const Quat& rotation, double s, int instance_id,
                         const Vec3& color) {
    Gaussian3D g;
    g.mean = mean;
    g.scale = Vec3(s, s, kThinRatio * s);
    g.rotation = rotation.normalized();
    g.opacity = 0.9;
    g.color = color;
    g.instance_id = instance_id;
    return g;
}

// The 8 signed corner offsets of a box with the given half extents, in
// lexicographic sign order. shape_bounds and the cloud markers share this so
// the sampled AABB matches the analytic one bit for bit.
std::vector<Vec3> box_corners(const Vec3& half) {
    std::vector<Vec3> out;
    out.reserve(8);
    for (int sx = -1; sx <= 1; sx += 2)
        for (int sy = -1; sy <= 1; sy += 2)
            for (int sz = -1; sz <= 1; sz += 2)
                out.push_back(Vec3(sx * half.x(), sy * half.y(), sz * half.z()));
    return out;
}

void require_positive_extents(const PrimitiveShape& shape) {
    switch (shape.kind) {
        case PrimitiveKind::Box:
            if (shape.size.minCoeff() <= 0)
                throw ValidationError("gaussian cloud: box extents must be positive");
            break;
        case PrimitiveKind::Sphere:
            if (shape.size.x() <= 0)
                throw ValidationError("gaussian cloud: sphere diameter must be positive");
            break;
        case PrimitiveKind::Plane:
            if (shape.size.x() <= 0 || shape.size.y() <= 0)
                throw ValidationError("gaussian cloud: plane extents must be positive");
            break;
    }
}

}  // namespace

std::pair<Vec3, Vec3> shape_bounds(const PrimitiveShape& shape) {
    require_positive_extents(shape);
    if (shape.kind == PrimitiveKind::Sphere) {
        const double r = 0.5 * shape.size.x();
        return {shape.center - Vec3::Constant(r), shape.center + Vec3::Constant(r)};
    }
    Vec3 half = 0.5 * shape.size;
    if (shape.kind == PrimitiveKind::Plane) half.z() = 0;
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (const Vec3& corner : box_corners(half)) {
        const Vec3 p = shape.center + shape.rotation * corner;
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    return {lo, hi};
}

std::vector<Gaussian3D> make_gaussian_cloud(const PrimitiveShape& shape, double density, Rng& rng,
                                            int instance_id, const Vec3& color) {
    if (density <= 0) throw ValidationError("gaussian cloud: density must be positive");
    require_positive_extents(shape);
    const double s = 1.0 / std::sqrt(density);
    std::vector<Gaussian3D> out;

    const auto local_splat = [&](const Vec3& local, const Vec3& local_normal) {
        out.push_back(surface_splat(shape.center + shape.rotation * local,
                                    shape.rotation * frame_from_normal(local_normal), s,
                                    instance_id, color));
    };

    switch (shape.kind) {
        case PrimitiveKind::Box: {
            const Vec3 half = 0.5 * shape.size;
            // Face areas for the +-x, +-y, +-z pairs.
            const double fx = shape.size.y() * shape.size.z();
            const double fy = shape.size.x() * shape.size.z();
            const double fz = shape.size.x() * shape.size.y();
            const double area = 2 * (fx + fy + fz);
            const long count = std::lround(area * density);
            for (long i = 0; i < count; ++i) {
                double pick = rng.uniform(0.0, area);
                int axis = 0;
                for (double f : {fx, fx, fy, fy, fz, fz}) {
                    if (pick < f) break;
                    pick -= f;
                    ++axis;
                }
                if (axis > 5) axis = 5;  // guard the rounding edge
                const int k = axis / 2;
                const double sign = (axis % 2 == 0) ? 1.0 : -1.0;
                Vec3 local = Vec3::Zero(), normal = Vec3::Zero();
                local[k] = sign * half[k];
                normal[k] = sign;
                const int u = (k + 1) % 3, v = (k + 2) % 3;
                local[u] = rng.uniform(-half[u], half[u]);
                local[v] = rng.uniform(-half[v], half[v]);
                local_splat(local, normal);
            }
            for (const Vec3& corner : box_corners(half)) local_splat(corner, corner.normalized());
            break;
        }
        case PrimitiveKind::Sphere: {
            // Rotation-invariant surface; markers sit on the world axes so the
            // cloud AABB equals center +- radius exactly.
            const double r = 0.5 * shape.size.x();
            const double area = 4.0 * M_PI * r * r;
            const long count = std::lround(area * density);
            for (long i = 0; i < count; ++i) {
                const Vec3 u = rng.unit_vector();
                out.push_back(surface_splat(shape.center + r * u, frame_from_normal(u), s,
                                            instance_id, color));
            }
            for (int k = 0; k < 3; ++k)
                for (double sign : {1.0, -1.0}) {
                    Vec3 u = Vec3::Zero();
                    u[k] = sign;
                    out.push_back(surface_splat(shape.center + r * u, frame_from_normal(u), s,
                                                instance_id, color));
                }
            break;
        }
        case PrimitiveKind::Plane: {
            const Vec3 half(0.5 * shape.size.x(), 0.5 * shape.size.y(), 0.0);
            const double area = shape.size.x() * shape.size.y();
            const long count = std::lround(area * density);
            for (long i = 0; i < count; ++i)
                local_splat(Vec3(rng.uniform(-half.x(), half.x()),
                                 rng.uniform(-half.y(), half.y()), 0.0),
                            Vec3(0, 0, 1));
            for (double sx : {-1.0, 1.0})
                for (double sy : {-1.0, 1.0})
                    local_splat(Vec3(sx * half.x(), sy * half.y(), 0.0), Vec3(0, 0, 1));
            break;
        }
    }
    return out;
}

void validate_benchmark_spec(const BenchmarkSpec& spec) {
    if (spec.density <= 0) throw ValidationError("benchmark spec: density must be positive");
    if (!(spec.noise >= 0.0 && spec.noise < 1.0))
        throw ValidationError("benchmark spec: noise must lie in [0, 1)");
    if (spec.object_count < 1)
        throw ValidationError("benchmark spec: object_count must be at least 1");
}

// ---------------------------------------------------------------------------
// Benchmark layouts

namespace {

struct PlacedDisk {
    double x, y, r;
};

bool disk_fits(const std::vector<PlacedDisk>& placed, double x, double y, double r) {
    for (const auto& d : placed)
        if (std::hypot(x - d.x, y - d.y) < d.r + r + kItemGap) return false;
    return true;
}

// Leaf object: a yawed box or a sphere with extents drawn from [lo, hi].
PrimitiveShape draw_item_shape(Rng& rng, double lo, double hi) {
    PrimitiveShape s;
    if (rng.uniform() < 0.4) {
        s.kind = PrimitiveKind::Sphere;
        const double d = rng.uniform(lo, hi);
        s.size = Vec3(d, d, d);
    } else {
        s.kind = PrimitiveKind::Box;
        s.size = Vec3(rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi));
        s.rotation = quat_exp(Vec3(0, 0, rng.uniform(0.0, 2.0 * M_PI)));
    }
    return s;
}

double xy_circumradius(const PrimitiveShape& s) {
    if (s.kind == PrimitiveKind::Sphere) return 0.5 * s.size.x();
    return 0.5 * std::hypot(s.size.x(), s.size.y());
}

double item_height(const PrimitiveShape& s) {
    return s.kind == PrimitiveKind::Sphere ? s.size.x() : s.size.z();
}

struct SceneBuilder {
    Scene scene;
    GroundTruth truth;
    double density;
    Rng rng;
    int next_id = 1;

    explicit SceneBuilder(const BenchmarkSpec& spec) : density(spec.density), rng(spec.seed) {
        scene.base_entities.push_back({"Floor", Vec3::Zero(), Vec3(0, 0, 1)});
    }

    // drop_bottom removes sampled splats on the shape's lowest horizontal
    // face. A face pressed into its support is never observed, and leaving
    // splats there lets below-floor cameras see it in front of the floor
    // patch (center-depth ordering cannot interleave coplanar surfaces).
    // The extreme-point markers at the cloud tail always survive, so the
    // sampled bounding box still matches the analytic one exactly.
    int add_object(const PrimitiveShape& shape, const std::string& kind,
                   bool drop_bottom = false) {
        const int id = next_id++;
        const Vec3 color(rng.uniform(0.2, 0.95), rng.uniform(0.2, 0.95), rng.uniform(0.2, 0.95));
        std::vector<Gaussian3D> cloud = make_gaussian_cloud(shape, density, rng, id, color);
        if (drop_bottom) {
            const size_t markers = shape.kind == PrimitiveKind::Box      ? 8
                                   : shape.kind == PrimitiveKind::Sphere ? 6
                                                                         : 4;
            const double z_lo = shape_bounds(shape).first.z();
            std::vector<Gaussian3D> kept;
            for (size_t i = 0; i < cloud.size(); ++i)
                if (i + markers >= cloud.size() || cloud[i].mean.z() > z_lo + 1e-9)
                    kept.push_back(cloud[i]);
            cloud = std::move(kept);
        }
        ObjectInstance obj;
        obj.id = id;
        obj.label = kind + " " + std::to_string(id);
        for (const Gaussian3D& g : cloud) {
            obj.gaussian_indices.push_back(int(scene.gaussians.size()));
            scene.gaussians.push_back(g);
        }
        obj.pose = Pose{shape.rotation, shape.center};
        refresh_object_geometry(scene, obj);
        scene.objects.push_back(obj);
        truth.shapes[id] = shape;
        return id;
    }

    // Background patch just under the floor plane; blocks views from below
    // without joining any object. Sunk 5 mm so object splats resting exactly
    // on z=0 stay strictly behind it in depth order for upward rays (depth
    // ties resolve by source index, which would put the object in front).
    void add_carpet(double cx, double cy, double sx, double sy) {
        PrimitiveShape patch;
        patch.kind = PrimitiveKind::Plane;
        patch.center = Vec3(cx, cy, -0.005);
        patch.size = Vec3(sx, sy, 0);
        for (const Gaussian3D& g : make_gaussian_cloud(patch, kCarpetDensity,
                                                       rng, 0, Vec3(0.35, 0.35, 0.35)))
            scene.gaussians.push_back(g);
    }

    // Bottom exactly on z_top, xy circumdisk inside the rectangle minus a
    // rim border and clear of earlier disks. The draw range halves every 100
    // rejections, so placement terminates on any surface.
    int place_on_rect(double cx, double cy, double hx, double hy, double z_top, double lo,
                      double hi, std::vector<PlacedDisk>& placed) {
        for (int attempt = 0; attempt < 4000; ++attempt) {
            if (attempt > 0 && attempt % 100 == 0) {
                lo *= 0.5;
                hi *= 0.5;
            }
            PrimitiveShape s = draw_item_shape(rng, lo, hi);
            const double r = xy_circumradius(s);
            const double bx = hx - r - kPlaceBorder;
            const double by = hy - r - kPlaceBorder;
            if (bx <= 0 || by <= 0) continue;
            const double x = cx + rng.uniform(-bx, bx);
            const double y = cy + rng.uniform(-by, by);
            if (!disk_fits(placed, x, y, r)) continue;
            s.center = Vec3(x, y, z_top + 0.5 * item_height(s));
            placed.push_back({x, y, r});
            return add_object(s, kind_of(s));
        }
        throw ValidationError("benchmark generator: item placement failed");
    }

    // Floor item inside a disk of radius `cap` around (cx, cy), optionally
    // avoiding a 60-degree sector on either side of `banned_angle`.
    int place_on_ring(double cx, double cy, double cap, double lo, double hi,
                      std::vector<PlacedDisk>& placed, bool has_banned, double banned_angle) {
        for (int attempt = 0; attempt < 4000; ++attempt) {
            if (attempt > 0 && attempt % 100 == 0) {
                lo *= 0.5;
                hi *= 0.5;
            }
            PrimitiveShape s = draw_item_shape(rng, lo, hi);
            const double r = xy_circumradius(s);
            if (cap - r <= 0) continue;
            const double phi = rng.uniform(0.0, 2.0 * M_PI);
            if (has_banned) {
                double d = std::fmod(std::abs(phi - banned_angle), 2.0 * M_PI);
                if (d > M_PI) d = 2.0 * M_PI - d;
                if (d < M_PI / 3.0) continue;
            }
            const double rad = rng.uniform(0.0, cap - r);
            const double x = cx + rad * std::cos(phi);
            const double y = cy + rad * std::sin(phi);
            if (!disk_fits(placed, x, y, r)) continue;
            s.center = Vec3(x, y, 0.5 * item_height(s));
            placed.push_back({x, y, r});
            return add_object(s, kind_of(s));
        }
        throw ValidationError("benchmark generator: item placement failed");
    }

    static const char* kind_of(const PrimitiveShape& s) {
        return s.kind == PrimitiveKind::Sphere ? "sphere" : "box";
    }
};

void build_tabletop(SceneBuilder& b, const BenchmarkSpec& spec) {
    const int items = std::clamp(spec.object_count - 1, 3, 8);
    const double w = b.rng.uniform(1.4, 1.8);
    const double d = b.rng.uniform(1.0, 1.2);
    const double h = b.rng.uniform(0.65, 0.78);
    PrimitiveShape table;
    table.kind = PrimitiveKind::Box;
    table.center = Vec3(0, 0, 0.5 * h);
    table.size = Vec3(w, d, h);
    const int table_id = b.add_object(table, "table");
    b.truth.graph.add({table_id, Relation::SupportedBy, kFloorNode});

    std::vector<PlacedDisk> placed;
    for (int i = 0; i < items; ++i) {
        const int id = b.place_on_rect(0, 0, 0.5 * w, 0.5 * d, h, 0.12, 0.25, placed);
        b.truth.graph.add({id, Relation::SupportedBy, table_id});
    }
    b.truth.cluster_count = 1;
}

void build_apartment(SceneBuilder& b, const BenchmarkSpec& spec) {
    const int n = spec.object_count;
    const int clusters = std::min(2 + int(b.rng.uniform_index(3)), n);
    std::vector<int> counts(size_t(clusters), 0);
    for (int i = 0; i < n; ++i) counts[size_t(i % clusters)]++;
    b.truth.cluster_count = clusters;

    for (int k = 0; k < clusters; ++k) {
        const double ang = 2.0 * M_PI * k / clusters + b.rng.uniform(-0.12, 0.12);
        const double cx = 4.0 * std::cos(ang) + b.rng.uniform(-0.15, 0.15);
        const double cy = 4.0 * std::sin(ang) + b.rng.uniform(-0.15, 0.15);
        const Vec3 outward = Vec3(cx, cy, 0).normalized();
        const double out_ang = std::atan2(outward.y(), outward.x());

        // Anchor furniture piece on the floor.
        PrimitiveShape anchor;
        anchor.kind = PrimitiveKind::Box;
        anchor.size = Vec3(b.rng.uniform(0.7, 1.0), b.rng.uniform(0.55, 0.8),
                           b.rng.uniform(0.4, 0.9));
        anchor.center = Vec3(cx, cy, 0.5 * anchor.size.z());
        const int anchor_id = b.add_object(anchor, "dresser");
        b.truth.graph.add({anchor_id, Relation::SupportedBy, kFloorNode});

        // Items on the anchor top clear each other; items on the floor clear
        // each other plus the anchor's whole circumdisk.
        std::vector<PlacedDisk> top_disks;
        std::vector<PlacedDisk> floor_disks{{cx, cy, xy_circumradius(anchor)}};

        int remaining = counts[size_t(k)] - 1;
        const bool with_shelf = remaining > 0 && b.rng.uniform() < 0.5;
        if (with_shelf) --remaining;

        for (int i = 0; i < remaining; ++i) {
            if (i % 2 == 0) {
                const int id = b.place_on_rect(cx, cy, 0.5 * anchor.size.x(),
                                               0.5 * anchor.size.y(), anchor.size.z(), 0.18, 0.3,
                                               top_disks);
                b.truth.graph.add({id, Relation::SupportedBy, anchor_id});
            } else {
                const int id =
                    b.place_on_ring(cx, cy, 1.35, 0.2, 0.35, floor_disks, with_shelf, out_ang);
                b.truth.graph.add({id, Relation::SupportedBy, kFloorNode});
            }
        }

        if (with_shelf) {
            // Vertical wall plane 0.85 m outward of the cluster, shelf hung
            // 1 cm off it, higher than any possible item stack so the wall is
            // its only contact. Tangent/outward/up columns keep the frame
            // right-handed.
            const double wall_off = 0.85;
            const Vec3 wall_point = Vec3(cx, cy, 0) + wall_off * outward;
            b.scene.base_entities.push_back({"Wall", wall_point, -outward});

            Mat3 frame;
            frame.col(0) = Vec3(outward.y(), -outward.x(), 0);
            frame.col(1) = outward;
            frame.col(2) = Vec3(0, 0, 1);
            PrimitiveShape shelf;
            shelf.kind = PrimitiveKind::Box;
            shelf.size = Vec3(0.5, 0.2, 0.04);
            shelf.rotation = Quat(frame);
            shelf.center = Vec3(cx, cy, 0) + outward * (wall_off - 0.01 - 0.1);
            shelf.center.z() = b.rng.uniform(1.26, 1.38);
            const int shelf_id = b.add_object(shelf, "shelf");
            b.truth.graph.add({shelf_id, Relation::AttachedTo, kWallNode});
        }
    }
}

void build_occlusion_pair(SceneBuilder& b) {
    const double e = b.rng.uniform(0.8, 1.2);
    const double jx = b.rng.uniform(-0.1, 0.1);
    const double jy = b.rng.uniform(-0.1, 0.1);
    PrimitiveShape hidden;
    if (b.rng.uniform() < 0.5) {
        hidden.kind = PrimitiveKind::Sphere;
        hidden.size = Vec3(e, e, e);
    } else {
        hidden.kind = PrimitiveKind::Box;
        hidden.size = Vec3(e, e, e);
    }
    hidden.center = Vec3(jx, jy, 0.5 * e);
    const int hidden_id = b.add_object(hidden, SceneBuilder::kind_of(hidden), true);
    b.truth.graph.add({hidden_id, Relation::SupportedBy, kFloorNode});

    // Axis-aligned open direction so strictly occluded grid poses stay
    // strictly behind the sheet at every probe radius.
    const Vec3 axes[4] = {Vec3(1, 0, 0), Vec3(-1, 0, 0), Vec3(0, 1, 0), Vec3(0, -1, 0)};
    const Vec3 open = axes[b.rng.uniform_index(4)];
    const double gap = 0.65 * e;

    PrimitiveShape sheet;
    sheet.kind = PrimitiveKind::Box;
    sheet.size = std::abs(open.x()) > 0.5 ? Vec3(0.02, 3.0, 2.5) : Vec3(3.0, 0.02, 2.5);
    sheet.center = Vec3(jx, jy, 1.25) - gap * open;
    const int sheet_id = b.add_object(sheet, "sheet", true);
    b.truth.graph.add({sheet_id, Relation::SupportedBy, kFloorNode});

    b.truth.open_directions[hidden_id] = open;
    // Floor patch sized to catch every below-horizon sight line toward the
    // target (crossings stay within ~0.75 of its center at all probe radii)
    // while leaving level cameras outside the patch so its splats never wash
    // out side views.
    b.add_carpet(jx, jy, 2.4, 2.4);
    b.truth.cluster_count = 1;
}

}  // namespace

std::pair<Scene, GroundTruth> make_benchmark_scene(const BenchmarkSpec& spec) {
    validate_benchmark_spec(spec);
    SceneBuilder b(spec);
    switch (spec.layout) {
        case BenchmarkLayout::TableTop:
            build_tabletop(b, spec);
            break;
        case BenchmarkLayout::Apartment:
            build_apartment(b, spec);
            break;
        case BenchmarkLayout::OcclusionPair:
            build_occlusion_pair(b);
            break;
    }
    validate_scene(b.scene);
    validate_graph(b.truth.graph);
    return {std::move(b.scene), std::move(b.truth)};
}

std::vector<RelationTriplet> relations_from_shapes(const Scene& scene, const GroundTruth& truth,
                                                   const std::vector<int>& allowed_children,
                                                   const std::vector<int>& allowed_parents) {
    std::vector<int> children = allowed_children;
    if (children.empty())
        for (const auto& obj : scene.objects) children.push_back(obj.id);
    std::set<int> parents(allowed_parents.begin(), allowed_parents.end());
    if (parents.empty()) {
        for (const auto& obj : scene.objects) parents.insert(obj.id);
        const std::set<int> bases = base_nodes_present(scene);
        parents.insert(bases.begin(), bases.end());
    }

    std::vector<double> floor_levels;
    std::vector<BaseEntity> walls;
    for (const auto& e : scene.base_entities) {
        if (e.name == "Floor") floor_levels.push_back(e.point.z());
        else walls.push_back(e);
    }

    std::map<int, detail::GeomBox> boxes;
    for (const auto& [id, shape] : truth.shapes) {
        const auto [lo, hi] = shape_bounds(shape);
        boxes[id] = {lo, hi};
    }
    return detail::relations_from_boxes(children, parents, boxes, floor_levels, walls);
}

PrimitiveOracleBackend::PrimitiveOracleBackend(GroundTruth truth, double noise, std::uint64_t seed)
    : truth_(std::move(truth)), noise_(noise), rng_(seed) {
    if (!(noise >= 0.0 && noise < 1.0))
        throw ValidationError("primitive backend: noise must lie in [0, 1)");
}

std::vector<RelationTriplet> PrimitiveOracleBackend::infer(const InferenceRequest& req) {
    if (!req.scene) throw ValidationError("primitive backend: request carries no scene");
    const Scene& scene = *req.scene;

    std::vector<int> children = req.allowed_children;
    if (children.empty()) children = req.visible_ids;
    std::set<int> parents(req.allowed_parents.begin(), req.allowed_parents.end());
    if (parents.empty()) {
        parents.insert(req.visible_ids.begin(), req.visible_ids.end());
        const std::set<int> bases = base_nodes_present(scene);
        parents.insert(bases.begin(), bases.end());
    }

    std::vector<RelationTriplet> out = relations_from_shapes(
        scene, truth_, children, std::vector<int>(parents.begin(), parents.end()));
    if (req.purpose != InferencePurpose::RegionPass || noise_ <= 0) return out;

    // Rewire each answer's parent with probability `noise`, keeping the
    // relation and drawing uniformly from the other structurally valid
    // candidates of the request.
    for (RelationTriplet& t : out) {
        if (rng_.uniform() >= noise_) continue;
        std::vector<int> pool;
        for (int p : parents) {
            if (p == t.child || p == t.parent) continue;
            if (t.relation == Relation::SupportedBy && p == kWallNode) continue;
            if (t.relation == Relation::AttachedTo && p == kFloorNode) continue;
            pool.push_back(p);
        }
        if (pool.empty()) continue;
        t.parent = pool[rng_.uniform_index(pool.size())];
    }
    return out;
}

std::vector<RankedView> brute_force_best_view(const Scene& scene, int object_id,
                                              const ViewGrid& grid, const RasterizeOptions& render) {
    const ObjectInstance& obj = scene.object_or_throw(object_id);
    if (grid.image_width <= 0 || grid.image_height <= 0)
        throw ValidationError("view grid: image dimensions must be positive");
    if (!(grid.fov_y_deg > 0 && grid.fov_y_deg < 180))
        throw ValidationError("view grid: fov must lie in (0, 180) degrees");
    if (grid.radius_scales.empty())
        throw ValidationError("view grid: needs at least one radius scale");
    for (double rs : grid.radius_scales)
        if (rs <= 0) throw ValidationError("view grid: radius scales must be positive");
    const double base = obj.size.norm();
    if (base <= 0) throw ValidationError("view grid: object has zero extent");

    std::vector<Vec3> dirs = grid.directions.empty() ? cube_directions() : grid.directions;
    for (Vec3& d : dirs) {
        const double n = d.norm();
        if (n < 1e-12) throw ValidationError("view grid: zero direction");
        d /= n;
    }

    const double f = 0.5 * grid.image_height / std::tan(0.5 * grid.fov_y_deg * M_PI / 180.0);
    std::vector<RankedView> out;
    out.reserve(dirs.size() * grid.radius_scales.size());
    for (const Vec3& dir : dirs) {
        for (double rs : grid.radius_scales) {
            Camera cam;
            cam.width = grid.image_width;
            cam.height = grid.image_height;
            cam.fx = cam.fy = f;
            cam.cx = 0.5 * cam.width;
            cam.cy = 0.5 * cam.height;
            cam.pose = Camera::look_at(obj.centroid + rs * base * dir, obj.centroid,
                                       scene.up_axis);
            const RenderBuffers buffers = rasterize(scene.gaussians, cam, render);
            out.push_back({cam, object_information(buffers, object_id)});
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const RankedView& a, const RankedView& b) {
                         return a.information > b.information;
                     });
    return out;
}

}  // namespace splatgraph
