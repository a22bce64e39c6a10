#pragma once

// Synthetic benchmark scenes with construction-known ground truth, plus the
// brute-force view oracle used to check the optimizer against an exhaustive
// grid sweep.

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "splatgraph/rasterizer.hpp"
#include "splatgraph/scenegraph.hpp"
#include "splatgraph/types.hpp"

namespace splatgraph {

enum class PrimitiveKind { Box, Sphere, Plane };

struct PrimitiveShape {
    PrimitiveKind kind = PrimitiveKind::Box;
    Vec3 center = Vec3::Zero();
    // Box: full extents. Sphere: size.x() = diameter. Plane: size.x() by
    // size.y() patch in the local xy plane (zero thickness).
    Vec3 size = Vec3::Ones();
    Quat rotation = Quat(1, 0, 0, 0);
};

// World-space AABB corners (lo, hi) of the shape.
std::pair<Vec3, Vec3> shape_bounds(const PrimitiveShape& shape);

// Surface-sampled cloud: round(area * density) random samples plus the exact
// surface extremes (box and plane corners, sphere axis points), so the cloud
// AABB equals the shape AABB. Scale 1/sqrt(density) with the normal axis at
// 0.2x the tangent axes, opacity 0.9.
std::vector<Gaussian3D> make_gaussian_cloud(const PrimitiveShape& shape, double density, Rng& rng,
                                            int instance_id = 0,
                                            const Vec3& color = Vec3(0.5, 0.5, 0.5));

enum class BenchmarkLayout { TableTop, Apartment, OcclusionPair };

struct BenchmarkSpec {
    std::uint64_t seed = 0;
    int object_count = 6;
    BenchmarkLayout layout = BenchmarkLayout::TableTop;
    double density = 60.0;  // gaussians per square meter of surface
    double noise = 0.0;     // parent-rewiring probability for the noisy oracle
};

// density > 0, noise in [0, 1), object_count >= 1; ValidationError otherwise.
void validate_benchmark_spec(const BenchmarkSpec& spec);

struct GroundTruth {
    SceneGraph graph;  // by construction, never inferred
    std::map<int, PrimitiveShape> shapes;
    // OcclusionPair: unit direction from each hidden object toward its open
    // half-space.
    std::map<int, Vec3> open_directions;
    int cluster_count = 1;
};

// Deterministic in spec.seed. TableTop: a table with items on top. Apartment:
// 2-4 well-separated furniture clusters, some with a wall shelf. OcclusionPair:
// one object plus a large occluding sheet on one side. All layouts include a
// floor entity and low-density floor patches (instance 0) under the objects.
std::pair<Scene, GroundTruth> make_benchmark_scene(const BenchmarkSpec& spec);

// The reconstruction oracle's contact rules applied to exact primitive bounds
// instead of sampled gaussians. Empty filters mean every scene object as
// child, objects plus base nodes as parents.
std::vector<RelationTriplet> relations_from_shapes(const Scene& scene, const GroundTruth& truth,
                                                   const std::vector<int>& allowed_children = {},
                                                   const std::vector<int>& allowed_parents = {});

// Relation backend over exact generator geometry. Region passes rewire each
// answer's parent to a random other valid candidate with probability `noise`;
// adjudication answers are always exact.
class PrimitiveOracleBackend : public InferenceBackend {
public:
    explicit PrimitiveOracleBackend(GroundTruth truth, double noise = 0.0, std::uint64_t seed = 0);
    std::string name() const override { return "primitive"; }
    std::vector<RelationTriplet> infer(const InferenceRequest& request) override;

private:
    GroundTruth truth_;
    double noise_;
    Rng rng_;
};

struct ViewGrid {
    std::vector<Vec3> directions;  // empty = the 26 cube directions
    std::vector<double> radius_scales = {1.0, 2.0, 3.0};  // times ||object size||
    int image_width = 256;
    int image_height = 256;
    double fov_y_deg = 60.0;
};

struct RankedView {
    Camera camera;
    double information = 0;
};

// Exhaustive information sweep over the pose grid (every direction at every
// radius, aimed at the object centroid), sorted descending; ties keep grid
// order. Independent of gaussian list order up to floating-point association.
std::vector<RankedView> brute_force_best_view(const Scene& scene, int object_id,
                                              const ViewGrid& grid = {},
                                              const RasterizeOptions& render = {});

}  // namespace splatgraph
