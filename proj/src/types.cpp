#include "splatgraph/types.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace splatgraph {

void refresh_object_geometry(Scene& scene, ObjectInstance& obj) {
    if (obj.gaussian_indices.empty())
        throw ValidationError("object " + std::to_string(obj.id) + " has no gaussians");
    Vec3 lo = Vec3::Constant(1e300), hi = Vec3::Constant(-1e300);
    Vec3 sum = Vec3::Zero();
    for (int gi : obj.gaussian_indices) {
        const Vec3& m = scene.gaussians.at(size_t(gi)).mean;
        lo = lo.cwiseMin(m);
        hi = hi.cwiseMax(m);
        sum += m;
    }
    obj.centroid = sum / double(obj.gaussian_indices.size());
    obj.size = hi - lo;
    obj.center_of_mass = obj.centroid;
}

namespace {

void fail(const std::string& what) { throw ValidationError(what); }

}  // namespace

void validate_camera(const Camera& cam) {
    if (!(cam.fx > 0) || !(cam.fy > 0)) fail("camera: fx and fy must be positive");
    if (cam.width <= 0 || cam.height <= 0) fail("camera: image size must be positive");
    if (!(cam.cx > 0 && cam.cx < cam.width)) fail("camera: cx must lie inside the image");
    if (!(cam.cy > 0 && cam.cy < cam.height)) fail("camera: cy must lie inside the image");
    if (std::abs(cam.pose.q.norm() - 1.0) > 1e-6) fail("camera: pose quaternion not unit");
}

void validate_scene(const Scene& scene) {
    for (size_t i = 0; i < scene.gaussians.size(); ++i) {
        const Gaussian3D& g = scene.gaussians[i];
        const std::string where = "gaussian " + std::to_string(i);
        if (!(g.scale.x() > 0 && g.scale.y() > 0 && g.scale.z() > 0))
            fail(where + ": scale components must be positive");
        if (std::abs(g.rotation.norm() - 1.0) > 1e-6)
            fail(where + ": rotation quaternion not unit");
        if (!(g.opacity >= 0.0 && g.opacity <= 1.0))
            fail(where + ": opacity outside [0, 1]");
        if (g.instance_id < 0)
            fail(where + ": negative instance id");
    }

    std::set<int> ids;
    std::map<int, const ObjectInstance*> by_id;
    for (const ObjectInstance& o : scene.objects) {
        const std::string where = "object " + std::to_string(o.id);
        if (o.id <= 0) fail("object ids must be positive, got " + std::to_string(o.id));
        if (!ids.insert(o.id).second) fail(where + ": duplicate object id");
        by_id[o.id] = &o;
        if (o.gaussian_indices.empty()) fail(where + ": empty gaussian index set");
        if (!(o.size.x() >= 0 && o.size.y() >= 0 && o.size.z() >= 0))
            fail(where + ": AABB extents must be non-negative");
        if (std::abs(o.pose.q.norm() - 1.0) > 1e-6) fail(where + ": pose quaternion not unit");

        Vec3 lo = Vec3::Constant(1e300), hi = Vec3::Constant(-1e300);
        std::set<int> seen;
        for (int gi : o.gaussian_indices) {
            if (gi < 0 || size_t(gi) >= scene.gaussians.size())
                fail(where + ": gaussian index " + std::to_string(gi) + " out of range");
            if (!seen.insert(gi).second)
                fail(where + ": duplicate gaussian index " + std::to_string(gi));
            const Gaussian3D& g = scene.gaussians[size_t(gi)];
            if (g.instance_id != o.id)
                fail(where + ": gaussian " + std::to_string(gi) + " has instance id " +
                     std::to_string(g.instance_id));
            const double s3 = 3.0 * g.scale.maxCoeff();
            lo = lo.cwiseMin(g.mean - Vec3::Constant(s3));
            hi = hi.cwiseMax(g.mean + Vec3::Constant(s3));
        }
        for (int k = 0; k < 3; ++k)
            if (o.centroid[k] < lo[k] || o.centroid[k] > hi[k])
                fail(where + ": centroid outside its gaussians' 3-sigma AABB");
    }

    // Every tagged gaussian must be owned by the object with that id.
    std::map<int, std::set<int>> owned;
    for (const ObjectInstance& o : scene.objects)
        owned[o.id] = std::set<int>(o.gaussian_indices.begin(), o.gaussian_indices.end());
    for (size_t i = 0; i < scene.gaussians.size(); ++i) {
        const int tag = scene.gaussians[i].instance_id;
        if (tag == 0) continue;
        auto it = owned.find(tag);
        if (it == owned.end())
            fail("gaussian " + std::to_string(i) + ": instance id " + std::to_string(tag) +
                 " has no object");
        if (!it->second.count(int(i)))
            fail("gaussian " + std::to_string(i) + ": not listed by object " +
                 std::to_string(tag));
    }

    for (const BaseEntity& b : scene.base_entities) {
        if (b.name != "Floor" && b.name != "Wall")
            fail("base entity name must be Floor or Wall, got '" + b.name + "'");
        if (std::abs(b.normal.norm() - 1.0) > 1e-6)
            fail("base entity '" + b.name + "': normal not unit");
    }

    if (std::abs(scene.up_axis.norm() - 1.0) > 1e-6) fail("scene up_axis not unit");
}

}  // namespace splatgraph
