#pragma once

#include <string>
#include <vector>

#include "splatgraph/errors.hpp"
#include "splatgraph/pose.hpp"

namespace splatgraph {

// Anisotropic 3D gaussian. scale holds per-axis standard deviations (linear,
// never log). instance_id 0 marks background; positive ids belong to exactly
// one ObjectInstance of the owning scene.
struct Gaussian3D {
    Vec3 mean{0, 0, 0};
    Vec3 scale{1, 1, 1};
    Quat rotation{1, 0, 0, 0};
    double opacity = 1.0;
    Vec3 color{0.5, 0.5, 0.5};
    int instance_id = 0;
};

// Rigidly transform a gaussian: the ellipsoid moves with the frame, shape and
// appearance are untouched.
inline Gaussian3D transform_gaussian(const Gaussian3D& g, const Pose& pose) {
    Gaussian3D out = g;
    out.mean = pose.act(g.mean);
    out.rotation = (pose.q * g.rotation).normalized();
    return out;
}

// Pinhole camera. pose maps camera coordinates to world coordinates; the
// camera frame is x-right, y-down, z-forward (points with positive camera z
// are in front).
struct Camera {
    double fx = 0, fy = 0;
    double cx = 0, cy = 0;
    int width = 0, height = 0;
    Pose pose;  // camera-to-world

    Pose world_to_camera() const { return pose.inverse(); }

    // Camera-to-world pose placing the camera at `position` looking at
    // `target` with image-up roughly along `up`.
    static Pose look_at(const Vec3& position, const Vec3& target, const Vec3& up) {
        Vec3 f = target - position;
        const double n = f.norm();
        if (n < 1e-12) throw ValidationError("look_at: position equals target");
        f /= n;
        Vec3 r = f.cross(up);
        if (r.norm() < 1e-9) {
            const Vec3 alt = std::abs(f.z()) < 0.9 ? Vec3(0, 0, 1) : Vec3(0, 1, 0);
            r = f.cross(alt);
        }
        r.normalize();
        const Vec3 d = f.cross(r);  // image-down
        Mat3 R;
        R.col(0) = r;
        R.col(1) = d;
        R.col(2) = f;
        Pose p;
        p.q = Quat(R).normalized();
        p.t = position;
        return p;
    }
};

// Fixed environment geometry (not reconstructed, not simulated): a named
// plane. Valid names are "Floor" and "Wall"; a scene may hold several Wall
// planes, they all map to the single Wall node of a scene graph.
struct BaseEntity {
    std::string name;
    Vec3 point{0, 0, 0};
    Vec3 normal{0, 0, 1};
};

struct ObjectInstance {
    int id = 0;  // > 0; 0 is reserved for background
    std::string label;
    std::vector<int> gaussian_indices;  // indices into Scene::gaussians
    Vec3 centroid{0, 0, 0};
    Vec3 size{0, 0, 0};  // world AABB extents of the member gaussians
    Pose pose;
    std::string material = "unknown";
    double mass = 1.0;
    Vec3 center_of_mass{0, 0, 0};
    std::string asset_ref;
};

struct Scene {
    std::vector<Gaussian3D> gaussians;
    std::vector<ObjectInstance> objects;
    std::vector<BaseEntity> base_entities;
    Vec3 up_axis{0, 0, 1};

    const ObjectInstance* find_object(int id) const {
        for (const auto& o : objects)
            if (o.id == id) return &o;
        return nullptr;
    }

    const ObjectInstance& object_or_throw(int id) const {
        const ObjectInstance* o = find_object(id);
        if (!o) throw NotFoundError("unknown object id " + std::to_string(id));
        return *o;
    }
};

// Recompute an object's centroid/size/center_of_mass from its gaussians.
void refresh_object_geometry(Scene& scene, ObjectInstance& obj);

// Throws ValidationError naming the violated invariant. Checks: unit
// quaternions and positive scales, opacity range, camera-independent object
// bookkeeping (ids unique and positive, index sets non-empty and consistent
// with instance tags), centroid containment, base entity names and unit
// normals, unit up_axis.
void validate_scene(const Scene& scene);

void validate_camera(const Camera& cam);

}  // namespace splatgraph
