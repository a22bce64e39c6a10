#include "generators.hpp"

#include <cmath>
#include <map>

namespace splatgraph::testsupport {

Camera make_camera(int width, int height, double fov_y_deg, const Vec3& from, const Vec3& at,
                   const Vec3& up) {
    Camera cam;
    cam.pose = Camera::look_at(from, at, up);
    cam.width = width;
    cam.height = height;
    const double f = 0.5 * height / std::tan(0.5 * fov_y_deg * M_PI / 180.0);
    cam.fx = f;
    cam.fy = f;
    cam.cx = 0.5 * width;
    cam.cy = 0.5 * height;
    return cam;
}

std::vector<Gaussian3D> random_gaussians(Rng& rng, int count, const Vec3& center,
                                         double extent, const std::vector<int>& ids,
                                         double scale_lo, double scale_hi) {
    std::vector<Gaussian3D> out;
    out.reserve(size_t(count));
    for (int i = 0; i < count; ++i) {
        Gaussian3D g;
        g.mean = center + Vec3(rng.uniform(-extent, extent), rng.uniform(-extent, extent),
                               rng.uniform(-extent, extent));
        g.scale = Vec3(rng.uniform(scale_lo, scale_hi), rng.uniform(scale_lo, scale_hi),
                       rng.uniform(scale_lo, scale_hi));
        const Vec3 axis = rng.unit_vector();
        g.rotation = quat_exp(0.5 * rng.uniform(0.0, M_PI) * axis);
        g.opacity = rng.uniform(0.1, 0.95);
        g.color = Vec3(rng.uniform(), rng.uniform(), rng.uniform());
        g.instance_id = ids[size_t(i) % ids.size()];
        out.push_back(g);
    }
    return out;
}

Scene wrap_scene(std::vector<Gaussian3D> gaussians) {
    Scene scene;
    scene.gaussians = std::move(gaussians);
    std::map<int, ObjectInstance> objects;
    for (size_t i = 0; i < scene.gaussians.size(); ++i) {
        const int id = scene.gaussians[i].instance_id;
        if (id <= 0) continue;
        ObjectInstance& obj = objects[id];
        obj.id = id;
        obj.label = "object_" + std::to_string(id);
        obj.gaussian_indices.push_back(i);
    }
    for (auto& [id, obj] : objects) {
        refresh_object_geometry(scene, obj);
        scene.objects.push_back(std::move(obj));
    }
    validate_scene(scene);
    return scene;
}

}  // namespace splatgraph::testsupport
