#include <doctest.h>

#include "generators.hpp"
#include "splatgraph/errors.hpp"
#include "splatgraph/types.hpp"

using namespace splatgraph;
using namespace splatgraph::testsupport;

namespace {

Gaussian3D unit_gaussian(const Vec3& mean, int id = 0) {
    Gaussian3D g;
    g.mean = mean;
    g.scale = Vec3(0.1, 0.1, 0.1);
    g.opacity = 0.5;
    g.instance_id = id;
    return g;
}

}  // namespace

TEST_CASE("transform_gaussian with identity leaves the gaussian unchanged") {
    Gaussian3D g = unit_gaussian(Vec3(1, 2, 3));
    const Gaussian3D t = transform_gaussian(g, Pose::identity());
    CHECK((t.mean - g.mean).norm() == 0.0);
    CHECK(t.opacity == g.opacity);
    CHECK((t.scale - g.scale).norm() == 0.0);
}

TEST_CASE("transform_gaussian pure translation moves the mean") {
    Pose p;
    p.t = Vec3(1, 0, 0);
    const Gaussian3D t = transform_gaussian(unit_gaussian(Vec3::Zero()), p);
    CHECK((t.mean - Vec3(1, 0, 0)).norm() < 1e-15);
}

TEST_CASE("transform_gaussian rotates the mean") {
    Pose p;
    p.q = quat_exp(Vec3(0, 0, M_PI / 2));
    const Gaussian3D t = transform_gaussian(unit_gaussian(Vec3(1, 0, 0)), p);
    CHECK((t.mean - Vec3(0, 1, 0)).norm() < 1e-9);
}

TEST_CASE("transform_gaussian is a group action") {
    Rng rng(17);
    for (int i = 0; i < 100; ++i) {
        Pose a, b;
        a.q = quat_exp(rng.uniform(0.0, 3.0) * rng.unit_vector());
        a.t = Vec3(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
        b.q = quat_exp(rng.uniform(0.0, 3.0) * rng.unit_vector());
        b.t = Vec3(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
        Gaussian3D g = unit_gaussian(Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), 1.0));
        g.rotation = quat_exp(rng.uniform(0.0, 2.0) * rng.unit_vector());

        const Gaussian3D lhs = transform_gaussian(g, a.compose(b));
        const Gaussian3D rhs = transform_gaussian(transform_gaussian(g, b), a);
        CHECK((lhs.mean - rhs.mean).norm() < 1e-9);
        const double dq = std::min((lhs.rotation.coeffs() - rhs.rotation.coeffs()).norm(),
                                   (lhs.rotation.coeffs() + rhs.rotation.coeffs()).norm());
        CHECK(dq < 1e-9);
    }
}

TEST_CASE("validate_scene accepts a generated scene") {
    Rng rng(1);
    Scene scene = wrap_scene(random_gaussians(rng, 40, Vec3::Zero(), 1.0, {0, 1, 2}));
    CHECK_NOTHROW(validate_scene(scene));
}

TEST_CASE("validate_scene rejects non-unit quaternions") {
    Rng rng(2);
    Scene scene = wrap_scene(random_gaussians(rng, 10, Vec3::Zero(), 1.0, {1}));
    scene.gaussians[3].rotation = Quat(2.0, 0, 0, 0);
    CHECK_THROWS_AS(validate_scene(scene), ValidationError);
}

TEST_CASE("validate_scene rejects out-of-range opacity") {
    Rng rng(3);
    Scene scene = wrap_scene(random_gaussians(rng, 10, Vec3::Zero(), 1.0, {1}));
    scene.gaussians[0].opacity = 1.5;
    CHECK_THROWS_AS(validate_scene(scene), ValidationError);
}

TEST_CASE("validate_scene rejects non-positive scales") {
    Rng rng(4);
    Scene scene = wrap_scene(random_gaussians(rng, 10, Vec3::Zero(), 1.0, {1}));
    scene.gaussians[5].scale.y() = 0.0;
    CHECK_THROWS_AS(validate_scene(scene), ValidationError);
}

TEST_CASE("validate_scene rejects overlapping object index sets") {
    Rng rng(5);
    Scene scene = wrap_scene(random_gaussians(rng, 10, Vec3::Zero(), 1.0, {1, 2}));
    scene.objects[1].gaussian_indices.push_back(scene.objects[0].gaussian_indices[0]);
    CHECK_THROWS_AS(validate_scene(scene), ValidationError);
}

TEST_CASE("validate_scene rejects duplicate object ids") {
    Rng rng(6);
    Scene scene = wrap_scene(random_gaussians(rng, 10, Vec3::Zero(), 1.0, {1}));
    scene.objects.push_back(scene.objects[0]);
    CHECK_THROWS_AS(validate_scene(scene), ValidationError);
}

TEST_CASE("validate_scene rejects tagged gaussians not owned by their object") {
    Rng rng(7);
    Scene scene = wrap_scene(random_gaussians(rng, 10, Vec3::Zero(), 1.0, {1}));
    scene.gaussians.push_back(scene.gaussians[0]);  // tagged 1, not in the index set
    CHECK_THROWS_AS(validate_scene(scene), ValidationError);
}

TEST_CASE("validate_scene rejects bad base entity names") {
    Rng rng(8);
    Scene scene = wrap_scene(random_gaussians(rng, 10, Vec3::Zero(), 1.0, {1}));
    BaseEntity b;
    b.name = "Ceiling";
    b.point = Vec3::Zero();
    b.normal = Vec3(0, 0, 1);
    scene.base_entities.push_back(b);
    CHECK_THROWS_AS(validate_scene(scene), ValidationError);
}

TEST_CASE("validation errors name the offending entity") {
    Rng rng(9);
    Scene scene = wrap_scene(random_gaussians(rng, 10, Vec3::Zero(), 1.0, {1}));
    scene.gaussians[5].scale.y() = -1.0;
    try {
        validate_scene(scene);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("5") != std::string::npos);
    }
}

TEST_CASE("object lookup throws for unknown ids") {
    Rng rng(10);
    Scene scene = wrap_scene(random_gaussians(rng, 10, Vec3::Zero(), 1.0, {1}));
    CHECK_THROWS_AS(scene.object_or_throw(99), NotFoundError);
    CHECK(scene.find_object(99) == nullptr);
    CHECK(scene.object_or_throw(1).id == 1);
}
