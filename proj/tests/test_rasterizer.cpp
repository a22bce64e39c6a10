#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "generators.hpp"
#include "naive_render.hpp"
#include "splatgraph/rasterizer.hpp"

using namespace splatgraph;
using namespace splatgraph::testsupport;

namespace {

// Camera whose principal point sits exactly on a pixel center so a splat on
// the optical axis evaluates at rho = 0.
Camera centered_camera(int size, double from_z) {
    Camera cam = make_camera(size, size, 60.0, Vec3(0, 0, from_z), Vec3(0, 0, 0));
    cam.cx = size / 2 + 0.5;
    cam.cy = size / 2 + 0.5;
    return cam;
}

Gaussian3D splat_at(const Vec3& mean, double sigma, double opacity, int id = 1) {
    Gaussian3D g;
    g.mean = mean;
    g.scale = Vec3(sigma, sigma, sigma);
    g.opacity = opacity;
    g.instance_id = id;
    return g;
}

double max_abs_diff(const ImageF& a, const ImageF& b) {
    double m = 0;
    for (size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
    return m;
}

}  // namespace

TEST_CASE("fully opaque splat clips to 0.99 at its center pixel") {
    const Camera cam = centered_camera(32, -2.0);
    const std::vector<Gaussian3D> gs = {splat_at(Vec3(0, 0, 0), 0.2, 1.0)};
    const RenderBuffers buffers = rasterize(gs, cam, RasterizeOptions{});
    const int px = int(cam.cx), py = int(cam.cy);
    CHECK(buffers.alpha.at(px, py) == doctest::Approx(0.99).epsilon(1e-12));
    CHECK(buffers.clipped_evals > 0);
}

TEST_CASE("two coincident half-opacity splats composite to 0.75") {
    const Camera cam = centered_camera(32, -2.0);
    std::vector<Gaussian3D> gs = {splat_at(Vec3(0, 0, 0), 0.2, 0.5),
                                  splat_at(Vec3(0, 0, 0), 0.2, 0.5)};
    const RenderBuffers buffers = rasterize(gs, cam, RasterizeOptions{});
    const int px = int(cam.cx), py = int(cam.cy);
    CHECK(buffers.alpha.at(px, py) == doctest::Approx(0.75).epsilon(1e-9));
}

TEST_CASE("effective opacities override intrinsic ones") {
    const Camera cam = centered_camera(32, -2.0);
    std::vector<Gaussian3D> gs = {splat_at(Vec3(0, 0, 0), 0.2, 0.9)};
    std::vector<double> eff = {0.25};
    RasterizeOptions opts;
    opts.effective_opacities = &eff;
    const RenderBuffers buffers = rasterize(gs, cam, opts);
    CHECK(buffers.alpha.at(int(cam.cx), int(cam.cy)) == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("tiled rasterizer matches the naive compositor on random scenes") {
    Rng rng(101);
    for (int trial = 0; trial < 6; ++trial) {
        const auto gs =
            random_gaussians(rng, 50 + 40 * trial, Vec3(0, 0, 0), 1.2, {0, 1, 2, 3});
        const Camera cam = make_camera(96, 96, 60.0,
                                       Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), -4.0),
                                       Vec3(0, 0, 0));
        RasterizeOptions naive_opts;  // reference ignores early-stop anyway
        const RenderBuffers ref = naive_rasterize(gs, cam, naive_opts);
        const RenderBuffers got = rasterize(gs, cam, RasterizeOptions{});
        CHECK(max_abs_diff(ref.alpha, got.alpha) < 1e-6);
        REQUIRE(ref.channel_ids == got.channel_ids);
        for (size_t c = 0; c < ref.contribution.size(); ++c) {
            CHECK(max_abs_diff(ref.contribution[c], got.contribution[c]) < 1e-6);
            CHECK(max_abs_diff(ref.weighted_depth[c], got.weighted_depth[c]) < 1e-5);
        }
        CHECK(max_abs_diff(ref.depth, got.depth) < 1e-5);
    }
}

TEST_CASE("permuting the input leaves the buffers unchanged") {
    Rng rng(7);
    const auto gs = random_gaussians(rng, 80, Vec3(0, 0, 0), 1.0, {0, 1, 2});
    const Camera cam = make_camera(64, 64, 60.0, Vec3(0.3, -0.2, -3.5), Vec3(0, 0, 0));
    const RenderBuffers a = rasterize(gs, cam, RasterizeOptions{});

    std::vector<size_t> perm(gs.size());
    std::iota(perm.begin(), perm.end(), size_t(0));
    for (size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.uniform_index(i)]);
    std::vector<Gaussian3D> shuffled(gs.size());
    for (size_t i = 0; i < gs.size(); ++i) shuffled[i] = gs[perm[i]];

    const RenderBuffers b = rasterize(shuffled, cam, RasterizeOptions{});
    CHECK(max_abs_diff(a.alpha, b.alpha) < 1e-6);
    CHECK(max_abs_diff(a.depth, b.depth) < 1e-6);
    for (size_t c = 0; c < a.contribution.size(); ++c)
        CHECK(max_abs_diff(a.contribution[c], b.contribution[c]) < 1e-6);
    for (size_t i = 0; i < gs.size(); ++i)
        CHECK(a.per_gaussian_contribution[perm[i]] ==
              doctest::Approx(b.per_gaussian_contribution[i]).epsilon(1e-9));
}

TEST_CASE("alpha never exceeds the no-early-stop closed form") {
    Rng rng(13);
    const auto gs = random_gaussians(rng, 60, Vec3(0, 0, 0), 1.0, {0, 1});
    const Camera cam = make_camera(64, 64, 60.0, Vec3(0, 0, -3.5), Vec3(0, 0, 0));

    RasterizeOptions exact;
    exact.transmittance_min = 0.0;
    const RenderBuffers buffers = rasterize(gs, cam, exact);

    // Conservation: alpha == 1 - prod(1 - a_i) when nothing stops early.
    const RenderBuffers ref = naive_rasterize(gs, cam, exact);
    for (size_t i = 0; i < buffers.alpha.data.size(); ++i) {
        CHECK(buffers.alpha.data[i] <= 1.0 + 1e-9);
        CHECK(buffers.alpha.data[i] == doctest::Approx(ref.alpha.data[i]).epsilon(1e-9));
    }
}

TEST_CASE("scaling all opacities down never increases alpha") {
    Rng rng(29);
    const auto gs = random_gaussians(rng, 60, Vec3(0, 0, 0), 1.0, {1});
    const Camera cam = make_camera(64, 64, 60.0, Vec3(0, 0, -3.5), Vec3(0, 0, 0));
    RasterizeOptions exact;
    exact.transmittance_min = 0.0;
    const RenderBuffers full = rasterize(gs, cam, exact);
    for (double f : {0.9, 0.5, 0.2}) {
        std::vector<Gaussian3D> scaled = gs;
        for (auto& g : scaled) g.opacity *= f;
        const RenderBuffers part = rasterize(scaled, cam, exact);
        for (size_t i = 0; i < full.alpha.data.size(); ++i)
            CHECK(part.alpha.data[i] <= full.alpha.data[i] + 1e-12);
    }
}

TEST_CASE("channel contributions sum to alpha") {
    Rng rng(31);
    const auto gs = random_gaussians(rng, 70, Vec3(0, 0, 0), 1.0, {0, 1, 2, 5});
    const Camera cam = make_camera(64, 64, 60.0, Vec3(0, 0, -3.5), Vec3(0, 0, 0));
    const RenderBuffers buffers = rasterize(gs, cam, RasterizeOptions{});
    for (size_t i = 0; i < buffers.alpha.data.size(); ++i) {
        double sum = 0;
        for (const auto& c : buffers.contribution) sum += c.data[i];
        CHECK(sum == doctest::Approx(buffers.alpha.data[i]).epsilon(1e-12));
    }
}

TEST_CASE("instance map reports the dominant object and zero elsewhere") {
    const Camera cam = centered_camera(32, -2.0);
    // Object 2 in front of object 1, both on the axis.
    std::vector<Gaussian3D> gs = {splat_at(Vec3(0, 0, 0), 0.15, 0.6, 1),
                                  splat_at(Vec3(0, 0, -0.5), 0.15, 0.7, 2)};
    const RenderBuffers buffers = rasterize(gs, cam, RasterizeOptions{});
    const int px = int(cam.cx), py = int(cam.cy);
    CHECK(buffers.instance[size_t(py) * 32 + size_t(px)] == 2);
    CHECK(buffers.instance[0] == 0);  // corner: nothing reaches it
}

TEST_CASE("degenerate covariance is skipped and counted") {
    const Camera cam = centered_camera(32, -2.0);
    Gaussian3D g = splat_at(Vec3(0, 0, 0), 1.0, 0.9);
    g.scale = Vec3(1e7, 1e-9, 1e-9);  // needle: condition number above the cutoff
    g.rotation = quat_exp(Vec3(0, 0.3, 0));
    const RenderBuffers buffers = rasterize({g}, cam, RasterizeOptions{});
    CHECK(buffers.skipped_degenerate + buffers.culled >= 1);
}

TEST_CASE("early stop saves work but stays within tolerance of the reference") {
    Rng rng(41);
    auto gs = random_gaussians(rng, 200, Vec3(0, 0, 0), 0.6, {1});
    for (auto& g : gs) g.opacity = 0.95;  // deep stack triggers the stop
    const Camera cam = make_camera(64, 64, 60.0, Vec3(0, 0, -3.0), Vec3(0, 0, 0));
    const RenderBuffers tiled = rasterize(gs, cam, RasterizeOptions{});
    const RenderBuffers ref = naive_rasterize(gs, cam, RasterizeOptions{});
    CHECK(tiled.earlystop_pixels > 0);
    CHECK(max_abs_diff(ref.alpha, tiled.alpha) < 1e-6);
}
