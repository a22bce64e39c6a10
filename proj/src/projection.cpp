#include "splatgraph/projection.hpp"

namespace splatgraph {

Mat3 world_covariance(const Gaussian3D& g) {
    const Mat3 R = g.rotation.toRotationMatrix();
    return R * g.scale.array().square().matrix().asDiagonal() * R.transpose();
}

Mat23 projection_jacobian(const Camera& cam, const Vec3& m) {
    const double iz = 1.0 / m.z();
    Mat23 J;
    J << cam.fx * iz, 0, -cam.fx * m.x() * iz * iz,
         0, cam.fy * iz, -cam.fy * m.y() * iz * iz;
    return J;
}

std::optional<Splat2D> project_gaussian(const Gaussian3D& g, const Camera& cam,
                                        double near, int source_index) {
    const Pose w2c = cam.world_to_camera();
    const Vec3 m = w2c.act(g.mean);
    if (!(m.z() > near)) return std::nullopt;

    const double iz = 1.0 / m.z();
    const Vec2 mean2d(cam.fx * m.x() * iz + cam.cx, cam.fy * m.y() * iz + cam.cy);

    const Mat3 Rwc = w2c.rotation();
    const Mat3 cov_cam = Rwc * world_covariance(g) * Rwc.transpose();
    const Mat23 J = projection_jacobian(cam, m);
    Mat2 cov2d = J * cov_cam * J.transpose();
    cov2d(0, 0) += 0.3;
    cov2d(1, 1) += 0.3;
    cov2d(0, 1) = cov2d(1, 0) = 0.5 * (cov2d(0, 1) + cov2d(1, 0));

    // Footprint cull: the axis-aligned box of the 3-sigma ellipse against the
    // image rectangle.
    const double ex = 3.0 * std::sqrt(cov2d(0, 0));
    const double ey = 3.0 * std::sqrt(cov2d(1, 1));
    if (mean2d.x() + ex < 0.0 || mean2d.x() - ex > double(cam.width) ||
        mean2d.y() + ey < 0.0 || mean2d.y() - ey > double(cam.height))
        return std::nullopt;

    Splat2D s;
    s.mean2d = mean2d;
    s.cov2d = cov2d;
    s.view_depth = m.z();
    s.source_index = source_index;
    return s;
}

}  // namespace splatgraph
