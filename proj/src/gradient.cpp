#include "splatgraph/gradient.hpp"

#include <algorithm>
#include <cmath>

#include "render_internal.hpp"

namespace splatgraph {

namespace {

struct Hit {
    int k = 0;
    double a = 0;  // alpha after the 0.99 cap
    double T = 0;  // transmittance in front of this splat
    bool clipped = false;
};

// Accumulated derivatives of the loss with respect to one splat's screen-space
// quantities: projected mean, (floored) 2D covariance, view depth.
struct SplatGrads {
    double g_mx = 0, g_my = 0;
    double g_cxx = 0, g_cxy = 0, g_cyy = 0;
    double g_z = 0;
    bool touched = false;
};

}  // namespace

ViewGradient view_loss_gradient(const std::vector<Gaussian3D>& gaussians, const Camera& cam,
                                const std::vector<int>& target_ids, double lambda_depth,
                                double target_distance, const RasterizeOptions& opts) {
    using detail::PreparedSplat;

    detail::PrepareResult prep =
        detail::prepare_splats(gaussians, cam, opts, nullptr, &target_ids);
    detail::TileGrid grid;
    grid.build(prep.splats, cam.width, cam.height, opts.tile_size);

    ViewGradient out;
    out.culled = prep.culled;
    out.skipped_degenerate = prep.skipped_degenerate;

    const size_t npix = size_t(cam.width) * size_t(cam.height);
    std::vector<double> u_img(npix, 0.0), v_img(npix, 0.0);

    // Walks one pixel front to back; returns (u, v) target sums and optionally
    // records every composited splat. Must stay in lockstep with rasterize().
    std::vector<Hit> hits;
    auto walk_pixel = [&](const std::vector<int>& list, int px, int py, double& u, double& v,
                          bool record) {
        const double cxp = px + 0.5, cyp = py + 0.5;
        double T = 1.0;
        u = 0.0;
        v = 0.0;
        for (int k : list) {
            const PreparedSplat& s = prep.splats[size_t(k)];
            if (px < s.x0 || px > s.x1 || py < s.y0 || py > s.y1) continue;
            const double dx = cxp - s.mean2d.x();
            const double dy = cyp - s.mean2d.y();
            const double rho = s.ixx * dx * dx + 2.0 * s.ixy * dx * dy + s.iyy * dy * dy;
            if (rho > 16.0) continue;
            double a = s.opacity * std::exp(-0.5 * rho);
            if (a <= 0.0) continue;
            bool clipped = false;
            if (a > 0.99) {
                a = 0.99;
                clipped = true;
                if (!record) ++out.clipped_evals;
            }
            if (s.in_target) {
                u += a * T;
                v += a * T * s.z;
            }
            if (record) hits.push_back(Hit{k, a, T, clipped});
            T *= 1.0 - a;
            if (T < opts.transmittance_min) {
                if (!record) ++out.earlystop_pixels;
                break;
            }
        }
    };

    // Forward pass: per-pixel target contribution and weighted depth.
    for (int ty = 0; ty < grid.tiles_y; ++ty) {
        for (int tx = 0; tx < grid.tiles_x; ++tx) {
            const std::vector<int>& list = grid.lists[size_t(ty) * size_t(grid.tiles_x) + tx];
            if (list.empty()) continue;
            const int px1 = std::min(cam.width, (tx + 1) * grid.tile_size);
            const int py1 = std::min(cam.height, (ty + 1) * grid.tile_size);
            for (int py = ty * grid.tile_size; py < py1; ++py)
                for (int px = tx * grid.tile_size; px < px1; ++px) {
                    const size_t pix = size_t(py) * size_t(cam.width) + size_t(px);
                    walk_pixel(list, px, py, u_img[pix], v_img[pix], false);
                }
        }
    }

    ViewLossTerms& terms = out.terms;
    for (size_t pix = 0; pix < npix; ++pix) {
        const double u = u_img[pix];
        if (u <= opts.contribution_threshold) continue;
        ++terms.object_pixels;
        terms.information += u;
        const double d = v_img[pix] / u - target_distance;
        terms.depth_error += d * d;
    }
    terms.loss_information = -terms.information;
    if (terms.object_pixels > 0)
        terms.loss_depth = lambda_depth / double(terms.object_pixels) * terms.depth_error;
    terms.loss_total = terms.loss_information + terms.loss_depth;
    if (terms.object_pixels == 0) return out;

    // Backward pass over counted pixels only: suffix-sum walk back to front,
    // chaining into screen-space accumulators per splat.
    std::vector<SplatGrads> grads(prep.splats.size());
    const double gscale = 2.0 * lambda_depth / double(terms.object_pixels);

    for (int ty = 0; ty < grid.tiles_y; ++ty) {
        for (int tx = 0; tx < grid.tiles_x; ++tx) {
            const std::vector<int>& list = grid.lists[size_t(ty) * size_t(grid.tiles_x) + tx];
            if (list.empty()) continue;
            const int px1 = std::min(cam.width, (tx + 1) * grid.tile_size);
            const int py1 = std::min(cam.height, (ty + 1) * grid.tile_size);
            for (int py = ty * grid.tile_size; py < py1; ++py) {
                for (int px = tx * grid.tile_size; px < px1; ++px) {
                    const size_t pix = size_t(py) * size_t(cam.width) + size_t(px);
                    const double u = u_img[pix];
                    if (u <= opts.contribution_threshold) continue;
                    const double D = v_img[pix] / u;
                    const double gu = -1.0 - gscale * (D - target_distance) * D / u;
                    const double gv = gscale * (D - target_distance) / u;

                    hits.clear();
                    double uu, vv;
                    walk_pixel(list, px, py, uu, vv, true);

                    const double cxp = px + 0.5, cyp = py + 0.5;
                    double su = 0.0, sv = 0.0;  // target suffix sums of a*T, a*T*z
                    for (size_t h = hits.size(); h-- > 0;) {
                        const Hit& hit = hits[h];
                        const PreparedSplat& s = prep.splats[size_t(hit.k)];
                        const double aT = hit.a * hit.T;
                        // d u / d a_k = [in_target] T_k - su / (1 - a_k)
                        const double dua = (s.in_target ? hit.T : 0.0) - su / (1.0 - hit.a);
                        const double dva =
                            (s.in_target ? hit.T * s.z : 0.0) - sv / (1.0 - hit.a);
                        const double dLda = gu * dua + gv * dva;
                        SplatGrads& g = grads[size_t(hit.k)];
                        if (s.in_target) {
                            g.g_z += gv * aT;
                            g.touched = true;
                        }
                        if (!hit.clipped && dLda != 0.0) {
                            const double dx = cxp - s.mean2d.x();
                            const double dy = cyp - s.mean2d.y();
                            const double qx = s.ixx * dx + s.ixy * dy;
                            const double qy = s.ixy * dx + s.iyy * dy;
                            const double c = dLda * hit.a;
                            g.g_mx += c * qx;
                            g.g_my += c * qy;
                            g.g_cxx += 0.5 * c * qx * qx;
                            g.g_cxy += c * qx * qy;
                            g.g_cyy += 0.5 * c * qy * qy;
                            g.touched = true;
                        }
                        if (s.in_target) {
                            su += aT;
                            sv += aT * s.z;
                        }
                    }
                }
            }
        }
    }

    // Chain screen-space gradients to the pose tangent.
    const Pose w2c = cam.world_to_camera();
    const Mat3 Rwc = w2c.rotation();
    Vec3 g_w = Vec3::Zero(), g_u = Vec3::Zero();

    for (size_t k = 0; k < prep.splats.size(); ++k) {
        const SplatGrads& g = grads[k];
        if (!g.touched) continue;
        const PreparedSplat& s = prep.splats[k];
        const Gaussian3D& src = gaussians[size_t(s.source)];

        const double mz = s.m_cam.z();
        const double inv_z = 1.0 / mz;
        const double inv_z2 = inv_z * inv_z;
        Mat23 J;
        J << cam.fx * inv_z, 0.0, -cam.fx * s.m_cam.x() * inv_z2, 0.0, cam.fy * inv_z,
            -cam.fy * s.m_cam.y() * inv_z2;

        Mat2 G_C;
        G_C << g.g_cxx, 0.5 * g.g_cxy, 0.5 * g.g_cxy, g.g_cyy;

        const Mat3 Rg = src.rotation.toRotationMatrix();
        const Mat3 Sw = Rg * src.scale.array().square().matrix().asDiagonal() * Rg.transpose();
        const Mat3 Sc = Rwc * Sw * Rwc.transpose();

        // Mean path: projection Jacobian, direct depth term, and the
        // dependence of J itself on the camera-frame mean.
        Vec3 G_m = J.transpose() * Vec2(g.g_mx, g.g_my);
        G_m.z() += g.g_z;
        {
            const Eigen::Matrix<double, 3, 2> ScJt = Sc * J.transpose();
            Mat23 dJ;
            // d J / d mx
            dJ.setZero();
            dJ(0, 2) = -cam.fx * inv_z2;
            G_m.x() += 2.0 * (G_C.cwiseProduct(dJ * ScJt)).sum();
            // d J / d my
            dJ.setZero();
            dJ(1, 2) = -cam.fy * inv_z2;
            G_m.y() += 2.0 * (G_C.cwiseProduct(dJ * ScJt)).sum();
            // d J / d mz
            dJ.setZero();
            dJ(0, 0) = -cam.fx * inv_z2;
            dJ(0, 2) = 2.0 * cam.fx * s.m_cam.x() * inv_z2 * inv_z;
            dJ(1, 1) = -cam.fy * inv_z2;
            dJ(1, 2) = 2.0 * cam.fy * s.m_cam.y() * inv_z2 * inv_z;
            G_m.z() += 2.0 * (G_C.cwiseProduct(dJ * ScJt)).sum();
        }

        const Vec3 RtGm = Rwc.transpose() * G_m;
        g_w += RtGm.cross(src.mean);
        g_u -= RtGm;

        // Covariance path through the rotated world covariance.
        const Mat3 G_Sc = J.transpose() * G_C * J;
        const Mat3 M = Rwc.transpose() * G_Sc * Rwc;
        for (int axis = 0; axis < 3; ++axis) {
            Vec3 e = Vec3::Zero();
            e[axis] = 1.0;
            const Mat3 E = skew(e);
            const Mat3 A = Sw * E - E * Sw;
            g_w[axis] += (M.cwiseProduct(A)).sum();
        }
    }

    out.dpose.head<3>() = g_w;
    out.dpose.tail<3>() = g_u;
    return out;
}

}  // namespace splatgraph
