#include "splatgraph/rasterizer.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "render_internal.hpp"

namespace splatgraph {

namespace detail {

PrepareResult prepare_splats(const std::vector<Gaussian3D>& gaussians, const Camera& cam,
                             const RasterizeOptions& opts,
                             const std::vector<int>* channel_ids,
                             const std::vector<int>* target_ids) {
    validate_camera(cam);
    if (opts.effective_opacities && opts.effective_opacities->size() != gaussians.size())
        throw ValidationError("effective_opacities size mismatch");

    PrepareResult out;
    out.splats.reserve(gaussians.size());
    const Pose w2c = cam.world_to_camera();
    const Mat3 Rwc = w2c.rotation();

    for (size_t i = 0; i < gaussians.size(); ++i) {
        const Gaussian3D& g = gaussians[i];
        const double o = opts.effective_opacities ? (*opts.effective_opacities)[i] : g.opacity;
        std::optional<Splat2D> s = project_gaussian(g, cam, opts.near, int(i));
        if (!s) {
            ++out.culled;
            continue;
        }
        // Condition-number screen on the 2D covariance.
        const double a = s->cov2d(0, 0), b = s->cov2d(0, 1), c = s->cov2d(1, 1);
        const double tr = a + c;
        const double disc = std::sqrt(std::max(0.0, (a - c) * (a - c) + 4.0 * b * b));
        const double lmin = 0.5 * (tr - disc), lmax = 0.5 * (tr + disc);
        const double det = a * c - b * b;
        if (!(lmin > 0) || lmax > opts.max_condition * lmin || !(det > 0)) {
            ++out.skipped_degenerate;
            continue;
        }

        PreparedSplat p;
        p.source = int(i);
        if (channel_ids) {
            const auto it = std::lower_bound(channel_ids->begin(), channel_ids->end(),
                                             g.instance_id);
            p.channel = (it != channel_ids->end() && *it == g.instance_id)
                            ? int(it - channel_ids->begin())
                            : -1;
        }
        if (target_ids)
            p.in_target = std::binary_search(target_ids->begin(), target_ids->end(),
                                             g.instance_id);
        p.z = s->view_depth;
        p.mean2d = s->mean2d;
        const double idet = 1.0 / det;
        p.ixx = c * idet;
        p.ixy = -b * idet;
        p.iyy = a * idet;
        p.opacity = o;
        p.color = g.color;
        p.cov2d = s->cov2d;
        p.m_cam = w2c.act(g.mean);

        // Inclusive pixel bbox of the 4-sigma support ellipse; pixel centers
        // sit at integer + 0.5.
        const double rx = 4.0 * std::sqrt(a), ry = 4.0 * std::sqrt(c);
        p.x0 = std::max(0, int(std::ceil(p.mean2d.x() - rx - 0.5)));
        p.x1 = std::min(cam.width - 1, int(std::floor(p.mean2d.x() + rx - 0.5)));
        p.y0 = std::max(0, int(std::ceil(p.mean2d.y() - ry - 0.5)));
        p.y1 = std::min(cam.height - 1, int(std::floor(p.mean2d.y() + ry - 0.5)));
        if (p.x1 < p.x0 || p.y1 < p.y0) {
            ++out.culled;
            continue;
        }
        out.splats.push_back(std::move(p));
    }

    std::sort(out.splats.begin(), out.splats.end(),
              [](const PreparedSplat& l, const PreparedSplat& r) {
                  if (l.z != r.z) return l.z < r.z;
                  return l.source < r.source;
              });
    return out;
}

void TileGrid::build(const std::vector<PreparedSplat>& splats, int width, int height,
                     int tile) {
    tile_size = tile;
    tiles_x = (width + tile - 1) / tile;
    tiles_y = (height + tile - 1) / tile;
    lists.assign(size_t(tiles_x) * size_t(tiles_y), {});
    for (size_t k = 0; k < splats.size(); ++k) {
        const PreparedSplat& s = splats[k];
        const int tx0 = s.x0 / tile, tx1 = s.x1 / tile;
        const int ty0 = s.y0 / tile, ty1 = s.y1 / tile;
        for (int ty = ty0; ty <= ty1; ++ty)
            for (int tx = tx0; tx <= tx1; ++tx)
                lists[size_t(ty) * size_t(tiles_x) + size_t(tx)].push_back(int(k));
    }
}

}  // namespace detail

RenderBuffers rasterize(const std::vector<Gaussian3D>& gaussians, const Camera& cam,
                        const RasterizeOptions& opts) {
    using detail::PreparedSplat;

    // Channel per instance id present in the input, ascending.
    std::set<int> id_set;
    for (const Gaussian3D& g : gaussians) id_set.insert(g.instance_id);
    std::vector<int> channel_ids(id_set.begin(), id_set.end());

    detail::PrepareResult prep =
        detail::prepare_splats(gaussians, cam, opts, &channel_ids, nullptr);

    RenderBuffers out;
    out.width = cam.width;
    out.height = cam.height;
    out.contribution_threshold = opts.contribution_threshold;
    out.alpha = ImageF(cam.width, cam.height);
    out.depth = ImageF(cam.width, cam.height);
    out.channel_ids = channel_ids;
    out.contribution.assign(channel_ids.size(), ImageF(cam.width, cam.height));
    out.weighted_depth.assign(channel_ids.size(), ImageF(cam.width, cam.height));
    out.instance.assign(size_t(cam.width) * size_t(cam.height), 0);
    out.per_gaussian_contribution.assign(gaussians.size(), 0.0);
    out.culled = prep.culled;
    out.skipped_degenerate = prep.skipped_degenerate;
    if (opts.accumulate_color) {
        out.color_r = ImageF(cam.width, cam.height);
        out.color_g = ImageF(cam.width, cam.height);
        out.color_b = ImageF(cam.width, cam.height);
    }

    detail::TileGrid grid;
    grid.build(prep.splats, cam.width, cam.height, opts.tile_size);

    for (int ty = 0; ty < grid.tiles_y; ++ty) {
        for (int tx = 0; tx < grid.tiles_x; ++tx) {
            const std::vector<int>& list = grid.lists[size_t(ty) * size_t(grid.tiles_x) + tx];
            if (list.empty()) continue;
            const int px0 = tx * grid.tile_size;
            const int py0 = ty * grid.tile_size;
            const int px1 = std::min(cam.width, px0 + grid.tile_size);
            const int py1 = std::min(cam.height, py0 + grid.tile_size);
            for (int py = py0; py < py1; ++py) {
                for (int px = px0; px < px1; ++px) {
                    const double cxp = px + 0.5, cyp = py + 0.5;
                    const size_t pix = size_t(py) * size_t(cam.width) + size_t(px);
                    double T = 1.0;
                    for (int k : list) {
                        const PreparedSplat& s = prep.splats[k];
                        if (px < s.x0 || px > s.x1 || py < s.y0 || py > s.y1) continue;
                        const double dx = cxp - s.mean2d.x();
                        const double dy = cyp - s.mean2d.y();
                        const double rho = s.ixx * dx * dx + 2.0 * s.ixy * dx * dy +
                                           s.iyy * dy * dy;
                        if (rho > 16.0) continue;  // outside 4-sigma support
                        double a = s.opacity * std::exp(-0.5 * rho);
                        if (a <= 0.0) continue;
                        if (a > 0.99) {
                            a = 0.99;
                            ++out.clipped_evals;
                        }
                        const double contrib = a * T;
                        out.alpha.data[pix] += contrib;
                        if (s.channel >= 0) {
                            out.contribution[size_t(s.channel)].data[pix] += contrib;
                            out.weighted_depth[size_t(s.channel)].data[pix] += contrib * s.z;
                        }
                        if (opts.accumulate_color) {
                            out.color_r.data[pix] += contrib * s.color.x();
                            out.color_g.data[pix] += contrib * s.color.y();
                            out.color_b.data[pix] += contrib * s.color.z();
                        }
                        double& pg = out.per_gaussian_contribution[size_t(s.source)];
                        if (contrib > pg) pg = contrib;
                        T *= 1.0 - a;
                        if (T < opts.transmittance_min) {
                            ++out.earlystop_pixels;
                            break;
                        }
                    }
                }
            }
        }
    }

    // Derived per-pixel outputs.
    const size_t npix = size_t(cam.width) * size_t(cam.height);
    for (size_t pix = 0; pix < npix; ++pix) {
        const double al = out.alpha.data[pix];
        if (al > 0.0) {
            double wd = 0.0;
            for (size_t c = 0; c < out.channel_ids.size(); ++c)
                wd += out.weighted_depth[c].data[pix];
            out.depth.data[pix] = wd / al;
        }
        int best_id = 0;
        double best_v = -1.0;
        for (size_t c = 0; c < out.channel_ids.size(); ++c) {
            if (out.channel_ids[c] <= 0) continue;
            const double v = out.contribution[c].data[pix];
            if (v > best_v) {
                best_v = v;
                best_id = out.channel_ids[c];
            }
        }
        out.instance[pix] = (best_v >= opts.contribution_threshold) ? best_id : 0;
    }
    return out;
}

ImageRGBA8 buffers_to_rgba(const RenderBuffers& buffers) {
    ImageRGBA8 img(buffers.width, buffers.height);
    const bool have_color = !buffers.color_r.empty();
    for (int y = 0; y < buffers.height; ++y) {
        for (int x = 0; x < buffers.width; ++x) {
            const size_t pix = size_t(y) * size_t(buffers.width) + size_t(x);
            const double al = buffers.alpha.data[pix];
            std::uint8_t* px = img.pixel(x, y);
            if (al > 0.0) {
                auto to8 = [&](double accum) {
                    double v = accum / al;
                    if (v < 0) v = 0;
                    if (v > 1) v = 1;
                    return std::uint8_t(std::lround(v * 255.0));
                };
                px[0] = have_color ? to8(buffers.color_r.data[pix]) : 0;
                px[1] = have_color ? to8(buffers.color_g.data[pix]) : 0;
                px[2] = have_color ? to8(buffers.color_b.data[pix]) : 0;
                px[3] = std::uint8_t(std::lround(std::min(1.0, al) * 255.0));
            }
        }
    }
    return img;
}

}  // namespace splatgraph
