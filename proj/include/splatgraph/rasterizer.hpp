#pragma once

#include <vector>

#include "splatgraph/image.hpp"
#include "splatgraph/projection.hpp"
#include "splatgraph/types.hpp"

namespace splatgraph {

struct RasterizeOptions {
    double near = 0.01;
    // Compositing stops once transmittance drops below this. Kept at 1e-6 so
    // the truncation error stays below the 1e-5 agreement bound against a
    // reference compositor that never stops.
    double transmittance_min = 1e-6;
    // Pixels with channel contribution above this count as covered; also the
    // instance-map cutoff.
    double contribution_threshold = 1e-4;
    int tile_size = 16;
    // When set (size = gaussian count), replaces each gaussian's intrinsic
    // opacity. Values in [0, 1].
    const std::vector<double>* effective_opacities = nullptr;
    bool accumulate_color = false;
    // Splats whose 2D covariance condition number exceeds this are skipped.
    double max_condition = 1e12;
};

// Per-pixel composited outputs. One contribution channel per instance id
// present in the input (id 0 = background channel when tagged gaussians
// exist alongside untagged ones).
struct RenderBuffers {
    int width = 0, height = 0;
    double contribution_threshold = 1e-4;

    ImageF alpha;  // total accumulated opacity
    ImageF depth;  // contribution-weighted mean splat depth, 0 where alpha = 0

    std::vector<int> channel_ids;          // ascending instance ids
    std::vector<ImageF> contribution;      // per channel: sum of a_i * T_i
    std::vector<ImageF> weighted_depth;    // per channel: sum of a_i * T_i * z_i

    std::vector<int> instance;  // per pixel: argmax object channel, 0 if none above threshold

    ImageF color_r, color_g, color_b;  // filled when accumulate_color

    // Max composited per-pixel contribution of each input gaussian.
    std::vector<double> per_gaussian_contribution;

    // Diagnostics.
    int culled = 0;               // depth/footprint culls at projection
    int skipped_degenerate = 0;   // condition-number skips
    long long clipped_evals = 0;  // pixel evaluations hitting the 0.99 clip
    long long earlystop_pixels = 0;

    int channel_index(int id) const {
        for (size_t i = 0; i < channel_ids.size(); ++i)
            if (channel_ids[i] == id) return int(i);
        return -1;
    }
};

// Front-to-back alpha compositing of the projected gaussians, depth-then-
// source-index ordered, tile-binned. Buffers are identical to a sequential
// per-pixel walk of the same ordering; tiling is purely an access-pattern
// optimization.
RenderBuffers rasterize(const std::vector<Gaussian3D>& gaussians, const Camera& cam,
                        const RasterizeOptions& opts = {});

// RGBA snapshot of a rasterization (straight alpha, 8-bit).
ImageRGBA8 buffers_to_rgba(const RenderBuffers& buffers);

}  // namespace splatgraph
