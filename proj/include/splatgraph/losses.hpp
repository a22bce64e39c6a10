#pragma once

#include <vector>

#include "splatgraph/rasterizer.hpp"
#include "splatgraph/types.hpp"

namespace splatgraph {

// Scalar terms of the view objective for one camera and one target object set.
//
// `information` is the total composited contribution of the target objects,
// summed over the pixels where that contribution exceeds the render's
// contribution threshold (`object_pixels` counts them). `depth_error` is the
// raw sum of squared deviations of the per-pixel contribution-weighted target
// depth from `target_distance` over those same pixels, before the
// lambda / |pixels| scaling that produces `loss_depth`.
struct ViewLossTerms {
    double information = 0;
    double depth_error = 0;
    int object_pixels = 0;
    double loss_information = 0;  // -information
    double loss_depth = 0;        // lambda / object_pixels * depth_error, 0 if no pixels
    double loss_total = 0;
};

// Evaluates the view objective from already-rendered buffers. `target_ids`
// must be sorted unique instance ids; ids absent from the render contribute
// nothing.
ViewLossTerms view_loss_terms(const RenderBuffers& buffers, const std::vector<int>& target_ids,
                              double lambda_depth, double target_distance);

// Total composited contribution of one object over the pixels where it
// exceeds the render's contribution threshold. Throws NotFoundError when the
// id is absent from the rendered scene.
double object_information(const RenderBuffers& buffers, int object_id);

struct ObjectDepthStats {
    std::vector<double> depths;  // contribution-weighted depth per counted pixel
    double mean = 0;
    int pixels = 0;  // 0 signals the empty-view condition
};

ObjectDepthStats object_depth_stats(const RenderBuffers& buffers, int object_id);

// Preferred camera distance for framing the listed objects: kappa times the
// diagonal norm of the axis-aligned box spanned by their stored centroids and
// sizes. For a single object this is kappa * |size|.
double target_distance_for(const Scene& scene, const std::vector<int>& object_ids,
                           double kappa = 2.0);

}  // namespace splatgraph
