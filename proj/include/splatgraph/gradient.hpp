#pragma once

#include <vector>

#include "splatgraph/losses.hpp"

namespace splatgraph {

// Loss and analytic pose gradient for one view. `dpose` is the tangent
// gradient in the (w, u) layout consumed by Pose::boxplus_left applied to the
// camera-to-world pose: rotation components first, then translation.
struct ViewGradient {
    ViewLossTerms terms;
    Vec6 dpose = Vec6::Zero();
    // Forward-pass diagnostics, used to explain finite-difference mismatches.
    int clipped_evals = 0;
    int earlystop_pixels = 0;
    int culled = 0;
    int skipped_degenerate = 0;
};

// Differentiates the view objective with respect to the camera pose. The set
// of counted pixels is treated as fixed at the evaluation pose; per-splat
// alpha values that hit the 0.99 cap propagate no alpha-path gradient but keep
// their depth-path term.
ViewGradient view_loss_gradient(const std::vector<Gaussian3D>& gaussians, const Camera& cam,
                                const std::vector<int>& target_ids, double lambda_depth,
                                double target_distance, const RasterizeOptions& opts);

}  // namespace splatgraph
