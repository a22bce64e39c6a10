#pragma once

#include "splatgraph/rasterizer.hpp"

namespace splatgraph::testsupport {

// Reference compositor: projects every gaussian, sorts by depth with index
// tie-break, and walks the full sorted list at every pixel. No tiles, no
// bounding boxes, and no transmittance early stop (the transmittance_min in
// `opts` is ignored). Written independently of the production rasterizer so
// the two can be compared against each other.
RenderBuffers naive_rasterize(const std::vector<Gaussian3D>& gaussians, const Camera& cam,
                              const RasterizeOptions& opts);

}  // namespace splatgraph::testsupport
