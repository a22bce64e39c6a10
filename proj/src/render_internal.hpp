#pragma once

#include <vector>

#include "splatgraph/rasterizer.hpp"

namespace splatgraph::detail {

// Per-splat data shared by the forward compositor and the pose backward pass.
struct PreparedSplat {
    int source = -1;
    int channel = -1;
    bool in_target = false;
    double z = 0;
    Vec2 mean2d{0, 0};
    double ixx = 0, ixy = 0, iyy = 0;  // inverse of cov2d
    double opacity = 0;
    Vec3 color{0, 0, 0};
    int x0 = 0, x1 = -1, y0 = 0, y1 = -1;  // inclusive pixel bbox, empty if x1 < x0
    Mat2 cov2d = Mat2::Identity();
    Vec3 m_cam{0, 0, 0};  // camera-frame mean
};

struct PrepareResult {
    std::vector<PreparedSplat> splats;  // depth-then-source ordered
    int culled = 0;
    int skipped_degenerate = 0;
};

// channel_of: maps instance id -> channel slot (or -1 to drop channel
// bookkeeping); target ids mark in_target.
PrepareResult prepare_splats(const std::vector<Gaussian3D>& gaussians, const Camera& cam,
                             const RasterizeOptions& opts,
                             const std::vector<int>* channel_ids,
                             const std::vector<int>* target_ids);

struct TileGrid {
    int tile_size = 16;
    int tiles_x = 0, tiles_y = 0;
    std::vector<std::vector<int>> lists;  // per tile, prepared indices in order

    void build(const std::vector<PreparedSplat>& splats, int width, int height, int tile);
};

}  // namespace splatgraph::detail
