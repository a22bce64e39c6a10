#pragma once

#include <optional>

#include "splatgraph/types.hpp"

namespace splatgraph {

// A gaussian projected to the image plane via the local affine (EWA)
// approximation of the pinhole map.
struct Splat2D {
    Vec2 mean2d{0, 0};
    Mat2 cov2d = Mat2::Identity();  // SPD; includes the +0.3 px^2 floor
    double view_depth = 0;          // camera-frame z
    int source_index = -1;
};

// Pixel (ix, iy) is sampled at continuous coordinates (ix + 0.5, iy + 0.5).
// Returns nullopt when view_depth <= near or when the 3-sigma ellipse of the
// projected footprint misses the image rectangle entirely.
std::optional<Splat2D> project_gaussian(const Gaussian3D& g, const Camera& cam,
                                        double near = 0.01, int source_index = -1);

// Camera-frame covariance R_wc * Sigma_world * R_wc^T building block.
Mat3 world_covariance(const Gaussian3D& g);

// Jacobian of the pinhole projection at camera-frame point m (z > 0).
Mat23 projection_jacobian(const Camera& cam, const Vec3& m);

}  // namespace splatgraph
