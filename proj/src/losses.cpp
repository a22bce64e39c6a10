#include "splatgraph/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "splatgraph/errors.hpp"

namespace splatgraph {

ViewLossTerms view_loss_terms(const RenderBuffers& buffers, const std::vector<int>& target_ids,
                              double lambda_depth, double target_distance) {
    std::vector<int> channels;
    channels.reserve(target_ids.size());
    for (int id : target_ids) {
        const int c = buffers.channel_index(id);
        if (c >= 0) channels.push_back(c);
    }

    ViewLossTerms out;
    const size_t npix = size_t(buffers.width) * size_t(buffers.height);
    for (size_t pix = 0; pix < npix; ++pix) {
        double u = 0.0, v = 0.0;
        for (int c : channels) {
            u += buffers.contribution[size_t(c)].data[pix];
            v += buffers.weighted_depth[size_t(c)].data[pix];
        }
        if (u <= buffers.contribution_threshold) continue;
        ++out.object_pixels;
        out.information += u;
        const double d = v / u - target_distance;
        out.depth_error += d * d;
    }
    out.loss_information = -out.information;
    if (out.object_pixels > 0)
        out.loss_depth = lambda_depth / double(out.object_pixels) * out.depth_error;
    out.loss_total = out.loss_information + out.loss_depth;
    return out;
}

double object_information(const RenderBuffers& buffers, int object_id) {
    const int c = buffers.channel_index(object_id);
    if (c < 0)
        throw NotFoundError("object " + std::to_string(object_id) + " not in rendered scene");
    double total = 0.0;
    const ImageF& contrib = buffers.contribution[size_t(c)];
    for (double v : contrib.data)
        if (v > buffers.contribution_threshold) total += v;
    return total;
}

ObjectDepthStats object_depth_stats(const RenderBuffers& buffers, int object_id) {
    const int c = buffers.channel_index(object_id);
    if (c < 0)
        throw NotFoundError("object " + std::to_string(object_id) + " not in rendered scene");
    ObjectDepthStats out;
    const ImageF& contrib = buffers.contribution[size_t(c)];
    const ImageF& wd = buffers.weighted_depth[size_t(c)];
    double sum = 0.0;
    for (size_t pix = 0; pix < contrib.data.size(); ++pix) {
        const double u = contrib.data[pix];
        if (u <= buffers.contribution_threshold) continue;
        const double d = wd.data[pix] / u;
        out.depths.push_back(d);
        sum += d;
    }
    out.pixels = int(out.depths.size());
    if (out.pixels > 0) out.mean = sum / double(out.pixels);
    return out;
}

double target_distance_for(const Scene& scene, const std::vector<int>& object_ids,
                           double kappa) {
    if (object_ids.empty()) throw ValidationError("target_distance_for: empty object set");
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (int id : object_ids) {
        const ObjectInstance& obj = scene.object_or_throw(id);
        lo = lo.cwiseMin(obj.centroid - 0.5 * obj.size);
        hi = hi.cwiseMax(obj.centroid + 0.5 * obj.size);
    }
    return kappa * (hi - lo).norm();
}

}  // namespace splatgraph
