#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "splatgraph/gradient.hpp"
#include "splatgraph/json_util.hpp"
#include "splatgraph/losses.hpp"

namespace splatgraph {

// Settings for view optimization and multi-view expansion.
struct ViewOptConfig {
    int iterations = 300;
    double step_rotation = 5e-3;
    double step_translation = 2e-2;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double lambda_depth = 1.0;
    double depth_coefficient = 2.0;  // scales object size into the preferred distance
    int max_views = 4;
    double eta = 0.1;  // expansion stops when residual_fraction drops below this
    int image_width = 256;
    int image_height = 256;
    std::uint64_t seed = 0;
    int restarts = 3;
    double grad_tol = 1e-4;
    double loss_change_tol = 1e-5;
    int loss_change_window = 20;
    RasterizeOptions render;
};

void validate_config(const ViewOptConfig& config);

struct LossRecord {
    double loss_information = 0;
    double loss_depth = 0;
};

struct OptimizedView {
    Camera camera;
    double information = 0;  // total target contribution at the returned pose
    double loss_total = 0;
    std::vector<LossRecord> loss_history;  // winning restart only
    bool converged = false;
};

struct ExpansionState {
    // One entry per scene gaussian; entries outside the target keep their
    // intrinsic opacity, target entries decay multiplicatively per view.
    std::vector<double> effective_opacities;
    std::vector<OptimizedView> views;
    double residual_fraction = 1.0;
    std::vector<double> residual_history;  // value after each accepted view
};

// Single-object wrappers around the view objective.
double loss_ig(const Scene& scene, int object_id, const Camera& cam,
               const std::vector<double>* effective_opacities = nullptr,
               const RasterizeOptions& render = {});
double loss_depth(const Scene& scene, int object_id, const Camera& cam,
                  const ViewOptConfig& config);
Vec6 pose_gradient(const Scene& scene, int object_id, const Camera& cam,
                   const ViewOptConfig& config,
                   const std::vector<double>* effective_opacities = nullptr);

// Returns a copy of `cam` with intrinsics rescaled to the given resolution.
Camera resize_camera(const Camera& cam, int width, int height);

// Gradient descent over the camera pose for the listed target objects, with
// restarts and a visibility-recovery probe when the target contributes no
// pixels. Returns the lowest-loss pose encountered across restarts.
OptimizedView optimize_single_view(const Scene& scene, const std::vector<int>& target_ids,
                                   const Camera& init, const ViewOptConfig& config,
                                   const std::vector<double>* effective_opacities = nullptr);

// Highest-information candidate; ties broken by lowest index. Throws
// OptimizationError when no candidate sees the target at all.
Camera select_init_view(const Scene& scene, const std::vector<int>& target_ids,
                        const std::vector<Camera>& candidates);

// Multi-view expansion with per-gaussian opacity decay.
ExpansionState expand_views(const Scene& scene, int object_id, const Camera& init,
                            const ViewOptConfig& config);

// Object-only renders (color + composited alpha) and camera JSON per view.
// Returns the written image paths.
std::vector<std::string> export_condition_images(const Scene& scene,
                                                 const std::vector<OptimizedView>& views,
                                                 int object_id, const std::string& out_dir,
                                                 int export_size = 512);

// Camera described as JSON (intrinsics, size, pose) and back.
Json camera_to_json(const Camera& cam);
Camera camera_from_json(const Json& j);

}  // namespace splatgraph
