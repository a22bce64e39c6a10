#include "splatgraph/avo.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "splatgraph/errors.hpp"
#include "splatgraph/image.hpp"

namespace splatgraph {

namespace {

std::vector<int> single_target(int object_id) { return {object_id}; }

ViewLossTerms evaluate_terms(const std::vector<Gaussian3D>& gaussians, const Camera& cam,
                             const std::vector<int>& targets, double lambda,
                             double target_distance, const RasterizeOptions& render) {
    ViewGradient g =
        view_loss_gradient(gaussians, cam, targets, lambda, target_distance, render);
    return g.terms;
}

// Golden-angle spiral of directions around the target centroid, keeping the
// current distance. Probe 0 re-checks the starting pose.
Camera spiral_probe(const Camera& base, const Vec3& centroid, int probe, const Vec3& up) {
    if (probe == 0) return base;
    const double radius = std::max((base.pose.t - centroid).norm(), 1e-3);
    const int n = 64;
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    const double z = 1.0 - 2.0 * (probe + 0.5) / double(n);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * probe;
    const Vec3 dir(r * std::cos(phi), r * std::sin(phi), z);
    Camera cam = base;
    cam.pose = Camera::look_at(centroid + radius * dir, centroid, up);
    return cam;
}

struct RunResult {
    Pose pose;
    ViewLossTerms terms;
    std::vector<LossRecord> history;
    bool converged = false;
    bool visible = false;
};

RunResult optimize_one_restart(const std::vector<Gaussian3D>& gaussians, Camera cam,
                               const std::vector<int>& targets, double target_distance,
                               const ViewOptConfig& config,
                               const Vec3& centroid, const Vec3& up) {
    RunResult run;

    // Visibility recovery: the objective is flat when the target contributes
    // no pixels, so probe alternative directions before giving up.
    {
        ViewLossTerms t = evaluate_terms(gaussians, cam, targets, config.lambda_depth,
                                         target_distance, config.render);
        if (t.object_pixels == 0) {
            bool found = false;
            for (int probe = 1; probe < 64 && !found; ++probe) {
                Camera c = spiral_probe(cam, centroid, probe, up);
                ViewLossTerms pt = evaluate_terms(gaussians, c, targets, config.lambda_depth,
                                                  target_distance, config.render);
                if (pt.object_pixels > 0) {
                    cam = c;
                    found = true;
                }
            }
            if (!found) return run;  // run.visible stays false
        }
    }
    run.visible = true;

    Vec6 m = Vec6::Zero(), v = Vec6::Zero();
    Vec6 lr;
    lr << config.step_rotation, config.step_rotation, config.step_rotation,
        config.step_translation, config.step_translation, config.step_translation;

    Pose pose = cam.pose;
    double best_loss = std::numeric_limits<double>::infinity();
    std::vector<double> loss_trace;
    loss_trace.reserve(size_t(config.iterations));

    for (int it = 0; it < config.iterations; ++it) {
        Camera current = cam;
        current.pose = pose;
        ViewGradient g = view_loss_gradient(gaussians, current, targets, config.lambda_depth,
                                            target_distance, config.render);
        if (g.terms.object_pixels == 0) break;  // stepped blind; keep best so far

        run.history.push_back(LossRecord{g.terms.loss_information, g.terms.loss_depth});
        loss_trace.push_back(g.terms.loss_total);
        if (g.terms.loss_total < best_loss) {
            best_loss = g.terms.loss_total;
            run.pose = pose;
            run.terms = g.terms;
        }

        if (g.dpose.norm() < config.grad_tol) {
            run.converged = true;
            break;
        }
        const size_t n = loss_trace.size();
        if (int(n) > config.loss_change_window) {
            const double prev = loss_trace[n - 1 - size_t(config.loss_change_window)];
            const double rel = std::abs(loss_trace[n - 1] - prev) / std::max(1.0, std::abs(prev));
            if (rel < config.loss_change_tol) {
                run.converged = true;
                break;
            }
        }

        const double b1t = 1.0 - std::pow(config.beta1, it + 1);
        const double b2t = 1.0 - std::pow(config.beta2, it + 1);
        m = config.beta1 * m + (1.0 - config.beta1) * g.dpose;
        v = config.beta2 * v + (1.0 - config.beta2) * g.dpose.cwiseProduct(g.dpose);
        Vec6 step;
        for (int i = 0; i < 6; ++i) {
            const double mh = m[i] / b1t;
            const double vh = v[i] / b2t;
            step[i] = -lr[i] * mh / (std::sqrt(vh) + 1e-8);
        }
        pose = pose.boxplus_left(step);
    }

    if (!std::isfinite(best_loss)) {
        // No iteration saw the target (possible when the recovery probe's view
        // immediately steps blind); fall back to the probe pose.
        Camera current = cam;
        run.pose = cam.pose;
        run.terms = evaluate_terms(gaussians, current, targets, config.lambda_depth,
                                   target_distance, config.render);
    }
    return run;
}

std::string target_label(const std::vector<int>& targets) {
    std::string s;
    for (size_t i = 0; i < targets.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(targets[i]);
    }
    return s;
}

}  // namespace

void validate_config(const ViewOptConfig& config) {
    if (config.iterations <= 0) throw ValidationError("config: iterations must be > 0");
    if (!(config.eta > 0.0 && config.eta < 1.0))
        throw ValidationError("config: eta must lie in (0,1)");
    if (config.max_views < 1) throw ValidationError("config: max_views must be >= 1");
    if (!(config.depth_coefficient > 0.0))
        throw ValidationError("config: depth_coefficient must be > 0");
    if (config.image_width <= 0 || config.image_height <= 0)
        throw ValidationError("config: image size must be positive");
    if (config.restarts < 1) throw ValidationError("config: restarts must be >= 1");
}

double loss_ig(const Scene& scene, int object_id, const Camera& cam,
               const std::vector<double>* effective_opacities,
               const RasterizeOptions& render) {
    scene.object_or_throw(object_id);
    RasterizeOptions opts = render;
    opts.effective_opacities = effective_opacities;
    RenderBuffers buffers = rasterize(scene.gaussians, cam, opts);
    return -object_information(buffers, object_id);
}

double loss_depth(const Scene& scene, int object_id, const Camera& cam,
                  const ViewOptConfig& config) {
    scene.object_or_throw(object_id);
    RenderBuffers buffers = rasterize(scene.gaussians, cam, config.render);
    const double d_target =
        target_distance_for(scene, single_target(object_id), config.depth_coefficient);
    ViewLossTerms terms =
        view_loss_terms(buffers, single_target(object_id), config.lambda_depth, d_target);
    return terms.loss_depth;
}

Vec6 pose_gradient(const Scene& scene, int object_id, const Camera& cam,
                   const ViewOptConfig& config,
                   const std::vector<double>* effective_opacities) {
    scene.object_or_throw(object_id);
    RasterizeOptions opts = config.render;
    opts.effective_opacities = effective_opacities;
    const double d_target =
        target_distance_for(scene, single_target(object_id), config.depth_coefficient);
    return view_loss_gradient(scene.gaussians, cam, single_target(object_id),
                              config.lambda_depth, d_target, opts)
        .dpose;
}

Camera resize_camera(const Camera& cam, int width, int height) {
    Camera out = cam;
    const double sx = double(width) / double(cam.width);
    const double sy = double(height) / double(cam.height);
    out.fx = cam.fx * sx;
    out.fy = cam.fy * sy;
    out.cx = cam.cx * sx;
    out.cy = cam.cy * sy;
    out.width = width;
    out.height = height;
    return out;
}

OptimizedView optimize_single_view(const Scene& scene, const std::vector<int>& target_ids,
                                   const Camera& init, const ViewOptConfig& config,
                                   const std::vector<double>* effective_opacities) {
    validate_config(config);
    if (target_ids.empty()) throw ValidationError("optimize_single_view: empty target set");
    for (int id : target_ids) scene.object_or_throw(id);
    std::vector<int> targets = target_ids;
    std::sort(targets.begin(), targets.end());

    RasterizeOptions render = config.render;
    render.effective_opacities = effective_opacities;
    ViewOptConfig cfg = config;
    cfg.render = render;

    const double d_target = target_distance_for(scene, targets, config.depth_coefficient);
    const Camera base = resize_camera(init, config.image_width, config.image_height);

    // Target centroid anchors the restart poses and the recovery spiral.
    Vec3 centroid = Vec3::Zero();
    {
        double n = 0;
        for (int id : targets) {
            centroid += scene.object_or_throw(id).centroid;
            n += 1;
        }
        centroid /= n;
    }
    const Vec3 up = scene.up_axis;
    Rng rng(config.seed ^ 0x9e3779b97f4a7c15ull);

    RunResult best;
    bool have = false;
    bool any_visible = false;
    for (int r = 0; r < config.restarts; ++r) {
        Camera start = base;
        if (r == 1) {
            // Antipodal reflection through the centroid: reaches the far side
            // of sheet-like objects, which gradient flow cannot cross.
            const Vec3 p = 2.0 * centroid - base.pose.t;
            start.pose = Camera::look_at(p, centroid, up);
        } else if (r >= 2) {
            Rng sub = rng.fork(std::uint64_t(r));
            const double radius = std::max((base.pose.t - centroid).norm(), 1e-3);
            const Vec3 dir = sub.unit_vector();
            start.pose = Camera::look_at(centroid + radius * dir, centroid, up);
        }
        RunResult run = optimize_one_restart(scene.gaussians, start, targets, d_target, cfg,
                                             centroid, up);
        if (!run.visible) continue;
        any_visible = true;
        if (!have || run.terms.loss_total < best.terms.loss_total) {
            best = std::move(run);
            have = true;
        }
    }
    if (!any_visible)
        throw OptimizationError("object " + target_label(targets) +
                                " not visible from any probe pose");

    OptimizedView out;
    out.camera = base;
    out.camera.pose = best.pose;
    out.information = best.terms.information;
    out.loss_total = best.terms.loss_total;
    out.loss_history = std::move(best.history);
    out.converged = best.converged;
    return out;
}

Camera select_init_view(const Scene& scene, const std::vector<int>& target_ids,
                        const std::vector<Camera>& candidates) {
    if (candidates.empty()) throw ValidationError("select_init_view: no candidates");
    std::vector<int> targets = target_ids;
    std::sort(targets.begin(), targets.end());

    double best = 0.0;
    int best_index = -1;
    for (size_t i = 0; i < candidates.size(); ++i) {
        RenderBuffers buffers = rasterize(scene.gaussians, candidates[i], RasterizeOptions{});
        ViewLossTerms terms = view_loss_terms(buffers, targets, 0.0, 0.0);
        if (terms.information > best) {
            best = terms.information;
            best_index = int(i);
        }
    }
    if (best_index < 0)
        throw OptimizationError("object " + target_label(targets) +
                                " not visible from any candidate view");
    return candidates[size_t(best_index)];
}

ExpansionState expand_views(const Scene& scene, int object_id, const Camera& init,
                            const ViewOptConfig& config) {
    validate_config(config);
    const ObjectInstance& obj = scene.object_or_throw(object_id);

    ExpansionState state;
    state.effective_opacities.resize(scene.gaussians.size());
    for (size_t i = 0; i < scene.gaussians.size(); ++i)
        state.effective_opacities[i] = scene.gaussians[i].opacity;

    double initial_sum = 0.0;
    for (size_t gi : obj.gaussian_indices) initial_sum += scene.gaussians[gi].opacity;
    if (initial_sum <= 0.0) return state;  // nothing to cover

    Rng rng(config.seed ^ 0xda3e39cb94b95bdbull);
    const std::vector<int> targets = {object_id};

    for (int k = 1; k <= config.max_views; ++k) {
        Camera start = init;
        if (k >= 2) {
            // Fresh start near the original init; the optimizer's own restarts
            // handle larger moves.
            Rng sub = rng.fork(std::uint64_t(k));
            const Vec3 axis = sub.unit_vector();
            const double angle = sub.uniform(0.2, 0.6);
            const Vec3 c = obj.centroid;
            const Vec3 rel = init.pose.t - c;
            const Vec3 p = c + quat_exp(angle * axis) * rel;
            start.pose = Camera::look_at(p, c, scene.up_axis);
        }
        OptimizedView view =
            optimize_single_view(scene, targets, start, config, &state.effective_opacities);

        // Rendered coverage of this view decays the remaining opacity.
        RasterizeOptions opts = config.render;
        opts.effective_opacities = &state.effective_opacities;
        RenderBuffers buffers = rasterize(scene.gaussians, view.camera, opts);
        for (size_t gi : obj.gaussian_indices) {
            const double seen = clamp01(buffers.per_gaussian_contribution[gi]);
            state.effective_opacities[gi] *= 1.0 - seen;
        }

        double remaining = 0.0;
        for (size_t gi : obj.gaussian_indices) remaining += state.effective_opacities[gi];
        state.residual_fraction = remaining / initial_sum;
        state.residual_history.push_back(state.residual_fraction);
        state.views.push_back(std::move(view));
        if (state.residual_fraction < config.eta) break;
    }
    return state;
}

Json camera_to_json(const Camera& cam) {
    Json j;
    j["fx"] = cam.fx;
    j["fy"] = cam.fy;
    j["cx"] = cam.cx;
    j["cy"] = cam.cy;
    j["width"] = cam.width;
    j["height"] = cam.height;
    j["pose"] = to_json(cam.pose);
    return j;
}

Camera camera_from_json(const Json& j) {
    Camera cam;
    cam.fx = json_number(j, "fx", "camera");
    cam.fy = json_number(j, "fy", "camera");
    cam.cx = json_number(j, "cx", "camera");
    cam.cy = json_number(j, "cy", "camera");
    cam.width = int(json_number(j, "width", "camera"));
    cam.height = int(json_number(j, "height", "camera"));
    if (!j.contains("pose")) throw ParseError("camera: missing field 'pose'");
    cam.pose = pose_from_json(j.at("pose"), "camera.pose");
    validate_camera(cam);
    return cam;
}

std::vector<std::string> export_condition_images(const Scene& scene,
                                                 const std::vector<OptimizedView>& views,
                                                 int object_id, const std::string& out_dir,
                                                 int export_size) {
    const ObjectInstance& obj = scene.object_or_throw(object_id);
    std::vector<std::string> written;
    if (views.empty()) return written;

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create directory " + out_dir + ": " + ec.message());

    std::vector<Gaussian3D> object_only;
    object_only.reserve(obj.gaussian_indices.size());
    for (size_t gi : obj.gaussian_indices) object_only.push_back(scene.gaussians[gi]);

    for (size_t k = 0; k < views.size(); ++k) {
        const Camera cam = resize_camera(views[k].camera, export_size, export_size);
        RasterizeOptions opts;
        opts.accumulate_color = true;
        RenderBuffers buffers = rasterize(object_only, cam, opts);
        ImageRGBA8 img = buffers_to_rgba(buffers);

        char name[64];
        std::snprintf(name, sizeof(name), "view_%03zu", k);
        const std::string png_path = out_dir + "/" + std::string(name) + ".png";
        write_png(img, png_path);
        save_json_file(camera_to_json(cam), out_dir + "/" + std::string(name) + ".json");
        written.push_back(png_path);
    }
    return written;
}

}  // namespace splatgraph
