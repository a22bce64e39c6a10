#include "splatgraph/scene_io.hpp"

#include <cmath>
#include <map>

#include "splatgraph/json_util.hpp"
#include "splatgraph/ply.hpp"

namespace splatgraph {

namespace {

const char* kVertexProps[] = {"x", "y", "z", "scale_0", "scale_1", "scale_2",
                              "rot_0", "rot_1", "rot_2", "rot_3", "opacity",
                              "f_dc_0", "f_dc_1", "f_dc_2"};

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

std::string sidecar_path_for(const std::string& ply_path) {
    if (ply_path.size() < 4 || ply_path.substr(ply_path.size() - 4) != ".ply")
        throw ValidationError("scene path must end in .ply: '" + ply_path + "'");
    return ply_path.substr(0, ply_path.size() - 4) + ".json";
}

Scene load_scene(const std::string& ply_path, const SceneIoOptions& opts) {
    ply::File file = ply::read_file(ply_path);
    const ply::Element* vertex = file.element("vertex");
    if (!vertex) throw ParseError(ply_path + ": no 'vertex' element");

    std::map<std::string, const std::vector<double>*> cols;
    for (const char* name : kVertexProps) {
        const std::vector<double>* c = vertex->column(name);
        if (!c && std::string(name).rfind("f_dc_", 0) != 0)
            throw ParseError(ply_path + ": vertex element lacks property '" +
                             std::string(name) + "'");
        if (c) cols[name] = c;
    }
    const std::vector<double>* instance_col = vertex->column("instance_id");
    if (!instance_col)
        throw ParseError(ply_path + ": vertex element lacks property 'instance_id'");

    Scene scene;
    scene.gaussians.resize(vertex->count);
    for (size_t i = 0; i < vertex->count; ++i) {
        Gaussian3D& g = scene.gaussians[i];
        g.mean = Vec3((*cols["x"])[i], (*cols["y"])[i], (*cols["z"])[i]);
        g.scale = Vec3((*cols["scale_0"])[i], (*cols["scale_1"])[i], (*cols["scale_2"])[i]);
        if (opts.scale_encoding == ValueEncoding::Log)
            g.scale = g.scale.array().exp().matrix();
        g.rotation = Quat((*cols["rot_0"])[i], (*cols["rot_1"])[i], (*cols["rot_2"])[i],
                          (*cols["rot_3"])[i]);
        const double qn = g.rotation.norm();
        if (qn <= 0)
            throw ParseError(ply_path + ": vertex " + std::to_string(i) +
                             ": zero rotation quaternion");
        if (std::abs(qn - 1.0) > 1e-6) g.rotation.coeffs() /= qn;
        g.opacity = (*cols["opacity"])[i];
        if (opts.opacity_encoding == ValueEncoding::Logit) g.opacity = sigmoid(g.opacity);
        if (cols.count("f_dc_0") && cols.count("f_dc_1") && cols.count("f_dc_2"))
            g.color = Vec3((*cols["f_dc_0"])[i], (*cols["f_dc_1"])[i], (*cols["f_dc_2"])[i]);
        g.instance_id = int((*instance_col)[i]);
        if (!(g.scale.x() > 0 && g.scale.y() > 0 && g.scale.z() > 0))
            throw ValidationError(
                ply_path + ": vertex " + std::to_string(i) +
                ": scale must be positive (log-encoded input? load with scale_encoding=log)");
    }

    const std::string sidecar = sidecar_path_for(ply_path);
    const Json j = load_json_file(sidecar);
    if (j.contains("up_axis")) scene.up_axis = vec3_from_json(j["up_axis"], sidecar + ": up_axis");
    if (j.contains("base_entities")) {
        for (size_t k = 0; k < j["base_entities"].size(); ++k) {
            const Json& bj = j["base_entities"][k];
            const std::string ctx = sidecar + ": base_entities[" + std::to_string(k) + "]";
            BaseEntity b;
            if (!bj.contains("name") || !bj["name"].is_string())
                throw ParseError(ctx + ": missing name");
            b.name = bj["name"].get<std::string>();
            b.point = vec3_from_json(bj.at("point"), ctx + ".point");
            b.normal = vec3_from_json(bj.at("normal"), ctx + ".normal");
            scene.base_entities.push_back(std::move(b));
        }
    }

    // Index sets are rebuilt from the instance tags; the sidecar stores only
    // per-object metadata.
    std::map<int, std::vector<int>> members;
    for (size_t i = 0; i < scene.gaussians.size(); ++i)
        if (scene.gaussians[i].instance_id > 0)
            members[scene.gaussians[i].instance_id].push_back(int(i));

    if (j.contains("objects")) {
        for (size_t k = 0; k < j["objects"].size(); ++k) {
            const Json& oj = j["objects"][k];
            const std::string ctx = sidecar + ": objects[" + std::to_string(k) + "]";
            ObjectInstance o;
            o.id = int(json_number(oj, "id", ctx));
            if (oj.contains("label")) o.label = oj["label"].get<std::string>();
            o.centroid = vec3_from_json(oj.at("centroid"), ctx + ".centroid");
            o.size = vec3_from_json(oj.at("size"), ctx + ".size");
            o.pose = pose_from_json(oj.at("pose"), ctx + ".pose");
            if (oj.contains("material")) o.material = oj["material"].get<std::string>();
            o.mass = json_number_or(oj, "mass", 1.0);
            o.center_of_mass = oj.contains("center_of_mass")
                                   ? vec3_from_json(oj["center_of_mass"], ctx + ".center_of_mass")
                                   : o.centroid;
            if (oj.contains("asset_ref")) o.asset_ref = oj["asset_ref"].get<std::string>();
            auto it = members.find(o.id);
            if (it == members.end())
                throw ValidationError(sidecar + ": object " + std::to_string(o.id) +
                                      " has no gaussians tagged with its id");
            o.gaussian_indices = it->second;
            scene.objects.push_back(std::move(o));
        }
    }

    if (opts.validate) validate_scene(scene);
    return scene;
}

void save_scene(const Scene& scene, const std::string& ply_path, const SceneIoOptions& opts) {
    if (opts.validate) validate_scene(scene);

    ply::File file;
    file.binary = opts.binary;
    ply::Element vertex;
    vertex.name = "vertex";
    vertex.count = scene.gaussians.size();
    for (const char* name : kVertexProps)
        vertex.properties.push_back({name, ply::ScalarType::F64, false, ply::ScalarType::U8});
    vertex.properties.push_back({"instance_id", ply::ScalarType::I32, false, ply::ScalarType::U8});
    vertex.columns.assign(vertex.properties.size(), {});
    vertex.list_rows.assign(vertex.properties.size(), {});
    for (auto& col : vertex.columns) col.reserve(vertex.count);
    for (const Gaussian3D& g : scene.gaussians) {
        size_t c = 0;
        for (double v : {g.mean.x(), g.mean.y(), g.mean.z(), g.scale.x(), g.scale.y(),
                         g.scale.z(), g.rotation.w(), g.rotation.x(), g.rotation.y(),
                         g.rotation.z(), g.opacity, g.color.x(), g.color.y(), g.color.z()})
            vertex.columns[c++].push_back(v);
        vertex.columns[c].push_back(double(g.instance_id));
    }
    file.elements.push_back(std::move(vertex));
    ply::write_file(file, ply_path);

    Json j;
    j["format_version"] = 1;
    j["up_axis"] = to_json(scene.up_axis);
    j["base_entities"] = Json::array();
    for (const BaseEntity& b : scene.base_entities) {
        Json bj;
        bj["name"] = b.name;
        bj["point"] = to_json(b.point);
        bj["normal"] = to_json(b.normal);
        j["base_entities"].push_back(std::move(bj));
    }
    j["objects"] = Json::array();
    for (const ObjectInstance& o : scene.objects) {
        Json oj;
        oj["id"] = o.id;
        oj["label"] = o.label;
        oj["centroid"] = to_json(o.centroid);
        oj["size"] = to_json(o.size);
        oj["pose"] = to_json(o.pose);
        oj["material"] = o.material;
        oj["mass"] = o.mass;
        oj["center_of_mass"] = to_json(o.center_of_mass);
        oj["asset_ref"] = o.asset_ref;
        j["objects"].push_back(std::move(oj));
    }
    save_json_file(j, sidecar_path_for(ply_path));
}

}  // namespace splatgraph
