#include "splatgraph/json_util.hpp"

#include <fstream>
#include <sstream>

namespace splatgraph {

Vec3 vec3_from_json(const Json& j, const std::string& context) {
    if (!j.is_array() || j.size() != 3)
        throw ParseError(context + ": expected a 3-element array");
    for (const auto& v : j)
        if (!v.is_number()) throw ParseError(context + ": expected numbers");
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

Quat quat_from_json(const Json& j, const std::string& context) {
    if (!j.is_array() || j.size() != 4)
        throw ParseError(context + ": expected a 4-element array [w,x,y,z]");
    for (const auto& v : j)
        if (!v.is_number()) throw ParseError(context + ": expected numbers");
    return Quat(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>());
}

Pose pose_from_json(const Json& j, const std::string& context) {
    if (!j.is_object() || !j.contains("q") || !j.contains("t"))
        throw ParseError(context + ": expected {q, t}");
    Pose p;
    p.q = quat_from_json(j["q"], context + ".q");
    p.t = vec3_from_json(j["t"], context + ".t");
    return p;
}

Json parse_json(const std::string& text, const std::string& context) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(context + ": " + e.what());
    }
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_json(ss.str(), path);
}

void save_json_file(const Json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write to '" + path + "' failed");
}

double json_number(const Json& j, const char* key, const std::string& context) {
    if (!j.contains(key) || !j[key].is_number())
        throw ParseError(context + ": missing numeric field '" + std::string(key) + "'");
    return j[key].get<double>();
}

double json_number_or(const Json& j, const char* key, double fallback) {
    if (j.contains(key) && j[key].is_number()) return j[key].get<double>();
    return fallback;
}

}  // namespace splatgraph
