#pragma once

#include <json.hpp>

#include "splatgraph/errors.hpp"
#include "splatgraph/pose.hpp"

namespace splatgraph {

// Ordered JSON everywhere: artifacts must serialize byte-identically across
// runs, so key order is fixed by insertion order, never by hashing.
using Json = nlohmann::ordered_json;

inline Json to_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

inline Json to_json(const Quat& q) { return Json::array({q.w(), q.x(), q.y(), q.z()}); }

inline Json to_json(const Pose& p) {
    Json j;
    j["q"] = to_json(p.q);
    j["t"] = to_json(p.t);
    return j;
}

Vec3 vec3_from_json(const Json& j, const std::string& context);
Quat quat_from_json(const Json& j, const std::string& context);
Pose pose_from_json(const Json& j, const std::string& context);

// Parse with a ParseError carrying byte/line context instead of nlohmann's
// exception type.
Json parse_json(const std::string& text, const std::string& context);
Json load_json_file(const std::string& path);
void save_json_file(const Json& j, const std::string& path);

double json_number(const Json& j, const char* key, const std::string& context);
double json_number_or(const Json& j, const char* key, double fallback);

}  // namespace splatgraph
