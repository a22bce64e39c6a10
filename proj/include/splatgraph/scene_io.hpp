#pragma once

#include <string>

#include "splatgraph/types.hpp"

namespace splatgraph {

// A scene is stored as "<stem>.ply" (one splat per vertex) plus a JSON
// sidecar "<stem>.json" carrying objects, base entities and the up axis.
// docs/formats.md documents both layouts field by field.

enum class ValueEncoding {
    Linear,   // values stored as-is (the native layout)
    Log,      // scales stored as log(sigma); converted on load
    Logit     // opacity stored as logit(alpha); converted on load
};

struct SceneIoOptions {
    bool binary = true;               // write binary_little_endian vs ascii
    ValueEncoding scale_encoding = ValueEncoding::Linear;    // load-time only
    ValueEncoding opacity_encoding = ValueEncoding::Linear;  // load-time only
    bool validate = true;
};

// ply_path must end in ".ply"; the sidecar path is derived from it.
std::string sidecar_path_for(const std::string& ply_path);

Scene load_scene(const std::string& ply_path, const SceneIoOptions& opts = {});
void save_scene(const Scene& scene, const std::string& ply_path,
                const SceneIoOptions& opts = {});

}  // namespace splatgraph
