#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace splatgraph::ply {

// Minimal PLY reader/writer: scalar and list properties, ascii and
// binary_little_endian formats. Values are surfaced as doubles (int32 fits
// exactly). Unknown elements are parsed and retained so that the byte stream
// is always consumed correctly.

enum class ScalarType { I8, U8, I16, U16, I32, U32, F32, F64 };

ScalarType scalar_type_from_name(const std::string& name, const std::string& context);
const char* scalar_type_name(ScalarType t);
size_t scalar_type_size(ScalarType t);

struct Property {
    std::string name;
    ScalarType type = ScalarType::F64;
    bool is_list = false;
    ScalarType count_type = ScalarType::U8;
};

struct Element {
    std::string name;
    size_t count = 0;
    std::vector<Property> properties;
    // columns[i] holds count values for scalar property i (empty for lists).
    std::vector<std::vector<double>> columns;
    // list_rows[i][r] holds the list for property i at row r (empty for scalars).
    std::vector<std::vector<std::vector<double>>> list_rows;

    const std::vector<double>* column(const std::string& prop_name) const;
};

struct File {
    bool binary = true;
    std::vector<Element> elements;
    // Full header lines, keyword included ("comment ..." or "obj_info ...").
    std::vector<std::string> comments;

    const Element* element(const std::string& name) const;
};

File read_file(const std::string& path);
File read_stream(std::istream& in, const std::string& context_name);

void write_file(const File& file, const std::string& path);
void write_stream(const File& file, std::ostream& out);

}  // namespace splatgraph::ply
