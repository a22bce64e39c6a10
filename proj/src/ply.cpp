#include "splatgraph/ply.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "splatgraph/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "binary PLY path assumes a little-endian host");

namespace splatgraph::ply {

ScalarType scalar_type_from_name(const std::string& name, const std::string& context) {
    if (name == "char" || name == "int8") return ScalarType::I8;
    if (name == "uchar" || name == "uint8") return ScalarType::U8;
    if (name == "short" || name == "int16") return ScalarType::I16;
    if (name == "ushort" || name == "uint16") return ScalarType::U16;
    if (name == "int" || name == "int32") return ScalarType::I32;
    if (name == "uint" || name == "uint32") return ScalarType::U32;
    if (name == "float" || name == "float32") return ScalarType::F32;
    if (name == "double" || name == "float64") return ScalarType::F64;
    throw ParseError(context + ": unknown PLY scalar type '" + name + "'");
}

const char* scalar_type_name(ScalarType t) {
    switch (t) {
        case ScalarType::I8: return "char";
        case ScalarType::U8: return "uchar";
        case ScalarType::I16: return "short";
        case ScalarType::U16: return "ushort";
        case ScalarType::I32: return "int";
        case ScalarType::U32: return "uint";
        case ScalarType::F32: return "float";
        case ScalarType::F64: return "double";
    }
    return "double";
}

size_t scalar_type_size(ScalarType t) {
    switch (t) {
        case ScalarType::I8:
        case ScalarType::U8: return 1;
        case ScalarType::I16:
        case ScalarType::U16: return 2;
        case ScalarType::I32:
        case ScalarType::U32:
        case ScalarType::F32: return 4;
        case ScalarType::F64: return 8;
    }
    return 8;
}

const std::vector<double>* Element::column(const std::string& prop_name) const {
    for (size_t i = 0; i < properties.size(); ++i)
        if (properties[i].name == prop_name && !properties[i].is_list) return &columns[i];
    return nullptr;
}

const Element* File::element(const std::string& name) const {
    for (const Element& e : elements)
        if (e.name == name) return &e;
    return nullptr;
}

namespace {

double read_binary_scalar(std::istream& in, ScalarType t, const std::string& context) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), std::streamsize(scalar_type_size(t)));
    if (!in) throw ParseError(context + ": unexpected end of file");
    switch (t) {
        case ScalarType::I8: return double(*reinterpret_cast<int8_t*>(buf));
        case ScalarType::U8: return double(buf[0]);
        case ScalarType::I16: { int16_t v; std::memcpy(&v, buf, 2); return double(v); }
        case ScalarType::U16: { uint16_t v; std::memcpy(&v, buf, 2); return double(v); }
        case ScalarType::I32: { int32_t v; std::memcpy(&v, buf, 4); return double(v); }
        case ScalarType::U32: { uint32_t v; std::memcpy(&v, buf, 4); return double(v); }
        case ScalarType::F32: { float v; std::memcpy(&v, buf, 4); return double(v); }
        case ScalarType::F64: { double v; std::memcpy(&v, buf, 8); return v; }
    }
    return 0;
}

void write_binary_scalar(std::ostream& out, ScalarType t, double value) {
    unsigned char buf[8];
    size_t n = scalar_type_size(t);
    switch (t) {
        case ScalarType::I8: { int8_t v = int8_t(value); std::memcpy(buf, &v, 1); break; }
        case ScalarType::U8: { uint8_t v = uint8_t(value); std::memcpy(buf, &v, 1); break; }
        case ScalarType::I16: { int16_t v = int16_t(value); std::memcpy(buf, &v, 2); break; }
        case ScalarType::U16: { uint16_t v = uint16_t(value); std::memcpy(buf, &v, 2); break; }
        case ScalarType::I32: { int32_t v = int32_t(value); std::memcpy(buf, &v, 4); break; }
        case ScalarType::U32: { uint32_t v = uint32_t(value); std::memcpy(buf, &v, 4); break; }
        case ScalarType::F32: { float v = float(value); std::memcpy(buf, &v, 4); break; }
        case ScalarType::F64: std::memcpy(buf, &value, 8); break;
    }
    out.write(reinterpret_cast<const char*>(buf), std::streamsize(n));
}

double parse_ascii_number(std::istream& line, const std::string& context) {
    std::string tok;
    if (!(line >> tok)) throw ParseError(context + ": missing value");
    try {
        size_t pos = 0;
        double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ParseError(context + ": expected number, got '" + tok + "'");
    }
}

}  // namespace

File read_stream(std::istream& in, const std::string& name) {
    File file;
    std::string line;
    size_t line_no = 0;
    auto ctx = [&]() { return name + ":" + std::to_string(line_no); };

    auto next_line = [&]() -> std::string& {
        if (!std::getline(in, line)) throw ParseError(ctx() + ": truncated header");
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    };

    next_line();
    if (line != "ply") throw ParseError(ctx() + ": missing 'ply' magic");

    bool have_format = false;
    for (;;) {
        next_line();
        std::istringstream ls(line);
        std::string kw;
        ls >> kw;
        if (kw == "comment" || kw == "obj_info") {
            file.comments.push_back(line);
        } else if (kw == "format") {
            std::string fmt, version;
            ls >> fmt >> version;
            if (fmt == "binary_little_endian") file.binary = true;
            else if (fmt == "ascii") file.binary = false;
            else throw ParseError(ctx() + ": unsupported format '" + fmt + "'");
            have_format = true;
        } else if (kw == "element") {
            Element e;
            if (!(ls >> e.name >> e.count))
                throw ParseError(ctx() + ": malformed element declaration");
            file.elements.push_back(std::move(e));
        } else if (kw == "property") {
            if (file.elements.empty())
                throw ParseError(ctx() + ": property before any element");
            std::string t1;
            if (!(ls >> t1)) throw ParseError(ctx() + ": malformed property");
            Property p;
            if (t1 == "list") {
                std::string ct, vt;
                if (!(ls >> ct >> vt >> p.name))
                    throw ParseError(ctx() + ": malformed list property");
                p.is_list = true;
                p.count_type = scalar_type_from_name(ct, ctx());
                p.type = scalar_type_from_name(vt, ctx());
            } else {
                if (!(ls >> p.name)) throw ParseError(ctx() + ": malformed property");
                p.type = scalar_type_from_name(t1, ctx());
            }
            file.elements.back().properties.push_back(p);
        } else if (kw == "end_header") {
            break;
        } else if (kw.empty()) {
            continue;
        } else {
            throw ParseError(ctx() + ": unknown header keyword '" + kw + "'");
        }
    }
    if (!have_format) throw ParseError(name + ": header has no format line");

    for (Element& e : file.elements) {
        e.columns.assign(e.properties.size(), {});
        e.list_rows.assign(e.properties.size(), {});
        for (size_t i = 0; i < e.properties.size(); ++i) {
            if (e.properties[i].is_list) e.list_rows[i].resize(e.count);
            else e.columns[i].reserve(e.count);
        }
        for (size_t r = 0; r < e.count; ++r) {
            std::istringstream ls;
            if (!file.binary) {
                if (!std::getline(in, line))
                    throw ParseError(name + ": " + e.name + " " + std::to_string(r) +
                                     ": unexpected end of file");
                ++line_no;
                ls.str(line);
            }
            for (size_t i = 0; i < e.properties.size(); ++i) {
                const Property& p = e.properties[i];
                const std::string where = name + (file.binary ? "" : ":" + std::to_string(line_no)) +
                                          ": " + e.name + " " + std::to_string(r) +
                                          ", property '" + p.name + "'";
                if (p.is_list) {
                    double cnt = file.binary ? read_binary_scalar(in, p.count_type, where)
                                             : parse_ascii_number(ls, where);
                    if (cnt < 0 || cnt > 1e9) throw ParseError(where + ": bad list count");
                    std::vector<double>& row = e.list_rows[i][r];
                    row.resize(size_t(cnt));
                    for (double& v : row)
                        v = file.binary ? read_binary_scalar(in, p.type, where)
                                        : parse_ascii_number(ls, where);
                } else {
                    double v = file.binary ? read_binary_scalar(in, p.type, where)
                                           : parse_ascii_number(ls, where);
                    e.columns[i].push_back(v);
                }
            }
        }
    }
    return file;
}

File read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return read_stream(in, path);
}

void write_stream(const File& file, std::ostream& out) {
    out << "ply\n";
    out << (file.binary ? "format binary_little_endian 1.0\n" : "format ascii 1.0\n");
    for (const std::string& c : file.comments) out << c << "\n";
    for (const Element& e : file.elements) {
        out << "element " << e.name << " " << e.count << "\n";
        for (const Property& p : e.properties) {
            if (p.is_list)
                out << "property list " << scalar_type_name(p.count_type) << " "
                    << scalar_type_name(p.type) << " " << p.name << "\n";
            else
                out << "property " << scalar_type_name(p.type) << " " << p.name << "\n";
        }
    }
    out << "end_header\n";

    std::ostringstream ascii_row;
    ascii_row.precision(std::numeric_limits<double>::max_digits10);
    for (const Element& e : file.elements) {
        for (size_t r = 0; r < e.count; ++r) {
            if (!file.binary) { ascii_row.str(""); ascii_row.clear(); }
            for (size_t i = 0; i < e.properties.size(); ++i) {
                const Property& p = e.properties[i];
                if (p.is_list) {
                    const std::vector<double>& row = e.list_rows[i][r];
                    if (file.binary) {
                        write_binary_scalar(out, p.count_type, double(row.size()));
                        for (double v : row) write_binary_scalar(out, p.type, v);
                    } else {
                        ascii_row << (i ? " " : "") << row.size();
                        for (double v : row) ascii_row << " " << v;
                    }
                } else {
                    if (file.binary) write_binary_scalar(out, p.type, e.columns[i][r]);
                    else ascii_row << (i ? " " : "") << e.columns[i][r];
                }
            }
            if (!file.binary) out << ascii_row.str() << "\n";
        }
    }
}

void write_file(const File& file, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_stream(file, out);
    if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace splatgraph::ply
