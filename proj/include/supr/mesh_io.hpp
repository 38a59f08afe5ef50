/*
 * supr - a sparse, separable statistical body model library
 *
 * File: include/supr/mesh_io.hpp
 *
 * Copyright 2026 The supr authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include "supr/errors.hpp"
#include "supr/types.hpp"

#include <Eigen/Core>

#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <iterator>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

/**
 * Triangle mesh import and export.
 *
 * Supported formats:
 *   - Wavefront OBJ: `v` and `f` records (1-based and negative relative
 *     indices, `v/vt/vn` reference forms); polygons are fan-triangulated;
 *     texture, normal, grouping and material records are ignored.
 *   - PLY 1.0, ascii and binary_little_endian: `vertex` (x, y, z as float or
 *     double, extra scalar properties skipped) and `face` elements; polygons
 *     are fan-triangulated. Writing uses double precision coordinates so
 *     round trips are exact.
 *
 * Readers throw ParseError with a line diagnostic (or byte offset for binary
 * data) and validate face indices against the declared vertex count.
 */
namespace supr {

struct TriangleMesh
{
    MatX3d vertices;
    MatX3i faces;
};

/// Rejects non-finite coordinates and out-of-range face indices.
inline void validate_mesh(const TriangleMesh& mesh)
{
    if (!mesh.vertices.allFinite())
    {
        throw InvalidArgumentError("mesh has non-finite vertex coordinates");
    }
    const auto n = static_cast<std::int32_t>(mesh.vertices.rows());
    for (Eigen::Index f = 0; f < mesh.faces.rows(); ++f)
    {
        for (int d = 0; d < 3; ++d)
        {
            const std::int32_t v = mesh.faces(f, d);
            if (v < 0 || v >= n)
            {
                throw InvalidArgumentError("face " + std::to_string(f) +
                                           " references vertex " + std::to_string(v) +
                                           " outside [0, " + std::to_string(n) + ")");
            }
        }
    }
}

namespace mesh_detail {

inline std::vector<std::string_view> split_ws(std::string_view s)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size())
    {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        const std::size_t b = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
        if (i > b) out.push_back(s.substr(b, i - b));
    }
    return out;
}

inline bool parse_double(std::string_view tok, double& out)
{
    const char* b = tok.data();
    const char* e = b + tok.size();
    const auto r = std::from_chars(b, e, out);
    return r.ec == std::errc{} && r.ptr == e;
}

inline bool parse_long(std::string_view tok, long long& out)
{
    const char* b = tok.data();
    const char* e = b + tok.size();
    const auto r = std::from_chars(b, e, out);
    return r.ec == std::errc{} && r.ptr == e;
}

inline TriangleMesh pack_mesh(const std::vector<std::array<double, 3>>& verts,
                              const std::vector<std::array<std::int32_t, 3>>& tris)
{
    TriangleMesh mesh;
    mesh.vertices.resize(static_cast<Eigen::Index>(verts.size()), 3);
    for (std::size_t i = 0; i < verts.size(); ++i)
    {
        for (int d = 0; d < 3; ++d)
        {
            mesh.vertices(static_cast<Eigen::Index>(i), d) = verts[i][static_cast<std::size_t>(d)];
        }
    }
    mesh.faces.resize(static_cast<Eigen::Index>(tris.size()), 3);
    for (std::size_t i = 0; i < tris.size(); ++i)
    {
        for (int d = 0; d < 3; ++d)
        {
            mesh.faces(static_cast<Eigen::Index>(i), d) = tris[i][static_cast<std::size_t>(d)];
        }
    }
    return mesh;
}

} // namespace mesh_detail

inline TriangleMesh read_obj(std::istream& in)
{
    using mesh_detail::parse_double;
    using mesh_detail::parse_long;

    std::vector<std::array<double, 3>> verts;
    std::vector<std::array<std::int32_t, 3>> tris;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto toks = mesh_detail::split_ws(line);
        if (toks.empty() || toks[0].front() == '#') continue;
        const auto kw = toks[0];
        if (kw == "v")
        {
            // An optional fourth (w) coordinate is tolerated and dropped.
            if (toks.size() < 4 || toks.size() > 5)
            {
                throw ParseError("vertex record needs 3 coordinates", lineno);
            }
            std::array<double, 3> p{};
            for (int d = 0; d < 3; ++d)
            {
                const auto tok = toks[static_cast<std::size_t>(1 + d)];
                if (!parse_double(tok, p[static_cast<std::size_t>(d)]) ||
                    !std::isfinite(p[static_cast<std::size_t>(d)]))
                {
                    throw ParseError("bad vertex coordinate '" + std::string(tok) + "'", lineno);
                }
            }
            verts.push_back(p);
        }
        else if (kw == "f")
        {
            if (toks.size() < 4)
            {
                throw ParseError("face record needs at least 3 vertices", lineno);
            }
            std::vector<std::int32_t> corners;
            for (std::size_t t = 1; t < toks.size(); ++t)
            {
                std::string_view ref = toks[t];
                if (const auto slash = ref.find('/'); slash != std::string_view::npos)
                {
                    ref = ref.substr(0, slash);
                }
                long long idx = 0;
                if (!parse_long(ref, idx) || idx == 0)
                {
                    throw ParseError("bad face index '" + std::string(toks[t]) + "'", lineno);
                }
                // Negative indices count back from the most recent vertex.
                const long long resolved =
                    idx > 0 ? idx - 1 : static_cast<long long>(verts.size()) + idx;
                if (resolved < 0 || resolved >= static_cast<long long>(verts.size()))
                {
                    throw ParseError("face index " + std::to_string(idx) + " out of range",
                                     lineno);
                }
                corners.push_back(static_cast<std::int32_t>(resolved));
            }
            for (std::size_t t = 2; t < corners.size(); ++t)
            {
                tris.push_back({corners[0], corners[t - 1], corners[t]});
            }
        }
        // Texture, normal, grouping and material records are ignored.
    }
    return mesh_detail::pack_mesh(verts, tris);
}

inline void write_obj(std::ostream& out, const TriangleMesh& mesh)
{
    validate_mesh(mesh);
    char buf[160];
    for (Eigen::Index v = 0; v < mesh.vertices.rows(); ++v)
    {
        std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", mesh.vertices(v, 0),
                      mesh.vertices(v, 1), mesh.vertices(v, 2));
        out << buf;
    }
    for (Eigen::Index f = 0; f < mesh.faces.rows(); ++f)
    {
        out << "f " << mesh.faces(f, 0) + 1 << ' ' << mesh.faces(f, 1) + 1 << ' '
            << mesh.faces(f, 2) + 1 << '\n';
    }
    if (!out) throw Error(ErrorCategory::io, "obj write failed");
}

enum class PlyEncoding { ascii, binary_little_endian };

namespace mesh_detail {

enum class PlyType { i8, u8, i16, u16, i32, u32, f32, f64 };

inline bool ply_type_from(std::string_view s, PlyType& t)
{
    if (s == "char" || s == "int8") t = PlyType::i8;
    else if (s == "uchar" || s == "uint8") t = PlyType::u8;
    else if (s == "short" || s == "int16") t = PlyType::i16;
    else if (s == "ushort" || s == "uint16") t = PlyType::u16;
    else if (s == "int" || s == "int32") t = PlyType::i32;
    else if (s == "uint" || s == "uint32") t = PlyType::u32;
    else if (s == "float" || s == "float32") t = PlyType::f32;
    else if (s == "double" || s == "float64") t = PlyType::f64;
    else return false;
    return true;
}

inline std::size_t ply_size(PlyType t)
{
    switch (t)
    {
    case PlyType::i8:
    case PlyType::u8: return 1;
    case PlyType::i16:
    case PlyType::u16: return 2;
    case PlyType::i32:
    case PlyType::u32: return 4;
    case PlyType::f32: return 4;
    case PlyType::f64: return 8;
    }
    return 0;
}

inline bool ply_is_integer(PlyType t) { return t != PlyType::f32 && t != PlyType::f64; }

inline std::uint64_t le_bits(const unsigned char* p, std::size_t n)
{
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

inline double ply_read_scalar(PlyType t, const unsigned char* p)
{
    switch (t)
    {
    case PlyType::i8: return static_cast<double>(static_cast<std::int8_t>(p[0]));
    case PlyType::u8: return static_cast<double>(p[0]);
    case PlyType::i16: return static_cast<double>(static_cast<std::int16_t>(le_bits(p, 2)));
    case PlyType::u16: return static_cast<double>(le_bits(p, 2));
    case PlyType::i32:
        return static_cast<double>(static_cast<std::int32_t>(static_cast<std::uint32_t>(le_bits(p, 4))));
    case PlyType::u32: return static_cast<double>(le_bits(p, 4));
    case PlyType::f32:
        return static_cast<double>(std::bit_cast<float>(static_cast<std::uint32_t>(le_bits(p, 4))));
    case PlyType::f64: return std::bit_cast<double>(le_bits(p, 8));
    }
    return 0.0;
}

struct PlyProp
{
    std::string name;
    PlyType type = PlyType::f32;
    bool list = false;
    PlyType count_type = PlyType::u8;
};

struct PlyElement
{
    std::string name;
    std::size_t count = 0;
    std::vector<PlyProp> props;
};

} // namespace mesh_detail

inline TriangleMesh read_ply(std::istream& in)
{
    using namespace mesh_detail;

    const std::string data((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    std::size_t pos = 0;
    std::size_t lineno = 0;
    auto next_line = [&]() -> std::string_view {
        if (pos >= data.size())
        {
            throw ParseError("unexpected end of file", lineno);
        }
        auto nl = data.find('\n', pos);
        if (nl == std::string::npos) nl = data.size();
        std::string_view l(data.data() + pos, nl - pos);
        pos = nl < data.size() ? nl + 1 : data.size();
        ++lineno;
        if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
        return l;
    };

    if (next_line() != "ply") throw ParseError("not a ply file", 1);

    std::optional<PlyEncoding> encoding;
    std::vector<PlyElement> elements;
    while (true)
    {
        const auto l = next_line();
        const auto toks = split_ws(l);
        if (toks.empty() || toks[0] == "comment" || toks[0] == "obj_info") continue;
        if (toks[0] == "end_header") break;
        if (toks[0] == "format")
        {
            if (toks.size() != 3 || toks[2] != "1.0")
            {
                throw ParseError("unsupported format declaration", lineno);
            }
            if (toks[1] == "ascii") encoding = PlyEncoding::ascii;
            else if (toks[1] == "binary_little_endian")
            {
                encoding = PlyEncoding::binary_little_endian;
            }
            else
            {
                throw UnsupportedError("ply encoding '" + std::string(toks[1]) +
                                       "' is not supported");
            }
        }
        else if (toks[0] == "element")
        {
            long long count = 0;
            if (toks.size() != 3 || !parse_long(toks[2], count) || count < 0)
            {
                throw ParseError("bad element declaration", lineno);
            }
            elements.push_back({std::string(toks[1]), static_cast<std::size_t>(count), {}});
        }
        else if (toks[0] == "property")
        {
            if (elements.empty()) throw ParseError("property before any element", lineno);
            PlyProp prop;
            if (toks.size() == 5 && toks[1] == "list")
            {
                prop.list = true;
                if (!ply_type_from(toks[2], prop.count_type) ||
                    !ply_type_from(toks[3], prop.type) || !ply_is_integer(prop.count_type) ||
                    !ply_is_integer(prop.type))
                {
                    throw ParseError("bad list property declaration", lineno);
                }
                prop.name = std::string(toks[4]);
            }
            else if (toks.size() == 3)
            {
                if (!ply_type_from(toks[1], prop.type))
                {
                    throw ParseError("unknown property type '" + std::string(toks[1]) + "'",
                                     lineno);
                }
                prop.name = std::string(toks[2]);
            }
            else
            {
                throw ParseError("bad property declaration", lineno);
            }
            elements.back().props.push_back(std::move(prop));
        }
        else
        {
            throw ParseError("unknown header keyword '" + std::string(toks[0]) + "'", lineno);
        }
    }
    if (!encoding) throw ParseError("missing format declaration", lineno);

    // The declared vertex count lets face rows be validated as they stream in,
    // regardless of element order.
    std::size_t declared_vertices = 0;
    for (const auto& el : elements)
    {
        if (el.name == "vertex") declared_vertices = el.count;
    }

    std::vector<std::array<double, 3>> verts;
    std::vector<std::array<std::int32_t, 3>> tris;
    std::size_t cursor = pos; // binary body cursor

    for (const auto& el : elements)
    {
        const bool is_vertex = el.name == "vertex";
        const bool is_face = el.name == "face";
        int xi = -1, yi = -1, zi = -1, li = -1;
        for (std::size_t p = 0; p < el.props.size(); ++p)
        {
            const auto& prop = el.props[p];
            if (is_vertex && !prop.list)
            {
                if (prop.name == "x") xi = static_cast<int>(p);
                if (prop.name == "y") yi = static_cast<int>(p);
                if (prop.name == "z") zi = static_cast<int>(p);
            }
            if (is_face && prop.list &&
                (prop.name == "vertex_indices" || prop.name == "vertex_index"))
            {
                li = static_cast<int>(p);
            }
            if (!is_vertex && !is_face && prop.list)
            {
                throw UnsupportedError("cannot skip ply element '" + el.name +
                                       "' with a list property");
            }
        }
        if (is_vertex && (xi < 0 || yi < 0 || zi < 0))
        {
            throw ParseError("vertex element lacks x, y, z properties", lineno);
        }
        if (is_face && li < 0)
        {
            throw ParseError("face element lacks a vertex index list", lineno);
        }

        for (std::size_t row = 0; row < el.count; ++row)
        {
            std::array<double, 3> coord{};
            std::vector<std::int32_t> corners;

            if (*encoding == PlyEncoding::ascii)
            {
                const auto toks = split_ws(next_line());
                std::size_t ti = 0;
                for (std::size_t p = 0; p < el.props.size(); ++p)
                {
                    const auto& prop = el.props[p];
                    if (prop.list)
                    {
                        long long n = 0;
                        if (ti >= toks.size() || !parse_long(toks[ti], n) || n < 0 ||
                            ti + 1 + static_cast<std::size_t>(n) > toks.size())
                        {
                            throw ParseError("bad list count", lineno);
                        }
                        ++ti;
                        if (static_cast<int>(p) == li)
                        {
                            for (long long i = 0; i < n; ++i)
                            {
                                long long idx = 0;
                                if (!parse_long(toks[ti + static_cast<std::size_t>(i)], idx) ||
                                    idx < 0 ||
                                    idx >= static_cast<long long>(declared_vertices))
                                {
                                    throw ParseError("face index out of range", lineno);
                                }
                                corners.push_back(static_cast<std::int32_t>(idx));
                            }
                        }
                        ti += static_cast<std::size_t>(n);
                    }
                    else
                    {
                        if (ti >= toks.size())
                        {
                            throw ParseError("row has too few values", lineno);
                        }
                        double v = 0.0;
                        const bool need =
                            is_vertex && (static_cast<int>(p) == xi ||
                                          static_cast<int>(p) == yi || static_cast<int>(p) == zi);
                        if (need)
                        {
                            if (!parse_double(toks[ti], v) || !std::isfinite(v))
                            {
                                throw ParseError("bad coordinate '" + std::string(toks[ti]) +
                                                     "'",
                                                 lineno);
                            }
                            if (static_cast<int>(p) == xi) coord[0] = v;
                            if (static_cast<int>(p) == yi) coord[1] = v;
                            if (static_cast<int>(p) == zi) coord[2] = v;
                        }
                        ++ti;
                    }
                }
                if (ti != toks.size())
                {
                    throw ParseError("row has trailing values", lineno);
                }
            }
            else
            {
                const auto* bytes = reinterpret_cast<const unsigned char*>(data.data());
                auto take = [&](std::size_t nbytes) {
                    if (cursor + nbytes > data.size())
                    {
                        throw ParseError("unexpected end of data at byte " +
                                             std::to_string(cursor),
                                         lineno, cursor);
                    }
                    const unsigned char* ptr = bytes + cursor;
                    cursor += nbytes;
                    return ptr;
                };
                for (std::size_t p = 0; p < el.props.size(); ++p)
                {
                    const auto& prop = el.props[p];
                    if (prop.list)
                    {
                        const double nd =
                            ply_read_scalar(prop.count_type, take(ply_size(prop.count_type)));
                        const auto n = static_cast<long long>(nd);
                        for (long long i = 0; i < n; ++i)
                        {
                            const double vd = ply_read_scalar(prop.type, take(ply_size(prop.type)));
                            if (static_cast<int>(p) == li)
                            {
                                const auto idx = static_cast<long long>(vd);
                                if (idx < 0 || idx >= static_cast<long long>(declared_vertices))
                                {
                                    throw ParseError("face index out of range at byte " +
                                                         std::to_string(cursor),
                                                     lineno, cursor);
                                }
                                corners.push_back(static_cast<std::int32_t>(idx));
                            }
                        }
                    }
                    else
                    {
                        const double v = ply_read_scalar(prop.type, take(ply_size(prop.type)));
                        if (is_vertex)
                        {
                            if (static_cast<int>(p) == xi) coord[0] = v;
                            if (static_cast<int>(p) == yi) coord[1] = v;
                            if (static_cast<int>(p) == zi) coord[2] = v;
                        }
                    }
                }
            }

            if (is_vertex)
            {
                if (!std::isfinite(coord[0]) || !std::isfinite(coord[1]) ||
                    !std::isfinite(coord[2]))
                {
                    throw ParseError("non-finite vertex coordinate", lineno);
                }
                verts.push_back(coord);
            }
            if (is_face)
            {
                if (corners.size() < 3)
                {
                    throw ParseError("face with fewer than 3 vertices", lineno);
                }
                for (std::size_t t = 2; t < corners.size(); ++t)
                {
                    tris.push_back({corners[0], corners[t - 1], corners[t]});
                }
            }
        }
    }
    if (verts.size() != declared_vertices)
    {
        throw ParseError("vertex count mismatch", lineno);
    }
    return mesh_detail::pack_mesh(verts, tris);
}

inline void write_ply(std::ostream& out, const TriangleMesh& mesh,
                      PlyEncoding encoding = PlyEncoding::binary_little_endian)
{
    validate_mesh(mesh);
    out << "ply\n";
    out << "format "
        << (encoding == PlyEncoding::ascii ? "ascii" : "binary_little_endian") << " 1.0\n";
    out << "element vertex " << mesh.vertices.rows() << "\n";
    out << "property double x\nproperty double y\nproperty double z\n";
    out << "element face " << mesh.faces.rows() << "\n";
    out << "property list uchar int vertex_indices\n";
    out << "end_header\n";

    if (encoding == PlyEncoding::ascii)
    {
        char buf[160];
        for (Eigen::Index v = 0; v < mesh.vertices.rows(); ++v)
        {
            std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", mesh.vertices(v, 0),
                          mesh.vertices(v, 1), mesh.vertices(v, 2));
            out << buf;
        }
        for (Eigen::Index f = 0; f < mesh.faces.rows(); ++f)
        {
            out << "3 " << mesh.faces(f, 0) << ' ' << mesh.faces(f, 1) << ' '
                << mesh.faces(f, 2) << '\n';
        }
    }
    else
    {
        auto put_le = [&out](std::uint64_t bits, int nbytes) {
            char b[8];
            for (int i = 0; i < nbytes; ++i) b[i] = static_cast<char>(bits >> (8 * i));
            out.write(b, nbytes);
        };
        for (Eigen::Index v = 0; v < mesh.vertices.rows(); ++v)
        {
            for (int d = 0; d < 3; ++d)
            {
                put_le(std::bit_cast<std::uint64_t>(mesh.vertices(v, d)), 8);
            }
        }
        for (Eigen::Index f = 0; f < mesh.faces.rows(); ++f)
        {
            out.put(static_cast<char>(3));
            for (int d = 0; d < 3; ++d)
            {
                put_le(static_cast<std::uint32_t>(mesh.faces(f, d)), 4);
            }
        }
    }
    if (!out) throw Error(ErrorCategory::io, "ply write failed");
}

namespace mesh_detail {

inline std::string lower_extension(const std::string& path)
{
    const auto dot = path.rfind('.');
    if (dot == std::string::npos) return {};
    std::string ext = path.substr(dot + 1);
    for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return ext;
}

inline std::ifstream open_read(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCategory::io, "cannot open '" + path + "' for reading");
    return f;
}

inline std::ofstream open_write(const std::string& path)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCategory::io, "cannot open '" + path + "' for writing");
    return f;
}

} // namespace mesh_detail

inline TriangleMesh read_obj(const std::string& path)
{
    auto f = mesh_detail::open_read(path);
    return read_obj(f);
}

inline TriangleMesh read_ply(const std::string& path)
{
    auto f = mesh_detail::open_read(path);
    return read_ply(f);
}

inline void write_obj(const std::string& path, const TriangleMesh& mesh)
{
    auto f = mesh_detail::open_write(path);
    write_obj(f, mesh);
}

inline void write_ply(const std::string& path, const TriangleMesh& mesh,
                      PlyEncoding encoding = PlyEncoding::binary_little_endian)
{
    auto f = mesh_detail::open_write(path);
    write_ply(f, mesh, encoding);
}

/// Reads a mesh, picking the format from the file extension.
inline TriangleMesh read_mesh(const std::string& path)
{
    const auto ext = mesh_detail::lower_extension(path);
    if (ext == "obj") return read_obj(path);
    if (ext == "ply") return read_ply(path);
    throw UnsupportedError("unknown mesh format '" + ext + "' for '" + path + "'");
}

/// Writes a mesh, picking the format from the file extension.
inline void write_mesh(const std::string& path, const TriangleMesh& mesh)
{
    const auto ext = mesh_detail::lower_extension(path);
    if (ext == "obj") return write_obj(path, mesh);
    if (ext == "ply") return write_ply(path, mesh);
    throw UnsupportedError("unknown mesh format '" + ext + "' for '" + path + "'");
}

} // namespace supr
