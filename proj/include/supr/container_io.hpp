/*
 * supr - a sparse, separable statistical body model library
 *
 * File: include/supr/container_io.hpp
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
#include "supr/model.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <string>
#include <utility>
#include <vector>

/**
 * Binary model container.
 *
 * Layout:
 *   - 32-byte header: magic "SUPRMDL1", u32 format version (1), u64 manifest
 *     size in bytes, u32 CRC-32 of the manifest, u64 total file size;
 *   - UTF-8 JSON manifest (compact, fixed key order) describing the model
 *     metadata and the tensor table;
 *   - tensor payload. Each tensor is little-endian f32 or i32, row-major,
 *     at a 64-byte-aligned offset relative to the payload base
 *     align64(32 + manifest size). Gaps are zero-filled and covered by the
 *     payload CRC-32 recorded in the manifest.
 *
 * Saving is canonical: the same in-memory model always produces the same
 * bytes, and save(load(bytes)) == bytes for any valid container.
 */
namespace supr {

namespace io_detail {

inline std::uint32_t crc32(const std::uint8_t* data, std::size_t n)
{
    static const auto table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i)
        {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1u) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    std::uint32_t crc = 0xFFFFFFFFu;
    for (std::size_t i = 0; i < n; ++i)
    {
        crc = table[(crc ^ data[i]) & 0xFFu] ^ (crc >> 8);
    }
    return crc ^ 0xFFFFFFFFu;
}

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v)
{
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 24));
}

inline void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v)
{
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_f32(std::vector<std::uint8_t>& out, float v)
{
    put_u32(out, std::bit_cast<std::uint32_t>(v));
}

inline void put_i32(std::vector<std::uint8_t>& out, std::int32_t v)
{
    put_u32(out, static_cast<std::uint32_t>(v));
}

inline std::uint32_t get_u32(const std::uint8_t* p)
{
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint64_t get_u64(const std::uint8_t* p)
{
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

inline float get_f32(const std::uint8_t* p) { return std::bit_cast<float>(get_u32(p)); }
inline std::int32_t get_i32(const std::uint8_t* p)
{
    return static_cast<std::int32_t>(get_u32(p));
}

inline std::uint64_t align64(std::uint64_t x) { return (x + 63u) & ~std::uint64_t{63}; }

struct Tensor
{
    std::string name;
    std::string dtype; ///< "f32" or "i32"
    std::vector<std::int64_t> shape;
    std::vector<std::uint8_t> bytes;
};

inline std::int64_t element_count(const std::vector<std::int64_t>& shape)
{
    std::int64_t n = 1;
    for (auto d : shape) n *= d;
    return n;
}

/// Serializes the model into the canonical tensor list.
inline std::vector<Tensor> make_tensor_list(const ModelContainer& m)
{
    std::vector<Tensor> tensors;
    auto add_f32 = [&tensors](std::string name, std::vector<std::int64_t> shape, auto&& emit) {
        Tensor t;
        t.name = std::move(name);
        t.dtype = "f32";
        t.shape = std::move(shape);
        t.bytes.reserve(static_cast<std::size_t>(element_count(t.shape)) * 4);
        emit(t.bytes);
        tensors.push_back(std::move(t));
    };
    auto add_i32 = [&tensors](std::string name, std::vector<std::int64_t> shape, auto&& emit) {
        Tensor t;
        t.name = std::move(name);
        t.dtype = "i32";
        t.shape = std::move(shape);
        t.bytes.reserve(static_cast<std::size_t>(element_count(t.shape)) * 4);
        emit(t.bytes);
        tensors.push_back(std::move(t));
    };
    auto emit_matrixf = [](const Eigen::MatrixXf& mat) {
        return [&mat](std::vector<std::uint8_t>& out) {
            for (Eigen::Index r = 0; r < mat.rows(); ++r)
            {
                for (Eigen::Index c = 0; c < mat.cols(); ++c) put_f32(out, mat(r, c));
            }
        };
    };

    const auto n = static_cast<std::int64_t>(m.vertex_count());
    add_f32("template", {n, 3}, [&m](std::vector<std::uint8_t>& out) {
        for (Eigen::Index r = 0; r < m.template_vertices.rows(); ++r)
        {
            for (int c = 0; c < 3; ++c)
            {
                put_f32(out, static_cast<float>(m.template_vertices(r, c)));
            }
        }
    });
    add_i32("faces", {m.faces.rows(), 3}, [&m](std::vector<std::uint8_t>& out) {
        for (Eigen::Index r = 0; r < m.faces.rows(); ++r)
        {
            for (int c = 0; c < 3; ++c) put_i32(out, m.faces(r, c));
        }
    });

    auto add_i32_vec = [&add_i32](const std::string& name, const std::vector<std::int32_t>& v) {
        add_i32(name, {static_cast<std::int64_t>(v.size())},
                [&v](std::vector<std::uint8_t>& out) {
                    for (auto x : v) put_i32(out, x);
                });
    };
    auto add_f32_vec = [&add_f32](const std::string& name, const std::vector<double>& v) {
        add_f32(name, {static_cast<std::int64_t>(v.size())},
                [&v](std::vector<std::uint8_t>& out) {
                    for (auto x : v) put_f32(out, static_cast<float>(x));
                });
    };

    add_i32_vec("skinning.rowptr", m.skinning.rowptr);
    add_i32_vec("skinning.joints", m.skinning.joints);
    add_f32_vec("skinning.weights", m.skinning.weights);
    add_i32_vec("regressor.rowptr", m.joint_regressor.rowptr);
    add_i32_vec("regressor.vertices", m.joint_regressor.vertices);
    add_f32_vec("regressor.weights", m.joint_regressor.weights);

    if (m.shape_count() > 0)
    {
        add_f32("shape.basis", {n, 3, m.shape_count()}, emit_matrixf(m.shape_space.basis));
    }
    if (m.expression_count() > 0)
    {
        add_f32("expression.basis", {n, 3, m.expression_count()},
                emit_matrixf(m.expression_space.basis));
    }
    if (!m.part_labels.empty()) add_i32_vec("part_labels", m.part_labels);

    for (const auto& block : m.pose_blendshapes)
    {
        const std::string prefix = "posebs." + std::to_string(block.joint) + ".";
        add_i32_vec(prefix + "vertices", block.vertices);
        add_f32(prefix + "activations", {static_cast<std::int64_t>(block.vertices.size())},
                [&block](std::vector<std::uint8_t>& out) {
                    for (Eigen::Index i = 0; i < block.activations.size(); ++i)
                    {
                        put_f32(out, block.activations[i]);
                    }
                });
        add_f32(prefix + "coeffs",
                {static_cast<std::int64_t>(block.vertices.size()), 3, block.coeffs.cols()},
                emit_matrixf(block.coeffs));
    }

    for (const auto& net : m.foot_nets)
    {
        const std::string prefix = "foot." + net.side + ".";
        add_i32_vec(prefix + "vertices", net.vertex_indices);
        add_i32_vec(prefix + "joints", net.joint_indices);
        add_f32(prefix + "shape_basis",
                {static_cast<std::int64_t>(net.vertex_indices.size()), 3,
                 FootDeformNet::kShapeCoeffCount},
                emit_matrixf(net.shape_basis));
        auto add_layers = [&](const char* group, const std::vector<DenseLayer>& layers) {
            for (std::size_t i = 0; i < layers.size(); ++i)
            {
                const auto& l = layers[i];
                const std::string lp = prefix + group + "." + std::to_string(i) + ".";
                add_f32(lp + "weight", {l.weight.rows(), l.weight.cols()},
                        emit_matrixf(l.weight));
                add_f32(lp + "bias", {l.bias.size()}, [&l](std::vector<std::uint8_t>& out) {
                    for (Eigen::Index r = 0; r < l.bias.size(); ++r) put_f32(out, l.bias[r]);
                });
            }
        };
        add_layers("enc", net.encoder);
        add_layers("dec", net.decoder);
    }
    return tensors;
}

} // namespace io_detail

inline std::vector<std::uint8_t> save_model_bytes(const ModelContainer& model)
{
    using nlohmann::ordered_json;
    using namespace io_detail;

    auto tensors = make_tensor_list(model);

    // Payload layout: 64-byte aligned offsets relative to the payload base.
    std::uint64_t off = 0;
    std::vector<std::uint64_t> offsets;
    for (const auto& t : tensors)
    {
        off = align64(off);
        offsets.push_back(off);
        off += t.bytes.size();
    }
    const std::uint64_t payload_size = off;
    std::vector<std::uint8_t> payload(payload_size, 0);
    for (std::size_t i = 0; i < tensors.size(); ++i)
    {
        std::memcpy(payload.data() + offsets[i], tensors[i].bytes.data(),
                    tensors[i].bytes.size());
    }

    ordered_json manifest;
    manifest["format_version"] = 1;
    ordered_json meta;
    meta["vertex_count"] = model.vertex_count();
    meta["joint_count"] = model.joint_count();
    meta["shape_components"] = model.shape_count();
    meta["expression_components"] = model.expression_count();
    meta["joint_names"] = model.tree.joint_names;
    meta["parents"] = model.tree.parent;
    meta["neighbor_sets"] = model.tree.neighbor_sets;
    meta["part_label_names"] = model.part_label_names;
    {
        std::vector<int> bs_joints;
        for (const auto& b : model.pose_blendshapes) bs_joints.push_back(b.joint);
        meta["pose_blend_joints"] = bs_joints;
    }
    {
        ordered_json nets = ordered_json::array();
        for (const auto& net : model.foot_nets)
        {
            ordered_json j;
            j["side"] = net.side;
            std::vector<bool> enc, dec;
            for (const auto& l : net.encoder) enc.push_back(l.leaky);
            for (const auto& l : net.decoder) dec.push_back(l.leaky);
            j["encoder_leaky"] = enc;
            j["decoder_leaky"] = dec;
            nets.push_back(j);
        }
        meta["foot_nets"] = nets;
    }
    manifest["metadata"] = meta;
    manifest["payload_crc32"] = crc32(payload.data(), payload.size());
    {
        ordered_json table = ordered_json::array();
        for (std::size_t i = 0; i < tensors.size(); ++i)
        {
            ordered_json t;
            t["name"] = tensors[i].name;
            t["dtype"] = tensors[i].dtype;
            t["shape"] = tensors[i].shape;
            t["offset"] = offsets[i];
            t["nbytes"] = tensors[i].bytes.size();
            table.push_back(t);
        }
        manifest["tensors"] = table;
    }

    const std::string manifest_str = manifest.dump();
    const std::uint64_t payload_base = align64(32 + manifest_str.size());
    const std::uint64_t file_size = payload_base + payload_size;

    std::vector<std::uint8_t> out;
    out.reserve(file_size);
    const char magic[8] = {'S', 'U', 'P', 'R', 'M', 'D', 'L', '1'};
    out.insert(out.end(), magic, magic + 8);
    put_u32(out, 1);
    put_u64(out, manifest_str.size());
    put_u32(out, crc32(reinterpret_cast<const std::uint8_t*>(manifest_str.data()),
                       manifest_str.size()));
    put_u64(out, file_size);
    out.insert(out.end(), manifest_str.begin(), manifest_str.end());
    out.resize(payload_base, 0);
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

inline void save_model(const ModelContainer& model, const std::string& path)
{
    const auto bytes = save_model_bytes(model);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCategory::io, "cannot open '" + path + "' for writing");
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (!f) throw Error(ErrorCategory::io, "write failed for '" + path + "'");
}

inline ModelContainer load_model_bytes(const std::vector<std::uint8_t>& bytes)
{
    using nlohmann::ordered_json;
    using namespace io_detail;

    if (bytes.size() < 32) throw LoadError(LoadErrorKind::truncated, "file shorter than header");
    if (std::memcmp(bytes.data(), "SUPRMDL1", 8) != 0)
    {
        throw LoadError(LoadErrorKind::bad_magic, "not a model container");
    }
    const std::uint32_t version = get_u32(bytes.data() + 8);
    if (version != 1)
    {
        throw LoadError(LoadErrorKind::version_mismatch,
                        "unsupported format version " + std::to_string(version));
    }
    const std::uint64_t manifest_size = get_u64(bytes.data() + 12);
    const std::uint32_t manifest_crc = get_u32(bytes.data() + 20);
    const std::uint64_t file_size = get_u64(bytes.data() + 24);
    if (file_size > bytes.size())
    {
        throw LoadError(LoadErrorKind::truncated,
                        "file is " + std::to_string(bytes.size()) + " bytes, header declares " +
                            std::to_string(file_size));
    }
    if (file_size < bytes.size())
    {
        throw LoadError(LoadErrorKind::bad_layout, "trailing bytes beyond declared file size");
    }
    if (32 + manifest_size > bytes.size())
    {
        throw LoadError(LoadErrorKind::truncated, "manifest extends past end of file");
    }
    if (crc32(bytes.data() + 32, manifest_size) != manifest_crc)
    {
        throw LoadError(LoadErrorKind::checksum_mismatch, "manifest checksum mismatch");
    }

    ordered_json manifest;
    try
    {
        manifest = ordered_json::parse(bytes.begin() + 32,
                                       bytes.begin() + 32 + static_cast<std::ptrdiff_t>(manifest_size));
    } catch (const ordered_json::parse_error& e)
    {
        throw LoadError(LoadErrorKind::bad_manifest, std::string("manifest is not valid JSON: ") +
                                                         e.what());
    }

    const std::uint64_t payload_base = align64(32 + manifest_size);
    if (payload_base > file_size)
    {
        throw LoadError(LoadErrorKind::truncated, "no payload after manifest");
    }
    const std::uint64_t payload_size = file_size - payload_base;

    ModelContainer m;
    struct Entry
    {
        std::string dtype;
        std::vector<std::int64_t> shape;
        std::uint64_t offset;
        std::uint64_t nbytes;
    };
    std::map<std::string, Entry> table;
    try
    {
        if (manifest.at("format_version").get<int>() != 1)
        {
            throw LoadError(LoadErrorKind::version_mismatch, "manifest format_version mismatch");
        }
        const std::uint32_t payload_crc = manifest.at("payload_crc32").get<std::uint32_t>();
        if (crc32(bytes.data() + payload_base, payload_size) != payload_crc)
        {
            throw LoadError(LoadErrorKind::checksum_mismatch, "payload checksum mismatch");
        }

        std::vector<std::pair<std::uint64_t, std::uint64_t>> spans;
        for (const auto& t : manifest.at("tensors"))
        {
            Entry e;
            const auto name = t.at("name").get<std::string>();
            e.dtype = t.at("dtype").get<std::string>();
            e.shape = t.at("shape").get<std::vector<std::int64_t>>();
            e.offset = t.at("offset").get<std::uint64_t>();
            e.nbytes = t.at("nbytes").get<std::uint64_t>();
            if (e.dtype != "f32" && e.dtype != "i32")
            {
                throw LoadError(LoadErrorKind::bad_manifest,
                                "tensor '" + name + "' has unknown dtype '" + e.dtype + "'");
            }
            if (e.offset % 64 != 0)
            {
                throw LoadError(LoadErrorKind::bad_layout,
                                "tensor '" + name + "' offset is not 64-byte aligned");
            }
            std::int64_t count = 1;
            for (auto d : e.shape)
            {
                if (d < 0) throw LoadError(LoadErrorKind::bad_layout, "negative dimension");
                count *= d;
            }
            if (e.nbytes != static_cast<std::uint64_t>(count) * 4)
            {
                throw LoadError(LoadErrorKind::bad_layout,
                                "tensor '" + name + "' byte count does not match its shape");
            }
            if (e.offset + e.nbytes > payload_size)
            {
                throw LoadError(LoadErrorKind::bad_layout,
                                "tensor '" + name + "' extends past the payload");
            }
            spans.emplace_back(e.offset, e.offset + e.nbytes);
            if (!table.emplace(name, std::move(e)).second)
            {
                throw LoadError(LoadErrorKind::bad_manifest, "duplicate tensor '" + name + "'");
            }
        }
        std::sort(spans.begin(), spans.end());
        for (std::size_t i = 1; i < spans.size(); ++i)
        {
            if (spans[i].first < spans[i - 1].second)
            {
                throw LoadError(LoadErrorKind::bad_layout, "overlapping tensors");
            }
        }
    } catch (const ordered_json::exception& e)
    {
        throw LoadError(LoadErrorKind::bad_manifest, std::string("manifest field error: ") +
                                                         e.what());
    }

    const std::uint8_t* payload = bytes.data() + payload_base;
    auto require = [&table](const std::string& name) -> const Entry& {
        auto it = table.find(name);
        if (it == table.end())
        {
            throw LoadError(LoadErrorKind::bad_manifest, "missing tensor '" + name + "'");
        }
        return it->second;
    };
    auto read_i32_vec = [&](const std::string& name) {
        const Entry& e = require(name);
        if (e.dtype != "i32")
        {
            throw LoadError(LoadErrorKind::bad_manifest, "tensor '" + name + "' must be i32");
        }
        std::vector<std::int32_t> v(e.nbytes / 4);
        for (std::size_t i = 0; i < v.size(); ++i)
        {
            v[i] = get_i32(payload + e.offset + 4 * i);
        }
        return v;
    };
    auto read_f32_vec = [&](const std::string& name) {
        const Entry& e = require(name);
        if (e.dtype != "f32")
        {
            throw LoadError(LoadErrorKind::bad_manifest, "tensor '" + name + "' must be f32");
        }
        std::vector<double> v(e.nbytes / 4);
        for (std::size_t i = 0; i < v.size(); ++i)
        {
            v[i] = static_cast<double>(get_f32(payload + e.offset + 4 * i));
        }
        return v;
    };
    auto read_matrixf = [&](const std::string& name, Eigen::Index rows, Eigen::Index cols) {
        const Entry& e = require(name);
        if (e.dtype != "f32")
        {
            throw LoadError(LoadErrorKind::bad_manifest, "tensor '" + name + "' must be f32");
        }
        if (e.nbytes != static_cast<std::uint64_t>(rows) * static_cast<std::uint64_t>(cols) * 4)
        {
            throw LoadError(LoadErrorKind::bad_layout,
                            "tensor '" + name + "' has unexpected size");
        }
        Eigen::MatrixXf mat(rows, cols);
        const std::uint8_t* p = payload + e.offset;
        for (Eigen::Index r = 0; r < rows; ++r)
        {
            for (Eigen::Index c = 0; c < cols; ++c)
            {
                mat(r, c) = get_f32(p);
                p += 4;
            }
        }
        return mat;
    };

    try
    {
        const auto& meta = manifest.at("metadata");
        const int n = meta.at("vertex_count").get<int>();
        const int k = meta.at("joint_count").get<int>();
        const int s_shape = meta.at("shape_components").get<int>();
        const int s_expr = meta.at("expression_components").get<int>();
        if (n < 1 || k < 1)
        {
            throw LoadError(LoadErrorKind::bad_manifest, "non-positive model dimensions");
        }

        m.tree.parent = meta.at("parents").get<std::vector<int>>();
        m.tree.joint_names = meta.at("joint_names").get<std::vector<std::string>>();
        m.tree.neighbor_sets = meta.at("neighbor_sets").get<std::vector<std::vector<int>>>();
        m.part_label_names = meta.at("part_label_names").get<std::vector<std::string>>();
        if (static_cast<int>(m.tree.parent.size()) != k)
        {
            throw LoadError(LoadErrorKind::bad_manifest, "parents array size mismatch");
        }

        {
            const Entry& e = require("template");
            if (e.shape != std::vector<std::int64_t>{n, 3} || e.dtype != "f32")
            {
                throw LoadError(LoadErrorKind::bad_layout, "template tensor shape mismatch");
            }
            m.template_vertices.resize(n, 3);
            const std::uint8_t* p = payload + e.offset;
            for (int v = 0; v < n; ++v)
            {
                for (int d = 0; d < 3; ++d)
                {
                    m.template_vertices(v, d) = static_cast<double>(get_f32(p));
                    p += 4;
                }
            }
        }
        {
            const Entry& e = require("faces");
            if (e.shape.size() != 2 || e.shape[1] != 3 || e.dtype != "i32")
            {
                throw LoadError(LoadErrorKind::bad_layout, "faces tensor shape mismatch");
            }
            m.faces.resize(static_cast<Eigen::Index>(e.shape[0]), 3);
            const std::uint8_t* p = payload + e.offset;
            for (Eigen::Index f = 0; f < m.faces.rows(); ++f)
            {
                for (int d = 0; d < 3; ++d)
                {
                    m.faces(f, d) = get_i32(p);
                    p += 4;
                }
            }
        }

        m.skinning.rowptr = read_i32_vec("skinning.rowptr");
        m.skinning.joints = read_i32_vec("skinning.joints");
        m.skinning.weights = read_f32_vec("skinning.weights");
        m.joint_regressor.rowptr = read_i32_vec("regressor.rowptr");
        m.joint_regressor.vertices = read_i32_vec("regressor.vertices");
        m.joint_regressor.weights = read_f32_vec("regressor.weights");

        if (s_shape > 0)
        {
            m.shape_space.basis = read_matrixf("shape.basis", 3 * n, s_shape);
        }
        if (s_expr > 0)
        {
            m.expression_space.basis = read_matrixf("expression.basis", 3 * n, s_expr);
        }
        if (table.count("part_labels") != 0)
        {
            m.part_labels = read_i32_vec("part_labels");
        }

        for (int joint : meta.at("pose_blend_joints").get<std::vector<int>>())
        {
            const std::string prefix = "posebs." + std::to_string(joint) + ".";
            PoseBlendBlock block;
            block.joint = joint;
            block.vertices = read_i32_vec(prefix + "vertices");
            const auto act = read_f32_vec(prefix + "activations");
            block.activations.resize(static_cast<Eigen::Index>(act.size()));
            for (std::size_t i = 0; i < act.size(); ++i)
            {
                block.activations[static_cast<Eigen::Index>(i)] = static_cast<float>(act[i]);
            }
            if (joint < 0 || joint >= k || block.vertices.size() != act.size())
            {
                throw LoadError(LoadErrorKind::bad_manifest, "inconsistent corrective block");
            }
            const auto& e = require(prefix + "coeffs");
            if (e.shape.size() != 3 ||
                e.shape[0] != static_cast<std::int64_t>(block.vertices.size()) || e.shape[1] != 3)
            {
                throw LoadError(LoadErrorKind::bad_layout, "corrective tensor shape mismatch");
            }
            block.coeffs = read_matrixf(prefix + "coeffs",
                                        3 * static_cast<Eigen::Index>(block.vertices.size()),
                                        static_cast<Eigen::Index>(e.shape[2]));
            m.pose_blendshapes.push_back(std::move(block));
        }

        for (const auto& nj : meta.at("foot_nets"))
        {
            FootDeformNet net;
            net.side = nj.at("side").get<std::string>();
            const std::string prefix = "foot." + net.side + ".";
            net.vertex_indices = read_i32_vec(prefix + "vertices");
            net.joint_indices = read_i32_vec(prefix + "joints");
            net.shape_basis =
                read_matrixf(prefix + "shape_basis",
                             3 * static_cast<Eigen::Index>(net.vertex_indices.size()),
                             FootDeformNet::kShapeCoeffCount);
            auto read_layers = [&](const char* group, const std::vector<bool>& leaky) {
                std::vector<DenseLayer> layers;
                for (std::size_t i = 0; i < leaky.size(); ++i)
                {
                    const std::string lp = prefix + group + "." + std::to_string(i) + ".";
                    DenseLayer l;
                    l.leaky = leaky[i];
                    const Entry& we = require(lp + "weight");
                    if (we.shape.size() != 2)
                    {
                        throw LoadError(LoadErrorKind::bad_layout, "weight tensor must be 2-d");
                    }
                    l.weight = read_matrixf(lp + "weight",
                                            static_cast<Eigen::Index>(we.shape[0]),
                                            static_cast<Eigen::Index>(we.shape[1]));
                    const auto bias = read_f32_vec(lp + "bias");
                    l.bias.resize(static_cast<Eigen::Index>(bias.size()));
                    for (std::size_t b = 0; b < bias.size(); ++b)
                    {
                        l.bias[static_cast<Eigen::Index>(b)] = static_cast<float>(bias[b]);
                    }
                    layers.push_back(std::move(l));
                }
                return layers;
            };
            net.encoder = read_layers("enc", nj.at("encoder_leaky").get<std::vector<bool>>());
            net.decoder = read_layers("dec", nj.at("decoder_leaky").get<std::vector<bool>>());
            m.foot_nets.push_back(std::move(net));
        }
    } catch (const ordered_json::exception& e)
    {
        throw LoadError(LoadErrorKind::bad_manifest, std::string("manifest field error: ") +
                                                         e.what());
    }

    m.validate();
    return m;
}

inline ModelContainer load_model(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCategory::io, "cannot open '" + path + "' for reading");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    return load_model_bytes(bytes);
}

} // namespace supr
