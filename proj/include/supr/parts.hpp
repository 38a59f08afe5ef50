/*
 * supr - a sparse, separable statistical body model library
 *
 * File: include/supr/parts.hpp
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

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

/**
 * Part separation: extract a self-contained sub-model over a vertex subset.
 *
 * The sub-model keeps every joint that influences the selected vertices
 * (through skinning or through a corrective block with rows on them), closed
 * upward to their lowest common ancestor, which becomes the part root. If
 * that root itself carries a kept corrective block, the root is lifted one
 * joint higher so the block's own rotation stays a non-root pose parameter.
 *
 * Corrective blocks are restricted to the kept rows and to the feature
 * columns of neighbors inside the part; a dropped neighbor whose columns are
 * not identically zero on the kept rows is a modeling inconsistency and
 * raises ModelError. The joint regressor is sliced exactly when all source
 * vertices of a kept joint are selected, otherwise it is renormalized over
 * the selected sources (flagged on the result); a joint left with no source
 * raises ModelError.
 *
 * When the sub-model poses its joints like the full model does (with every
 * joint outside the part at rest), both produce identical coordinates for the
 * shared vertices.
 */
namespace supr {

/// A named vertex selection, the input to separate().
struct PartSpec
{
    std::string name;
    std::vector<std::int32_t> vertices; ///< sorted, unique full-model vertex ids
};

struct PartModel
{
    ModelContainer model;
    std::vector<std::int32_t> vertex_map; ///< part vertex -> full-model vertex
    std::vector<std::int32_t> joint_map;  ///< part joint -> full-model joint
    /// True when some kept joint's regressor row lost sources and had to be
    /// renormalized; joint locations then only approximate the full model.
    bool regressor_renormalized = false;
};

namespace parts_detail {

struct InfluenceSet
{
    std::vector<int> joints; ///< ascending original ids, root first
    int root = 0;
};

inline std::vector<int> joint_depths(const std::vector<int>& parent)
{
    std::vector<int> depth(parent.size(), 0);
    for (std::size_t j = 1; j < parent.size(); ++j)
    {
        depth[j] = depth[static_cast<std::size_t>(parent[j])] + 1;
    }
    return depth;
}

inline int lowest_common_ancestor(const std::vector<int>& parent, const std::vector<int>& depth,
                                  int a, int b)
{
    while (depth[static_cast<std::size_t>(a)] > depth[static_cast<std::size_t>(b)])
    {
        a = parent[static_cast<std::size_t>(a)];
    }
    while (depth[static_cast<std::size_t>(b)] > depth[static_cast<std::size_t>(a)])
    {
        b = parent[static_cast<std::size_t>(b)];
    }
    while (a != b)
    {
        a = parent[static_cast<std::size_t>(a)];
        b = parent[static_cast<std::size_t>(b)];
    }
    return a;
}

/// Joints needed by the selected vertices: skinning and corrective support,
/// closed to the lowest common ancestor, root lifted off kept blocks.
inline InfluenceSet influence_closure(const ModelContainer& m, const std::vector<char>& selected)
{
    const auto& parent = m.tree.parent;
    const auto k = static_cast<std::size_t>(m.joint_count());
    std::vector<char> in_set(k, 0);

    for (std::size_t v = 0; v < selected.size(); ++v)
    {
        if (!selected[v]) continue;
        for (std::int32_t e = m.skinning.rowptr[v]; e < m.skinning.rowptr[v + 1]; ++e)
        {
            in_set[static_cast<std::size_t>(m.skinning.joints[static_cast<std::size_t>(e)])] = 1;
        }
    }
    auto block_kept = [&m, &selected](const PoseBlendBlock& b) {
        return std::any_of(b.vertices.begin(), b.vertices.end(), [&selected](std::int32_t v) {
            return selected[static_cast<std::size_t>(v)] != 0;
        });
    };
    for (const auto& b : m.pose_blendshapes)
    {
        if (block_kept(b)) in_set[static_cast<std::size_t>(b.joint)] = 1;
    }

    std::vector<int> support;
    for (std::size_t j = 0; j < k; ++j)
    {
        if (in_set[j]) support.push_back(static_cast<int>(j));
    }
    if (support.empty())
    {
        throw InvalidArgumentError("selection has no joint influence");
    }

    const auto depth = joint_depths(parent);
    int root = support.front();
    for (const int j : support)
    {
        root = lowest_common_ancestor(parent, depth, root, j);
    }
    in_set[static_cast<std::size_t>(root)] = 1;
    for (int j : support)
    {
        while (j != root)
        {
            in_set[static_cast<std::size_t>(j)] = 1;
            j = parent[static_cast<std::size_t>(j)];
        }
    }

    // A kept block on the root would lose its pose feature; hoist the root.
    bool lifted = true;
    while (lifted && root != 0)
    {
        lifted = false;
        for (const auto& b : m.pose_blendshapes)
        {
            if (b.joint == root && block_kept(b))
            {
                root = parent[static_cast<std::size_t>(root)];
                in_set[static_cast<std::size_t>(root)] = 1;
                lifted = true;
                break;
            }
        }
    }

    InfluenceSet out;
    out.root = root;
    for (std::size_t j = 0; j < k; ++j)
    {
        if (in_set[j]) out.joints.push_back(static_cast<int>(j));
    }
    return out;
}

inline std::vector<char> selection_mask(const ModelContainer& m,
                                        const std::vector<std::int32_t>& vertices)
{
    if (vertices.empty())
    {
        throw InvalidArgumentError("part selection is empty");
    }
    std::vector<char> mask(static_cast<std::size_t>(m.vertex_count()), 0);
    for (const auto v : vertices)
    {
        if (v < 0 || v >= static_cast<std::int32_t>(mask.size()))
        {
            throw InvalidArgumentError("part selection vertex " + std::to_string(v) +
                                       " out of range");
        }
        mask[static_cast<std::size_t>(v)] = 1;
    }
    return mask;
}

} // namespace parts_detail

inline PartModel separate(const ModelContainer& m, const std::vector<std::int32_t>& vertices)
{
    using parts_detail::influence_closure;
    using parts_detail::selection_mask;

    const auto selected = selection_mask(m, vertices);
    const auto influence = influence_closure(m, selected);

    PartModel part;
    for (std::size_t v = 0; v < selected.size(); ++v)
    {
        if (selected[v]) part.vertex_map.push_back(static_cast<std::int32_t>(v));
    }
    for (const int j : influence.joints)
    {
        part.joint_map.push_back(j);
    }
    const auto n_part = static_cast<Eigen::Index>(part.vertex_map.size());
    const auto k_part = static_cast<int>(part.joint_map.size());

    std::vector<std::int32_t> vmap(selected.size(), -1);
    for (std::size_t i = 0; i < part.vertex_map.size(); ++i)
    {
        vmap[static_cast<std::size_t>(part.vertex_map[i])] = static_cast<std::int32_t>(i);
    }
    std::vector<int> jmap(static_cast<std::size_t>(m.joint_count()), -1);
    for (int i = 0; i < k_part; ++i)
    {
        jmap[static_cast<std::size_t>(part.joint_map[static_cast<std::size_t>(i)])] = i;
    }

    ModelContainer& out = part.model;

    out.template_vertices.resize(n_part, 3);
    for (Eigen::Index i = 0; i < n_part; ++i)
    {
        out.template_vertices.row(i) =
            m.template_vertices.row(part.vertex_map[static_cast<std::size_t>(i)]);
    }

    {
        std::vector<std::array<std::int32_t, 3>> kept;
        for (Eigen::Index f = 0; f < m.faces.rows(); ++f)
        {
            const std::int32_t a = vmap[static_cast<std::size_t>(m.faces(f, 0))];
            const std::int32_t b = vmap[static_cast<std::size_t>(m.faces(f, 1))];
            const std::int32_t c = vmap[static_cast<std::size_t>(m.faces(f, 2))];
            if (a >= 0 && b >= 0 && c >= 0) kept.push_back({a, b, c});
        }
        out.faces.resize(static_cast<Eigen::Index>(kept.size()), 3);
        for (std::size_t f = 0; f < kept.size(); ++f)
        {
            for (int d = 0; d < 3; ++d)
            {
                out.faces(static_cast<Eigen::Index>(f), d) = kept[f][static_cast<std::size_t>(d)];
            }
        }
    }

    out.tree.parent.resize(static_cast<std::size_t>(k_part));
    out.tree.joint_names.resize(static_cast<std::size_t>(k_part));
    out.tree.neighbor_sets.resize(static_cast<std::size_t>(k_part));
    for (int i = 0; i < k_part; ++i)
    {
        const int j = part.joint_map[static_cast<std::size_t>(i)];
        out.tree.joint_names[static_cast<std::size_t>(i)] =
            m.tree.joint_names[static_cast<std::size_t>(j)];
        if (j == influence.root)
        {
            out.tree.parent[static_cast<std::size_t>(i)] = -1;
            out.tree.neighbor_sets[static_cast<std::size_t>(i)] = {};
            continue;
        }
        out.tree.parent[static_cast<std::size_t>(i)] =
            jmap[static_cast<std::size_t>(m.tree.parent[static_cast<std::size_t>(j)])];
        std::vector<int> ne;
        for (const int q : m.tree.neighbor_sets[static_cast<std::size_t>(j)])
        {
            if (jmap[static_cast<std::size_t>(q)] >= 0)
            {
                ne.push_back(jmap[static_cast<std::size_t>(q)]);
            }
        }
        out.tree.neighbor_sets[static_cast<std::size_t>(i)] = std::move(ne);
    }

    out.skinning.rowptr.assign(1, 0);
    for (Eigen::Index i = 0; i < n_part; ++i)
    {
        const auto v = static_cast<std::size_t>(part.vertex_map[static_cast<std::size_t>(i)]);
        for (std::int32_t e = m.skinning.rowptr[v]; e < m.skinning.rowptr[v + 1]; ++e)
        {
            out.skinning.joints.push_back(
                jmap[static_cast<std::size_t>(m.skinning.joints[static_cast<std::size_t>(e)])]);
            out.skinning.weights.push_back(m.skinning.weights[static_cast<std::size_t>(e)]);
        }
        out.skinning.rowptr.push_back(static_cast<std::int32_t>(out.skinning.joints.size()));
    }

    out.joint_regressor.rowptr.assign(1, 0);
    for (int i = 0; i < k_part; ++i)
    {
        const auto j = static_cast<std::size_t>(part.joint_map[static_cast<std::size_t>(i)]);
        std::vector<std::int32_t> src;
        std::vector<double> w;
        bool complete = true;
        for (std::int32_t e = m.joint_regressor.rowptr[j]; e < m.joint_regressor.rowptr[j + 1];
             ++e)
        {
            const auto v = m.joint_regressor.vertices[static_cast<std::size_t>(e)];
            if (vmap[static_cast<std::size_t>(v)] >= 0)
            {
                src.push_back(vmap[static_cast<std::size_t>(v)]);
                w.push_back(m.joint_regressor.weights[static_cast<std::size_t>(e)]);
            }
            else
            {
                complete = false;
            }
        }
        if (src.empty())
        {
            throw ModelError("part cannot regress joint '" +
                             m.tree.joint_names[j] + "': no source vertex selected");
        }
        if (!complete)
        {
            part.regressor_renormalized = true;
            double sum = 0.0;
            for (const double x : w) sum += x;
            if (sum <= 0.0)
            {
                throw ModelError("part regressor for joint '" + m.tree.joint_names[j] +
                                 "' has zero mass after restriction");
            }
            for (double& x : w) x /= sum;
        }
        out.joint_regressor.vertices.insert(out.joint_regressor.vertices.end(), src.begin(),
                                            src.end());
        out.joint_regressor.weights.insert(out.joint_regressor.weights.end(), w.begin(),
                                           w.end());
        out.joint_regressor.rowptr.push_back(
            static_cast<std::int32_t>(out.joint_regressor.vertices.size()));
    }

    auto slice_basis = [&](const Eigen::MatrixXf& basis) {
        Eigen::MatrixXf sliced(3 * n_part, basis.cols());
        for (Eigen::Index i = 0; i < n_part; ++i)
        {
            const auto v =
                static_cast<Eigen::Index>(part.vertex_map[static_cast<std::size_t>(i)]);
            sliced.middleRows(3 * i, 3) = basis.middleRows(3 * v, 3);
        }
        return sliced;
    };
    if (m.shape_count() > 0) out.shape_space.basis = slice_basis(m.shape_space.basis);
    if (m.expression_count() > 0)
    {
        out.expression_space.basis = slice_basis(m.expression_space.basis);
    }

    for (const auto& b : m.pose_blendshapes)
    {
        if (jmap[static_cast<std::size_t>(b.joint)] < 0) continue;
        std::vector<Eigen::Index> rows;
        for (std::size_t i = 0; i < b.vertices.size(); ++i)
        {
            if (selected[static_cast<std::size_t>(b.vertices[i])])
            {
                rows.push_back(static_cast<Eigen::Index>(i));
            }
        }
        if (rows.empty()) continue;

        const auto& ne = m.tree.neighbor_sets[static_cast<std::size_t>(b.joint)];
        std::vector<std::size_t> kept_ne;
        for (std::size_t q = 0; q < ne.size(); ++q)
        {
            if (jmap[static_cast<std::size_t>(ne[q])] >= 0)
            {
                kept_ne.push_back(q);
                continue;
            }
            // Dropped neighbors must not influence the rows that stay.
            for (const auto i : rows)
            {
                for (int d = 0; d < 3; ++d)
                {
                    for (int c = 0; c < 4; ++c)
                    {
                        if (b.coeffs(3 * i + d, static_cast<Eigen::Index>(4 * q) + c) != 0.0f)
                        {
                            throw ModelError(
                                "corrective block for joint '" +
                                m.tree.joint_names[static_cast<std::size_t>(b.joint)] +
                                "' depends on joint '" +
                                m.tree.joint_names[static_cast<std::size_t>(ne[q])] +
                                "' outside the part");
                        }
                    }
                }
            }
        }

        PoseBlendBlock nb;
        nb.joint = jmap[static_cast<std::size_t>(b.joint)];
        nb.activations.resize(static_cast<Eigen::Index>(rows.size()));
        nb.coeffs.resize(3 * static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(4 * kept_ne.size()));
        for (std::size_t i = 0; i < rows.size(); ++i)
        {
            nb.vertices.push_back(
                vmap[static_cast<std::size_t>(b.vertices[static_cast<std::size_t>(rows[i])])]);
            nb.activations[static_cast<Eigen::Index>(i)] = b.activations[rows[i]];
            for (std::size_t qi = 0; qi < kept_ne.size(); ++qi)
            {
                nb.coeffs.block<3, 4>(3 * static_cast<Eigen::Index>(i),
                                      4 * static_cast<Eigen::Index>(qi)) =
                    b.coeffs.block<3, 4>(3 * rows[i],
                                         4 * static_cast<Eigen::Index>(kept_ne[qi]));
            }
        }
        out.pose_blendshapes.push_back(std::move(nb));
    }

    if (!m.part_labels.empty())
    {
        out.part_label_names = m.part_label_names;
        for (const auto v : part.vertex_map)
        {
            out.part_labels.push_back(m.part_labels[static_cast<std::size_t>(v)]);
        }
    }

    for (const auto& net : m.foot_nets)
    {
        const bool verts_in = std::all_of(
            net.vertex_indices.begin(), net.vertex_indices.end(),
            [&vmap](std::int32_t v) { return vmap[static_cast<std::size_t>(v)] >= 0; });
        const bool joints_in =
            std::all_of(net.joint_indices.begin(), net.joint_indices.end(),
                        [&jmap](std::int32_t j) { return jmap[static_cast<std::size_t>(j)] >= 0; });
        if (!verts_in || !joints_in) continue;
        FootDeformNet kept = net;
        for (auto& v : kept.vertex_indices) v = vmap[static_cast<std::size_t>(v)];
        for (auto& j : kept.joint_indices) j = jmap[static_cast<std::size_t>(j)];
        out.foot_nets.push_back(std::move(kept));
    }

    out.validate();
    return part;
}

/// Builds a part selection from label names, then grows it until every kept
/// joint can be regressed exactly from selected vertices.
inline PartSpec part_spec_from_labels(const ModelContainer& m,
                                      const std::vector<std::string>& labels)
{
    if (labels.empty())
    {
        throw InvalidArgumentError("no part labels given");
    }
    if (m.part_labels.empty())
    {
        throw UnsupportedError("model carries no part labels");
    }

    std::vector<char> wanted(m.part_label_names.size(), 0);
    for (const auto& name : labels)
    {
        wanted[static_cast<std::size_t>(m.part_label_index(name))] = 1;
    }
    std::vector<char> sel(static_cast<std::size_t>(m.vertex_count()), 0);
    for (std::size_t v = 0; v < sel.size(); ++v)
    {
        if (wanted[static_cast<std::size_t>(m.part_labels[v])]) sel[v] = 1;
    }
    if (std::none_of(sel.begin(), sel.end(), [](char c) { return c != 0; }))
    {
        throw InvalidArgumentError("part labels select no vertices");
    }

    bool grew = true;
    while (grew)
    {
        grew = false;
        const auto influence = parts_detail::influence_closure(m, sel);
        for (const int j : influence.joints)
        {
            const auto js = static_cast<std::size_t>(j);
            for (std::int32_t e = m.joint_regressor.rowptr[js];
                 e < m.joint_regressor.rowptr[js + 1]; ++e)
            {
                const auto v = static_cast<std::size_t>(
                    m.joint_regressor.vertices[static_cast<std::size_t>(e)]);
                if (!sel[v])
                {
                    sel[v] = 1;
                    grew = true;
                }
            }
        }
    }

    PartSpec spec;
    for (std::size_t i = 0; i < labels.size(); ++i)
    {
        spec.name += (i == 0 ? "" : "+") + labels[i];
    }
    for (std::size_t v = 0; v < sel.size(); ++v)
    {
        if (sel[v]) spec.vertices.push_back(static_cast<std::int32_t>(v));
    }
    return spec;
}

} // namespace supr
