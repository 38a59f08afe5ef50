/*
 * supr - a sparse, separable statistical body model library
 *
 * File: include/supr/blendshapes.hpp
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

#include "supr/dual.hpp"
#include "supr/errors.hpp"
#include "supr/kinematics.hpp"
#include "supr/types.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace supr {

/**
 * Dense linear deformation basis (shape or expression space).
 *
 * Columns are deformation components over all vertices, flattened
 * vertex-major: row 3 * v + d holds the d-th coordinate of vertex v.
 * Entries are stored single-precision, matching the serialized form;
 * contractions accumulate in double.
 */
struct LinearDeformationBasis
{
    Eigen::MatrixXf basis; ///< 3 N x S, column-major

    int component_count() const { return static_cast<int>(basis.cols()); }
    int vertex_count() const { return static_cast<int>(basis.rows() / 3); }

    void validate(int n_vertices) const
    {
        if (basis.size() == 0) return; // absent space
        if (basis.rows() != 3 * static_cast<Eigen::Index>(n_vertices))
        {
            throw ModelError("deformation basis: expected " + std::to_string(3 * n_vertices) +
                             " rows, got " + std::to_string(basis.rows()));
        }
        if (!basis.allFinite()) throw ModelError("deformation basis: non-finite entries");
    }

    /**
     * Adds basis * coefficients to out (N x 3).
     *
     * Coefficient vectors shorter than the component count are implicitly
     * zero-padded; longer ones are rejected.
     */
    template <typename S>
    void add_offsets(MatX3<S>& out, const VecX<S>& coefficients) const
    {
        const Eigen::Index c = coefficients.size();
        if (c > basis.cols())
        {
            throw InvalidArgumentError("deformation basis: " + std::to_string(c) +
                                       " coefficients exceed " + std::to_string(basis.cols()) +
                                       " components");
        }
        if (c > 0 && out.rows() * 3 != basis.rows())
        {
            throw InvalidArgumentError("deformation basis: output vertex count mismatch");
        }
        const Eigen::Index rows = basis.rows();
        S* o = out.data(); // MatX3 is row-major, so the layout is vertex-major
        for (Eigen::Index s = 0; s < c; ++s)
        {
            const S cs = coefficients[s];
            // skip only when the column contributes neither value nor
            // derivative; a zero-valued coefficient may still carry a tangent
            if (value(cs) == 0.0 && tangent(cs) == 0.0) continue;
            const float* col = basis.col(s).data();
            for (Eigen::Index i = 0; i < rows; ++i)
            {
                o[i] += cs * S{static_cast<double>(col[i])};
            }
        }
    }

    /// basis * coefficients as an N x 3 offset matrix.
    template <typename S>
    MatX3<S> offsets(const VecX<S>& coefficients) const
    {
        MatX3<S> out = MatX3<S>::Zero(vertex_count(), 3);
        add_offsets(out, coefficients);
        return out;
    }
};

/**
 * Pose corrective block for one non-root joint.
 *
 * The block touches only the listed vertices. For vertex slot i with model
 * index vertices[i], the corrective offset is
 *
 *     activations[i] * coeffs.middleRows(3 i, 3) * feature
 *
 * where feature is the joint's pose feature (length 4 * |ne(joint)|, columns
 * ordered by the neighbor set, then (w-1, x, y, z) per neighbor). Activations
 * are all nonzero: a vertex with zero influence is simply not listed, which
 * is what makes the support set of each joint explicit.
 */
struct PoseBlendBlock
{
    int joint = -1;
    std::vector<std::int32_t> vertices; ///< strictly increasing model vertex indices
    Eigen::VectorXf activations;        ///< per listed vertex, all nonzero
    Eigen::MatrixXf coeffs;             ///< 3 |vertices| x 4 |ne(joint)|

    int vertex_slot_count() const { return static_cast<int>(vertices.size()); }
};

using PoseBlendshapes = std::vector<PoseBlendBlock>;

inline void validate_pose_blendshapes(const PoseBlendshapes& blocks, const KinematicTree& tree,
                                      int n_vertices)
{
    std::vector<bool> seen(static_cast<std::size_t>(tree.joint_count()), false);
    for (const auto& b : blocks)
    {
        if (b.joint <= 0 || b.joint >= tree.joint_count())
        {
            throw ModelError("pose blendshapes: block joint " + std::to_string(b.joint) +
                             " is the root or out of range");
        }
        if (seen[static_cast<std::size_t>(b.joint)])
        {
            throw ModelError("pose blendshapes: duplicate block for joint " +
                             std::to_string(b.joint));
        }
        seen[static_cast<std::size_t>(b.joint)] = true;

        const auto nv = static_cast<Eigen::Index>(b.vertices.size());
        for (std::size_t i = 0; i < b.vertices.size(); ++i)
        {
            const int v = b.vertices[i];
            if (v < 0 || v >= n_vertices)
            {
                throw ModelError("pose blendshapes: vertex index out of range in block for joint " +
                                 std::to_string(b.joint));
            }
            if (i > 0 && b.vertices[i] <= b.vertices[i - 1])
            {
                throw ModelError("pose blendshapes: vertices must be strictly increasing (joint " +
                                 std::to_string(b.joint) + ")");
            }
        }
        if (b.activations.size() != nv)
        {
            throw ModelError("pose blendshapes: activation count mismatch (joint " +
                             std::to_string(b.joint) + ")");
        }
        for (Eigen::Index i = 0; i < nv; ++i)
        {
            if (!std::isfinite(b.activations[i]) || b.activations[i] == 0.0f)
            {
                throw ModelError("pose blendshapes: activations must be finite and nonzero "
                                 "(joint " +
                                 std::to_string(b.joint) + ")");
            }
        }
        const auto ne_size =
            static_cast<Eigen::Index>(tree.neighbor_sets[static_cast<std::size_t>(b.joint)].size());
        if (b.coeffs.rows() != 3 * nv || b.coeffs.cols() != 4 * ne_size)
        {
            throw ModelError("pose blendshapes: coefficient matrix must be 3|V| x 4|ne| "
                             "(joint " +
                             std::to_string(b.joint) + ")");
        }
        if (!b.coeffs.allFinite())
        {
            throw ModelError("pose blendshapes: non-finite coefficients (joint " +
                             std::to_string(b.joint) + ")");
        }
    }
}

/// Adds one block's correctives, given the joint's pose feature.
template <typename S>
void accumulate_block(MatX3<S>& out, const PoseBlendBlock& block, const VecX<S>& feature)
{
    if (feature.size() != block.coeffs.cols())
    {
        throw InvalidArgumentError("pose blendshapes: feature length " +
                                   std::to_string(feature.size()) + " does not match " +
                                   std::to_string(block.coeffs.cols()) + " columns");
    }
    const Eigen::Index cols = block.coeffs.cols();
    for (std::size_t i = 0; i < block.vertices.size(); ++i)
    {
        const S act{static_cast<double>(block.activations[static_cast<Eigen::Index>(i)])};
        const Eigen::Index r0 = 3 * static_cast<Eigen::Index>(i);
        for (int d = 0; d < 3; ++d)
        {
            S acc{0};
            for (Eigen::Index c = 0; c < cols; ++c)
            {
                acc += S{static_cast<double>(block.coeffs(r0 + d, c))} * feature[c];
            }
            out(block.vertices[i], d) += act * acc;
        }
    }
}

/**
 * Accumulates all pose correctives into out (N x 3).
 *
 * Each block contracts its coefficients with the pose feature of its joint,
 * built from the quaternions of the joint's neighbor set. Joints without a
 * block contribute nothing, and at the rest pose every feature is exactly
 * zero, so out is unchanged bitwise.
 */
template <typename S>
void accumulate_pose_offsets(MatX3<S>& out, const PoseBlendshapes& blocks,
                             const std::vector<QuaternionT<S>>& quaternions,
                             const KinematicTree& tree)
{
    for (const auto& b : blocks)
    {
        const VecX<S> f = pose_feature(quaternions, tree, b.joint);
        accumulate_block(out, b, f);
    }
}

} // namespace supr
