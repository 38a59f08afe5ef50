/*
 * supr - a sparse, separable statistical body model library
 *
 * File: include/supr/model.hpp
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

#include "supr/blendshapes.hpp"
#include "supr/errors.hpp"
#include "supr/foot.hpp"
#include "supr/kinematics.hpp"
#include "supr/types.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace supr {

/// Vertex counts at which the full-size layout rules apply.
inline constexpr int kFullSizeVertexCount = 10475;
inline constexpr int kFullSizeJointCount = 75;
inline constexpr int kFullSizeFootVertexCount = 266;
inline constexpr int kFullSizeFootFeatureWidth = 320;

/**
 * Sparse per-vertex skinning weights in compressed row form.
 *
 * Row v holds the joints influencing vertex v. At most 8 entries per row,
 * weights non-negative, each row summing to 1 within 1e-6.
 */
struct SkinningWeights
{
    std::vector<std::int32_t> rowptr; ///< N + 1
    std::vector<std::int32_t> joints;
    std::vector<double> weights;

    int vertex_count() const { return static_cast<int>(rowptr.size()) - 1; }

    void validate(int n_vertices, int n_joints) const
    {
        if (rowptr.size() != static_cast<std::size_t>(n_vertices) + 1 || rowptr.front() != 0)
        {
            throw ModelError("skinning: row pointer must have N+1 entries starting at 0");
        }
        if (rowptr.back() != static_cast<std::int32_t>(joints.size()) ||
            joints.size() != weights.size())
        {
            throw ModelError("skinning: row pointer end does not match entry count");
        }
        for (int v = 0; v < n_vertices; ++v)
        {
            const int b = rowptr[static_cast<std::size_t>(v)];
            const int e = rowptr[static_cast<std::size_t>(v) + 1];
            if (e < b) throw ModelError("skinning: row pointer must be non-decreasing");
            const int nnz = e - b;
            if (nnz < 1 || nnz > 8)
            {
                throw ModelError("skinning: vertex " + std::to_string(v) + " has " +
                                 std::to_string(nnz) + " entries, expected 1 to 8");
            }
            double sum = 0.0;
            for (int i = b; i < e; ++i)
            {
                if (joints[static_cast<std::size_t>(i)] < 0 ||
                    joints[static_cast<std::size_t>(i)] >= n_joints)
                {
                    throw ModelError("skinning: joint index out of range at vertex " +
                                     std::to_string(v));
                }
                const double w = weights[static_cast<std::size_t>(i)];
                if (!std::isfinite(w) || w < 0.0)
                {
                    throw ModelError("skinning: weights must be finite and non-negative "
                                     "(vertex " +
                                     std::to_string(v) + ")");
                }
                sum += w;
            }
            if (std::abs(sum - 1.0) > 1e-6)
            {
                throw ModelError("skinning: weights of vertex " + std::to_string(v) +
                                 " sum to " + std::to_string(sum) + ", expected 1 within 1e-6");
            }
        }
    }
};

/**
 * Sparse joint regressor in compressed row form: row j lists the vertices
 * whose convex combination locates joint j on the shaped template surface.
 */
struct JointRegressor
{
    std::vector<std::int32_t> rowptr; ///< K + 1
    std::vector<std::int32_t> vertices;
    std::vector<double> weights;

    int joint_count() const { return static_cast<int>(rowptr.size()) - 1; }

    void validate(int n_joints, int n_vertices) const
    {
        if (rowptr.size() != static_cast<std::size_t>(n_joints) + 1 || rowptr.front() != 0)
        {
            throw ModelError("joint regressor: row pointer must have K+1 entries starting at 0");
        }
        if (rowptr.back() != static_cast<std::int32_t>(vertices.size()) ||
            vertices.size() != weights.size())
        {
            throw ModelError("joint regressor: row pointer end does not match entry count");
        }
        for (int j = 0; j < n_joints; ++j)
        {
            const int b = rowptr[static_cast<std::size_t>(j)];
            const int e = rowptr[static_cast<std::size_t>(j) + 1];
            if (e <= b)
            {
                throw ModelError("joint regressor: joint " + std::to_string(j) +
                                 " has no supporting vertices");
            }
            double sum = 0.0;
            for (int i = b; i < e; ++i)
            {
                if (vertices[static_cast<std::size_t>(i)] < 0 ||
                    vertices[static_cast<std::size_t>(i)] >= n_vertices)
                {
                    throw ModelError("joint regressor: vertex index out of range at joint " +
                                     std::to_string(j));
                }
                const double w = weights[static_cast<std::size_t>(i)];
                if (!std::isfinite(w) || w < 0.0)
                {
                    throw ModelError("joint regressor: weights must be finite and non-negative "
                                     "(joint " +
                                     std::to_string(j) + ")");
                }
                sum += w;
            }
            if (std::abs(sum - 1.0) > 1e-6)
            {
                throw ModelError("joint regressor: weights of joint " + std::to_string(j) +
                                 " sum to " + std::to_string(sum) + ", expected 1 within 1e-6");
            }
        }
    }
};

/// Free parameters of a model instance.
template <typename S>
struct ModelParamsT
{
    PoseStateT<S> pose;
    VecX<S> shape;      ///< may be shorter than the shape space; zero-padded
    VecX<S> expression; ///< may be shorter than the expression space; zero-padded
};

using ModelParams = ModelParamsT<double>;

/// Per-side contact flags; a side without flags leaves its foot net inactive.
struct ContactState
{
    std::optional<ContactFlags> left;
    std::optional<ContactFlags> right;
};

/// A posed surface with the model's triangulation.
struct PosedMesh
{
    MatX3d vertices;
    MatX3i faces;
};

/**
 * A complete factorized body model: template surface, kinematic tree, sparse
 * skinning weights, sparse joint regressor, dense shape and expression
 * spaces, sparse per-joint pose correctives, per-vertex part labels, and
 * optional foot deformation networks.
 */
struct ModelContainer
{
    MatX3d template_vertices; ///< N x 3 rest surface
    MatX3i faces;             ///< F x 3 triangles
    KinematicTree tree;
    SkinningWeights skinning;
    JointRegressor joint_regressor;
    LinearDeformationBasis shape_space;
    LinearDeformationBasis expression_space;
    PoseBlendshapes pose_blendshapes;
    std::vector<std::int32_t> part_labels;     ///< per vertex, index into part_label_names
    std::vector<std::string> part_label_names; ///< empty when the model is unlabeled
    std::vector<FootDeformNet> foot_nets;      ///< zero, one, or two sides

    int vertex_count() const { return static_cast<int>(template_vertices.rows()); }
    int joint_count() const { return tree.joint_count(); }
    int shape_count() const { return shape_space.component_count(); }
    int expression_count() const { return expression_space.component_count(); }
    bool is_full_size() const { return vertex_count() == kFullSizeVertexCount; }

    const FootDeformNet* foot_net(const std::string& side) const
    {
        for (const auto& n : foot_nets)
        {
            if (n.side == side) return &n;
        }
        return nullptr;
    }

    int part_label_index(const std::string& name) const
    {
        for (std::size_t i = 0; i < part_label_names.size(); ++i)
        {
            if (part_label_names[i] == name) return static_cast<int>(i);
        }
        throw InvalidArgumentError("model: unknown part label '" + name + "'");
    }

    void validate() const
    {
        const int n = vertex_count();
        const int k = joint_count();
        if (n < 1) throw ModelError("model: empty template");
        if (!template_vertices.allFinite())
        {
            throw ModelError("model: non-finite template vertices");
        }
        for (Eigen::Index f = 0; f < faces.rows(); ++f)
        {
            const auto a = faces(f, 0), b = faces(f, 1), c = faces(f, 2);
            if (a < 0 || a >= n || b < 0 || b >= n || c < 0 || c >= n)
            {
                throw ModelError("model: face vertex index out of range at face " +
                                 std::to_string(f));
            }
            if (a == b || b == c || a == c)
            {
                throw ModelError("model: degenerate face " + std::to_string(f));
            }
        }
        tree.validate();
        skinning.validate(n, k);
        joint_regressor.validate(k, n);
        shape_space.validate(n);
        expression_space.validate(n);
        validate_pose_blendshapes(pose_blendshapes, tree, n);

        if (!part_labels.empty())
        {
            if (part_labels.size() != static_cast<std::size_t>(n))
            {
                throw ModelError("model: part labels must cover every vertex");
            }
            if (part_label_names.empty())
            {
                throw ModelError("model: part labels present but no label names");
            }
            for (auto l : part_labels)
            {
                if (l < 0 || l >= static_cast<std::int32_t>(part_label_names.size()))
                {
                    throw ModelError("model: part label out of range");
                }
            }
        }

        bool saw_left = false, saw_right = false;
        for (const auto& net : foot_nets)
        {
            net.validate(n, k);
            bool& saw = net.side == "left" ? saw_left : saw_right;
            if (saw) throw ModelError("model: duplicate foot net for side " + net.side);
            saw = true;
        }

        if (is_full_size())
        {
            if (k != kFullSizeJointCount)
            {
                throw ModelError("model: full-size template requires " +
                                 std::to_string(kFullSizeJointCount) + " joints, got " +
                                 std::to_string(k));
            }
            for (const auto& net : foot_nets)
            {
                if (net.foot_vertex_count() != kFullSizeFootVertexCount)
                {
                    throw ModelError("model: full-size foot net must cover " +
                                     std::to_string(kFullSizeFootVertexCount) +
                                     " vertices, got " + std::to_string(net.foot_vertex_count()) +
                                     " (" + net.side + ")");
                }
                if (net.feature_width() != kFullSizeFootFeatureWidth)
                {
                    throw ModelError("model: full-size foot feature width must be " +
                                     std::to_string(kFullSizeFootFeatureWidth) + ", got " +
                                     std::to_string(net.feature_width()) + " (" + net.side + ")");
                }
            }
        }
    }

    /// Shape-space offsets only (N x 3), zero when no coefficients are given.
    template <typename S>
    MatX3<S> shape_offsets(const VecX<S>& shape) const
    {
        MatX3<S> out = MatX3<S>::Zero(vertex_count(), 3);
        shape_space.add_offsets(out, shape);
        return out;
    }

    /// Joint locations regressed from a shape-corrected template. Pose and
    /// expression never move the joints.
    template <typename S>
    MatX3<S> regress_joints(const MatX3<S>& shaped) const
    {
        const int k = joint_count();
        MatX3<S> joints(k, 3);
        for (int j = 0; j < k; ++j)
        {
            S x{0}, y{0}, z{0};
            const int b = joint_regressor.rowptr[static_cast<std::size_t>(j)];
            const int e = joint_regressor.rowptr[static_cast<std::size_t>(j) + 1];
            for (int i = b; i < e; ++i)
            {
                const int v = joint_regressor.vertices[static_cast<std::size_t>(i)];
                const S w{joint_regressor.weights[static_cast<std::size_t>(i)]};
                x += w * shaped(v, 0);
                y += w * shaped(v, 1);
                z += w * shaped(v, 2);
            }
            joints(j, 0) = x;
            joints(j, 1) = y;
            joints(j, 2) = z;
        }
        return joints;
    }

    /**
     * Linear blend skinning in delta form:
     *
     *     v' = v + sum_j w_vj ((R_j - I) v + t_j)
     *
     * Algebraically equal to the usual convex blend of per-joint transforms
     * when the weights sum to one, but exactly the identity map at the rest
     * pose even when a row sum carries rounding error.
     */
    template <typename S>
    MatX3<S> skin(const MatX3<S>& unposed, const std::vector<RigidTransformT<S>>& world) const
    {
        const int n = vertex_count();
        if (unposed.rows() != n) throw InvalidArgumentError("skin: vertex count mismatch");
        if (world.size() != static_cast<std::size_t>(joint_count()))
        {
            throw InvalidArgumentError("skin: transform count mismatch");
        }
        MatX3<S> out(n, 3);
        for (int v = 0; v < n; ++v)
        {
            const S x = unposed(v, 0), y = unposed(v, 1), z = unposed(v, 2);
            S ox = x, oy = y, oz = z;
            const int b = skinning.rowptr[static_cast<std::size_t>(v)];
            const int e = skinning.rowptr[static_cast<std::size_t>(v) + 1];
            for (int i = b; i < e; ++i)
            {
                const auto& t = world[static_cast<std::size_t>(
                    skinning.joints[static_cast<std::size_t>(i)])];
                const S w{skinning.weights[static_cast<std::size_t>(i)]};
                const auto& r = t.rotation;
                const S dx = r(0, 0) * x + r(0, 1) * y + r(0, 2) * z + t.translation[0] - x;
                const S dy = r(1, 0) * x + r(1, 1) * y + r(1, 2) * z + t.translation[1] - y;
                const S dz = r(2, 0) * x + r(2, 1) * y + r(2, 2) * z + t.translation[2] - z;
                ox += w * dx;
                oy += w * dy;
                oz += w * dz;
            }
            out(v, 0) = ox;
            out(v, 1) = oy;
            out(v, 2) = oz;
        }
        return out;
    }

    /// Posed surface vertices; contact-conditioned foot deformation applies
    /// only to the sides with flags in `contacts`.
    template <typename S>
    MatX3<S> forward_vertices(const ModelParamsT<S>& params,
                              const ContactState& contacts = {}) const
    {
        using supr::isfinite;
        using std::isfinite;
        if (params.pose.joint_count() != joint_count())
        {
            throw InvalidArgumentError("forward: pose has " +
                                       std::to_string(params.pose.joint_count()) +
                                       " joints, model has " + std::to_string(joint_count()));
        }
        for (Eigen::Index i = 0; i < params.shape.size(); ++i)
        {
            if (!isfinite(params.shape[i]))
            {
                throw InvalidArgumentError("forward: non-finite shape coefficient");
            }
        }
        for (Eigen::Index i = 0; i < params.expression.size(); ++i)
        {
            if (!isfinite(params.expression[i]))
            {
                throw InvalidArgumentError("forward: non-finite expression coefficient");
            }
        }

        // Shape-corrected template and the joints it implies.
        const MatX3<S> s_offsets = shape_offsets(params.shape);
        MatX3<S> shaped = template_vertices.template cast<S>();
        shaped += s_offsets;
        const MatX3<S> joints = regress_joints(shaped);

        // Expression and pose correctives on the unposed surface.
        MatX3<S> unposed = shaped;
        expression_space.add_offsets(unposed, params.expression);
        const auto quaternions = pose_quaternions(params.pose);
        accumulate_pose_offsets(unposed, pose_blendshapes, quaternions, tree);

        // Contact-conditioned foot deformation, masked to the foot vertices.
        auto apply_foot = [&](const std::optional<ContactFlags>& contact, const char* side) {
            if (!contact) return;
            const FootDeformNet* net = foot_net(side);
            if (net == nullptr)
            {
                throw UnsupportedError(std::string("forward: contact flags given for the ") +
                                       side + " foot, but the model has no such network");
            }
            const VecX<S> beta_foot = net->project_shape(s_offsets);
            const VecX<S> feature = net->assemble_feature(quaternions, beta_foot, *contact);
            net->scatter_offsets(unposed, net->forward(feature));
        };
        apply_foot(contacts.left, "left");
        apply_foot(contacts.right, "right");

        const auto world = world_transforms(params.pose, tree, joints);
        return skin(unposed, world);
    }

    /// Convenience wrapper returning the posed surface with faces attached.
    PosedMesh posed_mesh(const ModelParams& params, const ContactState& contacts = {}) const
    {
        return PosedMesh{forward_vertices(params, contacts), faces};
    }
};

} // namespace supr
