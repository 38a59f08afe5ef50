/*
 * supr - a sparse, separable statistical body model library
 *
 * File: include/supr/oracle.hpp
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
#include "supr/types.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

/**
 * Reference implementation of the posing pipeline, written the dense
 * textbook way on purpose: Rodrigues rotations from trigonometry, dense
 * weight and regressor matrices, homogeneous 4x4 forward kinematics, and the
 * classic convex-blend skinning sum. It shares no numerical shortcuts with
 * the engine, so agreement between the two is evidence for both.
 *
 * Everything here materializes dense matrices, so a size guard refuses
 * models beyond N * K = 1e5; production-scale models must go through the
 * sparse engine.
 */
namespace supr::oracle {

inline void check_scale(const ModelContainer& model)
{
    const std::int64_t nk =
        static_cast<std::int64_t>(model.vertex_count()) * model.joint_count();
    if (nk > 100000)
    {
        throw UnsupportedError("oracle: model too large for dense reference (N*K = " +
                               std::to_string(nk) + ")");
    }
}

/// Rodrigues formula: R = I + sin(t) S + (1 - cos(t)) S^2 with S the unit
/// axis cross-product matrix. Zero rotation returns the identity.
inline Mat3d rodrigues(const Vec3d& axis_angle)
{
    const double theta = axis_angle.norm();
    if (theta == 0.0) return Mat3d::Identity();
    const Vec3d a = axis_angle / theta;
    Mat3d s;
    s << 0.0, -a[2], a[1], a[2], 0.0, -a[0], -a[1], a[0], 0.0;
    return Mat3d::Identity() + std::sin(theta) * s + (1.0 - std::cos(theta)) * (s * s);
}

/// Canonical quaternion (w, x, y, z) computed directly from trigonometry.
inline Eigen::Vector4d quaternion(const Vec3d& axis_angle)
{
    const double theta = axis_angle.norm();
    if (theta == 0.0) return Eigen::Vector4d(1.0, 0.0, 0.0, 0.0);
    const Vec3d a = axis_angle / theta;
    Eigen::Vector4d q;
    q[0] = std::cos(theta / 2.0);
    q.tail<3>() = std::sin(theta / 2.0) * a;
    if (q[0] < 0.0) q = -q;
    return q;
}

/// Dense N x K skinning weight matrix.
inline Eigen::MatrixXd dense_skinning(const ModelContainer& model)
{
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(model.vertex_count(), model.joint_count());
    for (int v = 0; v < model.vertex_count(); ++v)
    {
        for (int i = model.skinning.rowptr[static_cast<std::size_t>(v)];
             i < model.skinning.rowptr[static_cast<std::size_t>(v) + 1]; ++i)
        {
            w(v, model.skinning.joints[static_cast<std::size_t>(i)]) +=
                model.skinning.weights[static_cast<std::size_t>(i)];
        }
    }
    return w;
}

/// Dense K x N joint regressor matrix.
inline Eigen::MatrixXd dense_regressor(const ModelContainer& model)
{
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(model.joint_count(), model.vertex_count());
    for (int r = 0; r < model.joint_count(); ++r)
    {
        for (int i = model.joint_regressor.rowptr[static_cast<std::size_t>(r)];
             i < model.joint_regressor.rowptr[static_cast<std::size_t>(r) + 1]; ++i)
        {
            j(r, model.joint_regressor.vertices[static_cast<std::size_t>(i)]) +=
                model.joint_regressor.weights[static_cast<std::size_t>(i)];
        }
    }
    return j;
}

/// Dense linear-basis expansion: per vertex and coordinate, the inner
/// product of its basis row with the (zero-padded) coefficients.
inline MatX3d dense_basis_offsets(const LinearDeformationBasis& space, const VecXd& coeffs,
                                  int n_vertices)
{
    MatX3d out = MatX3d::Zero(n_vertices, 3);
    if (coeffs.size() == 0) return out;
    if (coeffs.size() > space.component_count())
    {
        throw InvalidArgumentError("oracle: coefficient vector exceeds basis components");
    }
    for (int v = 0; v < n_vertices; ++v)
    {
        for (int d = 0; d < 3; ++d)
        {
            double acc = 0.0;
            for (Eigen::Index s = 0; s < coeffs.size(); ++s)
            {
                acc += static_cast<double>(space.basis(3 * v + d, s)) * coeffs[s];
            }
            out(v, d) = acc;
        }
    }
    return out;
}

/// Pose correctives via dense per-joint expansion over all vertices.
inline MatX3d dense_pose_offsets(const ModelContainer& model, const ModelParams& params)
{
    const int n = model.vertex_count();
    MatX3d out = MatX3d::Zero(n, 3);
    for (const auto& block : model.pose_blendshapes)
    {
        const auto& ne = model.tree.neighbor_sets[static_cast<std::size_t>(block.joint)];
        VecXd feature(4 * static_cast<Eigen::Index>(ne.size()));
        for (std::size_t i = 0; i < ne.size(); ++i)
        {
            Eigen::Vector4d q =
                quaternion(params.pose.joint_rotations.row(ne[i]).transpose());
            q[0] -= 1.0;
            feature.segment<4>(4 * static_cast<Eigen::Index>(i)) = q;
        }
        // Scatter into a dense 3N x 4|ne| matrix, activations folded in.
        Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(3 * n, feature.size());
        for (std::size_t i = 0; i < block.vertices.size(); ++i)
        {
            const int v = block.vertices[i];
            for (int d = 0; d < 3; ++d)
            {
                for (Eigen::Index c = 0; c < feature.size(); ++c)
                {
                    dense(3 * v + d, c) =
                        static_cast<double>(block.activations[static_cast<Eigen::Index>(i)]) *
                        static_cast<double>(
                            block.coeffs(3 * static_cast<Eigen::Index>(i) + d, c));
                }
            }
        }
        const VecXd delta = dense * feature;
        for (int v = 0; v < n; ++v)
        {
            out(v, 0) += delta[3 * v + 0];
            out(v, 1) += delta[3 * v + 1];
            out(v, 2) += delta[3 * v + 2];
        }
    }
    return out;
}

/// Homogeneous world transforms, chained as 4x4 matrix products.
inline std::vector<Eigen::Matrix4d> dense_world_transforms(const ModelContainer& model,
                                                           const ModelParams& params,
                                                           const MatX3d& joints)
{
    std::vector<Eigen::Matrix4d> world(static_cast<std::size_t>(model.joint_count()));
    for (int j = 0; j < model.joint_count(); ++j)
    {
        const Mat3d r = rodrigues(params.pose.joint_rotations.row(j).transpose());
        const Vec3d c = joints.row(j).transpose();
        Eigen::Matrix4d local = Eigen::Matrix4d::Identity();
        local.topLeftCorner<3, 3>() = r;
        local.topRightCorner<3, 1>() = c - r * c;
        if (j == 0)
        {
            local.topRightCorner<3, 1>() += params.pose.global_translation;
            world[0] = local;
        } else
        {
            world[static_cast<std::size_t>(j)] =
                world[static_cast<std::size_t>(model.tree.parent[static_cast<std::size_t>(j)])] *
                local;
        }
    }
    return world;
}

/// Foot networks evaluated with dense double-precision Eigen products.
inline void add_foot_offsets(const ModelContainer& model, const ModelParams& params,
                             const ContactState& contacts, const MatX3d& shape_offsets,
                             MatX3d& unposed)
{
    auto apply = [&](const std::optional<ContactFlags>& contact, const char* side) {
        if (!contact) return;
        const FootDeformNet* net = model.foot_net(side);
        if (net == nullptr)
        {
            throw UnsupportedError(std::string("oracle: no foot network for side ") + side);
        }
        // beta_foot via a dense basis-transpose product.
        VecXd stacked(3 * net->foot_vertex_count());
        for (int i = 0; i < net->foot_vertex_count(); ++i)
        {
            stacked.segment<3>(3 * i) =
                shape_offsets.row(net->vertex_indices[static_cast<std::size_t>(i)]).transpose();
        }
        const VecXd beta_foot = net->shape_basis.cast<double>().transpose() * stacked;

        VecXd feature(net->feature_width());
        Eigen::Index o = 0;
        for (int j : net->joint_indices)
        {
            feature.segment<4>(o) = quaternion(params.pose.joint_rotations.row(j).transpose());
            o += 4;
        }
        feature.segment<2>(o) = beta_foot;
        o += 2;
        for (auto f : *contact) feature[o++] = static_cast<double>(f);

        VecXd x = feature;
        auto run_layers = [&](const std::vector<DenseLayer>& layers) {
            for (const auto& l : layers)
            {
                VecXd y = l.weight.cast<double>() * x + l.bias.cast<double>();
                if (l.leaky)
                {
                    for (Eigen::Index i = 0; i < y.size(); ++i)
                    {
                        if (y[i] < 0.0) y[i] *= static_cast<double>(FootDeformNet::kNegativeSlope);
                    }
                }
                x = y;
            }
        };
        run_layers(net->encoder);
        run_layers(net->decoder);

        for (int i = 0; i < net->foot_vertex_count(); ++i)
        {
            unposed.row(net->vertex_indices[static_cast<std::size_t>(i)]) +=
                x.segment<3>(3 * i).transpose();
        }
    };
    apply(contacts.left, "left");
    apply(contacts.right, "right");
}

/// Full reference forward pass.
inline MatX3d forward_vertices(const ModelContainer& model, const ModelParams& params,
                               const ContactState& contacts = {})
{
    check_scale(model);
    const int n = model.vertex_count();

    const MatX3d shape_offsets = dense_basis_offsets(model.shape_space, params.shape, n);
    MatX3d shaped = model.template_vertices + shape_offsets;

    const Eigen::MatrixXd jreg = dense_regressor(model);
    MatX3d joints(model.joint_count(), 3);
    for (int d = 0; d < 3; ++d) joints.col(d) = jreg * shaped.col(d);

    MatX3d unposed =
        shaped + dense_basis_offsets(model.expression_space, params.expression, n);
    unposed += dense_pose_offsets(model, params);
    add_foot_offsets(model, params, contacts, shape_offsets, unposed);

    const auto world = dense_world_transforms(model, params, joints);
    const Eigen::MatrixXd weights = dense_skinning(model);

    MatX3d out = MatX3d::Zero(n, 3);
    for (int v = 0; v < n; ++v)
    {
        const Eigen::Vector4d h(unposed(v, 0), unposed(v, 1), unposed(v, 2), 1.0);
        Eigen::Vector4d acc = Eigen::Vector4d::Zero();
        for (int j = 0; j < model.joint_count(); ++j)
        {
            if (weights(v, j) != 0.0) acc += weights(v, j) * (world[static_cast<std::size_t>(j)] * h);
        }
        out.row(v) = acc.head<3>().transpose();
    }
    return out;
}

} // namespace supr::oracle
