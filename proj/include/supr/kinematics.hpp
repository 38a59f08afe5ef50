/*
 * supr - a sparse, separable statistical body model library
 *
 * File: include/supr/kinematics.hpp
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
#include "supr/types.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace supr {

/**
 * Unit quaternion with scalar part first: (w, x, y, z).
 *
 * Stored canonically with w >= 0, so each rotation has a unique
 * representation and pose features are continuous around the rest pose.
 */
template <typename S>
struct QuaternionT
{
    S w{1}, x{0}, y{0}, z{0};

    static QuaternionT identity() { return QuaternionT{S{1}, S{0}, S{0}, S{0}}; }

    Mat3<S> to_rotation_matrix() const
    {
        Mat3<S> r;
        const S two{2};
        r(0, 0) = S{1} - two * (y * y + z * z);
        r(0, 1) = two * (x * y - w * z);
        r(0, 2) = two * (x * z + w * y);
        r(1, 0) = two * (x * y + w * z);
        r(1, 1) = S{1} - two * (x * x + z * z);
        r(1, 2) = two * (y * z - w * x);
        r(2, 0) = two * (x * z - w * y);
        r(2, 1) = two * (y * z + w * x);
        r(2, 2) = S{1} - two * (x * x + y * y);
        return r;
    }
};

using Quaterniond = QuaternionT<double>;

/**
 * Converts an axis-angle vector (axis * angle, radians) to a canonical unit
 * quaternion.
 *
 * Near zero rotation the closed form sin(t/2)/t is replaced by its Taylor
 * series, which keeps the function smooth there so forward-mode derivatives
 * stay exact. Canonicalization negates the quaternion when w < 0; that choice
 * depends on the value only, never on the tangent, so it does not perturb
 * derivatives away from the w = 0 boundary.
 */
template <typename S>
QuaternionT<S> axis_angle_to_quaternion(const Vec3<S>& axis_angle)
{
    using supr::isfinite;
    using std::isfinite;
    if (!(isfinite(axis_angle[0]) && isfinite(axis_angle[1]) && isfinite(axis_angle[2])))
    {
        throw InvalidArgumentError("axis_angle_to_quaternion: non-finite input");
    }

    const S n2 = axis_angle.squaredNorm();
    QuaternionT<S> q;
    if (value(n2) < 1e-8)
    {
        // w = cos(t/2), k = sin(t/2)/t expanded around t^2 = 0.
        q.w = S{1} - n2 / S{8} + n2 * n2 / S{384};
        const S k = S{0.5} - n2 / S{48} + n2 * n2 / S{3840};
        q.x = k * axis_angle[0];
        q.y = k * axis_angle[1];
        q.z = k * axis_angle[2];
    } else
    {
        using supr::sqrt;
        using std::sqrt;
        using supr::sin;
        using std::sin;
        using supr::cos;
        using std::cos;
        const S theta = sqrt(n2);
        const S half = theta / S{2};
        q.w = cos(half);
        const S k = sin(half) / theta;
        q.x = k * axis_angle[0];
        q.y = k * axis_angle[1];
        q.z = k * axis_angle[2];
    }
    if (value(q.w) < 0.0)
    {
        q.w = -q.w;
        q.x = -q.x;
        q.y = -q.y;
        q.z = -q.z;
    }
    return q;
}

/// Rotation matrix for an axis-angle vector, via the quaternion form.
template <typename S>
Mat3<S> axis_angle_to_rotation_matrix(const Vec3<S>& axis_angle)
{
    return axis_angle_to_quaternion(axis_angle).to_rotation_matrix();
}

/**
 * Rigid transform x -> R x + t.
 */
template <typename S>
struct RigidTransformT
{
    Mat3<S> rotation = Mat3<S>::Identity();
    Vec3<S> translation = Vec3<S>::Zero();

    Vec3<S> apply(const Vec3<S>& x) const { return rotation * x + translation; }

    /// Composition: (a * b)(x) = a(b(x)).
    friend RigidTransformT operator*(const RigidTransformT& a, const RigidTransformT& b)
    {
        RigidTransformT r;
        r.rotation = a.rotation * b.rotation;
        r.translation = a.rotation * b.translation + a.translation;
        return r;
    }
};

using RigidTransformd = RigidTransformT<double>;

/**
 * Kinematic tree over K joints.
 *
 * parent[0] == -1 marks the root; every other joint's parent has a smaller
 * index, so a single ascending pass computes world transforms. neighbor_sets
 * lists, for each non-root joint, the joints whose rotations drive that
 * joint's pose correctives, in a fixed order (the feature layout depends on
 * it). The root has an empty set: its rotation is a global orientation and
 * must not induce surface deformation.
 */
struct KinematicTree
{
    std::vector<int> parent;
    std::vector<std::string> joint_names;
    std::vector<std::vector<int>> neighbor_sets;

    int joint_count() const { return static_cast<int>(parent.size()); }

    void validate() const
    {
        const int k = joint_count();
        if (k == 0) throw ModelError("kinematic tree: no joints");
        if (parent[0] != -1) throw ModelError("kinematic tree: joint 0 must be the root");
        for (int j = 1; j < k; ++j)
        {
            if (parent[j] < 0 || parent[j] >= j)
            {
                throw ModelError("kinematic tree: parent of joint " + std::to_string(j) +
                                 " must precede it, got " + std::to_string(parent[j]));
            }
        }
        if (joint_names.size() != static_cast<std::size_t>(k))
        {
            throw ModelError("kinematic tree: joint_names size mismatch");
        }
        if (neighbor_sets.size() != static_cast<std::size_t>(k))
        {
            throw ModelError("kinematic tree: neighbor_sets size mismatch");
        }
        if (!neighbor_sets[0].empty())
        {
            throw ModelError("kinematic tree: root must have an empty neighbor set");
        }
        for (int j = 1; j < k; ++j)
        {
            if (neighbor_sets[j].empty())
            {
                throw ModelError("kinematic tree: joint " + std::to_string(j) +
                                 " has an empty neighbor set");
            }
            for (int n : neighbor_sets[j])
            {
                if (n < 0 || n >= k)
                {
                    throw ModelError("kinematic tree: neighbor index out of range at joint " +
                                     std::to_string(j));
                }
            }
        }
    }

    /// Default neighbor relation: each non-root joint is driven by its parent,
    /// itself, and its children, in ascending joint order.
    static std::vector<std::vector<int>> default_neighbor_sets(const std::vector<int>& parent)
    {
        const int k = static_cast<int>(parent.size());
        std::vector<std::vector<int>> ne(k);
        for (int j = 1; j < k; ++j)
        {
            if (parent[j] > 0) ne[j].push_back(parent[j]);
            ne[j].push_back(j);
            for (int c = j + 1; c < k; ++c)
            {
                if (parent[c] == j) ne[j].push_back(c);
            }
        }
        return ne;
    }
};

/**
 * Pose of a model instance: one axis-angle rotation per joint (row j of
 * joint_rotations) plus a global translation applied at the root.
 */
template <typename S>
struct PoseStateT
{
    MatX3<S> joint_rotations; ///< K x 3, axis-angle per joint
    Vec3<S> global_translation = Vec3<S>::Zero();

    static PoseStateT rest(int joint_count)
    {
        PoseStateT p;
        p.joint_rotations = MatX3<S>::Zero(joint_count, 3);
        return p;
    }

    int joint_count() const { return static_cast<int>(joint_rotations.rows()); }
};

using PoseState = PoseStateT<double>;

/// Throws unless every rotation is finite and each axis-angle norm is below
/// 2*pi. Separate from the forward pass: poses outside this range are legal
/// inputs to the kinematics, just unusual as optimization states.
template <typename S>
void validate_pose(const PoseStateT<S>& pose)
{
    constexpr double two_pi = 6.283185307179586;
    for (int j = 0; j < pose.joint_count(); ++j)
    {
        const Vec3<S> aa = pose.joint_rotations.row(j).transpose();
        using supr::isfinite;
        using std::isfinite;
        if (!(isfinite(aa[0]) && isfinite(aa[1]) && isfinite(aa[2])))
        {
            throw InvalidArgumentError("pose: non-finite rotation at joint " + std::to_string(j));
        }
        if (value(aa.squaredNorm()) >= two_pi * two_pi)
        {
            throw InvalidArgumentError("pose: rotation magnitude at joint " + std::to_string(j) +
                                       " is not below 2*pi");
        }
    }
}

/// Canonical quaternion per joint, in joint order.
template <typename S>
std::vector<QuaternionT<S>> pose_quaternions(const PoseStateT<S>& pose)
{
    std::vector<QuaternionT<S>> qs(static_cast<std::size_t>(pose.joint_count()));
    for (int j = 0; j < pose.joint_count(); ++j)
    {
        const Vec3<S> aa = pose.joint_rotations.row(j).transpose();
        qs[static_cast<std::size_t>(j)] = axis_angle_to_quaternion(aa);
    }
    return qs;
}

/**
 * Pose feature for one non-root joint: the concatenation, over its neighbor
 * set, of (q - identity) as (w-1, x, y, z). Length is 4 * |ne(j)|; the rest
 * pose maps to the zero vector, so pose correctives vanish there.
 */
template <typename S>
VecX<S> pose_feature(const std::vector<QuaternionT<S>>& quaternions, const KinematicTree& tree,
                     int joint)
{
    if (joint <= 0 || joint >= tree.joint_count())
    {
        throw InvalidArgumentError("pose_feature: joint " + std::to_string(joint) +
                                   " is the root or out of range");
    }
    const auto& ne = tree.neighbor_sets[static_cast<std::size_t>(joint)];
    VecX<S> f(4 * static_cast<Eigen::Index>(ne.size()));
    Eigen::Index o = 0;
    for (int n : ne)
    {
        const auto& q = quaternions[static_cast<std::size_t>(n)];
        f[o + 0] = q.w - S{1};
        f[o + 1] = q.x;
        f[o + 2] = q.y;
        f[o + 3] = q.z;
        o += 4;
    }
    return f;
}

/// Convenience overload computing quaternions from the pose.
template <typename S>
VecX<S> pose_feature(const PoseStateT<S>& pose, const KinematicTree& tree, int joint)
{
    return pose_feature(pose_quaternions(pose), tree, joint);
}

/**
 * World transform per joint for a pose and rest-pose joint locations.
 *
 * Each joint rotates about its own rest location c_j: the local transform is
 * (R_j, c_j - R_j c_j), so the rest pose yields identities everywhere. The
 * root additionally carries the global translation. Transforms are chained
 * root-to-leaf in one ascending pass (parents precede children).
 */
template <typename S>
std::vector<RigidTransformT<S>> world_transforms(const PoseStateT<S>& pose,
                                                 const KinematicTree& tree,
                                                 const MatX3<S>& joint_locations)
{
    const int k = tree.joint_count();
    if (pose.joint_count() != k)
    {
        throw InvalidArgumentError("world_transforms: pose has " +
                                   std::to_string(pose.joint_count()) + " joints, tree has " +
                                   std::to_string(k));
    }
    if (joint_locations.rows() != k)
    {
        throw InvalidArgumentError("world_transforms: joint_locations row count mismatch");
    }
    using supr::isfinite;
    using std::isfinite;
    for (int j = 0; j < k; ++j)
    {
        for (int d = 0; d < 3; ++d)
        {
            if (!isfinite(pose.joint_rotations(j, d)))
            {
                throw InvalidArgumentError("world_transforms: non-finite rotation at joint " +
                                           std::to_string(j));
            }
        }
    }
    for (int d = 0; d < 3; ++d)
    {
        if (!isfinite(pose.global_translation[d]))
        {
            throw InvalidArgumentError("world_transforms: non-finite global translation");
        }
    }

    std::vector<RigidTransformT<S>> world(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j)
    {
        const Vec3<S> aa = pose.joint_rotations.row(j).transpose();
        const Vec3<S> c = joint_locations.row(j).transpose();
        RigidTransformT<S> local;
        local.rotation = axis_angle_to_rotation_matrix(aa);
        local.translation = c - local.rotation * c;
        if (j == 0)
        {
            local.translation += pose.global_translation;
            world[0] = local;
        } else
        {
            world[static_cast<std::size_t>(j)] =
                world[static_cast<std::size_t>(tree.parent[static_cast<std::size_t>(j)])] * local;
        }
    }
    return world;
}

} // namespace supr
