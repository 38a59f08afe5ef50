/*
 * supr - a sparse, separable statistical body model library
 *
 * File: include/supr/synth.hpp
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

#include "supr/model.hpp"
#include "supr/types.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace supr {

/**
 * Options for the synthetic model generator.
 *
 * Generated models are structured like real capture-derived ones: every
 * joint owns a region of surface vertices skinned to it (and its parent),
 * plus six axis-aligned anchor vertices rigidly tied to the joint. Anchors
 * carry the joint regressor (weight 1/6 each) and move identically under
 * every shape component, so regressed joints track shape changes and part
 * models that keep a joint's anchors reproduce its location exactly.
 */
struct SynthOptions
{
    int vertex_count = 120;       ///< minimum total vertices (toy layouts)
    int joint_count = 6;          ///< toy joint count
    int shape_components = 8;
    int expression_components = 3;
    int max_extra_influences = 1; ///< extra skinning entries per surface vertex
    double activation_density = 1.0; ///< fraction of region vertices in the joint's corrective
    double cross_region_reach = 0.25; ///< chance a corrective reaches into the parent region
    bool with_foot_nets = false;
    bool full_size = false; ///< fixed 10475-vertex, 75-joint layout; overrides counts
};

namespace detail {

/// Deterministic value stream. The raw engine is the standardized 64-bit
/// Mersenne twister; the mappings to uniforms and normals are written out
/// here because the standard library distributions are free to differ
/// between implementations, which would break seed-stable fixtures.
class SynthRng
{
public:
    explicit SynthRng(std::uint64_t seed) : gen_(seed) {}

    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Inclusive on both ends.
    int uniform_int(int lo, int hi)
    {
        return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    double normal()
    {
        double u1 = uniform();
        while (u1 == 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    Vec3d unit_vector()
    {
        Vec3d v(normal(), normal(), normal());
        const double n = v.norm();
        return n == 0.0 ? Vec3d(1.0, 0.0, 0.0) : Vec3d(v / n);
    }

private:
    std::mt19937_64 gen_;
};

struct FullSizeLayout
{
    std::vector<int> parent;
    std::vector<std::string> names;
    std::vector<int> part_class; ///< per joint, index into part names
    std::vector<std::string> part_names{"body", "head", "hand_left",
                                        "hand_right", "foot_left", "foot_right"};
    std::vector<std::vector<int>> foot_joints{{}, {}}; ///< left, right
};

/// The fixed full-size skeleton: 75 joints over torso, head, two arms with
/// articulated hands, and two legs with articulated feet.
inline FullSizeLayout full_size_layout()
{
    FullSizeLayout l;
    auto add = [&l](const std::string& name, int parent, int part) {
        l.names.push_back(name);
        l.parent.push_back(parent);
        l.part_class.push_back(part);
        return static_cast<int>(l.parent.size()) - 1;
    };
    const int body = 0, head = 1;

    add("pelvis", -1, body);
    const int spine1 = add("spine1", 0, body);
    const int spine2 = add("spine2", spine1, body);
    const int spine3 = add("spine3", spine2, body);
    const int neck = add("neck", spine3, head);
    const int headj = add("head", neck, head);
    add("jaw", headj, head);
    add("eye_left", headj, head);
    add("eye_right", headj, head);

    std::vector<int> wrist(2);
    for (int s = 0; s < 2; ++s)
    {
        const std::string side = s == 0 ? "_left" : "_right";
        const int collar = add("collar" + side, spine3, body);
        const int shoulder = add("shoulder" + side, collar, body);
        const int elbow = add("elbow" + side, shoulder, body);
        wrist[static_cast<std::size_t>(s)] = add("wrist" + side, elbow, body);
    }
    for (int s = 0; s < 2; ++s)
    {
        const std::string side = s == 0 ? "_left" : "_right";
        const int hand = s == 0 ? 2 : 3;
        const int w = wrist[static_cast<std::size_t>(s)];
        const int thumb1 = add("thumb1" + side, w, hand);
        add("thumb2" + side, thumb1, hand);
        for (const char* finger : {"index", "middle", "ring", "pinky"})
        {
            const int f1 = add(std::string(finger) + "1" + side, w, hand);
            const int f2 = add(std::string(finger) + "2" + side, f1, hand);
            add(std::string(finger) + "3" + side, f2, hand);
        }
    }
    std::vector<int> knee(2);
    for (int s = 0; s < 2; ++s)
    {
        const std::string side = s == 0 ? "_left" : "_right";
        const int hip = add("hip" + side, 0, body);
        knee[static_cast<std::size_t>(s)] = add("knee" + side, hip, body);
    }
    for (int s = 0; s < 2; ++s)
    {
        const std::string side = s == 0 ? "_left" : "_right";
        const int foot = s == 0 ? 4 : 5;
        auto& fj = l.foot_joints[static_cast<std::size_t>(s)];
        const int ankle = add("ankle" + side, knee[static_cast<std::size_t>(s)], foot);
        const int heel = add("heel" + side, ankle, foot);
        const int ball = add("ball" + side, ankle, foot);
        fj = {ankle, heel, ball};
        for (int t = 1; t <= 5; ++t)
        {
            const int base = add("toe" + std::to_string(t) + "_base" + side, ball, foot);
            const int tip = add("toe" + std::to_string(t) + "_tip" + side, base, foot);
            fj.push_back(base);
            fj.push_back(tip);
        }
    }
    return l;
}

} // namespace detail

/**
 * Builds a random but fully valid model, deterministic in the seed.
 *
 * Layout guarantees, relied on throughout the test suite:
 *  - vertices are grouped per joint region: 6 anchors, then the region's
 *    surface vertices, regions ordered by joint index;
 *  - anchors are skinned rigidly to their joint, excluded from correctives,
 *    and share one shape offset per (joint, component) pair;
 *  - the joint regressor row of joint j averages exactly j's 6 anchors;
 *  - surface vertices are skinned to their region's joint and its parent
 *    (plus optional extra entries on the grandparent or a child);
 *  - a corrective block that reaches outside its joint's home region keeps
 *    nonzero columns only for the block's joint and that joint's parent;
 *  - in the full-size layout, corrective columns of children carrying a
 *    different part label than the block's joint are zeroed, so the named
 *    parts (body, head, hands, feet) separate without dropping information.
 */
inline ModelContainer synth_model(std::uint64_t seed, const SynthOptions& options = {})
{
    detail::SynthRng rng(seed);
    ModelContainer m;

    // Tree and per-joint part classes.
    std::vector<int> part_class; // per joint
    std::vector<std::vector<int>> full_foot_joints;
    int joint_count = options.joint_count;
    if (options.full_size)
    {
        auto layout = detail::full_size_layout();
        joint_count = static_cast<int>(layout.parent.size());
        m.tree.parent = layout.parent;
        m.tree.joint_names = layout.names;
        part_class = layout.part_class;
        m.part_label_names = layout.part_names;
        full_foot_joints = layout.foot_joints;
    } else
    {
        if (joint_count < 2) throw InvalidArgumentError("synth: need at least 2 joints");
        m.tree.parent.assign(static_cast<std::size_t>(joint_count), -1);
        for (int j = 1; j < joint_count; ++j)
        {
            m.tree.parent[static_cast<std::size_t>(j)] = rng.uniform_int(std::max(0, j - 3), j - 1);
        }
        m.tree.joint_names.resize(static_cast<std::size_t>(joint_count));
        part_class.resize(static_cast<std::size_t>(joint_count));
        m.part_label_names.resize(static_cast<std::size_t>(joint_count));
        for (int j = 0; j < joint_count; ++j)
        {
            m.tree.joint_names[static_cast<std::size_t>(j)] = "joint" + std::to_string(j);
            part_class[static_cast<std::size_t>(j)] = j;
            m.part_label_names[static_cast<std::size_t>(j)] = "region" + std::to_string(j);
        }
    }
    const int k = joint_count;
    m.tree.neighbor_sets = KinematicTree::default_neighbor_sets(m.tree.parent);

    std::vector<std::vector<int>> children(static_cast<std::size_t>(k));
    for (int j = 1; j < k; ++j)
    {
        children[static_cast<std::size_t>(m.tree.parent[static_cast<std::size_t>(j)])].push_back(j);
    }

    // Joint rest locations: short random bones, root at the origin.
    MatX3d joint_loc = MatX3d::Zero(k, 3);
    for (int j = 1; j < k; ++j)
    {
        const int p = m.tree.parent[static_cast<std::size_t>(j)];
        const double len = options.full_size ? rng.uniform(0.1, 0.3) : rng.uniform(0.4, 0.8);
        joint_loc.row(j) = joint_loc.row(p) + (len * rng.unit_vector()).transpose();
    }

    // Region sizes (surface vertices per joint, anchors not counted).
    std::vector<int> region_size(static_cast<std::size_t>(k));
    if (options.full_size)
    {
        int remaining = kFullSizeVertexCount - 6 * k;
        int wide_regions = 0;
        for (int j = 0; j < k; ++j)
        {
            const int pc = part_class[static_cast<std::size_t>(j)];
            const std::string& name = m.tree.joint_names[static_cast<std::size_t>(j)];
            int size;
            if (pc == 4 || pc == 5) size = 21;                       // foot regions
            else if (pc == 2 || pc == 3) size = 25;                  // hand regions
            else if (name == "jaw" || name.rfind("eye", 0) == 0) size = 30;
            else
            {
                size = -1; // distributed below
                ++wide_regions;
            }
            region_size[static_cast<std::size_t>(j)] = size;
            if (size > 0) remaining -= size;
        }
        const int per = remaining / wide_regions;
        int leftover = remaining - per * wide_regions;
        for (int j = 0; j < k; ++j)
        {
            if (region_size[static_cast<std::size_t>(j)] < 0)
            {
                region_size[static_cast<std::size_t>(j)] = per;
            }
        }
        region_size[0] += leftover;
    } else
    {
        if (options.vertex_count < 7 * k)
        {
            throw InvalidArgumentError("synth: vertex_count must allow 6 anchors plus at least "
                                       "one surface vertex per joint");
        }
        const int filler_total = options.vertex_count - 6 * k;
        const int per = filler_total / k;
        for (int j = 0; j < k; ++j) region_size[static_cast<std::size_t>(j)] = per;
        region_size[0] += filler_total - per * k;
    }

    // Vertex layout: per region, 6 anchors then the surface vertices.
    std::vector<int> region_base(static_cast<std::size_t>(k));
    int n = 0;
    for (int j = 0; j < k; ++j)
    {
        region_base[static_cast<std::size_t>(j)] = n;
        n += 6 + region_size[static_cast<std::size_t>(j)];
    }
    auto anchor = [&](int j, int d) { return region_base[static_cast<std::size_t>(j)] + d; };
    auto surface_begin = [&](int j) { return region_base[static_cast<std::size_t>(j)] + 6; };
    auto surface_end = [&](int j) {
        return region_base[static_cast<std::size_t>(j)] + 6 + region_size[static_cast<std::size_t>(j)];
    };

    std::vector<int> region_of(static_cast<std::size_t>(n));
    m.template_vertices.resize(n, 3);
    const double anchor_radius = options.full_size ? 0.02 : 0.05;
    for (int j = 0; j < k; ++j)
    {
        const Vec3d c = joint_loc.row(j).transpose();
        for (int d = 0; d < 3; ++d)
        {
            Vec3d e = Vec3d::Zero();
            e[d] = anchor_radius;
            m.template_vertices.row(anchor(j, 2 * d)) = (c + e).transpose();
            m.template_vertices.row(anchor(j, 2 * d + 1)) = (c - e).transpose();
        }
        const int p = m.tree.parent[static_cast<std::size_t>(j)];
        const Vec3d base = p < 0 ? c : Vec3d(joint_loc.row(p).transpose());
        for (int v = surface_begin(j); v < surface_end(j); ++v)
        {
            const double t = rng.uniform();
            const double rad = options.full_size ? 0.05 : 0.15;
            const Vec3d pos = base + t * (c - base) + rad * rng.uniform() * rng.unit_vector();
            m.template_vertices.row(v) = pos.transpose();
        }
        for (int v = region_base[static_cast<std::size_t>(j)]; v < surface_end(j); ++v)
        {
            region_of[static_cast<std::size_t>(v)] = j;
        }
    }

    // Skinning: anchors rigid to their joint; surface vertices blend the
    // region joint with its parent, plus optional extra entries.
    m.skinning.rowptr.assign(static_cast<std::size_t>(n) + 1, 0);
    for (int j = 0; j < k; ++j)
    {
        for (int d = 0; d < 6; ++d)
        {
            m.skinning.joints.push_back(j);
            m.skinning.weights.push_back(1.0);
            m.skinning.rowptr[static_cast<std::size_t>(anchor(j, d)) + 1] = 1;
        }
        const int p = m.tree.parent[static_cast<std::size_t>(j)];
        for (int v = surface_begin(j); v < surface_end(j); ++v)
        {
            std::vector<std::pair<int, double>> row;
            if (p < 0)
            {
                row.emplace_back(j, 1.0);
            } else
            {
                const double u = rng.uniform(0.05, 0.45);
                row.emplace_back(j, 1.0 - u);
                row.emplace_back(p, u);
                std::vector<int> candidates = children[static_cast<std::size_t>(j)];
                const int gp = p > 0 ? m.tree.parent[static_cast<std::size_t>(p)] : -1;
                if (gp >= 0) candidates.push_back(gp);
                const int extras = options.max_extra_influences > 0 && !candidates.empty()
                                       ? rng.uniform_int(0, options.max_extra_influences)
                                       : 0;
                for (int e = 0; e < extras; ++e)
                {
                    const int c =
                        candidates[static_cast<std::size_t>(rng.uniform_int(
                            0, static_cast<int>(candidates.size()) - 1))];
                    bool dup = false;
                    for (const auto& [cj, cw] : row) dup = dup || cj == c;
                    if (!dup) row.emplace_back(c, rng.uniform(0.02, 0.08));
                }
                double sum = 0.0;
                for (const auto& [cj, cw] : row) sum += cw;
                for (auto& [cj, cw] : row) cw /= sum;
            }
            for (const auto& [cj, cw] : row)
            {
                m.skinning.joints.push_back(cj);
                m.skinning.weights.push_back(cw);
            }
            m.skinning.rowptr[static_cast<std::size_t>(v) + 1] =
                static_cast<std::int32_t>(row.size());
        }
    }
    for (std::size_t i = 1; i < m.skinning.rowptr.size(); ++i)
    {
        m.skinning.rowptr[i] += m.skinning.rowptr[i - 1];
    }

    // Joint regressor: each joint is the mean of its own anchors.
    m.joint_regressor.rowptr.assign(static_cast<std::size_t>(k) + 1, 0);
    for (int j = 0; j < k; ++j)
    {
        for (int d = 0; d < 6; ++d)
        {
            m.joint_regressor.vertices.push_back(anchor(j, d));
            m.joint_regressor.weights.push_back(1.0 / 6.0);
        }
        m.joint_regressor.rowptr[static_cast<std::size_t>(j) + 1] =
            m.joint_regressor.rowptr[static_cast<std::size_t>(j)] + 6;
    }

    // Shape space: anchors of one joint share a per-component offset, so the
    // regressed joints move with shape; surface rows are free.
    const int s_shape = options.full_size ? 300 : options.shape_components;
    m.shape_space.basis.setZero(3 * n, s_shape);
    const double shape_scale = options.full_size ? 0.01 : 0.03;
    for (int j = 0; j < k; ++j)
    {
        for (int s = 0; s < s_shape; ++s)
        {
            const Vec3d delta = shape_scale * Vec3d(rng.normal(), rng.normal(), rng.normal());
            for (int d = 0; d < 6; ++d)
            {
                const int v = anchor(j, d);
                for (int c = 0; c < 3; ++c)
                {
                    m.shape_space.basis(3 * v + c, s) = static_cast<float>(delta[c]);
                }
            }
        }
        for (int v = surface_begin(j); v < surface_end(j); ++v)
        {
            for (int s = 0; s < s_shape; ++s)
            {
                for (int c = 0; c < 3; ++c)
                {
                    m.shape_space.basis(3 * v + c, s) =
                        static_cast<float>(shape_scale * rng.normal());
                }
            }
        }
    }

    // Expression space: surface offsets only (anchors stay put, so joints
    // never react to expression). Full-size expressions live on the head.
    const int s_expr = options.full_size ? 100 : options.expression_components;
    m.expression_space.basis.setZero(3 * n, s_expr);
    const double expr_scale = options.full_size ? 0.005 : 0.02;
    for (int j = 0; j < k; ++j)
    {
        if (options.full_size && part_class[static_cast<std::size_t>(j)] != 1) continue;
        for (int v = surface_begin(j); v < surface_end(j); ++v)
        {
            for (int s = 0; s < s_expr; ++s)
            {
                for (int c = 0; c < 3; ++c)
                {
                    m.expression_space.basis(3 * v + c, s) =
                        static_cast<float>(expr_scale * rng.normal());
                }
            }
        }
    }

    // Pose correctives: one block per non-root joint over (a subset of) its
    // region, possibly reaching into another region with restricted columns.
    const double coeff_scale = options.full_size ? 0.01 : 0.02;
    for (int j = 1; j < k; ++j)
    {
        const auto& ne = m.tree.neighbor_sets[static_cast<std::size_t>(j)];
        const int p = m.tree.parent[static_cast<std::size_t>(j)];

        // Reach target: the parent region for toys (by chance), fixed
        // cross-part reaches for the full-size layout (shoulders into the
        // neck region, ankles into the knee region).
        int reach_region = -1;
        if (options.full_size)
        {
            const std::string& name = m.tree.joint_names[static_cast<std::size_t>(j)];
            if (name.rfind("shoulder", 0) == 0) reach_region = 4; // neck
            if (name.rfind("ankle", 0) == 0) reach_region = p;    // knee
        } else if (p >= 0 && region_size[static_cast<std::size_t>(p)] > 0 &&
                   rng.uniform() < options.cross_region_reach)
        {
            reach_region = p;
        }

        std::vector<std::int32_t> verts;
        std::vector<bool> is_reach;
        if (reach_region >= 0)
        {
            const int count =
                std::max(1, region_size[static_cast<std::size_t>(reach_region)] / 5);
            for (int v = surface_begin(reach_region); v < surface_begin(reach_region) + count; ++v)
            {
                verts.push_back(v);
                is_reach.push_back(true);
            }
        }
        bool any_home = false;
        for (int v = surface_begin(j); v < surface_end(j); ++v)
        {
            if (rng.uniform() < options.activation_density)
            {
                verts.push_back(v);
                is_reach.push_back(false);
                any_home = true;
            }
        }
        if (!any_home)
        {
            verts.push_back(surface_begin(j));
            is_reach.push_back(false);
        }

        PoseBlendBlock block;
        block.joint = j;
        block.vertices = verts;
        block.activations.resize(static_cast<Eigen::Index>(verts.size()));
        for (Eigen::Index i = 0; i < block.activations.size(); ++i)
        {
            block.activations[i] = static_cast<float>(rng.uniform(0.5, 1.5));
        }
        block.coeffs.setZero(3 * static_cast<Eigen::Index>(verts.size()),
                             4 * static_cast<Eigen::Index>(ne.size()));
        for (std::size_t i = 0; i < verts.size(); ++i)
        {
            for (std::size_t c = 0; c < ne.size(); ++c)
            {
                const int nj = ne[c];
                // Reach rows depend only on the block's joint and its
                // parent; in the full-size layout, columns of children that
                // belong to a different part are zeroed everywhere so the
                // named parts stay self-contained.
                bool zero = is_reach[i] && nj != j && nj != p;
                if (options.full_size && nj != j && nj != p &&
                    part_class[static_cast<std::size_t>(nj)] !=
                        part_class[static_cast<std::size_t>(j)])
                {
                    zero = true;
                }
                for (int d = 0; d < 3; ++d)
                {
                    for (int q = 0; q < 4; ++q)
                    {
                        const double val = coeff_scale * rng.normal();
                        if (!zero)
                        {
                            block.coeffs(3 * static_cast<Eigen::Index>(i) + d,
                                         4 * static_cast<Eigen::Index>(c) + q) =
                                static_cast<float>(val);
                        }
                    }
                }
            }
        }
        m.pose_blendshapes.push_back(std::move(block));
    }

    // Faces: consecutive-vertex fans inside each region.
    std::vector<std::int32_t> face_list;
    for (int j = 0; j < k; ++j)
    {
        for (int v = region_base[static_cast<std::size_t>(j)]; v + 2 < surface_end(j); ++v)
        {
            face_list.push_back(v);
            face_list.push_back(v + 1);
            face_list.push_back(v + 2);
        }
    }
    m.faces.resize(static_cast<Eigen::Index>(face_list.size() / 3), 3);
    for (Eigen::Index f = 0; f < m.faces.rows(); ++f)
    {
        for (int d = 0; d < 3; ++d) m.faces(f, d) = face_list[static_cast<std::size_t>(3 * f + d)];
    }

    // Per-vertex part labels from the per-joint classes.
    m.part_labels.resize(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v)
    {
        m.part_labels[static_cast<std::size_t>(v)] =
            part_class[static_cast<std::size_t>(region_of[static_cast<std::size_t>(v)])];
    }

    // Foot deformation networks.
    const bool want_feet = options.full_size || options.with_foot_nets;
    if (want_feet)
    {
        auto make_net = [&](const std::string& side, const std::vector<int>& joints,
                            const std::vector<std::int32_t>& verts,
                            const std::vector<int>& widths) {
            FootDeformNet net;
            net.side = side;
            net.joint_indices.assign(joints.begin(), joints.end());
            net.vertex_indices = verts;
            const int fv = static_cast<int>(verts.size());
            net.shape_basis.resize(3 * fv, FootDeformNet::kShapeCoeffCount);
            for (Eigen::Index r = 0; r < net.shape_basis.rows(); ++r)
            {
                for (Eigen::Index c = 0; c < net.shape_basis.cols(); ++c)
                {
                    net.shape_basis(r, c) = static_cast<float>(0.1 * rng.normal());
                }
            }
            auto make_layer = [&](int in, int out, bool leaky, double scale) {
                DenseLayer l;
                l.leaky = leaky;
                l.weight.resize(out, in);
                const double w = scale / std::sqrt(static_cast<double>(in));
                for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
                {
                    for (Eigen::Index c = 0; c < l.weight.cols(); ++c)
                    {
                        l.weight(r, c) = static_cast<float>(w * rng.normal());
                    }
                }
                l.bias.resize(out);
                for (Eigen::Index r = 0; r < l.bias.size(); ++r)
                {
                    l.bias[r] = static_cast<float>(0.01 * rng.normal());
                }
                return l;
            };
            int in = net.feature_width();
            for (std::size_t i = 0; i + 1 < widths.size(); ++i)
            {
                net.encoder.push_back(make_layer(in, widths[i], true, 1.0));
                in = widths[i];
            }
            net.encoder.push_back(make_layer(in, FootDeformNet::kLatentWidth, true, 1.0));
            net.decoder.push_back(
                make_layer(FootDeformNet::kLatentWidth, widths.back(), true, 1.0));
            net.decoder.push_back(make_layer(widths.back(), 3 * fv, false, 0.05));
            m.foot_nets.push_back(std::move(net));
        };

        if (options.full_size)
        {
            for (int s = 0; s < 2; ++s)
            {
                std::vector<std::int32_t> verts;
                for (int j : full_foot_joints[static_cast<std::size_t>(s)])
                {
                    for (int v = surface_begin(j); v < surface_end(j); ++v) verts.push_back(v);
                }
                verts.resize(kFullSizeFootVertexCount);
                make_net(s == 0 ? "left" : "right", full_foot_joints[static_cast<std::size_t>(s)],
                         verts, {64, 32, 64});
            }
        } else
        {
            if (k < 3)
            {
                throw InvalidArgumentError("synth: foot networks need at least 3 joints");
            }
            for (int s = 0; s < 2; ++s)
            {
                const int j = k - 2 + s;
                std::vector<std::int32_t> verts;
                for (int v = surface_begin(j); v < surface_end(j); ++v) verts.push_back(v);
                make_net(s == 0 ? "left" : "right", {j}, verts, {16});
            }
        }
    }

    m.validate();
    return m;
}

} // namespace supr
