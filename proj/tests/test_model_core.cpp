/*
 * supr - a sparse, separable statistical body model library
 *
 * File: tests/test_model_core.cpp
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

#include "supr/model.hpp"
#include "supr/synth.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <limits>

using namespace supr;

namespace {

constexpr double kPi = 3.141592653589793;

/// Minimal hand-built model: 4 vertices on a line, 2 joints.
/// Vertices 0,1 belong to the root, 2,3 to joint 1 at (0,1,0).
ModelContainer tiny_model()
{
    ModelContainer m;
    m.template_vertices.resize(4, 3);
    m.template_vertices << 0.0, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 1.0, 0.0, 0.0, 2.0, 0.0;
    m.faces.resize(2, 3);
    m.faces << 0, 1, 2, 1, 2, 3;
    m.tree.parent = {-1, 0};
    m.tree.joint_names = {"root", "child"};
    m.tree.neighbor_sets = {{}, {1}};
    m.skinning.rowptr = {0, 1, 2, 3, 4};
    m.skinning.joints = {0, 0, 1, 1};
    m.skinning.weights = {1.0, 1.0, 1.0, 1.0};
    m.joint_regressor.rowptr = {0, 1, 2};
    m.joint_regressor.vertices = {0, 2};
    m.joint_regressor.weights = {1.0, 1.0};
    return m;
}

} // namespace

TEST_CASE("tiny model validates")
{
    CHECK_NOTHROW(tiny_model().validate());
}

TEST_CASE("model validation rejects broken containers")
{
    SECTION("non-finite template")
    {
        auto m = tiny_model();
        m.template_vertices(1, 1) = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(m.validate(), ModelError);
    }
    SECTION("face index out of range")
    {
        auto m = tiny_model();
        m.faces(0, 2) = 4;
        CHECK_THROWS_AS(m.validate(), ModelError);
    }
    SECTION("degenerate face")
    {
        auto m = tiny_model();
        m.faces(0, 1) = 0;
        CHECK_THROWS_AS(m.validate(), ModelError);
    }
    SECTION("skinning row sum off")
    {
        auto m = tiny_model();
        m.skinning.weights[2] = 0.9;
        CHECK_THROWS_AS(m.validate(), ModelError);
    }
    SECTION("skinning joint out of range")
    {
        auto m = tiny_model();
        m.skinning.joints[0] = 2;
        CHECK_THROWS_AS(m.validate(), ModelError);
    }
    SECTION("nine entries in a skinning row")
    {
        auto m = tiny_model();
        m.skinning.rowptr = {0, 9, 10, 11, 12};
        m.skinning.joints.assign(12, 0);
        m.skinning.weights.assign(12, 1.0);
        for (int i = 0; i < 9; ++i) m.skinning.weights[static_cast<std::size_t>(i)] = 1.0 / 9.0;
        CHECK_THROWS_AS(m.validate(), ModelError);
    }
    SECTION("negative regressor weight")
    {
        auto m = tiny_model();
        m.joint_regressor.vertices = {0, 1, 2};
        m.joint_regressor.weights = {1.5, -0.5, 1.0};
        m.joint_regressor.rowptr = {0, 2, 3};
        CHECK_THROWS_AS(m.validate(), ModelError);
    }
    SECTION("regressor row without support")
    {
        auto m = tiny_model();
        m.joint_regressor.rowptr = {0, 0, 2};
        m.joint_regressor.vertices = {0, 2};
        m.joint_regressor.weights = {0.5, 0.5};
        CHECK_THROWS_AS(m.validate(), ModelError);
    }
    SECTION("part labels out of range")
    {
        auto m = tiny_model();
        m.part_label_names = {"a"};
        m.part_labels = {0, 0, 1, 0};
        CHECK_THROWS_AS(m.validate(), ModelError);
    }
}

TEST_CASE("joint regression follows the shaped template")
{
    auto m = tiny_model();
    // One shape component that lifts vertex 2 (the regressor source of
    // joint 1) by 2 in z.
    m.shape_space.basis.setZero(12, 1);
    m.shape_space.basis(8, 0) = 2.0f;

    VecXd beta(1);
    beta << 1.5;
    MatX3d shaped = m.template_vertices;
    m.shape_space.add_offsets(shaped, VecXd(beta));
    const MatX3d joints = m.regress_joints(shaped);
    CHECK(joints(0, 1) == 0.0);
    CHECK(joints(1, 1) == 1.0);
    CHECK(joints(1, 2) == 3.0); // 1.5 * 2

    // Expression must not move joints: forward regresses from shape only.
    m.expression_space.basis.setZero(12, 1);
    m.expression_space.basis(8, 0) = 5.0f;
    ModelParams params;
    params.pose = PoseState::rest(2);
    params.expression.resize(1);
    params.expression << 1.0;
    // With all vertices rigidly skinned and the pose at rest, expression
    // offsets pass straight through to the surface.
    const MatX3d out = m.forward_vertices(params);
    CHECK(out(2, 2) == 5.0);
}

TEST_CASE("zero pose with zero coefficients reproduces the template bitwise")
{
    for (auto seed : {1u, 7u, 42u})
    {
        const auto m = synth_model(seed);
        ModelParams params;
        params.pose = PoseState::rest(m.joint_count());
        const MatX3d out = m.forward_vertices(params);
        REQUIRE(out.rows() == m.template_vertices.rows());
        CHECK((out.array() == m.template_vertices.array()).all());
    }
}

TEST_CASE("skinning: quarter turn about the child joint")
{
    auto m = tiny_model();
    ModelParams params;
    params.pose = PoseState::rest(2);
    params.pose.joint_rotations.row(1) = Vec3d(0.0, 0.0, kPi / 2).transpose();
    const MatX3d out = m.forward_vertices(params);
    // Vertices 0,1 are root-skinned and fixed.
    CHECK(out.row(0).norm() == 0.0);
    CHECK_THAT(out(1, 1), Catch::Matchers::WithinAbs(0.5, 1e-15));
    // Vertex 3 at (0,2,0) swings about joint 1 at (0,1,0) to (-1,1,0).
    CHECK_THAT(out(3, 0), Catch::Matchers::WithinAbs(-1.0, 1e-14));
    CHECK_THAT(out(3, 1), Catch::Matchers::WithinAbs(1.0, 1e-14));
}

TEST_CASE("skinning: blended vertex follows the weight mix")
{
    auto m = tiny_model();
    // Re-skin vertex 2 half/half between the joints.
    m.skinning.rowptr = {0, 1, 2, 4, 5};
    m.skinning.joints = {0, 0, 0, 1, 1};
    m.skinning.weights = {1.0, 1.0, 0.5, 0.5, 1.0};
    ModelParams params;
    params.pose = PoseState::rest(2);
    params.pose.joint_rotations.row(1) = Vec3d(0.0, 0.0, kPi / 2).transpose();
    const MatX3d out = m.forward_vertices(params);
    // Vertex 2 sits on joint 1: the joint's transform fixes it, so the blend
    // also fixes it.
    CHECK_THAT((out.row(2) - Vec3d(0.0, 1.0, 0.0).transpose()).norm(),
               Catch::Matchers::WithinAbs(0.0, 1e-15));
    // Move vertex 3 fully onto the root: it must stay at rest.
    m.skinning.weights = {1.0, 1.0, 0.5, 0.5, 1.0};
    m.skinning.joints = {0, 0, 0, 1, 0};
    CHECK_NOTHROW(m.validate());
    const MatX3d out2 = m.forward_vertices(params);
    CHECK_THAT((out2.row(3) - Vec3d(0.0, 2.0, 0.0).transpose()).norm(),
               Catch::Matchers::WithinAbs(0.0, 1e-15));
}

TEST_CASE("global translation moves the whole surface rigidly")
{
    const auto m = synth_model(3);
    ModelParams rest;
    rest.pose = PoseState::rest(m.joint_count());
    ModelParams moved = rest;
    moved.pose.global_translation = Vec3d(1.0, -2.0, 0.5);
    const MatX3d a = m.forward_vertices(rest);
    const MatX3d b = m.forward_vertices(moved);
    const MatX3d expect = a.rowwise() + Vec3d(1.0, -2.0, 0.5).transpose();
    CHECK((b - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("forward validates its inputs")
{
    const auto m = synth_model(5);
    ModelParams params;
    params.pose = PoseState::rest(m.joint_count() + 1);
    CHECK_THROWS_AS(m.forward_vertices(params), InvalidArgumentError);

    params.pose = PoseState::rest(m.joint_count());
    params.shape.resize(m.shape_count() + 1);
    params.shape.setZero();
    CHECK_THROWS_AS(m.forward_vertices(params), InvalidArgumentError);

    params.shape.resize(2);
    params.shape << std::numeric_limits<double>::quiet_NaN(), 0.0;
    CHECK_THROWS_AS(m.forward_vertices(params), InvalidArgumentError);

    params.shape.resize(0);
    params.pose.joint_rotations(1, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(m.forward_vertices(params), InvalidArgumentError);
}

TEST_CASE("foot deformation applies only where contact flags are given")
{
    SynthOptions opt;
    opt.with_foot_nets = true;
    const auto m = synth_model(11, opt);
    REQUIRE(m.foot_nets.size() == 2);
    const auto* left = m.foot_net("left");
    REQUIRE(left != nullptr);

    ModelParams params;
    params.pose = PoseState::rest(m.joint_count());
    params.pose.joint_rotations.row(1) = Vec3d(0.2, -0.1, 0.3).transpose();
    params.shape.resize(2);
    params.shape << 0.5, -0.3;

    const MatX3d plain = m.forward_vertices(params);

    ContactState contacts;
    contacts.left = ContactFlags(static_cast<std::size_t>(left->foot_vertex_count()), 1);
    const MatX3d with_left = m.forward_vertices(params, contacts);

    // Exactly the left-foot vertices may move; everything else is bitwise
    // identical (the deformation applies before skinning, and foot vertices
    // are the only rows touched).
    std::vector<bool> is_foot(static_cast<std::size_t>(m.vertex_count()), false);
    for (int v : left->vertex_indices) is_foot[static_cast<std::size_t>(v)] = true;
    int moved = 0;
    for (int v = 0; v < m.vertex_count(); ++v)
    {
        if (is_foot[static_cast<std::size_t>(v)])
        {
            moved += (with_left.row(v) != plain.row(v)) ? 1 : 0;
        } else
        {
            CHECK((with_left.row(v).array() == plain.row(v).array()).all());
        }
    }
    CHECK(moved > 0);

    // Contact flags change the prediction.
    ContactState no_contact;
    no_contact.left = ContactFlags(static_cast<std::size_t>(left->foot_vertex_count()), 0);
    const MatX3d with_zero = m.forward_vertices(params, no_contact);
    CHECK((with_zero - with_left).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("contact flags for a missing network are rejected")
{
    const auto m = synth_model(2); // no foot nets
    ModelParams params;
    params.pose = PoseState::rest(m.joint_count());
    ContactState contacts;
    contacts.right = ContactFlags(3, 0);
    CHECK_THROWS_AS(m.forward_vertices(params, contacts), UnsupportedError);
}

TEST_CASE("contact flag validation")
{
    SynthOptions opt;
    opt.with_foot_nets = true;
    const auto m = synth_model(13, opt);
    ModelParams params;
    params.pose = PoseState::rest(m.joint_count());

    ContactState wrong_len;
    wrong_len.left = ContactFlags(2, 0);
    CHECK_THROWS_AS(m.forward_vertices(params, wrong_len), InvalidArgumentError);

    const auto* left = m.foot_net("left");
    ContactState bad_value;
    bad_value.left = ContactFlags(static_cast<std::size_t>(left->foot_vertex_count()), 2);
    CHECK_THROWS_AS(m.forward_vertices(params, bad_value), InvalidArgumentError);
}
