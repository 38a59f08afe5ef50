/*
 * supr - a sparse, separable statistical body model library
 *
 * File: include/supr/foot.hpp
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
#include "supr/kinematics.hpp"
#include "supr/types.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace supr {

/// Fully connected layer y = W x + b, optionally followed by a leaky ReLU.
struct DenseLayer
{
    Eigen::MatrixXf weight;
    Eigen::VectorXf bias;
    bool leaky = true;
};

/// Contact indicator per foot vertex, values in {0, 1}.
using ContactFlags = std::vector<std::uint8_t>;

/**
 * Conditioned foot deformation network for one side.
 *
 * The network predicts per-vertex offsets for the foot region from the foot
 * joints' rotations, a low-dimensional foot shape code, and a binary contact
 * indicator per foot vertex. Its input feature is the concatenation
 *
 *     [ q_j (w, x, y, z) for each foot joint | beta_foot | contact flags ]
 *
 * using the raw canonical quaternions, so the rest-pose feature is zero
 * except for the quaternion w components. An encoder maps the feature to a
 * 16-wide latent code through leaky ReLU layers; a decoder expands the code
 * to 3 offsets per foot vertex, its final layer linear. Offsets apply to the
 * listed foot vertices only; every other vertex is untouched by construction.
 */
struct FootDeformNet
{
    static constexpr int kLatentWidth = 16;
    static constexpr int kShapeCoeffCount = 2;
    static constexpr float kNegativeSlope = 0.1f;

    std::string side;                         ///< "left" or "right"
    std::vector<std::int32_t> vertex_indices; ///< strictly increasing model vertex indices
    std::vector<std::int32_t> joint_indices;  ///< joints whose rotations condition the net
    Eigen::MatrixXf shape_basis;              ///< 3 |fv| x 2, projects shape offsets to beta_foot
    std::vector<DenseLayer> encoder;
    std::vector<DenseLayer> decoder;

    int foot_vertex_count() const { return static_cast<int>(vertex_indices.size()); }
    int foot_joint_count() const { return static_cast<int>(joint_indices.size()); }

    /// 4 per joint quaternion + 2 shape coefficients + 1 contact flag per vertex.
    int feature_width() const
    {
        return 4 * foot_joint_count() + kShapeCoeffCount + foot_vertex_count();
    }

    void validate(int n_vertices, int n_joints) const
    {
        if (side != "left" && side != "right")
        {
            throw ModelError("foot net: side must be 'left' or 'right', got '" + side + "'");
        }
        if (vertex_indices.empty()) throw ModelError("foot net: no foot vertices (" + side + ")");
        for (std::size_t i = 0; i < vertex_indices.size(); ++i)
        {
            if (vertex_indices[i] < 0 || vertex_indices[i] >= n_vertices)
            {
                throw ModelError("foot net: vertex index out of range (" + side + ")");
            }
            if (i > 0 && vertex_indices[i] <= vertex_indices[i - 1])
            {
                throw ModelError("foot net: vertex indices must be strictly increasing (" + side +
                                 ")");
            }
        }
        if (joint_indices.empty()) throw ModelError("foot net: no foot joints (" + side + ")");
        for (int j : joint_indices)
        {
            if (j <= 0 || j >= n_joints)
            {
                throw ModelError("foot net: joint index out of range (" + side + ")");
            }
        }
        if (shape_basis.rows() != 3 * static_cast<Eigen::Index>(vertex_indices.size()) ||
            shape_basis.cols() != kShapeCoeffCount)
        {
            throw ModelError("foot net: shape basis must be 3|fv| x 2 (" + side + ")");
        }
        if (!shape_basis.allFinite())
        {
            throw ModelError("foot net: non-finite shape basis (" + side + ")");
        }

        if (encoder.empty() || decoder.empty())
        {
            throw ModelError("foot net: encoder and decoder must be non-empty (" + side + ")");
        }
        // The declared layer widths must tie out exactly with the feature
        // arithmetic: 4 |fj| + 2 + |fv| in, 16-wide latent, 3 |fv| out.
        Eigen::Index in = feature_width();
        if (encoder.front().weight.cols() != in)
        {
            throw ModelError("foot net: encoder input width " +
                             std::to_string(encoder.front().weight.cols()) +
                             " does not equal 4|fj| + 2 + |fv| = " + std::to_string(in) + " (" +
                             side + ")");
        }
        for (const auto& l : encoder)
        {
            if (l.weight.cols() != in || l.bias.size() != l.weight.rows())
            {
                throw ModelError("foot net: encoder layer dimension mismatch (" + side + ")");
            }
            if (!l.weight.allFinite() || !l.bias.allFinite())
            {
                throw ModelError("foot net: non-finite encoder weights (" + side + ")");
            }
            in = l.weight.rows();
        }
        if (in != kLatentWidth)
        {
            throw ModelError("foot net: latent width must be 16, got " + std::to_string(in) + " (" +
                             side + ")");
        }
        for (const auto& l : decoder)
        {
            if (l.weight.cols() != in || l.bias.size() != l.weight.rows())
            {
                throw ModelError("foot net: decoder layer dimension mismatch (" + side + ")");
            }
            if (!l.weight.allFinite() || !l.bias.allFinite())
            {
                throw ModelError("foot net: non-finite decoder weights (" + side + ")");
            }
            in = l.weight.rows();
        }
        if (in != 3 * static_cast<Eigen::Index>(vertex_indices.size()))
        {
            throw ModelError("foot net: decoder output must be 3|fv| (" + side + ")");
        }
        if (decoder.back().leaky)
        {
            throw ModelError("foot net: final decoder layer must be linear (" + side + ")");
        }
    }

    /// Projects full-surface shape offsets (N x 3) to the 2 foot shape
    /// coefficients: beta_foot = shape_basis^T . vec(offsets at foot vertices).
    template <typename S>
    VecX<S> project_shape(const MatX3<S>& shape_offsets) const
    {
        VecX<S> beta_foot = VecX<S>::Zero(kShapeCoeffCount);
        for (std::size_t i = 0; i < vertex_indices.size(); ++i)
        {
            const int v = vertex_indices[i];
            const Eigen::Index r0 = 3 * static_cast<Eigen::Index>(i);
            for (int d = 0; d < 3; ++d)
            {
                for (int c = 0; c < kShapeCoeffCount; ++c)
                {
                    beta_foot[c] +=
                        S{static_cast<double>(shape_basis(r0 + d, c))} * shape_offsets(v, d);
                }
            }
        }
        return beta_foot;
    }

    /// Assembles the network input from the pose quaternions (full model
    /// indexing), the projected foot shape code, and the contact flags.
    template <typename S>
    VecX<S> assemble_feature(const std::vector<QuaternionT<S>>& quaternions,
                             const VecX<S>& beta_foot, const ContactFlags& contact) const
    {
        if (beta_foot.size() != kShapeCoeffCount)
        {
            throw InvalidArgumentError("foot net: beta_foot must have 2 entries");
        }
        if (contact.size() != vertex_indices.size())
        {
            throw InvalidArgumentError("foot net: expected " +
                                       std::to_string(vertex_indices.size()) +
                                       " contact flags, got " + std::to_string(contact.size()));
        }
        for (auto f : contact)
        {
            if (f > 1) throw InvalidArgumentError("foot net: contact flags must be 0 or 1");
        }
        VecX<S> feature(feature_width());
        Eigen::Index o = 0;
        for (int j : joint_indices)
        {
            const auto& q = quaternions[static_cast<std::size_t>(j)];
            feature[o + 0] = q.w;
            feature[o + 1] = q.x;
            feature[o + 2] = q.y;
            feature[o + 3] = q.z;
            o += 4;
        }
        feature[o++] = beta_foot[0];
        feature[o++] = beta_foot[1];
        for (auto f : contact) feature[o++] = S{static_cast<double>(f)};
        return feature;
    }

    /// Runs encoder and decoder; returns 3 offsets per foot vertex,
    /// vertex-major.
    template <typename S>
    VecX<S> forward(const VecX<S>& feature) const
    {
        if (feature.size() != feature_width())
        {
            throw InvalidArgumentError("foot net: feature width mismatch");
        }
        VecX<S> x = feature;
        auto run = [this](const DenseLayer& l, const VecX<S>& in) {
            VecX<S> out(l.weight.rows());
            for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
            {
                S acc{static_cast<double>(l.bias[r])};
                for (Eigen::Index c = 0; c < l.weight.cols(); ++c)
                {
                    acc += S{static_cast<double>(l.weight(r, c))} * in[c];
                }
                if (l.leaky && value(acc) < 0.0)
                {
                    acc = S{static_cast<double>(kNegativeSlope)} * acc;
                }
                out[r] = acc;
            }
            return out;
        };
        for (const auto& l : encoder) x = run(l, x);
        for (const auto& l : decoder) x = run(l, x);
        return x;
    }

    /// Scatters net output onto the foot vertices of out (N x 3). All other
    /// rows are untouched, which realizes the foot mask exactly.
    template <typename S>
    void scatter_offsets(MatX3<S>& out, const VecX<S>& net_output) const
    {
        if (net_output.size() != 3 * static_cast<Eigen::Index>(vertex_indices.size()))
        {
            throw InvalidArgumentError("foot net: output size mismatch");
        }
        for (std::size_t i = 0; i < vertex_indices.size(); ++i)
        {
            const Eigen::Index r0 = 3 * static_cast<Eigen::Index>(i);
            for (int d = 0; d < 3; ++d)
            {
                out(vertex_indices[i], d) += net_output[r0 + d];
            }
        }
    }
};

} // namespace supr
