/*
 * supr - a sparse, separable statistical body model library
 *
 * File: include/supr/types.hpp
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

#include <Eigen/Core>

#include <cstdint>

namespace supr {

/// Assets are stored as 32-bit floats; all computation runs in 64-bit.
using Scalar = double;

template <typename S>
using Vec3 = Eigen::Matrix<S, 3, 1>;
template <typename S>
using Mat3 = Eigen::Matrix<S, 3, 3>;
template <typename S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <typename S>
using MatX3 = Eigen::Matrix<S, Eigen::Dynamic, 3, Eigen::RowMajor>;

using Vec3d = Vec3<Scalar>;
using Mat3d = Mat3<Scalar>;
using VecXd = VecX<Scalar>;
using MatX3d = MatX3<Scalar>;
using MatX3i = Eigen::Matrix<std::int32_t, Eigen::Dynamic, 3, Eigen::RowMajor>;

} // namespace supr
