/*
 * supr - a sparse, separable statistical body model library
 *
 * File: include/supr/supr.hpp
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

/// Umbrella header pulling in the whole library.

#include "supr/blendshapes.hpp"
#include "supr/container_io.hpp"
#include "supr/dual.hpp"
#include "supr/errors.hpp"
#include "supr/fitting.hpp"
#include "supr/foot.hpp"
#include "supr/kinematics.hpp"
#include "supr/mesh_io.hpp"
#include "supr/model.hpp"
#include "supr/oracle.hpp"
#include "supr/parts.hpp"
#include "supr/synth.hpp"
#include "supr/types.hpp"
