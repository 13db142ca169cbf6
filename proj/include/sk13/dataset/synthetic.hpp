/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: include/sk13/dataset/synthetic.hpp
 *
 * Copyright 2026 The sk13 Authors
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

#ifndef SK13_DATASET_SYNTHETIC_HPP
#define SK13_DATASET_SYNTHETIC_HPP

#include "sk13/core/image.hpp"
#include "sk13/losses/landmarks.hpp"
#include "sk13/model/head_model.hpp"

#include <cstdint>

namespace sk13 {
namespace dataset {

struct SyntheticPair
{
    Image sketch;
    losses::LandmarkSet landmarks;
    model::ModelParams params;
};

/**
 * A sketch rendered from random model parameters with exact landmarks.
 *
 * Shape and expression codes are N(0, param_scale^2), the head turns by at most 20
 * degrees about each axis with a small jaw opening, the light is white-ish DC with
 * weak first-order terms, and the camera frames the head in the middle of the image.
 * Deterministic per seed.
 */
SyntheticPair generate_synthetic_pair(const model::HeadModelAsset& asset, std::uint64_t seed, int image_size,
                                      double param_scale = 1.0);

} // namespace dataset
} // namespace sk13

#endif // SK13_DATASET_SYNTHETIC_HPP
