/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: include/sk13/dataset/edges.hpp
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

#ifndef SK13_DATASET_EDGES_HPP
#define SK13_DATASET_EDGES_HPP

#include "sk13/core/image.hpp"

namespace sk13 {
namespace dataset {

/**
 * Sobel 3x3 gradient magnitude with clamp-to-edge borders, divided by its
 * 99th-percentile value (nearest rank) and clamped to [0, 1]. Falls back to the
 * maximum when the percentile is zero; a flat image gives all zeros.
 */
Image edge_map(const Image& image);

/// Raw Sobel magnitude, unnormalized.
Image sobel_magnitude(const Image& image);

/// Photo-to-sketch conversion: 1 - edge_map(photo). Dark strokes on white.
Image synthesize_sketch(const Image& photo);

} // namespace dataset
} // namespace sk13

#endif // SK13_DATASET_EDGES_HPP
