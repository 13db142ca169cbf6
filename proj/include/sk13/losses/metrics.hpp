/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: include/sk13/losses/metrics.hpp
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

#ifndef SK13_LOSSES_METRICS_HPP
#define SK13_LOSSES_METRICS_HPP

#include "sk13/core/image.hpp"

namespace sk13 {
namespace losses {

/**
 * Mean structural similarity of two grayscale images in [0, 1].
 *
 * 11x11 Gaussian window (sigma 1.5) evaluated at every fully contained window
 * position, C1 = 0.01^2, C2 = 0.03^2. Both images must be at least 11x11 and of
 * equal size.
 */
double ssim(const Image& a, const Image& b);

/**
 * Gradient magnitude similarity deviation: Prewitt gradients (kernels divided by 3,
 * clamp-to-edge borders), GMS = (2 m_a m_b + c) / (m_a^2 + m_b^2 + c) with c = 0.0026,
 * and the population standard deviation of GMS over all pixels.
 */
double gmsd(const Image& a, const Image& b);

} // namespace losses
} // namespace sk13

#endif // SK13_LOSSES_METRICS_HPP
