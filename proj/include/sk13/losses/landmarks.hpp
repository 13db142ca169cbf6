/*
 * sk13 - Single-sketch 3D face reconstruction by inverse rendering.
 *
 * File: include/sk13/losses/landmarks.hpp
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

#ifndef SK13_LOSSES_LANDMARKS_HPP
#define SK13_LOSSES_LANDMARKS_HPP

#include "Eigen/Core"

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sk13 {
namespace losses {

constexpr int landmark_count = 68;

/**
 * 68 image-space landmarks in the usual ordering: jawline 0-16, brows 17-26,
 * nose 27-35, eyes 36-47, outer mouth 48-59, inner mouth 60-67.
 */
struct LandmarkSet
{
    Eigen::Matrix2Xd points = Eigen::Matrix2Xd::Zero(2, landmark_count);
    Eigen::VectorXd weights;

    LandmarkSet();
    explicit LandmarkSet(Eigen::Matrix2Xd points);

    /// Exactly 68 points, finite coordinates, positive weights.
    void validate() const;
};

/**
 * Per-landmark weights: 3 on the jawline (0-16) and inner mouth (60-67), 1.5 on the
 * nose corners (31, 35) and mouth corners (48, 54), 1 elsewhere.
 */
Eigen::VectorXd default_landmark_weights();

using IndexPair = std::pair<int, int>;

/// Landmark pairs whose 2D offsets the mutual distance loss compares, grouped by region.
struct PairSpec
{
    std::vector<IndexPair> eye_pairs;
    std::vector<IndexPair> mouth_pairs;
    std::vector<IndexPair> contour_pairs;

    /**
     * Eyes: lid pairs (37,41) (38,40) (43,47) (44,46) and corners (36,39) (42,45).
     * Inner mouth: (61,67) (62,66) (63,65) and corners (60,64).
     * Contour: consecutive jaw pairs (i, i+1) for i < 16, plus (0,16) and (4,12).
     */
    static PairSpec standard();

    void validate() const;
};

/// Loss weights; the defaults are the reference values of the method.
struct LossWeights
{
    double eye_pairs = 10.0;
    double mouth_pairs = 5.0;
    double contour_pairs = 10.0;
    double photometric = 0.2;
    double regularization = 1e-5;

    void validate() const;
};

/// Parses 68 lines of `x,y`. Blank lines are ignored; anything else malformed throws ValidationError.
LandmarkSet parse_landmarks_csv(std::string_view text);
std::string format_landmarks_csv(const LandmarkSet& landmarks);
LandmarkSet read_landmarks_csv(const std::filesystem::path& path);
void write_landmarks_csv(const LandmarkSet& landmarks, const std::filesystem::path& path);

} // namespace losses
} // namespace sk13

#endif // SK13_LOSSES_LANDMARKS_HPP
