// Copyright 2026 The rdl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rdl/coder.hpp"
#include "rdl/image_io.hpp"
#include "rdl/ksvd.hpp"
#include "rdl/rarity.hpp"

namespace rdl {

struct PipelineConfig {
  std::size_t block = 8;
  LearnConfig learn;
  RarityMeasure measure;
  TransformSpec transform;
  bool dc_remove = false;
  double saliency_blur_sigma = 2.0;

  void validate() const;
};

// Resolved configuration as `name=value` lines, one per field.
std::string describe(const PipelineConfig& cfg);

// Per-pixel scores in [0,1], same size as the input image.
using SaliencyMap = Image;

// Blocks, their (optionally mean-removed) patch matrix and the learned model.
struct PatchModel {
  PatchGrid grid;
  PatchMatrix patches;               // what the dictionary was trained on
  Eigen::RowVectorXd means;          // per-patch DC, zero unless dc_remove
  LearnResult learned;
};

PatchModel fit_patch_model(const Image& img, const PipelineConfig& cfg);

struct EnhanceResult {
  Image image;
  Dictionary dictionary;
  SparseCodes codes;
  RarityVector rarity;   // R
  RarityVector weights;  // f(R)
  LearnReport report;
};

// Reassembles W * X (+ per-patch means) into an image.
Image reconstruct(const Eigen::MatrixXd& W, const SparseCodes& X, const Eigen::RowVectorXd& means,
                  const PatchGrid& grid);

// Learn, measure rarity, transform, reweight and rebuild the image from the
// reweighted dictionary and the original codes.
EnhanceResult enhance(const Image& img, const PipelineConfig& cfg);

// w_i = -log((m_i + 1) / (N + 1)).
std::vector<double> saliency_atom_weights(const ActivationStats& stats);

// s_j = sum_i w_i |X_ij|. Terms are summed in ascending order of value, so the
// result does not depend on how atoms are labelled.
std::vector<double> patch_scores(const SparseCodes& X, const std::vector<double>& weights);

// Broadcasts per-patch scores to pixels, blurs and min-max normalizes.
SaliencyMap scores_to_map(const std::vector<double>& scores, const PatchGrid& grid,
                          double blur_sigma);

SaliencyMap saliency_from_codes(const SparseCodes& X, const PatchGrid& grid, double blur_sigma);

SaliencyMap saliency_map(const Image& img, const PipelineConfig& cfg);

// Intensity + orientation variant of the Itti-Koch-Niebur model.
SaliencyMap itti_lite(const Image& img);

struct SaliencyMetrics {
  bool hit = false;
  double auc = 0.0;
};

// hit: row-major first argmax pixel lies inside the mask (mask > 0.5).
// auc: ROC area over every distinct score threshold, ties count half.
SaliencyMetrics evaluate_saliency(const SaliencyMap& map, const Image& truth);

// Separable Gaussian blur with clamp-to-edge borders; sigma <= 0 is a copy.
Eigen::MatrixXd gaussian_blur(const Eigen::MatrixXd& img, double sigma);

// Min-max normalization to [0,1]; a constant input maps to all zeros.
Eigen::MatrixXd normalize_min_max(const Eigen::MatrixXd& m);

Eigen::MatrixXd to_matrix(const Image& img);  // height x width
Image from_matrix(const Eigen::MatrixXd& m);  // values clamped to [0,1]

// ----------------------------------------------------------------------
// Synthetic rarity experiment
// ----------------------------------------------------------------------

// A size x size image tiled with one random block texture, except for one
// block carrying a different texture. noise adds clamped Gaussian jitter.
struct SyntheticScene {
  Image image;
  Image mask;  // 1 on the anomalous block
  std::size_t anomaly_patch = 0;
};

SyntheticScene make_anomaly_scene(std::uint64_t seed, std::size_t size = 128,
                                  std::size_t block = 8, double noise = 0.0);

struct SyntheticReport {
  std::size_t trials = 0;
  double anomaly_hit_rate = 0.0;  // saliency argmax patch == anomalous block
  double mean_auc = 0.0;
  double itti_hit_rate = 0.0;
  double itti_mean_auc = 0.0;
};

// Scene t uses seed + t for both the scene and the dictionary.
SyntheticReport run_synthetic_suite(std::uint64_t seed, std::size_t trials,
                                    const PipelineConfig& cfg, bool with_itti = true);

// Index of the highest-scoring patch, lowest index on ties.
std::size_t argmax_patch(const std::vector<double>& scores);

}  // namespace rdl
