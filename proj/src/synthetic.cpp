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

#include <algorithm>
#include <random>

#include "rdl/error.hpp"
#include "rdl/pipeline.hpp"

namespace rdl {

SyntheticScene make_anomaly_scene(std::uint64_t seed, std::size_t size, std::size_t block,
                                  double noise) {
  if (block < 1 || size < block || size % block != 0) {
    throw ContractViolation("make_anomaly_scene: size must be a positive multiple of block");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> level(0.25, 0.75);
  std::normal_distribution<double> jitter(0.0, 1.0);

  const std::size_t cells = block * block;
  std::vector<double> common(cells), anomaly(cells);
  for (double& v : common) v = level(rng);
  for (double& v : anomaly) v = level(rng);

  const std::size_t per_row = size / block;
  const std::size_t blocks = per_row * per_row;
  std::uniform_int_distribution<std::size_t> where(0, blocks - 1);
  const std::size_t target = where(rng);

  std::vector<double> pixels(size * size);
  std::vector<double> mask(size * size, 0.0);
  for (std::size_t y = 0; y < size; ++y) {
    for (std::size_t x = 0; x < size; ++x) {
      const std::size_t b = (y / block) * per_row + x / block;
      const std::size_t c = (y % block) * block + x % block;
      const double base = b == target ? anomaly[c] : common[c];
      pixels[y * size + x] = std::clamp(base + noise * jitter(rng), 0.0, 1.0);
      if (b == target) mask[y * size + x] = 1.0;
    }
  }
  return {Image(size, size, std::move(pixels)), Image(size, size, std::move(mask)), target};
}

SyntheticReport run_synthetic_suite(std::uint64_t seed, std::size_t trials,
                                    const PipelineConfig& cfg, bool with_itti) {
  if (trials == 0) throw ContractViolation("run_synthetic_suite: trials must be >= 1");
  SyntheticReport rep;
  rep.trials = trials;
  std::size_t hits = 0, itti_hits = 0;
  double auc = 0.0, itti_auc = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const SyntheticScene scene = make_anomaly_scene(seed + t, 128, cfg.block);
    PipelineConfig run_cfg = cfg;
    run_cfg.learn.seed = seed + t;
    const PatchModel model = fit_patch_model(scene.image, run_cfg);
    const SparseCodes& X = model.learned.codes;
    const auto scores = patch_scores(X, saliency_atom_weights(activation_stats(X)));
    if (argmax_patch(scores) == scene.anomaly_patch) ++hits;
    const SaliencyMap map = scores_to_map(scores, model.grid, cfg.saliency_blur_sigma);
    auc += evaluate_saliency(map, scene.mask).auc;

    if (with_itti) {
      const SaliencyMetrics m = evaluate_saliency(itti_lite(scene.image), scene.mask);
      itti_hits += m.hit ? 1 : 0;
      itti_auc += m.auc;
    }
  }
  const auto n = static_cast<double>(trials);
  rep.anomaly_hit_rate = static_cast<double>(hits) / n;
  rep.mean_auc = auc / n;
  if (with_itti) {
    rep.itti_hit_rate = static_cast<double>(itti_hits) / n;
    rep.itti_mean_auc = itti_auc / n;
  }
  return rep;
}

}  // namespace rdl
