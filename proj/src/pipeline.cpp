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

#include "rdl/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rdl/error.hpp"

namespace rdl {

void PipelineConfig::validate() const {
  if (block < 1) throw ContractViolation("PipelineConfig: block must be >= 1");
  if (!(saliency_blur_sigma >= 0.0)) {
    throw ContractViolation("PipelineConfig: saliency_blur_sigma must be >= 0");
  }
  if (measure.S && !(*measure.S > 0.0)) throw ContractViolation("PipelineConfig: S must be > 0");
  if (transform.kind == TransformKind::gamma && !(transform.g > 0.0)) {
    throw ContractViolation("PipelineConfig: gamma exponent must be > 0");
  }
  learn.validate();
}

std::string describe(const PipelineConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "block=" << cfg.block << '\n'
     << "K=" << cfg.learn.K << '\n'
     << "iters=" << cfg.learn.iters << '\n'
     << "seed=" << cfg.learn.seed << '\n'
     << "init=" << to_string(cfg.learn.init) << '\n'
     << "unused_policy=replace_with_worst_signal\n"
     << "coder=" << to_string(cfg.learn.coder.mode) << '\n'
     << "T=" << cfg.learn.coder.T << '\n'
     << "residual_tol=" << cfg.learn.coder.residual_tol << '\n'
     << "alpha=" << cfg.learn.coder.alpha << '\n'
     << "max_iter=" << cfg.learn.coder.max_iter << '\n'
     << "obj_tol=" << cfg.learn.coder.obj_tol << '\n'
     << "measure=" << to_string(cfg.measure.kind) << '\n'
     << "S=" << (cfg.measure.S ? std::to_string(*cfg.measure.S) : std::string("N")) << '\n'
     << "epsilon=" << cfg.measure.epsilon << '\n'
     << "transform=" << to_string(cfg.transform.kind) << '\n'
     << "sigmoid_a=" << cfg.transform.a << '\n'
     << "sigmoid_b=" << cfg.transform.b << '\n'
     << "gamma=" << cfg.transform.g << '\n'
     << "affine_scale=" << cfg.transform.scale << '\n'
     << "affine_offset=" << cfg.transform.offset << '\n'
     << "dc_remove=" << (cfg.dc_remove ? 1 : 0) << '\n'
     << "saliency_blur_sigma=" << cfg.saliency_blur_sigma << '\n';
  return os.str();
}

PatchModel fit_patch_model(const Image& img, const PipelineConfig& cfg) {
  cfg.validate();
  Patches p = to_patches(img, cfg.block);
  PatchModel model;
  model.grid = p.grid;
  model.means = Eigen::RowVectorXd::Zero(p.matrix.cols());
  if (cfg.dc_remove) {
    model.means = p.matrix.colwise().mean();
    p.matrix.rowwise() -= model.means;
  }
  model.patches = std::move(p.matrix);
  model.learned = learn(model.patches, cfg.learn);
  return model;
}

Image reconstruct(const Eigen::MatrixXd& W, const SparseCodes& X, const Eigen::RowVectorXd& means,
                  const PatchGrid& grid) {
  Eigen::MatrixXd Y = multiply(W, X);
  if (means.size() != Y.cols()) throw ContractViolation("reconstruct: means length mismatch");
  if (!means.isZero(0.0)) Y.rowwise() += means;
  return from_patches(Y, grid);
}

EnhanceResult enhance(const Image& img, const PipelineConfig& cfg) {
  PatchModel model = fit_patch_model(img, cfg);
  const Dictionary& D = model.learned.dictionary;
  const SparseCodes& X = model.learned.codes;

  EnhanceResult out;
  out.rarity = rarity(activation_stats(X), cfg.measure);
  out.weights = transform(out.rarity, cfg.transform);
  const Eigen::MatrixXd weighted = reweight_dictionary(D, out.weights);
  out.image = reconstruct(weighted, X, model.means, model.grid);
  out.dictionary = D;
  out.codes = X;
  out.report = std::move(model.learned.report);
  return out;
}

// ----------------------------------------------------------------------
// Rarity saliency
// ----------------------------------------------------------------------

std::vector<double> saliency_atom_weights(const ActivationStats& stats) {
  std::vector<double> w(stats.m.size());
  const double denom = static_cast<double>(stats.N) + 1.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = -std::log((static_cast<double>(stats.m[i]) + 1.0) / denom);
  }
  return w;
}

std::vector<double> patch_scores(const SparseCodes& X, const std::vector<double>& weights) {
  if (static_cast<Eigen::Index>(weights.size()) != X.K()) {
    throw ContractViolation("patch_scores: weight count != K");
  }
  std::vector<double> scores(static_cast<std::size_t>(X.N()), 0.0);
  std::vector<double> terms;
  for (Eigen::Index j = 0; j < X.N(); ++j) {
    terms.clear();
    for (const auto& e : X.column(j)) {
      terms.push_back(weights[static_cast<std::size_t>(e.atom)] * std::abs(e.value));
    }
    std::sort(terms.begin(), terms.end());
    double s = 0.0;
    for (double t : terms) s += t;
    scores[static_cast<std::size_t>(j)] = s;
  }
  return scores;
}

SaliencyMap scores_to_map(const std::vector<double>& scores, const PatchGrid& grid,
                          double blur_sigma) {
  if (scores.size() != grid.patch_count()) {
    throw ContractViolation("scores_to_map: score count != patch count");
  }
  Eigen::MatrixXd m(grid.orig_height, grid.orig_width);
  for (std::size_t y = 0; y < grid.orig_height; ++y) {
    for (std::size_t x = 0; x < grid.orig_width; ++x) {
      m(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) =
          scores[(y / grid.block) * grid.cols + x / grid.block];
    }
  }
  return from_matrix(normalize_min_max(gaussian_blur(m, blur_sigma)));
}

SaliencyMap saliency_from_codes(const SparseCodes& X, const PatchGrid& grid, double blur_sigma) {
  const auto w = saliency_atom_weights(activation_stats(X));
  return scores_to_map(patch_scores(X, w), grid, blur_sigma);
}

SaliencyMap saliency_map(const Image& img, const PipelineConfig& cfg) {
  const PatchModel model = fit_patch_model(img, cfg);
  return saliency_from_codes(model.learned.codes, model.grid, cfg.saliency_blur_sigma);
}

std::size_t argmax_patch(const std::vector<double>& scores) {
  if (scores.empty()) throw ContractViolation("argmax_patch: no scores");
  std::size_t best = 0;
  for (std::size_t j = 1; j < scores.size(); ++j) {
    if (scores[j] > scores[best]) best = j;
  }
  return best;
}

// ----------------------------------------------------------------------
// Raster helpers
// ----------------------------------------------------------------------

Eigen::MatrixXd to_matrix(const Image& img) {
  Eigen::MatrixXd m(img.height(), img.width());
  for (std::size_t y = 0; y < img.height(); ++y) {
    for (std::size_t x = 0; x < img.width(); ++x) {
      m(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) = img.at(x, y);
    }
  }
  return m;
}

Image from_matrix(const Eigen::MatrixXd& m) {
  std::vector<double> data(static_cast<std::size_t>(m.size()));
  for (Eigen::Index y = 0; y < m.rows(); ++y) {
    for (Eigen::Index x = 0; x < m.cols(); ++x) {
      const double v = m(y, x);
      data[static_cast<std::size_t>(y * m.cols() + x)] = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
    }
  }
  return Image(static_cast<std::size_t>(m.cols()), static_cast<std::size_t>(m.rows()),
               std::move(data));
}

Eigen::MatrixXd gaussian_blur(const Eigen::MatrixXd& img, double sigma) {
  if (!(sigma > 0.0)) return img;
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
    kernel[static_cast<std::size_t>(i + radius)] = v;
    total += v;
  }
  for (double& v : kernel) v /= total;

  const Eigen::Index rows = img.rows();
  const Eigen::Index cols = img.cols();
  Eigen::MatrixXd tmp(rows, cols);
  for (Eigen::Index y = 0; y < rows; ++y) {
    for (Eigen::Index x = 0; x < cols; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const Eigen::Index xx = std::clamp<Eigen::Index>(x + i, 0, cols - 1);
        acc += kernel[static_cast<std::size_t>(i + radius)] * img(y, xx);
      }
      tmp(y, x) = acc;
    }
  }
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index y = 0; y < rows; ++y) {
    for (Eigen::Index x = 0; x < cols; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const Eigen::Index yy = std::clamp<Eigen::Index>(y + i, 0, rows - 1);
        acc += kernel[static_cast<std::size_t>(i + radius)] * tmp(yy, x);
      }
      out(y, x) = acc;
    }
  }
  return out;
}

Eigen::MatrixXd normalize_min_max(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return m;
  const double lo = m.minCoeff();
  const double hi = m.maxCoeff();
  const double range = hi - lo;
  if (!(range > 1e-12 * std::max(std::abs(hi), 1.0))) {
    return Eigen::MatrixXd::Zero(m.rows(), m.cols());
  }
  return ((m.array() - lo) / range).matrix();
}

// ----------------------------------------------------------------------
// Evaluation
// ----------------------------------------------------------------------

SaliencyMetrics evaluate_saliency(const SaliencyMap& map, const Image& truth) {
  if (map.width() != truth.width() || map.height() != truth.height()) {
    throw ContractViolation("evaluate_saliency: map and mask dimensions differ");
  }
  const auto values = map.data();
  const auto labels = truth.data();
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  SaliencyMetrics out;
  out.hit = labels[best] > 0.5;

  std::vector<std::size_t> order(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] > values[b];
  });
  double pos = 0.0, neg = 0.0;
  for (double l : labels) (l > 0.5 ? pos : neg) += 1.0;
  if (pos == 0.0 || neg == 0.0) {
    throw ContractViolation("evaluate_saliency: mask must contain both classes");
  }
  // Walk thresholds from high to low; each group of tied scores adds one
  // trapezoid to the ROC curve.
  double tp = 0.0, fp = 0.0, area = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double v = values[order[i]];
    double dtp = 0.0, dfp = 0.0;
    while (i < order.size() && values[order[i]] == v) {
      (labels[order[i]] > 0.5 ? dtp : dfp) += 1.0;
      ++i;
    }
    area += dfp * (tp + 0.5 * dtp);
    tp += dtp;
    fp += dfp;
  }
  out.auc = area / (pos * neg);
  return out;
}

}  // namespace rdl
