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

#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "rdl/error.hpp"
#include "rdl/file_util.hpp"
#include "rdl/ksvd.hpp"
#include "rdl/pipeline.hpp"

namespace rdl::cli {

namespace {

// Flag-backed mirror of PipelineConfig; enum fields travel as strings.
struct PipelineFlags {
  PipelineConfig cfg;
  std::string coder = "omp";
  std::string init = "sample_patches";
  std::string measure = "count_fraction";
  std::string transform = "sigmoid";
  std::optional<double> S;

  explicit PipelineFlags(PipelineConfig base) : cfg(std::move(base)) {
    coder = to_string(cfg.learn.coder.mode);
    init = to_string(cfg.learn.init);
    measure = to_string(cfg.measure.kind);
    transform = to_string(cfg.transform.kind);
    S = cfg.measure.S;
  }

  void attach(CLI::App* app) {
    app->add_option("--block", cfg.block, "Block side in pixels")->capture_default_str();
    app->add_option("--K", cfg.learn.K, "Dictionary atoms")->capture_default_str();
    app->add_option("--iters", cfg.learn.iters, "K-SVD alternations")->capture_default_str();
    app->add_option("--seed", cfg.learn.seed, "Random seed")->capture_default_str();
    app->add_option("--init", init, "Initial dictionary")
        ->check(CLI::IsMember({"sample_patches", "random_gaussian"}))
        ->capture_default_str();
    app->add_option("--coder", coder, "Sparse coder")
        ->check(CLI::IsMember({"omp", "ista"}))
        ->capture_default_str();
    app->add_option("--T", cfg.learn.coder.T, "OMP atoms per patch")->capture_default_str();
    app->add_option("--residual-tol", cfg.learn.coder.residual_tol, "OMP residual tolerance")
        ->capture_default_str();
    app->add_option("--alpha", cfg.learn.coder.alpha, "ISTA l1 weight")->capture_default_str();
    app->add_option("--max-iter", cfg.learn.coder.max_iter, "ISTA iteration cap")
        ->capture_default_str();
    app->add_option("--obj-tol", cfg.learn.coder.obj_tol, "ISTA relative objective change")
        ->capture_default_str();
    app->add_option("--measure", measure, "Rarity measure")
        ->check(CLI::IsMember({"count_fraction", "coeff_mass", "neg_log_count", "squared_count"}))
        ->capture_default_str();
    app->add_option("--S", S, "Rarity scale constant (default: patch count)");
    app->add_option("--epsilon", cfg.measure.epsilon, "Log-measure smoothing")
        ->capture_default_str();
    app->add_option("--transform", transform, "Rarity transform")
        ->check(CLI::IsMember({"identity", "sigmoid", "gamma", "affine"}))
        ->capture_default_str();
    app->add_option("--sigmoid-a", cfg.transform.a, "Sigmoid slope")->capture_default_str();
    app->add_option("--sigmoid-b", cfg.transform.b, "Sigmoid center")->capture_default_str();
    app->add_option("--gamma", cfg.transform.g, "Gamma exponent")->capture_default_str();
    app->add_option("--affine-scale", cfg.transform.scale, "Affine scale")->capture_default_str();
    app->add_option("--affine-offset", cfg.transform.offset, "Affine offset")
        ->capture_default_str();
    app->add_flag("--dc-remove", cfg.dc_remove, "Subtract per-patch means before learning");
    app->add_option("--blur-sigma", cfg.saliency_blur_sigma, "Saliency blur sigma in pixels")
        ->capture_default_str();
  }

  PipelineConfig resolve() const {
    PipelineConfig c = cfg;
    c.learn.coder.mode = parse_coder_mode(coder);
    c.learn.init = parse_init_mode(init);
    c.measure.kind = parse_rarity_kind(measure);
    c.measure.S = S;
    c.transform.kind = parse_transform_kind(transform);
    c.validate();
    return c;
  }
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_text(const std::string& path, const std::string& text) {
  const std::vector<std::uint8_t> bytes(text.begin(), text.end());
  write_file_atomic(path, bytes);
}

void write_image(const std::string& path, const Image& img, unsigned maxval) {
  write_file_atomic(path, write_pgm(img, maxval));
}

std::string learn_report(const PatchMatrix& Y, const LearnResult& res) {
  std::ostringstream os;
  os.precision(17);
  os << "n=" << Y.rows() << '\n' << "N=" << Y.cols() << '\n'
     << "K=" << res.dictionary.K() << '\n'
     << "iterations=" << res.report.objective_per_iter.size() << '\n';
  for (std::size_t i = 0; i < res.report.objective_per_iter.size(); ++i) {
    os << "objective_" << i + 1 << '=' << res.report.objective_per_iter[i] << '\n';
  }
  for (std::size_t i = 0; i < res.report.atoms_replaced_per_iter.size(); ++i) {
    os << "atoms_replaced_" << i + 1 << '=' << res.report.atoms_replaced_per_iter[i] << '\n';
  }
  os << "final_psnr=" << res.report.final_psnr << '\n';
  return os.str();
}

}  // namespace

Image dictionary_atlas(const Dictionary& D) {
  const auto side = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(D.n()))));
  if (side * side != D.n()) {
    throw ContractViolation("dict-atlas: atom dimension " + std::to_string(D.n()) +
                            " is not a perfect square");
  }
  const auto K = static_cast<std::size_t>(D.K());
  auto grid_cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(K))));
  while (grid_cols * grid_cols < K) ++grid_cols;
  const std::size_t grid_rows = (K + grid_cols - 1) / grid_cols;
  const auto b = static_cast<std::size_t>(side);
  const std::size_t width = grid_cols * (b + 1) + 1;
  const std::size_t height = grid_rows * (b + 1) + 1;

  Image atlas(width, height, 1.0);
  for (std::size_t k = 0; k < K; ++k) {
    const auto atom = D.atom(static_cast<Eigen::Index>(k));
    const double lo = atom.minCoeff();
    const double range = atom.maxCoeff() - lo;
    const std::size_t ox = (k % grid_cols) * (b + 1) + 1;
    const std::size_t oy = (k / grid_cols) * (b + 1) + 1;
    for (std::size_t py = 0; py < b; ++py) {
      for (std::size_t px = 0; px < b; ++px) {
        const double v = atom[static_cast<Eigen::Index>(py * b + px)];
        atlas.set(ox + px, oy + py, range > 0.0 ? (v - lo) / range : 0.0);
      }
    }
  }
  return atlas;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dictionary-learning image enhancement and rarity saliency", "rdl"};
  app.require_subcommand(1);

  std::string in_path, out_path, dict_path, report_path;
  unsigned maxval = 255;
  bool print_config = false;
  std::uint64_t eval_seed = 1;
  std::size_t trials = 100;
  bool no_itti = false;

  PipelineFlags learn_flags{PipelineConfig{}};
  PipelineFlags enhance_flags{PipelineConfig{}};
  PipelineFlags saliency_flags{PipelineConfig{}};
  PipelineFlags eval_flags{PipelineConfig{}};

  auto* learn_cmd = app.add_subcommand("learn", "Learn a dictionary from a PGM image");
  learn_cmd->add_option("--in", in_path, "Input PGM");
  learn_cmd->add_option("--dict", dict_path, "Output RDCT dictionary");
  learn_cmd->add_option("--report", report_path, "Report file (default: stdout)");
  learn_cmd->add_flag("--print-config", print_config, "Echo the resolved configuration");
  learn_flags.attach(learn_cmd);

  auto* enhance_cmd = app.add_subcommand("enhance", "Rarity-reweighted reconstruction");
  enhance_cmd->add_option("--in", in_path, "Input PGM");
  enhance_cmd->add_option("--out", out_path, "Output PGM");
  enhance_cmd->add_option("--dict", dict_path, "Also write the learned dictionary (RDCT)");
  enhance_cmd->add_option("--maxval", maxval, "Output maxval")->capture_default_str();
  enhance_cmd->add_flag("--print-config", print_config, "Echo the resolved configuration");
  enhance_flags.attach(enhance_cmd);

  auto* saliency_cmd = app.add_subcommand("saliency", "Rarity saliency map");
  saliency_cmd->add_option("--in", in_path, "Input PGM");
  saliency_cmd->add_option("--out", out_path, "Output PGM");
  saliency_cmd->add_option("--maxval", maxval, "Output maxval")->capture_default_str();
  saliency_cmd->add_flag("--print-config", print_config, "Echo the resolved configuration");
  saliency_flags.attach(saliency_cmd);

  auto* itti_cmd = app.add_subcommand("itti", "Itti-lite saliency baseline");
  itti_cmd->add_option("--in", in_path, "Input PGM");
  itti_cmd->add_option("--out", out_path, "Output PGM");
  itti_cmd->add_option("--maxval", maxval, "Output maxval")->capture_default_str();

  auto* atlas_cmd = app.add_subcommand("dict-atlas", "Render a dictionary as a PGM atlas");
  atlas_cmd->add_option("--dict", dict_path, "Input RDCT dictionary");
  atlas_cmd->add_option("--out", out_path, "Output PGM");

  auto* eval_cmd = app.add_subcommand("eval-synthetic", "Seeded synthetic rarity benchmark");
  eval_cmd->add_option("--trials", trials, "Number of scenes")->capture_default_str();
  eval_cmd->add_flag("--no-itti", no_itti, "Skip the Itti-lite baseline");
  eval_cmd->add_flag("--print-config", print_config, "Echo the resolved configuration");
  eval_flags.attach(eval_cmd);
  // --seed on eval-synthetic sets the suite seed (scene t uses seed + t).
  eval_cmd->get_option("--seed")->description("Suite seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "rdl: " << e.what() << '\n';
    return kUsage;
  }

  auto require = [&](bool ok, const char* flag) {
    if (!ok) throw UsageError(std::string("missing required flag ") + flag);
  };

  try {
    if (learn_cmd->parsed()) {
      const PipelineConfig cfg = learn_flags.resolve();
      if (print_config) {
        out << describe(cfg);
        if (in_path.empty() && dict_path.empty()) return kOk;
      }
      require(!in_path.empty(), "--in");
      require(!dict_path.empty(), "--dict");
      const Image img = read_pgm_file(in_path);
      const Patches p = to_patches(img, cfg.block);
      const LearnResult res = learn(p.matrix, cfg.learn);
      write_file_atomic(dict_path, encode_rdct(res.dictionary));
      const std::string report = learn_report(p.matrix, res);
      if (report_path.empty()) {
        out << report;
      } else {
        write_text(report_path, report);
      }
    } else if (enhance_cmd->parsed()) {
      const PipelineConfig cfg = enhance_flags.resolve();
      if (print_config) {
        out << describe(cfg);
        if (in_path.empty() && out_path.empty()) return kOk;
      }
      require(!in_path.empty(), "--in");
      require(!out_path.empty(), "--out");
      const Image img = read_pgm_file(in_path);
      const EnhanceResult res = enhance(img, cfg);
      write_image(out_path, res.image, maxval);
      if (!dict_path.empty()) write_file_atomic(dict_path, encode_rdct(res.dictionary));
    } else if (saliency_cmd->parsed()) {
      const PipelineConfig cfg = saliency_flags.resolve();
      if (print_config) {
        out << describe(cfg);
        if (in_path.empty() && out_path.empty()) return kOk;
      }
      require(!in_path.empty(), "--in");
      require(!out_path.empty(), "--out");
      const Image img = read_pgm_file(in_path);
      write_image(out_path, saliency_map(img, cfg), maxval);
    } else if (itti_cmd->parsed()) {
      require(!in_path.empty(), "--in");
      require(!out_path.empty(), "--out");
      const Image img = read_pgm_file(in_path);
      write_image(out_path, itti_lite(img), maxval);
    } else if (atlas_cmd->parsed()) {
      require(!dict_path.empty(), "--dict");
      require(!out_path.empty(), "--out");
      const Dictionary D = decode_rdct(read_file(dict_path));
      write_image(out_path, dictionary_atlas(D), 255);
    } else if (eval_cmd->parsed()) {
      PipelineConfig cfg = eval_flags.resolve();
      eval_seed = cfg.learn.seed;
      if (print_config) out << describe(cfg);
      if (trials < 1) throw UsageError("--trials must be >= 1");
      const SyntheticReport rep = run_synthetic_suite(eval_seed, trials, cfg, !no_itti);
      std::ostringstream os;
      os.precision(6);
      os << std::fixed;
      os << "trials=" << rep.trials << '\n'
         << "seed=" << eval_seed << '\n'
         << "anomaly_hit_rate=" << rep.anomaly_hit_rate << '\n'
         << "mean_auc=" << rep.mean_auc << '\n';
      if (!no_itti) {
        os << "itti_hit_rate=" << rep.itti_hit_rate << '\n'
           << "itti_mean_auc=" << rep.itti_mean_auc << '\n';
      }
      out << os.str();
    }
  } catch (const UsageError& e) {
    err << "rdl: " << e.what() << '\n';
    return kUsage;
  } catch (const ContractViolation& e) {
    err << "rdl: contract violation: " << e.what() << '\n';
    return kContract;
  } catch (const ParseError& e) {
    err << "rdl: parse error: " << e.what() << '\n';
    return kIoOrParse;
  } catch (const TruncationError& e) {
    err << "rdl: truncated input: " << e.what() << '\n';
    return kIoOrParse;
  } catch (const IoError& e) {
    err << "rdl: i/o error: " << e.what() << '\n';
    return kIoOrParse;
  }
  return kOk;
}

}  // namespace rdl::cli
