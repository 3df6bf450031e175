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

#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "rdl/file_util.hpp"
#include "rdl/ksvd.hpp"
#include "rdl/pipeline.hpp"

namespace fs = std::filesystem;
using namespace rdl;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("rdl_cli_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

void write_image(const std::string& path, const Image& img) {
  const auto bytes = write_pgm(img, 255);
  write_file_atomic(path, bytes);
}

Image test_image() {
  // Quantized so the file roundtrip is exact.
  const SyntheticScene s = make_anomaly_scene(2, 64, 8);
  std::vector<double> d(s.image.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::round(s.image.data()[i] * 255.0) / 255.0;
  return Image(64, 64, std::move(d));
}

}  // namespace

TEST_CASE("cli usage errors") {
  CHECK(invoke({}).code == cli::kUsage);
  CHECK(invoke({"frobnicate"}).code == cli::kUsage);
  CHECK(invoke({"learn"}).code == cli::kUsage);
  CHECK(invoke({"learn", "--in", "x.pgm"}).code == cli::kUsage);
  CHECK(invoke({"learn", "--K", "abc", "--print-config"}).code == cli::kUsage);
  CHECK(invoke({"saliency", "--measure", "bogus", "--print-config"}).code == cli::kUsage);
}

TEST_CASE("cli print-config") {
  const Run r = invoke({"learn", "--print-config"});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("block=8\n") != std::string::npos);
  CHECK(r.out.find("K=256\n") != std::string::npos);
  const Run s = invoke({"saliency", "--print-config", "--K", "64", "--transform", "gamma"});
  CHECK(s.out.find("K=64\n") != std::string::npos);
  CHECK(s.out.find("transform=gamma\n") != std::string::npos);
}

TEST_CASE("cli contract violations") {
  CHECK(invoke({"learn", "--print-config", "--K", "0"}).code == cli::kContract);
}

TEST_CASE("cli io errors") {
  TempDir dir;
  CHECK(invoke({"learn", "--in", dir / "missing.pgm", "--dict", dir / "d.rdct"}).code ==
        cli::kIoOrParse);
  const std::string junk = dir / "junk.pgm";
  const std::string text = "P9 junk";
  write_file_atomic(junk, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  CHECK(invoke({"saliency", "--in", junk, "--out", dir / "s.pgm"}).code == cli::kIoOrParse);
  CHECK(invoke({"dict-atlas", "--dict", junk, "--out", dir / "a.pgm"}).code == cli::kIoOrParse);
}

TEST_CASE("cli learn is deterministic") {
  TempDir dir;
  const std::string in = dir / "in.pgm";
  write_image(in, test_image());
  const std::vector<std::string> base = {"learn", "--in", in, "--K", "32", "--iters", "3", "--seed", "4"};
  auto a = base, b = base;
  a.insert(a.end(), {"--dict", dir / "a.rdct", "--report", dir / "a.txt"});
  b.insert(b.end(), {"--dict", dir / "b.rdct", "--report", dir / "b.txt"});
  REQUIRE(invoke(a).code == cli::kOk);
  REQUIRE(invoke(b).code == cli::kOk);
  CHECK(read_file(dir / "a.rdct") == read_file(dir / "b.rdct"));
  CHECK(read_file(dir / "a.txt") == read_file(dir / "b.txt"));
  const auto rep = read_file(dir / "a.txt");
  const std::string text(rep.begin(), rep.end());
  CHECK(text.find("K=32\n") != std::string::npos);
  CHECK(text.find("objective_3=") != std::string::npos);
  const Dictionary D = decode_rdct(read_file(dir / "a.rdct"));
  CHECK(D.K() == 32);
  CHECK(D.n() == 64);

  // dict-atlas of a 32-atom dictionary: 6x6 grid of 8x8 tiles + separators.
  REQUIRE(invoke({"dict-atlas", "--dict", dir / "a.rdct", "--out", dir / "atlas.pgm"}).code == cli::kOk);
  const Image atlas = read_pgm_file(dir / "atlas.pgm");
  CHECK(atlas.width() == 6 * 9 + 1);
  CHECK(atlas.height() == 6 * 9 + 1);
  CHECK(atlas.at(0, 0) == 1.0);
}

TEST_CASE("cli enhance with unit weights matches the library") {
  TempDir dir;
  const std::string in = dir / "in.pgm";
  const Image img = test_image();
  write_image(in, img);
  const Run r = invoke({"enhance", "--in", in, "--out", dir / "out.pgm", "--K", "32", "--iters", "3",
                        "--transform", "affine", "--affine-scale", "0", "--affine-offset", "1"});
  REQUIRE(r.code == cli::kOk);
  PipelineConfig cfg;
  cfg.learn.K = 32;
  cfg.learn.iters = 3;
  cfg.transform = {TransformKind::affine};
  cfg.transform.scale = 0.0;
  cfg.transform.offset = 1.0;
  const EnhanceResult lib = enhance(img, cfg);
  CHECK(read_file(dir / "out.pgm") == write_pgm(lib.image, 255));
}

TEST_CASE("cli saliency and itti write maps") {
  TempDir dir;
  const std::string in = dir / "in.pgm";
  write_image(in, test_image());
  REQUIRE(invoke({"saliency", "--in", in, "--out", dir / "s.pgm", "--K", "32", "--iters", "3"}).code ==
          cli::kOk);
  CHECK(read_pgm_file(dir / "s.pgm").width() == 64);
  REQUIRE(invoke({"itti", "--in", in, "--out", dir / "i.pgm", "--maxval", "65535"}).code == cli::kOk);
  CHECK(read_pgm_file(dir / "i.pgm").height() == 64);
}

TEST_CASE("cli eval-synthetic") {
  const Run r = invoke({"eval-synthetic", "--trials", "20", "--K", "64", "--iters", "5", "--no-itti"});
  REQUIRE(r.code == cli::kOk);
  const auto pos = r.out.find("anomaly_hit_rate=");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(r.out.substr(pos + 17)) >= 0.95);
  CHECK(r.out.find("trials=20\n") != std::string::npos);
}
