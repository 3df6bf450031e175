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
#include <span>
#include <string>
#include <vector>

#include "rdl/coder.hpp"
#include "rdl/image_io.hpp"

namespace rdl {

enum class InitMode { sample_patches, random_gaussian };
enum class UnusedPolicy { replace_with_worst_signal };

std::string to_string(InitMode mode);
InitMode parse_init_mode(const std::string& s);

struct LearnConfig {
  std::size_t K = 256;
  std::size_t iters = 20;
  CoderConfig coder;
  std::uint64_t seed = 0;
  UnusedPolicy unused_policy = UnusedPolicy::replace_with_worst_signal;
  InitMode init = InitMode::sample_patches;

  void validate() const;
};

struct LearnReport {
  // ||Y - DX||_F^2 (+ alpha ||X||_1 in ista mode) at the end of each iteration.
  std::vector<double> objective_per_iter;
  std::vector<std::size_t> atoms_replaced_per_iter;
  // ||Y - DX||_F^2 just before and just after each dictionary-update sweep.
  std::vector<double> sweep_error_before;
  std::vector<double> sweep_error_after;
  double final_psnr = 0.0;
};

struct LearnResult {
  Dictionary dictionary;
  SparseCodes codes;
  LearnReport report;
};

struct UpdateResult {
  Dictionary dictionary;
  SparseCodes codes;
};

// Seeded initial dictionary. sample_patches draws K distinct columns of Y
// (all of them plus uniform draws when N < K); zero columns fall back to
// seeded Gaussian atoms.
Dictionary init_dictionary(const PatchMatrix& Y, std::size_t K, std::uint64_t seed,
                           InitMode init = InitMode::sample_patches);

// One K-SVD dictionary-update sweep over atoms in ascending order. Each atom
// with a nonempty support is replaced by the leading left singular vector of
// its restricted residual, and its coefficients by sigma_1 times the right
// singular vector. The leading pair comes from power iteration on E E^T
// started at the current atom, so the restricted error never increases.
// Supports can only shrink. The first nonzero entry of every updated atom is
// positive.
UpdateResult ksvd_update(const Dictionary& D, const SparseCodes& X, const PatchMatrix& Y);

// Replaces every atom with no uses in X by the worst-reconstructed column of
// Y (distinct columns, ties to the lowest index), normalized. Returns the
// number of atoms replaced.
std::size_t replace_unused_atoms(Dictionary& D, const SparseCodes& X, const PatchMatrix& Y,
                                 std::uint64_t seed);

// Alternates encode_all and ksvd_update for cfg.iters iterations.
LearnResult learn(const PatchMatrix& Y, const LearnConfig& cfg);

// RDCT dictionary file: "RDCT", u32 version (1), u32 n, u32 K, then n*K
// IEEE-754 doubles, column-major; all little-endian.
std::vector<std::uint8_t> encode_rdct(const Dictionary& D);
Dictionary decode_rdct(std::span<const std::uint8_t> bytes);

}  // namespace rdl
