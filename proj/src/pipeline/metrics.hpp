// Copyright 2026 The ssmrom Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "bench/trajectory.hpp"
#include "common.hpp"

namespace ssm::pipeline {

struct NMTEReport {
  double value = 0.0;  // percent
  int samples = 0;
  int reference_index = 0;  // column of the maximum-norm reference snapshot
  double reference_norm = 0.0;
  std::vector<double> windows;  // NMTE over consecutive equal windows
};

// 100 * sum_k |x_k - r_k| / (L |x_max|), x_max the reference snapshot of
// largest norm. Columns are samples.
NMTEReport nmte(const Mat& reference, const Mat& reconstructed, int windows = 4);
NMTEReport nmte(const Trajectory& reference, const Trajectory& reconstructed, int windows = 4);

enum class WindowKind { kHann, kRectangular };

struct SpectrogramMatrix {
  int window = 0;
  int hop = 0;
  double sample_rate = 0.0;
  WindowKind kind = WindowKind::kHann;
  double window_energy = 0.0;       // sum of w^2
  std::vector<double> frequencies;  // Hz, bin k = k fs / window
  std::vector<double> times;        // frame centers, s
  Mat magnitude;                    // bins x frames, |X_k| of the windowed frame
};

// Frames are centered on multiples of hop (the signal is zero-padded by
// window / 2 at both ends). hop <= 0 selects window / 2.
SpectrogramMatrix spectrogram(std::span<const double> signal, double sample_rate, int window = 1024,
                              int hop = -1, WindowKind kind = WindowKind::kHann);

// Signal energy sum x^2 recovered from the spectrogram through the window
// compensation factor hop / sum w^2.
double spectrogram_energy(const SpectrogramMatrix& s);

void write_spectrogram(const SpectrogramMatrix& s, const std::string& path);

struct BoltSpec {
  double torque = 0.0;        // N m
  double pitch = 0.0;         // m
  double pitch_diameter = 0.0;  // d2, m
  double head_diameter = 0.0;   // D_f, m
  double mu_thread = 0.0;
  double mu_head = 0.0;
};

// F = T / (0.159 P + 0.578 d2 mu_T + 0.5 D_f mu_H)
double bolt_preload(const BoltSpec& spec);

}  // namespace ssm::pipeline
