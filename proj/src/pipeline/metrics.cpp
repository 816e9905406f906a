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

#include "pipeline/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <mutex>
#include <numbers>

#include <fftw3.h>
#include <fmt/format.h>

namespace ssm::pipeline {

NMTEReport nmte(const Mat& ref, const Mat& rec, int windows) {
  require(ref.rows() == rec.rows() && ref.cols() == rec.cols(), "nmte: trajectories differ in shape");
  require(ref.cols() > 0, "nmte: empty trajectory");
  require(windows >= 1, "nmte: need at least one window");
  NMTEReport r;
  r.samples = static_cast<int>(ref.cols());
  const Vec norms = ref.colwise().norm().transpose();
  Eigen::Index imax = 0;
  r.reference_norm = norms.maxCoeff(&imax);
  r.reference_index = static_cast<int>(imax);
  if (!(r.reference_norm > 0.0)) {
    fail(ErrorKind::kNumeric, "nmte: reference trajectory is identically zero; normalization undefined");
  }
  const Vec err = (ref - rec).colwise().norm().transpose();
  r.value = 100.0 * err.sum() / (r.samples * r.reference_norm);
  const int L = r.samples;
  for (int w = 0; w < windows; ++w) {
    const int a = static_cast<int>(static_cast<long long>(L) * w / windows);
    const int b = static_cast<int>(static_cast<long long>(L) * (w + 1) / windows);
    if (b > a) r.windows.push_back(100.0 * err.segment(a, b - a).sum() / ((b - a) * r.reference_norm));
  }
  return r;
}

NMTEReport nmte(const Trajectory& ref, const Trajectory& rec, int windows) {
  require(ref.times.size() == rec.times.size(), "nmte: sample counts differ; resample first");
  for (std::size_t k = 0; k < ref.times.size(); ++k) {
    if (std::abs(ref.times[k] - rec.times[k]) > 1e-9 * std::max(1.0, std::abs(ref.times[k]))) {
      fail(ErrorKind::kInvalidArgument, "nmte: sample times differ; resample first");
    }
  }
  return nmte(ref.snapshots, rec.snapshots, windows);
}

namespace {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

SpectrogramMatrix spectrogram(std::span<const double> signal, double fs, int window, int hop,
                              WindowKind kind) {
  require(fs > 0.0, "spectrogram: sample rate must be positive");
  require(window >= 2, "spectrogram: window too short");
  require(static_cast<std::size_t>(window) <= signal.size(), "spectrogram: window longer than signal");
  if (hop <= 0) hop = window / 2;
  SpectrogramMatrix s;
  s.window = window;
  s.hop = hop;
  s.sample_rate = fs;
  s.kind = kind;
  std::vector<double> w(window);
  for (int n = 0; n < window; ++n) {
    w[n] = kind == WindowKind::kHann ? 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * n / window)) : 1.0;
    s.window_energy += w[n] * w[n];
  }
  const int bins = window / 2 + 1;
  const auto len = static_cast<long long>(signal.size());
  const int frames = static_cast<int>(len / hop) + 1;
  for (int k = 0; k < bins; ++k) s.frequencies.push_back(k * fs / window);
  s.magnitude.resize(bins, frames);

  double* in = fftw_alloc_real(window);
  fftw_complex* out = fftw_alloc_complex(bins);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(window, in, out, FFTW_ESTIMATE);
  }
  for (int f = 0; f < frames; ++f) {
    const long long start = static_cast<long long>(f) * hop - window / 2;
    for (int n = 0; n < window; ++n) {
      const long long i = start + n;
      in[n] = (i >= 0 && i < len) ? w[n] * signal[i] : 0.0;
    }
    fftw_execute(plan);
    for (int k = 0; k < bins; ++k) s.magnitude(k, f) = std::hypot(out[k][0], out[k][1]);
    s.times.push_back(static_cast<double>(f) * hop / fs);
  }
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return s;
}

double spectrogram_energy(const SpectrogramMatrix& s) {
  const int bins = static_cast<int>(s.magnitude.rows());
  double total = 0.0;
  for (Eigen::Index f = 0; f < s.magnitude.cols(); ++f) {
    double e = 0.0;
    for (int k = 0; k < bins; ++k) {
      const double m2 = s.magnitude(k, f) * s.magnitude(k, f);
      const bool edge = k == 0 || (s.window % 2 == 0 && k == bins - 1);
      e += edge ? m2 : 2.0 * m2;
    }
    total += e / s.window;  // Parseval for the windowed frame
  }
  return total * s.hop / s.window_energy;
}

void write_spectrogram(const SpectrogramMatrix& s, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) fail(ErrorKind::kIo, "cannot write " + path);
  fmt::print(f, "# window={} hop={} sample_rate={} window_kind={}\n", s.window, s.hop, s.sample_rate,
             s.kind == WindowKind::kHann ? "hann" : "rectangular");
  fmt::print(f, "# time_s frequency_hz magnitude\n");
  for (Eigen::Index c = 0; c < s.magnitude.cols(); ++c) {
    for (Eigen::Index k = 0; k < s.magnitude.rows(); ++k) {
      fmt::print(f, "{:.9e} {:.9e} {:.9e}\n", s.times[c], s.frequencies[k], s.magnitude(k, c));
    }
  }
  std::fclose(f);
}

double bolt_preload(const BoltSpec& b) {
  require(b.torque > 0.0 && b.pitch > 0.0 && b.pitch_diameter > 0.0 && b.head_diameter > 0.0,
          "bolt_preload: torque and lengths must be positive");
  require(b.mu_thread >= 0.0 && b.mu_head >= 0.0, "bolt_preload: friction coefficients must be non-negative");
  require(std::isfinite(b.torque + b.pitch + b.pitch_diameter + b.head_diameter + b.mu_thread + b.mu_head),
          "bolt_preload: non-finite input");
  return b.torque / (0.159 * b.pitch + 0.578 * b.pitch_diameter * b.mu_thread + 0.5 * b.head_diameter * b.mu_head);
}

}  // namespace ssm::pipeline
