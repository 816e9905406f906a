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

#include "bench/trajectory.hpp"

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace ssm {

void Trajectory::validate() const {
  require(static_cast<Eigen::Index>(times.size()) == snapshots.cols(),
          "trajectory: snapshot count does not match time count");
  for (std::size_t k = 1; k < times.size(); ++k) {
    require(times[k] > times[k - 1], "trajectory: times must be strictly increasing");
  }
  require(origin.size() == 0 || origin.size() == snapshots.rows(),
          "trajectory: origin length does not match state dimension");
}

namespace {

std::string origin_name(const std::string& path) {
  return std::filesystem::path(path).filename().string() + ".origin";
}

}  // namespace

void write_trajectory(const Trajectory& traj, const std::string& path) {
  traj.validate();
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) fail(ErrorKind::kIo, "cannot write " + path);
  const int dim = traj.state_dim();
  const std::string oname = origin_name(path);
  fmt::print(f, "n={} cols=time,x1..x{} origin={}\n", dim / 2, dim, oname);
  for (int k = 0; k < traj.samples(); ++k) {
    fmt::print(f, "{:.17g}", traj.times[k]);
    for (int i = 0; i < dim; ++i) fmt::print(f, " {:.17g}", traj.snapshots(i, k));
    std::fputc('\n', f);
  }
  std::fclose(f);

  const auto opath = std::filesystem::path(path).parent_path() / oname;
  std::FILE* o = std::fopen(opath.string().c_str(), "w");
  if (!o) fail(ErrorKind::kIo, "cannot write " + opath.string());
  const Vec origin = traj.origin.size() ? traj.origin : Vec::Zero(dim);
  for (int i = 0; i < dim; ++i) fmt::print(o, "{:.17g}\n", origin[i]);
  std::fclose(o);
}

Trajectory read_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot read " + path);
  std::string header;
  std::getline(in, header);
  int n = -1;
  std::string origin_file;
  {
    std::istringstream hs(header);
    std::string tok;
    while (hs >> tok) {
      if (tok.rfind("n=", 0) == 0) n = std::stoi(tok.substr(2));
      if (tok.rfind("origin=", 0) == 0) origin_file = tok.substr(7);
    }
  }
  if (n <= 0) fail(ErrorKind::kParse, path + ":1: missing n=<int> in trajectory header");
  const int dim = 2 * n;
  Trajectory traj;
  std::vector<double> values;
  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    double v;
    int count = 0;
    while (ls >> v) {
      if (count == 0) traj.times.push_back(v);
      else values.push_back(v);
      ++count;
    }
    if (count != dim + 1) {
      fail(ErrorKind::kParse, fmt::format("{}:{}: expected {} columns, got {}", path, lineno,
                                          dim + 1, count));
    }
  }
  traj.snapshots = Eigen::Map<Mat>(values.data(), dim, static_cast<Eigen::Index>(traj.times.size()));
  traj.origin = Vec::Zero(dim);
  if (!origin_file.empty()) {
    const auto opath = std::filesystem::path(path).parent_path() / origin_file;
    std::ifstream oin(opath);
    if (oin) {
      for (int i = 0; i < dim && (oin >> traj.origin[i]); ++i) {
      }
    }
  }
  traj.label = std::filesystem::path(path).stem().string();
  traj.validate();
  return traj;
}

void write_trajectory_binary(const Trajectory& traj, const std::string& path) {
  traj.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path);
  const std::int32_t n = traj.state_dim() / 2;
  const std::int64_t rows = traj.samples();
  out.write("SSMT", 4);
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
  for (std::int64_t k = 0; k < rows; ++k) {
    out.write(reinterpret_cast<const char*>(&traj.times[k]), sizeof(double));
    for (int i = 0; i < 2 * n; ++i) {
      const double v = traj.snapshots(i, k);
      out.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
  }
  const Vec origin = traj.origin.size() ? traj.origin : Vec::Zero(2 * n);
  out.write(reinterpret_cast<const char*>(origin.data()), sizeof(double) * 2 * n);
}

Trajectory read_trajectory_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot read " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != "SSMT") fail(ErrorKind::kParse, path + ": bad magic");
  std::int32_t n = 0;
  std::int64_t rows = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  in.read(reinterpret_cast<char*>(&rows), sizeof rows);
  if (!in || n <= 0 || rows < 0) fail(ErrorKind::kParse, path + ": bad header");
  Trajectory traj;
  traj.times.resize(rows);
  traj.snapshots.resize(2 * n, rows);
  for (std::int64_t k = 0; k < rows; ++k) {
    in.read(reinterpret_cast<char*>(&traj.times[k]), sizeof(double));
    in.read(reinterpret_cast<char*>(traj.snapshots.col(k).data()), sizeof(double) * 2 * n);
  }
  traj.origin.resize(2 * n);
  in.read(reinterpret_cast<char*>(traj.origin.data()), sizeof(double) * 2 * n);
  if (!in) fail(ErrorKind::kParse, path + ": truncated");
  traj.label = std::filesystem::path(path).stem().string();
  traj.validate();
  return traj;
}

}  // namespace ssm
