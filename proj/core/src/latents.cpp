// Copyright 2026 The motionood Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "motionood/latents.hpp"

#include <Eigen/Dense>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "motionood/dct.hpp"
#include "motionood/error.hpp"

namespace motionood {
namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::vector<LatentRecord> extract_latents(const HybridModel& model,
                                          const WindowSet& windows) {
  if (!model.has_vae()) {
    throw UsageError("latent extraction needs a model with a generative (VAE) branch");
  }
  if (windows.size() == 0) throw UsageError("latent extraction: no windows");
  const ModelConfig& c = model.config();
  const Tensor input = encode_observed(windows.observed_part(), c.future, c.gcn.coeffs);
  const Tensor mu = model.latent_means(input);
  const std::size_t d = c.gcn.nodes * c.vae.latent;
  std::vector<LatentRecord> out;
  out.reserve(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i) {
    out.push_back({windows.ids[i], windows.labels[i],
                   std::vector<double>(mu.data() + i * d, mu.data() + (i + 1) * d)});
  }
  return out;
}

Projection project_pca_2d(const std::vector<LatentRecord>& records) {
  if (records.size() < 3) throw UsageError("PCA projection needs at least 3 records");
  const std::size_t n = records.size(), d = records.front().z.size();
  if (d < 2) throw UsageError("PCA projection needs at least 2 dimensions");
  Eigen::MatrixXd x(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    if (records[i].z.size() != d) throw ShapeError("latent records differ in length");
    for (std::size_t j = 0; j < d; ++j) x(i, j) = records[i].z[j];
  }
  x.rowwise() -= x.colwise().mean();
  const Eigen::MatrixXd cov = (x.transpose() * x) / double(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw NumericError("PCA eigendecomposition failed");

  Projection out;
  out.total_variance = cov.trace();
  Eigen::MatrixXd basis(d, 2);
  for (int c = 0; c < 2; ++c) {
    // Eigenvalues ascend.
    Eigen::VectorXd v = solver.eigenvectors().col(Eigen::Index(d) - 1 - c);
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      if (std::abs(v(j)) > 1e-12) {
        if (v(j) < 0) v = -v;
        break;
      }
    }
    basis.col(c) = v;
    out.component_variance[c] = std::max(0.0, solver.eigenvalues()(Eigen::Index(d) - 1 - c));
    out.components[c].assign(v.data(), v.data() + v.size());
  }
  const Eigen::MatrixXd proj = x * basis;
  for (std::size_t i = 0; i < n; ++i) {
    out.points.push_back({records[i].id, records[i].label, proj(i, 0), proj(i, 1)});
  }
  return out;
}

void export_latents_csv(const std::vector<LatentRecord>& records,
                        const std::filesystem::path& path) {
  if (records.empty()) throw UsageError("no latent records to export");
  const std::size_t d = records.front().z.size();
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "id,label";
  for (std::size_t j = 0; j < d; ++j) out << ",z_" << j;
  out << '\n';
  for (const auto& r : records) {
    if (r.z.size() != d) throw ShapeError("latent records differ in length");
    out << r.id << ',' << r.label;
    for (double v : r.z) out << ',' << num(v);
    out << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::vector<LatentRecord> load_latents_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty latent CSV");
  std::vector<LatentRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    LatentRecord r;
    std::getline(ss, r.id, ',');
    std::getline(ss, r.label, ',');
    std::string f;
    while (std::getline(ss, f, ',')) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) +
                         ": bad number '" + f + "'");
      }
      r.z.push_back(v);
    }
    out.push_back(std::move(r));
  }
  return out;
}

void export_projection_csv(const Projection& projection,
                           const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "id,label,x,y\n";
  for (const auto& p : projection.points) {
    out << p.id << ',' << p.label << ',' << num(p.x) << ',' << num(p.y) << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace motionood
