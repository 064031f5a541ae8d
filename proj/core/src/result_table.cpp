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

#include "motionood/result_table.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "motionood/error.hpp"

namespace motionood {
namespace {

constexpr const char* kHeader = "model,action,horizon_ms,mean,std,n_seeds";

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <typename T>
T parse_number(const std::string& field, std::size_t line) {
  T v{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError("results CSV line " + std::to_string(line) +
                     ": bad number '" + field + "'");
  }
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace

std::string format_results_csv(const std::vector<AggregateRow>& rows) {
  std::string out = std::string(kHeader) + "\n";
  for (const auto& r : rows) {
    out += r.model + "," + r.action + "," + num(r.horizon_ms) + "," + num(r.mean) +
           "," + num(r.std) + "," + std::to_string(r.n_seeds) + "\n";
  }
  return out;
}

std::vector<AggregateRow> parse_results_csv(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line) || line != kHeader) {
    throw ParseError("results CSV: missing header '" + std::string(kHeader) + "'");
  }
  std::vector<AggregateRow> out;
  std::size_t line_no = 1;
  while (std::getline(ss, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 6) {
      throw ParseError("results CSV line " + std::to_string(line_no) +
                       ": expected 6 fields");
    }
    AggregateRow r;
    r.model = f[0];
    r.action = f[1];
    r.horizon_ms = parse_number<double>(f[2], line_no);
    r.mean = parse_number<double>(f[3], line_no);
    r.std = parse_number<double>(f[4], line_no);
    r.n_seeds = parse_number<std::size_t>(f[5], line_no);
    r.single_seed = r.n_seeds == 1;
    out.push_back(r);
  }
  return out;
}

std::string format_aligned_table(const std::vector<AggregateRow>& rows) {
  std::vector<std::string> models;
  for (const auto& r : rows) {
    if (std::find(models.begin(), models.end(), r.model) == models.end()) {
      models.push_back(r.model);
    }
  }
  std::string out;
  for (const auto& model : models) {
    std::vector<std::string> actions;
    std::vector<double> horizons;
    for (const auto& r : rows) {
      if (r.model != model) continue;
      if (std::find(actions.begin(), actions.end(), r.action) == actions.end()) {
        actions.push_back(r.action);
      }
      if (std::find(horizons.begin(), horizons.end(), r.horizon_ms) == horizons.end()) {
        horizons.push_back(r.horizon_ms);
      }
    }
    std::sort(horizons.begin(), horizons.end());
    std::vector<std::vector<std::string>> grid;
    std::vector<std::string> head = {"ms"};
    head.insert(head.end(), actions.begin(), actions.end());
    grid.push_back(head);
    for (double h : horizons) {
      std::vector<std::string> line = {num(h)};
      for (const auto& a : actions) {
        std::string cell = "-";
        for (const auto& r : rows) {
          if (r.model == model && r.action == a && r.horizon_ms == h) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.3f ± %.3f", r.mean, r.std);
            cell = buf;
            if (r.single_seed) cell += "*";
          }
        }
        line.push_back(cell);
      }
      grid.push_back(line);
    }
    // Display widths; "±" is two bytes but one column.
    auto width = [](const std::string& s) {
      std::size_t w = 0;
      for (unsigned char c : s) w += (c & 0xC0) != 0x80;
      return w;
    };
    std::vector<std::size_t> widths(head.size(), 0);
    for (const auto& line : grid) {
      for (std::size_t c = 0; c < line.size(); ++c) {
        widths[c] = std::max(widths[c], width(line[c]));
      }
    }
    out += "[" + model + "]\n";
    for (const auto& line : grid) {
      for (std::size_t c = 0; c < line.size(); ++c) {
        if (c) out += "  ";
        out += line[c] + std::string(widths[c] - width(line[c]), ' ');
      }
      while (!out.empty() && out.back() == ' ') out.pop_back();
      out += "\n";
    }
    out += "\n";
  }
  if (std::any_of(rows.begin(), rows.end(), [](const auto& r) { return r.single_seed; })) {
    out += "* single seed, std not estimated\n";
  }
  return out;
}

void emit_table(const std::vector<AggregateRow>& rows, TableFormat format,
                const std::filesystem::path& path) {
  if (rows.empty()) throw UsageError("emit_table: no rows");
  write_text(path, format == TableFormat::kCsv ? format_results_csv(rows)
                                               : format_aligned_table(rows));
}

std::vector<AggregateRow> load_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_results_csv(ss.str());
}

void write_seed_results_csv(const std::vector<BenchmarkResult>& rows,
                            const std::filesystem::path& path) {
  std::string out = "model,action,horizon_ms,seed,value\n";
  for (const auto& r : rows) {
    out += r.model + "," + r.action + "," + num(r.horizon_ms) + "," +
           std::to_string(r.seed) + "," + num(r.value) + "\n";
  }
  write_text(path, out);
}

}  // namespace motionood
