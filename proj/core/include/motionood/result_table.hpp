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

#ifndef MOTIONOOD_RESULT_TABLE_HPP_
#define MOTIONOOD_RESULT_TABLE_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "motionood/ood_benchmark.hpp"

namespace motionood {

enum class TableFormat { kCsv, kAlignedText };

// CSV header: model,action,horizon_ms,mean,std,n_seeds (17 significant
// digits, so a reload is exact).
std::string format_results_csv(const std::vector<AggregateRow>& rows);
std::vector<AggregateRow> parse_results_csv(const std::string& text);

// One block per model: a row per horizon, a column per action, cells
// "mean ± std".
std::string format_aligned_table(const std::vector<AggregateRow>& rows);

void emit_table(const std::vector<AggregateRow>& rows, TableFormat format,
                const std::filesystem::path& path);
std::vector<AggregateRow> load_results_csv(const std::filesystem::path& path);

// Per-seed rows before aggregation: model,action,horizon_ms,seed,value.
void write_seed_results_csv(const std::vector<BenchmarkResult>& rows,
                            const std::filesystem::path& path);

}  // namespace motionood

#endif  // MOTIONOOD_RESULT_TABLE_HPP_
