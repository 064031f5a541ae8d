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

#include "motionood/motion_data.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "motionood/error.hpp"

namespace motionood {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_field(std::string_view field, const std::string& where) {
  field = trim(field);
  double v = 0.0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(where + ": non-numeric field '" + std::string(field) + "'");
  }
  return v;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

template <typename Pred>
std::vector<MotionSequence> select(const MotionDataset& d, Pred pred) {
  std::vector<MotionSequence> out;
  for (const auto& s : d.sequences) {
    if (pred(s)) out.push_back(s);
  }
  return out;
}

}  // namespace

MotionSequence load_motion_text(const std::filesystem::path& path,
                                Representation representation) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open motion file '" + path.string() + "'");
  std::vector<double> values;
  std::size_t width = 0, rows = 0, line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    std::size_t fields = 0;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      values.push_back(parse_field(rest.substr(0, comma), where));
      ++fields;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (rows == 0) {
      width = fields;
    } else if (fields != width) {
      throw ParseError(where + ": ragged row with " + std::to_string(fields) +
                       " fields, expected " + std::to_string(width));
    }
    ++rows;
  }
  if (rows == 0) throw ParseError(path.string() + ": empty motion file");
  MotionSequence seq;
  seq.frames = Tensor({rows, width}, std::move(values));
  seq.representation = representation;
  return seq;
}

void save_motion_text(const MotionSequence& seq, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  char buf[32];
  for (std::size_t r = 0; r < seq.frame_count(); ++r) {
    for (std::size_t c = 0; c < seq.joints(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", seq.frames.at(r, c));
      if (c) out << ',';
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::size_t window_count(std::size_t length, std::size_t observed,
                         std::size_t future, std::size_t stride) {
  if (stride == 0) throw ConfigError("window stride must be >= 1");
  if (length < observed + future) return 0;
  return (length - observed - future) / stride + 1;
}

std::vector<TrajectoryWindow> window_samples(const MotionSequence& seq,
                                             std::size_t observed,
                                             std::size_t future,
                                             std::size_t stride) {
  const std::size_t len = observed + future;
  if (seq.frame_count() < len) {
    throw UsageError("sequence of " + std::to_string(seq.frame_count()) +
                     " frames is shorter than N+T = " + std::to_string(len));
  }
  const std::size_t count = window_count(seq.frame_count(), observed, future, stride);
  const std::size_t k = seq.joints();
  std::vector<TrajectoryWindow> out;
  out.reserve(count);
  for (std::size_t w = 0; w < count; ++w) {
    const std::size_t start = w * stride;
    Tensor data({k, len});
    for (std::size_t n = 0; n < len; ++n) {
      for (std::size_t j = 0; j < k; ++j) data.at(j, n) = seq.frames.at(start + n, j);
    }
    out.emplace_back(std::move(data), observed);
  }
  return out;
}

std::size_t MotionDataset::joints() const {
  if (sequences.empty()) throw UsageError("dataset is empty");
  const std::size_t k = sequences.front().joints();
  for (const auto& s : sequences) {
    if (s.joints() != k) {
      throw ShapeError("dataset mixes K=" + std::to_string(k) + " and K=" +
                       std::to_string(s.joints()));
    }
    if (s.representation != representation) {
      throw UsageError("dataset mixes representations");
    }
  }
  return k;
}

std::vector<std::string> MotionDataset::actions() const {
  std::vector<std::string> out;
  for (const auto& s : sequences) {
    if (!contains(out, s.action)) out.push_back(s.action);
  }
  return out;
}

std::vector<std::string> MotionDataset::subjects() const {
  std::vector<std::string> out;
  for (const auto& s : sequences) {
    if (!contains(out, s.subject)) out.push_back(s.subject);
  }
  return out;
}

MotionDataset load_dataset_dir(const std::filesystem::path& root,
                               const LoadOptions& options) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) {
    throw IoError("dataset root '" + root.string() + "' is not a directory");
  }
  if (options.subsample == 0) throw ConfigError("subsample must be >= 1");
  std::vector<fs::path> subject_dirs;
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_directory()) subject_dirs.push_back(e.path());
  }
  std::sort(subject_dirs.begin(), subject_dirs.end());

  MotionDataset ds;
  ds.representation = options.representation;
  for (const auto& dir : subject_dirs) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_regular_file() && e.path().extension() == options.extension) {
        files.push_back(e.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      MotionSequence raw = load_motion_text(f, options.representation);
      const std::string stem = f.stem().string();
      const auto us = stem.rfind('_');
      raw.action = us == std::string::npos ? stem : stem.substr(0, us);
      raw.subject = dir.filename().string();

      std::vector<std::size_t> cols;
      const std::size_t skip = options.drop_global ? options.global_columns : 0;
      if (skip >= raw.joints()) {
        throw ConfigError(f.string() + ": dropping " + std::to_string(skip) +
                          " global columns leaves nothing");
      }
      if (options.columns.empty()) {
        for (std::size_t c = skip; c < raw.joints(); ++c) cols.push_back(c);
      } else {
        for (std::size_t c : options.columns) {
          if (c + skip >= raw.joints()) {
            throw ConfigError(f.string() + ": column " + std::to_string(c) +
                              " out of range");
          }
          cols.push_back(c + skip);
        }
      }
      const std::size_t frames = (raw.frame_count() + options.subsample - 1) /
                                 options.subsample;
      MotionSequence seq;
      seq.action = raw.action;
      seq.subject = raw.subject;
      seq.representation = raw.representation;
      seq.frames = Tensor({frames, cols.size()});
      for (std::size_t r = 0; r < frames; ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
          seq.frames.at(r, c) = raw.frames.at(r * options.subsample, cols[c]);
        }
      }
      ds.sequences.push_back(std::move(seq));
    }
  }
  if (ds.sequences.empty()) {
    throw IoError("no '*" + options.extension + "' files under '" + root.string() + "'");
  }
  ds.joints();
  return ds;
}

void SplitSpec::validate() const {
  if (id_action.empty()) throw ConfigError("split: ID action is empty");
  if (contains(ood_actions, id_action)) {
    throw ConfigError("split: ID action '" + id_action + "' is also listed as OoD");
  }
  if (train_subjects.empty()) throw ConfigError("split: no training subjects");
  if (test_subject.empty()) throw ConfigError("split: no test subject");
  std::set<std::string> seen(train_subjects.begin(), train_subjects.end());
  if (seen.size() != train_subjects.size()) {
    throw ConfigError("split: duplicate training subject");
  }
  for (const std::string* s : {&validation_subject, &test_subject}) {
    if (s->empty()) continue;
    if (!seen.insert(*s).second) {
      throw ConfigError("split: subject '" + *s + "' is assigned twice");
    }
  }
  std::set<std::string> acts(ood_actions.begin(), ood_actions.end());
  if (acts.size() != ood_actions.size()) throw ConfigError("split: duplicate OoD action");
}

OodSplit make_ood_split(const MotionDataset& dataset, const SplitSpec& spec) {
  spec.validate();
  const auto actions = dataset.actions();
  const auto subjects = dataset.subjects();
  auto need_action = [&](const std::string& a) {
    if (!contains(actions, a)) throw UsageError("split: action '" + a + "' not in dataset");
  };
  auto need_subject = [&](const std::string& s) {
    if (!contains(subjects, s)) throw UsageError("split: subject '" + s + "' not in dataset");
  };
  need_action(spec.id_action);
  for (const auto& a : spec.ood_actions) need_action(a);
  for (const auto& s : spec.train_subjects) need_subject(s);
  if (!spec.validation_subject.empty()) need_subject(spec.validation_subject);
  need_subject(spec.test_subject);

  OodSplit out;
  out.train = select(dataset, [&](const MotionSequence& s) {
    return s.action == spec.id_action && contains(spec.train_subjects, s.subject);
  });
  if (!spec.validation_subject.empty()) {
    out.validation = select(dataset, [&](const MotionSequence& s) {
      return s.action == spec.id_action && s.subject == spec.validation_subject;
    });
  }
  out.test_id = select(dataset, [&](const MotionSequence& s) {
    return s.action == spec.id_action && s.subject == spec.test_subject;
  });
  for (const auto& a : spec.ood_actions) {
    out.test_ood.emplace_back(a, select(dataset, [&](const MotionSequence& s) {
                                return s.action == a && s.subject == spec.test_subject;
                              }));
  }
  if (out.train.empty()) throw UsageError("split: no training sequences");
  return out;
}

Tensor WindowSet::observed_part() const {
  const std::size_t w = size(), k = joints(), len = length();
  Tensor out({w, k, observed});
  for (std::size_t i = 0; i < w * k; ++i) {
    std::copy_n(data.data() + i * len, observed, out.data() + i * observed);
  }
  return out;
}

Tensor WindowSet::future_part() const {
  const std::size_t w = size(), k = joints(), len = length(), t = future();
  Tensor out({w, k, t});
  for (std::size_t i = 0; i < w * k; ++i) {
    std::copy_n(data.data() + i * len + observed, t, out.data() + i * t);
  }
  return out;
}

WindowSet WindowSet::subset(const std::vector<std::size_t>& indices) const {
  const std::size_t per = joints() * length();
  WindowSet out;
  out.observed = observed;
  out.data = Tensor({indices.size(), joints(), length()});
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const std::size_t src = indices[i];
    if (src >= size()) throw UsageError("window index out of range");
    std::copy_n(data.data() + src * per, per, out.data.data() + i * per);
    out.labels.push_back(labels[src]);
    out.ids.push_back(ids[src]);
  }
  return out;
}

WindowSet make_windows(const std::vector<MotionSequence>& sequences,
                       std::size_t observed, std::size_t future,
                       std::size_t stride) {
  if (sequences.empty()) throw UsageError("make_windows: no sequences");
  const std::size_t k = sequences.front().joints();
  const std::size_t len = observed + future;
  std::vector<double> values;
  WindowSet out;
  out.observed = observed;
  for (std::size_t s = 0; s < sequences.size(); ++s) {
    const auto& seq = sequences[s];
    if (seq.joints() != k) throw ShapeError("make_windows: sequences disagree on K");
    if (seq.frame_count() < len) continue;
    const auto windows = window_samples(seq, observed, future, stride);
    for (std::size_t w = 0; w < windows.size(); ++w) {
      const auto& v = windows[w].data().values();
      values.insert(values.end(), v.begin(), v.end());
      out.labels.push_back(seq.action);
      out.ids.push_back(seq.subject + "/" + seq.action + "/" + std::to_string(s) +
                        "/" + std::to_string(w * stride));
    }
  }
  out.data = Tensor({out.labels.size(), k, len}, std::move(values));
  return out;
}

SplitSpec h36m_walking_split() {
  SplitSpec s;
  s.id_action = "walking";
  s.train_subjects = {"S1", "S6", "S7", "S8", "S9"};
  s.validation_subject = "S11";
  s.test_subject = "S5";
  s.ood_actions = {"eating",  "smoking",      "discussion", "directions",
                   "greeting", "phoning",     "posing",     "purchases",
                   "sitting",  "sittingdown", "takingphoto", "waiting",
                   "walkingdog", "walkingtogether"};
  return s;
}

SplitSpec cmu_basketball_split() {
  SplitSpec s;
  s.id_action = "basketball";
  s.train_subjects = {"train"};
  s.test_subject = "test";
  s.ood_actions = {"basketball_signal", "directing_traffic", "jumping",
                   "running", "soccer", "walking", "washwindow"};
  return s;
}

}  // namespace motionood
