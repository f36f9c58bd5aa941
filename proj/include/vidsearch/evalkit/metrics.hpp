// Copyright 2026-present the vidsearch authors
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

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>

namespace vidsearch::evalkit {

/// Video id -> relevance grade (>= 0).
using GradeMap = std::map<std::string, int>;

inline constexpr std::size_t kMetricCutoff = 10;

/// Gain applied to a grade r: 2^r - 1 (exponential) or r (linear).
enum class Gain { Exponential, Linear };

std::string_view to_string(Gain gain);
/// Accepts "exp" and "linear"; InvalidArgument otherwise.
Gain parse_gain(std::string_view name);

double gain(int grade, Gain kind);

/// DCG over the first min(k, |ranking|) positions with a log2(i+1) discount
/// (a repeated id counts once), divided by the DCG of the grades sorted
/// descending. 0 when no grade is positive. InvalidArgument when k == 0.
double ndcg_at_k(std::span<const std::string> ranking, const GradeMap& rels, std::size_t k = kMetricCutoff,
                 Gain kind = Gain::Exponential);

/// Share of the positively graded ids found in the first k. Throws
/// NoRelevant when no grade is positive, InvalidArgument when k == 0.
double recall_at_k(std::span<const std::string> ranking, const GradeMap& rels, std::size_t k = kMetricCutoff);

}  // namespace vidsearch::evalkit
