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

#include <vector>

namespace vidsearch::embedkit {

/// One contrastive training batch: query i is paired with positive i and one
/// hard negative i; every other positive in the batch acts as an in-batch
/// negative for query i.
struct ContrastiveBatch {
    std::vector<std::vector<double>> queries;
    std::vector<std::vector<double>> positives;
    std::vector<std::vector<double>> hard_negatives;
    double temperature = 0.05;
};

struct InfoNceResult {
    double loss = 0.0;
    std::vector<std::vector<double>> grad_queries;
    std::vector<std::vector<double>> grad_positives;
    std::vector<std::vector<double>> grad_hard_negatives;
};

/// Mean over queries of -log softmax(<h_i, c> / T)[positive i] with candidates
/// {all positives} plus the query's own hard negative. Throws
/// Error(InvalidArgument) on shape violations and Error(NonFiniteInput) on
/// NaN/Inf entries.
double infonce_loss(const ContrastiveBatch& batch);

/// Same loss plus analytic gradients with respect to every embedding entry.
InfoNceResult infonce_loss_with_gradients(const ContrastiveBatch& batch);

}  // namespace vidsearch::embedkit
