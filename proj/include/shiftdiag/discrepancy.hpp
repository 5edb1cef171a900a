#pragma once
//------------------------------------------------------------------------------
//
//   Copyright 2026 The shiftdiag Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#include <span>
#include <vector>

#include "shiftdiag/classifier.hpp"
#include "shiftdiag/dataset.hpp"

namespace shiftdiag {

/// |R_S(h) - R_T(h)|.
double error_gap(Classifier const &h, LabeledDataset const &s, LabeledDataset const &t);

/// Per row, the runner-up class under h's scores (ties to the lowest index).
/// Never equal to h's prediction.
std::vector<int> next_best_labels(Classifier const &h, Matrix const &xs);

struct DiscrepancyResult
{
  double     value;     ///< max(forward, backward)
  double     forward;   ///< adversary agrees on sx, disagrees on tx
  double     backward;  ///< roles of sx and tx swapped
  Classifier g_forward;
  Classifier g_backward;
};

/**
 * Trained approximation of the h-discrepancy
 *
 *   D = max_g |R_U(g) - R_V(g)|,  U = (sx, h(sx)),  V = (tx, h(tx)).
 *
 * A fresh adversary g of `kind` is fitted to h's predictions on sx together
 * with h's next-best labels on tx, so it learns to agree on one sample and
 * disagree on the other; the direction's value is the difference of its
 * disagreement rates with h. Both directions use cfg.seed, so swapping the
 * samples swaps `forward` and `backward` and leaves `value` unchanged.
 */
DiscrepancyResult hdiscrepancy(Classifier const &h, Matrix const &sx, Matrix const &tx,
                               ModelKind kind, TrainConfig const &cfg);

/// Exact max over an explicit hypothesis list.
double hdiscrepancy_exact(Classifier const &h, Matrix const &sx, Matrix const &tx,
                          std::span<Classifier const> hypotheses);

/// Upper estimate of lambda: R_S(h') + R_T(h') for h' trained on S and T pooled.
double adaptability(LabeledDataset const &s, LabeledDataset const &t, ModelKind kind,
                    TrainConfig const &cfg);

/// Exact min over an explicit hypothesis list of R_S(h') + R_T(h').
double adaptability_exact(LabeledDataset const &s, LabeledDataset const &t,
                          std::span<Classifier const> hypotheses);

struct BoundCertificate
{
  double error_gap;
  double adaptability;
  double discrepancy;
  double slack;  ///< adaptability + discrepancy - error_gap, evaluated exactly
};

/// Error gap, exact lambda and exact D over `hypotheses` plus h itself.
/// On any sample, error_gap <= adaptability + discrepancy.
BoundCertificate certify_bound(Classifier const &h, LabeledDataset const &s,
                               LabeledDataset const &t, std::span<Classifier const> hypotheses);

/// Binary threshold classifiers 1[x_c > tau] and 1[x_c < tau] for every
/// coordinate c, with tau at the midpoints between consecutive distinct
/// values of xs and beyond both ends. Encoded as linear classifiers.
std::vector<Classifier> threshold_hypotheses(Matrix const &xs);

}  // namespace shiftdiag
