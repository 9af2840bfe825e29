// Copyright 2026 The PWSM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PWSM_METRICS_HPP_
#define PWSM_METRICS_HPP_

#include <span>

#include "pwsm/model.hpp"

namespace pwsm {

// Average mean relative error: the per-slot squared L2 distance between the
// released and true histograms, divided by the number of bins, averaged
// over slots. Series must be non-empty and bin-aligned slot by slot.
double amre(std::span<const Histogram> released,
            std::span<const Histogram> truth);

// Average Jensen-Shannon divergence (natural log, so at most ln 2) between
// the released and true histograms, averaged over slots. Released bins are
// clamped to zero from below and normalized (an all-zero release counts as
// the uniform distribution); true histograms must have a positive total at
// every slot.
double ajsd(std::span<const Histogram> released,
            std::span<const Histogram> truth);

}  // namespace pwsm

#endif  // PWSM_METRICS_HPP_
