/*
 Copyright 2026 The ompath Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include "ompath/types.hpp"

#include <vector>

namespace ompath {

/// Samples of state, costate and control on a uniform time grid.
///
/// Each populated matrix is n x d (one row per node). Costates and controls
/// may be left empty (0 x 0) when not known.
struct Trajectory {
  std::vector<double> times;
  Matrix states;
  Matrix costates;
  Matrix controls;

  int nodes() const noexcept { return static_cast<int>(times.size()); }
  int dim() const noexcept { return static_cast<int>(states.cols()); }
  /// Grid spacing; zero for the degenerate t0 == tf grid.
  double spacing() const { return nodes() > 1 ? (times.back() - times.front()) / (nodes() - 1) : 0.0; }

  bool has_costates() const noexcept { return costates.size() > 0; }
  bool has_controls() const noexcept { return controls.size() > 0; }

  /// Throws DegenerateGrid unless n >= 2, spacing is uniform to 1e-12
  /// relative and all populated arrays have n rows.
  void validate() const;
};

/// n uniformly spaced times on [t0, tf]; endpoints are exact.
std::vector<double> uniform_grid(double t0, double tf, int n);

}  // namespace ompath
