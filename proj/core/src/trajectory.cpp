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

#include "ompath/trajectory.hpp"

#include "ompath/error.hpp"

#include <sstream>

namespace ompath {

std::vector<double> uniform_grid(double t0, double tf, int n) {
  if (n < 2) throw Error(ErrorCode::kDegenerateGrid, "a time grid needs at least 2 nodes");
  std::vector<double> t(static_cast<std::size_t>(n));
  const double h = (tf - t0) / (n - 1);
  for (int i = 0; i < n; ++i) t[i] = t0 + h * i;
  t.back() = tf;
  return t;
}

void Trajectory::validate() const {
  const int n = nodes();
  if (n < 2) {
    throw Error(ErrorCode::kDegenerateGrid, "trajectory has fewer than 2 nodes");
  }
  const double h = spacing();
  const double scale = std::max({std::abs(times.front()), std::abs(times.back()), 1.0});
  for (int i = 1; i < n; ++i) {
    const double step = times[i] - times[i - 1];
    if (std::abs(step - h) > 1e-12 * scale + 1e-12 * std::abs(h) * n) {
      std::ostringstream os;
      os << "nonuniform spacing at node " << i << ": " << step << " vs " << h;
      throw Error(ErrorCode::kDegenerateGrid, os.str());
    }
  }
  auto rows_ok = [n](const Matrix& m) { return m.size() == 0 || m.rows() == n; };
  if (states.rows() != n || !rows_ok(costates) || !rows_ok(controls)) {
    throw Error(ErrorCode::kDegenerateGrid, "trajectory arrays do not share the node count");
  }
}

}  // namespace ompath
