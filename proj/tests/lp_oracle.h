// Copyright 2026 DeepMind Technologies Limited
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

#ifndef CSRO_TESTS_LP_ORACLE_H_
#define CSRO_TESTS_LP_ORACLE_H_

#include <cmath>
#include <stdexcept>
#include <vector>

// Value of a two-player zero-sum matrix game (row player maximizes) by a
// dense tableau simplex with Bland's rule. Independent of the library's
// solver; used only to check it.
//
// The matrix is shifted to be positive, A = U + c. Then the column player's
// problem is max sum(w) s.t. A w <= 1, w >= 0, whose optimum is 1 / (v + c).
namespace csro::testing {

struct LpGameSolution {
  double value = 0;
  std::vector<double> column_strategy;
};

inline LpGameSolution SolveMatrixGameLp(
    const std::vector<std::vector<double>>& u) {
  const int m = static_cast<int>(u.size());
  const int n = static_cast<int>(u[0].size());
  double lo = u[0][0];
  for (const auto& row : u) {
    for (double x : row) lo = std::min(lo, x);
  }
  const double shift = 1.0 - lo;
  // Tableau rows: m constraints then the objective; columns: n structural,
  // m slack, then the right-hand side.
  const int cols = n + m + 1;
  std::vector<std::vector<long double>> t(m + 1,
                                          std::vector<long double>(cols, 0));
  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) t[i][j] = u[i][j] + shift;
    t[i][n + i] = 1;
    t[i][cols - 1] = 1;
    basis[i] = n + i;
  }
  for (int j = 0; j < n; ++j) t[m][j] = -1;
  const long double eps = 1e-15L;
  for (int iter = 0; iter < 100000; ++iter) {
    int enter = -1;
    for (int j = 0; j < cols - 1; ++j) {
      if (t[m][j] < -eps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;
    int leave = -1;
    long double best = 0;
    for (int i = 0; i < m; ++i) {
      if (t[i][enter] > eps) {
        const long double ratio = t[i][cols - 1] / t[i][enter];
        if (leave < 0 || ratio < best - eps ||
            (std::fabs(static_cast<double>(ratio - best)) <= 1e-15 &&
             basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
    }
    if (leave < 0) throw std::runtime_error("unbounded LP");
    const long double pivot = t[leave][enter];
    for (auto& x : t[leave]) x /= pivot;
    for (int i = 0; i <= m; ++i) {
      if (i == leave || t[i][enter] == 0) continue;
      const long double f = t[i][enter];
      for (int j = 0; j < cols; ++j) t[i][j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }
  const long double total = t[m][cols - 1];
  LpGameSolution sol;
  sol.value = static_cast<double>(1.0L / total - shift);
  sol.column_strategy.assign(n, 0);
  for (int i = 0; i < m; ++i) {
    if (basis[i] < n) {
      sol.column_strategy[basis[i]] =
          static_cast<double>(t[i][cols - 1] / total);
    }
  }
  return sol;
}

}  // namespace csro::testing

#endif  // CSRO_TESTS_LP_ORACLE_H_
