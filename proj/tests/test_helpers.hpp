#pragma once

#include <cstddef>
#include <vector>

#include "stomp/matrix.hpp"
#include "stomp/pattern.hpp"
#include "stomp/rng.hpp"

namespace test_helpers {

using stomp::Rng;
using stomp::StochasticMatrix;
using stomp::ZeroPattern;

/// Random row-stochastic matrix with dense positive rows.
inline StochasticMatrix random_stochastic(std::size_t n, Rng& rng) {
  std::vector<double> e(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      e[i * n + j] = rng.uniform(0.01, 1.0);
      s += e[i * n + j];
    }
    for (std::size_t j = 0; j < n; ++j) e[i * n + j] /= s;
  }
  return StochasticMatrix(n, std::move(e));
}

/// Random row-stochastic matrix whose entries are either 0 or >= floor;
/// the diagonal is always in the support. Keeps pattern thresholding
/// away from real values.
inline StochasticMatrix random_sparse_stochastic(std::size_t n, Rng& rng,
                                                 double density = 0.5,
                                                 double floor = 1e-3) {
  std::vector<double> e(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> support{i};
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && rng.chance(density)) support.push_back(j);
    }
    std::vector<double> u(support.size());
    double usum = 0.0;
    for (double& v : u) {
      v = rng.uniform();
      usum += v;
    }
    const double rest = 1.0 - floor * static_cast<double>(support.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < support.size(); ++k) {
      const double v = floor + rest * u[k] / usum;
      e[i * n + support[k]] = v;
      acc += v;
    }
    e[i * n + i] += 1.0 - acc;
  }
  return StochasticMatrix(n, std::move(e));
}

/// Random positivity pattern with a guaranteed full diagonal.
inline ZeroPattern random_posdiag_pattern(std::size_t n, Rng& rng,
                                          double density = 0.3) {
  ZeroPattern p(n);
  for (std::size_t i = 0; i < n; ++i) {
    p.set(i, i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && rng.chance(density)) p.set(i, j);
    }
  }
  return p;
}

/// Equal-row (consensus) matrix from one random row.
inline StochasticMatrix random_consensus_matrix(std::size_t n, Rng& rng) {
  std::vector<double> row(n);
  double s = 0.0;
  for (double& v : row) {
    v = rng.uniform(0.01, 1.0);
    s += v;
  }
  for (double& v : row) v /= s;
  std::vector<double> e;
  e.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) e.insert(e.end(), row.begin(), row.end());
  return StochasticMatrix(n, std::move(e));
}

/// O(n^3) boolean transitive closure (Floyd-Warshall style) with
/// reflexive closure; the independent reachability oracle.
inline std::vector<std::vector<bool>> transitive_closure(const ZeroPattern& p) {
  const std::size_t n = p.size();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    reach[i][i] = true;
    for (std::size_t j = 0; j < n; ++j) {
      if (p.test(i, j)) reach[i][j] = true;
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!reach[i][k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (reach[k][j]) reach[i][j] = true;
      }
    }
  }
  return reach;
}

}  // namespace test_helpers
