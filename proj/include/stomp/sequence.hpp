#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "stomp/matrix.hpp"

namespace stomp {

/// Finite-horizon sequence A(0), A(1), ... of row-stochastic matrices.
///
/// Backed either by a stored list or by a deterministic by-index
/// generator, so accumulations over arbitrary windows are well defined
/// and replayable. Access is read-only; at(t) returns by value.
class MatrixSequence {
 public:
  explicit MatrixSequence(std::vector<StochasticMatrix> mats,
                          bool positive_diagonal = false)
      : n_(mats.empty() ? 0 : mats.front().size()),
        horizon_(mats.size()),
        posdiag_(positive_diagonal) {
    if (mats.empty()) {
      throw std::invalid_argument("matrix sequence must not be empty");
    }
    for (const auto& m : mats) {
      if (m.size() != n_) {
        throw std::invalid_argument("matrix sequence has mixed dimensions");
      }
      if (posdiag_ && !m.has_positive_diagonal()) {
        throw std::invalid_argument(
            "matrix sequence flagged positive-diagonal contains a violation");
      }
    }
    auto stored = std::make_shared<std::vector<StochasticMatrix>>(std::move(mats));
    gen_ = [stored](std::size_t t) { return (*stored)[t]; };
  }

  MatrixSequence(std::function<StochasticMatrix(std::size_t)> gen,
                 std::size_t n, std::size_t horizon,
                 bool positive_diagonal = false)
      : gen_(std::move(gen)), n_(n), horizon_(horizon),
        posdiag_(positive_diagonal) {
    if (n_ == 0 || horizon_ == 0) {
      throw std::invalid_argument("sequence dimension and horizon must be positive");
    }
  }

  StochasticMatrix at(std::size_t t) const {
    if (t >= horizon_) {
      throw std::out_of_range("matrix sequence index beyond horizon");
    }
    StochasticMatrix m = gen_(t);
    if (m.size() != n_) {
      throw std::logic_error("sequence generator changed dimension");
    }
    if (posdiag_ && !m.has_positive_diagonal()) {
      throw std::invalid_argument(
          "matrix sequence flagged positive-diagonal emitted a violation");
    }
    return m;
  }

  std::size_t dimension() const noexcept { return n_; }
  std::size_t horizon() const noexcept { return horizon_; }
  bool positive_diagonal_flagged() const noexcept { return posdiag_; }

 private:
  std::function<StochasticMatrix(std::size_t)> gen_;
  std::size_t n_;
  std::size_t horizon_;
  bool posdiag_;
};

}  // namespace stomp
