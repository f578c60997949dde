#pragma once

#include <cstddef>
#include <vector>

namespace hricausal {

/// Dense lag x source x target tensor.
template <typename T>
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(std::size_t n_lags, std::size_t n_vars, T fill = T{})
      : n_lags_(n_lags), n_vars_(n_vars), data_(n_lags * n_vars * n_vars, fill) {}

  std::size_t n_lags() const { return n_lags_; }
  std::size_t n_vars() const { return n_vars_; }
  std::size_t size() const { return data_.size(); }

  T& operator()(std::size_t lag, std::size_t source, std::size_t target) {
    return data_[(lag * n_vars_ + source) * n_vars_ + target];
  }
  const T& operator()(std::size_t lag, std::size_t source, std::size_t target) const {
    return data_[(lag * n_vars_ + source) * n_vars_ + target];
  }

  const std::vector<T>& data() const { return data_; }

  friend bool operator==(const Tensor3&, const Tensor3&) = default;

 private:
  std::size_t n_lags_ = 0;
  std::size_t n_vars_ = 0;
  std::vector<T> data_;
};

}  // namespace hricausal
