#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lrdecon {

/// N x N real samples on the periodic unit square. Row index i runs along t,
/// column index l along x; storage is row-major, values[i * N + l]. Array
/// index a corresponds to the grid point (a + 1) / N, which on the torus is
/// the same lattice as a / N shifted by one cell.
class SampledField {
public:
  SampledField() = default;
  explicit SampledField(int n);
  SampledField(int n, std::vector<double> values);

  /// f(t_i) g(x_l).
  static SampledField outer(std::span<const double> along_t, std::span<const double> along_x);

  int size() const noexcept { return n_; }
  double& operator()(int i, int l) { return values_[static_cast<std::size_t>(i) * n_ + l]; }
  double operator()(int i, int l) const { return values_[static_cast<std::size_t>(i) * n_ + l]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  /// One t-profile, i.e. the column at x index l.
  std::vector<double> column(int l) const;

  /// Discrete L2 norm on the unit square: sqrt(N^-2 sum f^2).
  double l2_norm() const;
  bool all_finite() const;

private:
  int n_ = 0;
  std::vector<double> values_;
};

/// Throws ParameterError unless both fields have the same size.
void require_same_shape(const SampledField& a, const SampledField& b, const char* what);

}  // namespace lrdecon
