#include "lrdecon/field.hpp"

#include <cmath>
#include <string>

#include "lrdecon/errors.hpp"
#include "lrdecon/fft.hpp"

namespace lrdecon {

SampledField::SampledField(int n) : n_(n), values_(static_cast<std::size_t>(n) * n, 0.0) {
  if (!fft::is_power_of_two(n)) throw ParameterError("field size must be a power of two, got " + std::to_string(n));
}

SampledField::SampledField(int n, std::vector<double> values) : n_(n), values_(std::move(values)) {
  if (!fft::is_power_of_two(n)) throw ParameterError("field size must be a power of two, got " + std::to_string(n));
  if (values_.size() != static_cast<std::size_t>(n) * n) throw ParameterError("field values do not match N x N");
}

SampledField SampledField::outer(std::span<const double> along_t, std::span<const double> along_x) {
  if (along_t.size() != along_x.size()) throw ParameterError("outer: profile lengths differ");
  const int n = static_cast<int>(along_t.size());
  SampledField f(n);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l) f(i, l) = along_t[i] * along_x[l];
  return f;
}

std::vector<double> SampledField::column(int l) const {
  std::vector<double> c(n_);
  for (int i = 0; i < n_; ++i) c[i] = (*this)(i, l);
  return c;
}

double SampledField::l2_norm() const {
  if (n_ == 0) return 0.0;
  double s = 0.0;
  for (double v : values_) s += v * v;
  return std::sqrt(s / (static_cast<double>(n_) * n_));
}

bool SampledField::all_finite() const {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

void require_same_shape(const SampledField& a, const SampledField& b, const char* what) {
  if (a.size() != b.size())
    throw ParameterError(std::string(what) + ": shape mismatch (" + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
}

}  // namespace lrdecon
