#include "lrdecon/fft.hpp"

#include <fftw3.h>

#include <map>
#include <tuple>
#include <mutex>
#include <utility>

#include "lrdecon/errors.hpp"

namespace lrdecon::fft {
namespace {

class PlanCache {
public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n, int sign, bool inplace, bool aligned) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_tuple(n, sign, inplace, aligned);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    // Plans are executed later through the new-array interface. Aligned plans
    // are only used on arrays with the same SIMD alignment as the scratch.
    fftw_complex* a = fftw_alloc_complex(static_cast<std::size_t>(n));
    fftw_complex* b = inplace ? a : fftw_alloc_complex(static_cast<std::size_t>(n));
    const unsigned flags = FFTW_ESTIMATE | (aligned ? 0U : FFTW_UNALIGNED);
    fftw_plan plan = fftw_plan_dft_1d(n, a, b, sign, flags);
    if (!inplace) fftw_free(b);
    fftw_free(a);
    if (plan == nullptr) throw NumericalError("fftw: failed to create plan");
    plans_.emplace(key, plan);
    return plan;
  }

private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, bool, bool>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

fftw_complex* as_fftw(const cplx* p) {
  // std::complex<double> is layout-compatible with fftw_complex.
  return reinterpret_cast<fftw_complex*>(const_cast<cplx*>(p));
}

void run(std::span<const cplx> in, std::span<cplx> out, int sign) {
  if (in.size() != out.size()) throw ParameterError("fft: size mismatch");
  if (in.empty()) return;
  const bool inplace = in.data() == out.data();
  fftw_complex* src = as_fftw(in.data());
  fftw_complex* dst = as_fftw(out.data());
  const bool aligned = fftw_alignment_of(reinterpret_cast<double*>(src)) == 0 &&
                       fftw_alignment_of(reinterpret_cast<double*>(dst)) == 0;
  fftw_plan plan = cache().get(static_cast<int>(in.size()), sign, inplace, aligned);
  fftw_execute_dft(plan, src, dst);
}

}  // namespace

void forward(std::span<const cplx> in, std::span<cplx> out) { run(in, out, FFTW_FORWARD); }
void backward(std::span<const cplx> in, std::span<cplx> out) { run(in, out, FFTW_BACKWARD); }
void forward_inplace(std::span<cplx> data) { run(data, data, FFTW_FORWARD); }
void backward_inplace(std::span<cplx> data) { run(data, data, FFTW_BACKWARD); }

bool is_power_of_two(long n) { return n > 0 && (n & (n - 1)) == 0; }

int log2_exact(long n) {
  if (!is_power_of_two(n)) throw ParameterError("size " + std::to_string(n) + " is not a power of two");
  int k = 0;
  while ((1L << k) < n) ++k;
  return k;
}

}  // namespace lrdecon::fft
