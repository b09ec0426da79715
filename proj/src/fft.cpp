#include "helab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

namespace helab::fft {
namespace {

struct Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

// FFTW planning is not thread-safe; execution with the new-array interface is.
std::mutex planner_mutex;

const Plans& plans_for(int n) {
  static std::map<int, Plans> cache;
  std::lock_guard lock(planner_mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  double* real = fftw_alloc_real(real_size(n));
  fftw_complex* cplx = fftw_alloc_complex(half_size(n));
  Plans plans;
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans.r2c = fftw_plan_dft_r2c_3d(n, n, n, real, cplx, flags);
  plans.c2r = fftw_plan_dft_c2r_3d(n, n, n, cplx, real, flags);
  fftw_free(real);
  fftw_free(cplx);
  return cache.emplace(n, plans).first->second;
}

}  // namespace

void forward(int n, const double* samples, std::complex<double>* coefficients) {
  const Plans& plans = plans_for(n);
  // r2c out-of-place leaves the input intact.
  fftw_execute_dft_r2c(plans.r2c, const_cast<double*>(samples), reinterpret_cast<fftw_complex*>(coefficients));
  const double scale = 1.0 / static_cast<double>(real_size(n));
  const std::size_t m = half_size(n);
  for (std::size_t i = 0; i < m; ++i) coefficients[i] *= scale;
}

void inverse(int n, const std::complex<double>* coefficients, double* samples) {
  const Plans& plans = plans_for(n);
  std::vector<std::complex<double>> scratch(coefficients, coefficients + half_size(n));
  fftw_execute_dft_c2r(plans.c2r, reinterpret_cast<fftw_complex*>(scratch.data()), samples);
}

}  // namespace helab::fft
