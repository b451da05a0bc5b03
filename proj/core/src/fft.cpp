#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <vector>

namespace torus3::detail {
namespace {

struct PlanPair {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

// The FFTW planner is not thread safe; execution with the new-array interface is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [size, plans] : plans_) {
      fftw_destroy_plan(plans.r2c);
      fftw_destroy_plan(plans.c2r);
    }
  }

  const PlanPair& get(int m) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(m);
    if (it != plans_.end()) return it->second;
    std::vector<double> real(static_cast<std::size_t>(m));
    std::vector<fftw_complex> spec(static_cast<std::size_t>(m / 2 + 1));
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    PlanPair p;
    p.r2c = fftw_plan_dft_r2c_1d(m, real.data(), spec.data(), flags);
    p.c2r = fftw_plan_dft_c2r_1d(m, spec.data(), real.data(), flags);
    return plans_.emplace(m, p).first->second;
  }

 private:
  std::mutex mutex_;
  std::map<int, PlanPair> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void forward_real(std::span<const double> grid, std::span<std::complex<double>> coeffs) {
  const int m = static_cast<int>(grid.size());
  const PlanPair& plan = cache().get(m);
  // FFTW's r2c does not modify its input, but the signature is non-const.
  std::vector<double> in(grid.begin(), grid.end());
  fftw_execute_dft_r2c(plan.r2c, in.data(), reinterpret_cast<fftw_complex*>(coeffs.data()));
  const double scale = 1.0 / m;
  for (auto& c : coeffs) c *= scale;
}

void inverse_real(std::span<const std::complex<double>> coeffs, std::span<double> grid) {
  const int m = static_cast<int>(grid.size());
  const PlanPair& plan = cache().get(m);
  const std::size_t half = static_cast<std::size_t>(m / 2);
  std::vector<std::complex<double>> spec(half + 1, 0.0);
  const std::size_t keep = std::min(coeffs.size(), half);
  std::copy_n(coeffs.begin(), keep, spec.begin());
  spec[0].imag(0.0);
  fftw_execute_dft_c2r(plan.c2r, reinterpret_cast<fftw_complex*>(spec.data()), grid.data());
}

}  // namespace torus3::detail
