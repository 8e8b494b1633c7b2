#include "fft.hpp"

#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include <fftw3.h>

#include "fvps/errors.hpp"

namespace fvps::detail {
namespace {

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is. Plans are created once per (n, sign) and never destroyed.
std::mutex plan_mutex;
std::map<std::pair<std::size_t, int>, fftw_plan>& plan_cache() {
  static std::map<std::pair<std::size_t, int>, fftw_plan> cache;
  return cache;
}

fftw_plan plan_for(std::size_t n, int sign) {
  std::lock_guard lock(plan_mutex);
  auto& cache = plan_cache();
  const auto key = std::make_pair(n, sign);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  auto* a = fftw_alloc_complex(n);
  auto* b = fftw_alloc_complex(n);
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), a, b, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(a);
  fftw_free(b);
  cache.emplace(key, plan);
  return plan;
}

}  // namespace

void dft(std::span<const std::complex<double>> in, std::span<std::complex<double>> out, int sign) {
  if (in.size() != out.size()) throw DimensionError("dft: input and output lengths differ");
  if (in.empty()) return;
  if (in.data() == out.data()) throw DimensionError("dft: in-place call on the out-of-place path");
  fftw_plan plan = plan_for(in.size(), sign);
  // fftw_execute_dft does not modify its input for out-of-place plans.
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

void dft_inplace(std::span<std::complex<double>> data, int sign) {
  std::vector<std::complex<double>> scratch(data.begin(), data.end());
  dft(scratch, data, sign);
}

}  // namespace fvps::detail
