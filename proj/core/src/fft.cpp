#include "qmkdv/fft.hpp"

#include <fftw3.h>

#include <array>
#include <map>
#include <mutex>
#include <tuple>

namespace qmkdv::fft {
namespace {

using Key = std::tuple<int, std::size_t, std::size_t, std::size_t>;

struct PlanCache {
  std::mutex mutex;
  std::map<Key, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }

  // Plans are made in-place on a scratch buffer with FFTW_UNALIGNED so they
  // can be executed on any caller array through the new-array interface.
  fftw_plan get(int sign, std::size_t n0, std::size_t n1, std::size_t n2) {
    const Key key{sign, n0, n1, n2};
    std::lock_guard lock(mutex);
    if (auto it = plans.find(key); it != plans.end()) return it->second;
    const std::size_t total = n0 * n1 * n2;
    auto* scratch = fftw_alloc_complex(total);
    fftw_plan plan = nullptr;
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    if (n1 == 1 && n2 == 1) {
      plan = fftw_plan_dft_1d(static_cast<int>(n0), scratch, scratch, sign, flags);
    } else {
      plan = fftw_plan_dft_3d(static_cast<int>(n0), static_cast<int>(n1), static_cast<int>(n2),
                              scratch, scratch, sign, flags);
    }
    fftw_free(scratch);
    plans.emplace(key, plan);
    return plan;
  }
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void run(std::span<cplx> data, int sign, std::size_t n0, std::size_t n1, std::size_t n2) {
  if (data.empty()) return;
  fftw_plan plan = cache().get(sign, n0, n1, n2);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, ptr, ptr);
}

}  // namespace

void forward(std::span<cplx> data) { run(data, FFTW_FORWARD, data.size(), 1, 1); }
void backward(std::span<cplx> data) { run(data, FFTW_BACKWARD, data.size(), 1, 1); }

void forward3(std::span<cplx> data, std::size_t n0, std::size_t n1, std::size_t n2) {
  run(data, FFTW_FORWARD, n0, n1, n2);
}
void backward3(std::span<cplx> data, std::size_t n0, std::size_t n1, std::size_t n2) {
  run(data, FFTW_BACKWARD, n0, n1, n2);
}

}  // namespace qmkdv::fft
