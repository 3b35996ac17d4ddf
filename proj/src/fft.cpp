#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace fs2d::detail {
namespace {

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using PlanPtr = std::unique_ptr<fftw_plan_s, PlanDeleter>;

// FFTW planning is not thread-safe; executing an existing plan on new arrays
// is. Plans are created once per shape and never destroyed before exit.
class PlanCache {
 public:
  fftw_plan get(int rows, int cols, bool inverse) {
    std::lock_guard<std::mutex> lock(mutex_);
    const auto key = std::make_tuple(rows, cols, inverse);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second.get();

    const std::size_t n = static_cast<std::size_t>(rows) * cols;
    auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    const int sign = inverse ? FFTW_BACKWARD : FFTW_FORWARD;
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = rows == 1 ? fftw_plan_dft_1d(cols, buf, buf, sign, flags)
                               : fftw_plan_dft_2d(rows, cols, buf, buf, sign, flags);
    fftw_free(buf);
    if (plan == nullptr) throw std::runtime_error("fftw: plan creation failed");
    auto& slot = plans_[key];
    slot.reset(plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, bool>, PlanPtr> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void execute(std::span<std::complex<double>> data, int rows, int cols,
             bool inverse) {
  if (data.size() != static_cast<std::size_t>(rows) * cols) {
    throw std::invalid_argument("fft: buffer size does not match shape");
  }
  if (data.empty()) return;
  fftw_plan plan = cache().get(rows, cols, inverse);
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, p, p);
}

}  // namespace

void fft1d(std::span<std::complex<double>> data, bool inverse) {
  execute(data, 1, static_cast<int>(data.size()), inverse);
}

void fft2d(std::span<std::complex<double>> data, int rows, int cols, bool inverse) {
  execute(data, rows, cols, inverse);
}

}  // namespace fs2d::detail
