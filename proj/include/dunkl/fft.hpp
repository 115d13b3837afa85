#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace dunkl::detail {

/// Unnormalized backward DFT, out_j = sum_k in_k e^{+2 pi i jk/m}, computed
/// in place. Plans are created with FFTW_ESTIMATE (no timing-dependent
/// choices, so results are bit-reproducible) and cached per length.
class BackwardDft {
 public:
  static void run(std::vector<std::complex<double>>& data) {
    if (data.size() <= 1) return;
    static BackwardDft instance;
    instance.execute(data);
  }

 private:
  struct Plan {
    fftw_complex* buffer = nullptr;
    fftw_plan plan = nullptr;
    ~Plan() {
      if (plan != nullptr) fftw_destroy_plan(plan);
      if (buffer != nullptr) fftw_free(buffer);
    }
  };

  void execute(std::vector<std::complex<double>>& data) {
    std::lock_guard lock(mu_);
    const std::size_t n = data.size();
    auto& slot = plans_[n];
    if (!slot) {
      slot = std::make_unique<Plan>();
      slot->buffer = fftw_alloc_complex(n);
      slot->plan = fftw_plan_dft_1d(static_cast<int>(n), slot->buffer, slot->buffer,
                                    FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    auto* buf = reinterpret_cast<std::complex<double>*>(slot->buffer);
    std::copy(data.begin(), data.end(), buf);
    fftw_execute(slot->plan);
    std::copy(buf, buf + n, data.begin());
  }

  std::mutex mu_;
  std::map<std::size_t, std::unique_ptr<Plan>> plans_;
};

}  // namespace dunkl::detail
