#include "lora/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace lora {

namespace {

std::mutex plan_mutex;
std::map<std::size_t, fftw_plan> plans;

fftw_plan plan_for(std::size_t n) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto it = plans.find(n);
    if (it != plans.end()) return it->second;
    // Planning needs a scratch buffer; FFTW_ESTIMATE leaves it untouched.
    auto* buf = fftw_alloc_complex(n);
    fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    plans.emplace(n, p);
    return p;
}

}  // namespace

void fft_inplace(std::span<cplx> data) {
    if (data.empty()) return;
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan_for(data.size()), p, p);
}

}  // namespace lora
