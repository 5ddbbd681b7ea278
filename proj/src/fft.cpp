#include "fiberrates/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace fiber {
namespace {

std::mutex plan_mutex;

fftw_plan get_plan(std::size_t n, int sign) {
    // Plans are created once per (size, direction) and reused via
    // fftw_execute_dft. FFTW_UNALIGNED so std::vector storage is valid.
    static std::map<std::pair<std::size_t, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto key = std::make_pair(n, sign);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    fftw_complex* tmp = fftw_alloc_complex(n);
    if (!tmp) throw std::bad_alloc();
    fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), tmp, tmp, sign,
                                   FFTW_MEASURE | FFTW_UNALIGNED);
    fftw_free(tmp);
    if (!p) throw std::runtime_error("fftw plan creation failed");
    cache.emplace(key, p);
    return p;
}

void execute(cvec& buf, int sign) {
    if (buf.empty()) return;
    fftw_plan p = get_plan(buf.size(), sign);
    auto* d = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_execute_dft(p, d, d);
}

}  // namespace

void fft_inplace(cvec& buf) { execute(buf, FFTW_FORWARD); }

void ifft_inplace(cvec& buf) {
    execute(buf, FFTW_BACKWARD);
    const double s = 1.0 / static_cast<double>(buf.size());
    for (auto& v : buf) v *= s;
}

cvec fft(cvec buf) {
    fft_inplace(buf);
    return buf;
}

cvec ifft(cvec buf) {
    ifft_inplace(buf);
    return buf;
}

}  // namespace fiber
