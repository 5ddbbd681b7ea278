#pragma once

#include <complex>
#include <vector>

namespace fiber {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

// In-place forward/inverse DFT (FFTW backend, cached plans, thread-safe).
// The inverse is normalized by 1/N so ifft(fft(x)) == x.
void fft_inplace(cvec& buf);
void ifft_inplace(cvec& buf);

cvec fft(cvec buf);
cvec ifft(cvec buf);

// Baseband frequency of DFT bin i at sample rate fs (negative for i >= n/2).
inline double bin_frequency(std::size_t i, std::size_t n, double fs) {
    const double k = (i < (n + 1) / 2) ? static_cast<double>(i)
                                       : static_cast<double>(i) - static_cast<double>(n);
    return k * fs / static_cast<double>(n);
}

}  // namespace fiber
