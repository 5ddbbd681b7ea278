#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace fiber {

using cplx = std::complex<double>;

// Probability mass function over the constellation points.
using Pmf = std::vector<double>;

Pmf uniform_pmf(std::size_t size);

// Square QAM constellation with per-dimension binary-reflected Gray labels
// and an attached input PMF. Points are scaled so that the average symbol
// energy under the PMF is 1.
struct Constellation {
    int bits_per_symbol = 0;             // m
    std::vector<cplx> points;            // size M = 2^m
    std::vector<std::uint32_t> labels;   // Gray labels, m bits, bijective
    Pmf pmf;                             // size M, sums to 1

    std::size_t size() const { return points.size(); }

    // Average symbol energy under the attached PMF.
    double average_energy() const;

    // True when every pmf entry equals exactly 1/M.
    bool has_uniform_pmf() const;

    // Source entropy H(X) in bits.
    double entropy_bits() const;

    // Rescale points to unit average energy under the current PMF.
    void renormalize_energy();

    // Replace the PMF and re-normalize the energy.
    void set_pmf(Pmf new_pmf);

    // Label of point k as an m-character "0"/"1" string, first m/2 bits
    // label the I level, last m/2 the Q level.
    std::string label_string(std::size_t k) const;

    std::string to_json() const;
    static Constellation from_json(const std::string& text);
};

// Square 2^(m/2) x 2^(m/2) Gray-labeled QAM, unit average energy under the
// given PMF. Throws std::invalid_argument for odd or non-positive m.
Constellation build_qam(int m);
Constellation build_qam(int m, const Pmf& pmf);

// pmf[k] proportional to exp(-lambda * |points[k]|^2), normalized. Applies to
// the constellation's points as currently scaled; re-normalize the energy
// after attaching the result.
Pmf maxwell_boltzmann_pmf(const Constellation& c, double lambda);

// Maxwell-Boltzmann PMF whose lambda maximizes the exact AWGN mutual
// information of the (re-normalized) constellation at the given SNR.
// Golden-section search over lambda in [0, lambda_max], tolerance 1e-4.
// Optionally reports the optimizing lambda.
Pmf optimize_shaping(const Constellation& c, double snr_db,
                     double* lambda_out = nullptr);

// Index of the point with minimum squared Euclidean distance to y;
// ties break to the lowest index.
std::size_t hard_decision(cplx y, const Constellation& c);

// Map a bit stream onto symbol indices, m bits per symbol via the Gray label
// table (first bit of each group is the label MSB). bits.size() must be a
// multiple of m.
std::vector<std::uint32_t> symbols_from_bits(const std::vector<std::uint8_t>& bits,
                                             const Constellation& c);

// i.i.d. symbol indices drawn from the PMF (inverse-CDF sampling,
// deterministic for a given generator state).
std::vector<std::uint32_t> symbols_from_pmf(const Pmf& pmf, std::size_t n,
                                            std::mt19937_64& rng);

}  // namespace fiber
