#pragma once

#include <span>
#include <string>
#include <vector>

#include "fiberrates/symbol_batch.hpp"

namespace fiber {

// Achievable-rate results for one sweep point. Fixed serialization order:
// power_dbm, spacing_ghz, n_spans, dsp_mode, lambda, r_sd, r_hd_m, r_hd_1,
// ber_avg, sigma_sq_x, sigma_sq_y, se.
struct RateReport {
    double power_dbm = 0.0;
    double spacing_ghz = 0.0;
    int n_spans = 0;
    std::string dsp_mode;
    double lambda = 0.0;
    double r_sd = 0.0;
    double r_hd_m = 0.0;
    double r_hd_1 = 0.0;
    double ber_avg = 0.0;
    double sigma_sq_x = 0.0;
    double sigma_sq_y = 0.0;
    double se = 0.0;
    // Not serialized: raw (unclamped) soft-decision rate and per-bit BERs.
    double r_sd_raw = 0.0;
    std::vector<double> per_bit_ber;
};

// Binary entropy H_b(p) in bits, with 0*log0 == 0 at the endpoints.
double binary_entropy(double p);

// Posterior q_{X|Y}(x|y): exp(-|y-x|^2/(2 sigma^2)) * P_X(x), normalized.
// Max-exponent subtraction keeps the largest weight at 1, so the result is
// well defined at any SNR. Output spans all M points and sums to 1.
void posterior(cplx y, const Constellation& c, double sigma_sq,
               std::span<double> out);

// Soft-decision achievable rate for one polarization (general-PMF path):
// H(X) + (1/N) sum_n sum_x q(x|y_n) log2 q(x|y_n).
double r_sd_general(std::span<const cplx> rx, const Constellation& c,
                    double sigma_sq);

// Uniform-input path: m + (1/N) sum_n sum_x q log2 q with the prior dropped
// from the weights. Bit-identical to r_sd_general when the PMF is uniform.
double r_sd_uniform(std::span<const cplx> rx, const Constellation& c,
                    double sigma_sq);

// Average of the per-polarization soft-decision rates, clamped below at 0.
// raw_out, when given, receives the unclamped average. Dispatches to the
// uniform path when the PMF is exactly uniform.
double estimate_r_sd(const SymbolBatch& batch, double* raw_out = nullptr);

// Hard-decision per-bit error rates p_1..p_m (label MSB first) and their
// average, pooled over both polarizations.
struct BitErrorRates {
    std::vector<double> per_bit;
    double average = 0.0;
};
BitErrorRates per_bit_ber(const SymbolBatch& batch);

// R_HD^m = sum_i (1 - H_b(p_i)); p > 0.5 is reflected to 1-p (BSC convention).
double r_hd_m(std::span<const double> per_bit);

// R_HD^1 = m * (1 - H_b(p_bar)), same reflection.
double r_hd_1(double avg_ber, int m);

// Exact mutual information of the constellation over the circularly symmetric
// AWGN channel with per-quadrature noise variance sigma_sq, via 2-D
// Gauss-Hermite quadrature with `order` nodes per dimension.
double awgn_mi_oracle(const Constellation& c, double sigma_sq, int order = 20);

// sigma^2 (per-quadrature) for a unit-energy constellation at Es/N0 = snr_db.
double snr_db_to_sigma_sq(double snr_db);

// Dual-polarization spectral efficiency 2 * r_sd * symbol_rate / spacing.
double spectral_efficiency(double r_sd, double symbol_rate, double spacing);

// Gauss-Hermite nodes/weights for weight exp(-t^2) (used by the oracle;
// exposed for tests).
void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace fiber
