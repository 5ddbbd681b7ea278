#include "fiberrates/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fiber {

namespace {

constexpr double kLn2 = 0.6931471805599453;

// Kahan-compensated accumulator; gives run-to-run identical sums for a fixed
// iteration order.
struct Kahan {
    double sum = 0.0;
    double c = 0.0;
    void add(double v) {
        const double y = v - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

// Shared posterior kernel. When prior == nullptr the prior factor is dropped
// (uniform-input path); with a uniform prior both variants are bit-identical
// because scaling by the power-of-two 1/M is exact.
void posterior_kernel(cplx y, const Constellation& c, double sigma_sq,
                      const double* prior, std::span<double> out) {
    const std::size_t M = c.size();
    const double inv = 1.0 / (2.0 * sigma_sq);
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < M; ++k) {
        out[k] = std::norm(y - c.points[k]);
        dmin = std::min(dmin, out[k]);
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < M; ++k) {
        double w = std::exp(-(out[k] - dmin) * inv);
        if (prior) w *= prior[k];
        out[k] = w;
        sum += w;
    }
    const double s = 1.0 / sum;
    for (std::size_t k = 0; k < M; ++k) out[k] *= s;
}

double r_sd_impl(std::span<const cplx> rx, const Constellation& c,
                 double sigma_sq, bool uniform_path) {
    if (rx.empty()) throw std::invalid_argument("empty symbol batch");
    if (!(sigma_sq > 0.0)) throw std::invalid_argument("sigma_sq must be positive");
    const std::size_t M = c.size();
    const double* prior = uniform_path ? nullptr : c.pmf.data();
    std::vector<double> q(M);
    Kahan acc;
    for (const cplx y : rx) {
        posterior_kernel(y, c, sigma_sq, prior, q);
        double s = 0.0;
        for (std::size_t k = 0; k < M; ++k)
            if (q[k] > 0.0) s += q[k] * std::log2(q[k]);
        acc.add(s);
    }
    const double hx = uniform_path ? static_cast<double>(c.bits_per_symbol)
                                   : c.entropy_bits();
    return hx + acc.sum / static_cast<double>(rx.size());
}

}  // namespace

double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

void posterior(cplx y, const Constellation& c, double sigma_sq,
               std::span<double> out) {
    if (!(sigma_sq > 0.0)) throw std::invalid_argument("sigma_sq must be positive");
    if (out.size() != c.size()) throw std::invalid_argument("posterior output size mismatch");
    posterior_kernel(y, c, sigma_sq, c.pmf.data(), out);
}

double r_sd_general(std::span<const cplx> rx, const Constellation& c,
                    double sigma_sq) {
    return r_sd_impl(rx, c, sigma_sq, false);
}

double r_sd_uniform(std::span<const cplx> rx, const Constellation& c,
                    double sigma_sq) {
    return r_sd_impl(rx, c, sigma_sq, true);
}

double estimate_r_sd(const SymbolBatch& batch, double* raw_out) {
    const bool uniform = batch.constellation.has_uniform_pmf();
    double sum = 0.0;
    int pols = 0;
    for (int p = 0; p < 2; ++p) {
        if (batch.rx_symbols[p].empty()) continue;
        const double s2 = batch.sigma_sq[p];
        sum += uniform ? r_sd_uniform(batch.rx_symbols[p], batch.constellation, s2)
                       : r_sd_general(batch.rx_symbols[p], batch.constellation, s2);
        ++pols;
    }
    if (pols == 0) throw std::invalid_argument("empty symbol batch");
    const double raw = sum / pols;
    if (raw_out) *raw_out = raw;
    return std::max(0.0, raw);
}

BitErrorRates per_bit_ber(const SymbolBatch& batch) {
    const Constellation& c = batch.constellation;
    const int m = c.bits_per_symbol;
    std::vector<std::size_t> errors(static_cast<std::size_t>(m), 0);
    std::size_t n = 0;
    for (int p = 0; p < 2; ++p) {
        const auto& tx = batch.tx_indices[p];
        const auto& rx = batch.rx_symbols[p];
        if (tx.size() != rx.size()) throw std::invalid_argument("tx/rx length mismatch");
        for (std::size_t i = 0; i < rx.size(); ++i) {
            const std::size_t hd = hard_decision(rx[i], c);
            const std::uint32_t diff = c.labels[tx[i]] ^ c.labels[hd];
            for (int b = 0; b < m; ++b)
                if (diff >> (m - 1 - b) & 1u) ++errors[static_cast<std::size_t>(b)];
        }
        n += rx.size();
    }
    if (n == 0) throw std::invalid_argument("empty symbol batch");
    BitErrorRates out;
    out.per_bit.resize(static_cast<std::size_t>(m));
    double sum = 0.0;
    for (int b = 0; b < m; ++b) {
        out.per_bit[static_cast<std::size_t>(b)] =
            static_cast<double>(errors[static_cast<std::size_t>(b)]) / static_cast<double>(n);
        sum += out.per_bit[static_cast<std::size_t>(b)];
    }
    out.average = sum / m;
    return out;
}

double r_hd_m(std::span<const double> per_bit) {
    double r = 0.0;
    for (double p : per_bit) {
        if (p < 0.0 || p > 1.0) throw std::invalid_argument("BER outside [0,1]");
        if (p > 0.5) p = 1.0 - p;
        r += 1.0 - binary_entropy(p);
    }
    return r;
}

double r_hd_1(double avg_ber, int m) {
    if (avg_ber < 0.0 || avg_ber > 1.0) throw std::invalid_argument("BER outside [0,1]");
    if (avg_ber > 0.5) avg_ber = 1.0 - avg_ber;
    return m * (1.0 - binary_entropy(avg_ber));
}

void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    // Newton iteration on the Hermite recurrence (weight exp(-t^2)).
    nodes.assign(static_cast<std::size_t>(n), 0.0);
    weights.assign(static_cast<std::size_t>(n), 0.0);
    const double pim4 = 0.7511255444649425;  // pi^{-1/4}
    const int mhalf = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < mhalf; ++i) {
        if (i == 0)
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        else if (i == 1)
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * nodes[0];
        else if (i == 3)
            z = 1.91 * z - 0.91 * nodes[1];
        else
            z = 2.0 * z - nodes[static_cast<std::size_t>(i) - 2];
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 -
                     std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        nodes[static_cast<std::size_t>(i)] = z;
        nodes[static_cast<std::size_t>(n - 1 - i)] = -z;
        weights[static_cast<std::size_t>(i)] = 2.0 / (pp * pp);
        weights[static_cast<std::size_t>(n - 1 - i)] = weights[static_cast<std::size_t>(i)];
    }
}

double awgn_mi_oracle(const Constellation& c, double sigma_sq, int order) {
    if (!(sigma_sq > 0.0)) throw std::invalid_argument("sigma_sq must be positive");
    std::vector<double> t, w;
    gauss_hermite(order, t, w);
    const std::size_t M = c.size();
    const double inv = 1.0 / (2.0 * sigma_sq);
    const double noise_scale = std::sqrt(2.0 * sigma_sq);
    std::vector<double> a(M);
    double mi = 0.0;
    for (std::size_t x = 0; x < M; ++x) {
        if (c.pmf[x] <= 0.0) continue;
        Kahan inner;
        for (int j = 0; j < order; ++j) {
            for (int k = 0; k < order; ++k) {
                const cplx y = c.points[x] +
                               cplx(noise_scale * t[static_cast<std::size_t>(j)],
                                    noise_scale * t[static_cast<std::size_t>(k)]);
                double amax = -std::numeric_limits<double>::infinity();
                for (std::size_t xp = 0; xp < M; ++xp) {
                    a[xp] = c.pmf[xp] > 0.0
                                ? -std::norm(y - c.points[xp]) * inv + std::log(c.pmf[xp])
                                : -std::numeric_limits<double>::infinity();
                    amax = std::max(amax, a[xp]);
                }
                double lse = 0.0;
                for (std::size_t xp = 0; xp < M; ++xp)
                    if (a[xp] > -std::numeric_limits<double>::infinity())
                        lse += std::exp(a[xp] - amax);
                lse = std::log(lse) + amax;
                const double log2_post = (a[x] - lse) / kLn2;
                inner.add(w[static_cast<std::size_t>(j)] * w[static_cast<std::size_t>(k)] *
                          (log2_post - std::log2(c.pmf[x])));
            }
        }
        mi += c.pmf[x] * inner.sum / M_PI;
    }
    return mi;
}

double snr_db_to_sigma_sq(double snr_db) {
    // Unit-energy input; Es/N0 = snr, N0 = 2 sigma^2 per complex symbol.
    return 0.5 * std::pow(10.0, -snr_db / 10.0);
}

double spectral_efficiency(double r_sd, double symbol_rate, double spacing) {
    if (!(spacing > 0.0)) throw std::invalid_argument("spacing must be positive");
    return 2.0 * r_sd * symbol_rate / spacing;
}

}  // namespace fiber
