#include <cmath>

#include "fiberrates/constellation.hpp"
#include "fiberrates/rates.hpp"

namespace fiber {

namespace {

// AWGN MI of the MB-shaped, energy-re-normalized constellation at fixed SNR.
double shaped_mi(const Constellation& base, double lambda, double snr_db) {
    Constellation c = base;
    c.set_pmf(maxwell_boltzmann_pmf(base, lambda));
    return awgn_mi_oracle(c, snr_db_to_sigma_sq(snr_db));
}

}  // namespace

Pmf optimize_shaping(const Constellation& c, double snr_db, double* lambda_out) {
    // Points are unit-energy scaled, so |x|^2 is O(1); lambda beyond ~50
    // already collapses the PMF onto the innermost shell.
    const double lambda_max = 50.0;
    const double tol = 1e-4;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;

    double a = 0.0, b = lambda_max;
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = shaped_mi(c, x1, snr_db);
    double f2 = shaped_mi(c, x2, snr_db);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = shaped_mi(c, x2, snr_db);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = shaped_mi(c, x1, snr_db);
        }
    }
    double lambda = 0.5 * (a + b);
    // Uniform input is always feasible; never return a PMF that loses to it.
    if (shaped_mi(c, lambda, snr_db) < shaped_mi(c, 0.0, snr_db)) lambda = 0.0;
    if (lambda_out) *lambda_out = lambda;
    return maxwell_boltzmann_pmf(c, lambda);
}

}  // namespace fiber
