#include "fiberrates/linksim.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fiberrates/rng.hpp"

namespace fiber {

namespace {

constexpr double kSpeedOfLight = 299792458.0;   // m/s
constexpr double kPlanck = 6.62607015e-34;      // J s

void fft_both(FieldFrame& f) {
    fft_inplace(f.x);
    fft_inplace(f.y);
}

void ifft_both(FieldFrame& f) {
    ifft_inplace(f.x);
    ifft_inplace(f.y);
}

// Frequency-domain linear operator for length l: attenuation and dispersion.
cvec linear_operator(std::size_t n, double fs, double alpha_per_m, double beta2,
                     double l) {
    cvec op(n);
    const double amp = std::exp(-0.5 * alpha_per_m * l);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = 2.0 * M_PI * bin_frequency(i, n, fs);
        const double phase = 0.5 * beta2 * w * w * l;
        op[i] = std::polar(amp, phase);
    }
    return op;
}

void apply_operator(cvec& buf, const cvec& op) {
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= op[i];
}

void nonlinear_step(FieldFrame& f, double gamma_eff, double dz) {
    for (std::size_t i = 0; i < f.x.size(); ++i) {
        const double p = std::norm(f.x[i]) + std::norm(f.y[i]);
        const cplx rot = std::polar(1.0, gamma_eff * p * dz);
        f.x[i] *= rot;
        f.y[i] *= rot;
    }
}

bool frame_finite(const FieldFrame& f) {
    for (const auto& v : f.x)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    for (const auto& v : f.y)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

// Symmetric split-step integration over one span-like section.
void ssfm_integrate(FieldFrame& f, double length, double step_m, double alpha_per_m,
                    double beta2, double gamma_eff, int span_index) {
    if (length <= 0.0) return;
    const int n_steps = std::max(1, static_cast<int>(std::ceil(length / step_m)));
    const double dz = length / n_steps;
    const cvec half = linear_operator(f.size(), f.sample_rate, alpha_per_m, beta2, 0.5 * dz);
    const cvec full = linear_operator(f.size(), f.sample_rate, alpha_per_m, beta2, dz);

    fft_both(f);
    apply_operator(f.x, half);
    apply_operator(f.y, half);
    ifft_both(f);
    for (int s = 0; s < n_steps; ++s) {
        nonlinear_step(f, gamma_eff, dz);
        const bool last = (s == n_steps - 1);
        fft_both(f);
        apply_operator(f.x, last ? half : full);
        apply_operator(f.y, last ? half : full);
        ifft_both(f);
    }
    if (!frame_finite(f))
        throw std::runtime_error("numerical divergence in span " + std::to_string(span_index));
}

}  // namespace

double LinkConfig::alpha_per_m() const {
    return alpha_db_per_km / 1e3 * std::log(10.0) / 10.0;
}

double LinkConfig::beta2() const {
    return -dispersion_D * center_wavelength * center_wavelength /
           (2.0 * M_PI * kSpeedOfLight);
}

double LinkConfig::step_size_m() const {
    return launch_power_dbm_per_channel >= nonlinear_power_threshold_dbm
               ? step_nonlinear_m
               : step_linear_m;
}

double LinkConfig::occupied_bandwidth() const {
    return (n_channels - 1) * channel_spacing + (1.0 + rrc_rolloff) * symbol_rate;
}

void LinkConfig::validate() const {
    if (symbol_rate <= 0 || channel_spacing <= 0 || span_length <= 0 ||
        step_linear_m <= 0 || step_nonlinear_m <= 0 || center_wavelength <= 0)
        throw std::invalid_argument("physical parameters must be positive");
    if (rrc_rolloff < 0.0 || rrc_rolloff > 1.0)
        throw std::invalid_argument("rolloff must be in [0,1]");
    if (n_channels < 1 || n_channels % 2 == 0)
        throw std::invalid_argument("n_channels must be odd and positive");
    if (n_spans < 0) throw std::invalid_argument("n_spans must be nonnegative");
    if (sps_sim < 2) throw std::invalid_argument("sps_sim must be at least 2");
    if (occupied_bandwidth() > sample_rate())
        throw std::invalid_argument("WDM comb exceeds the simulation bandwidth");
}

double FieldFrame::mean_power() const {
    double p = 0.0;
    for (const auto& v : x) p += std::norm(v);
    for (const auto& v : y) p += std::norm(v);
    return p / static_cast<double>(x.size());
}

double FieldFrame::energy() const {
    double e = 0.0;
    for (const auto& v : x) e += std::norm(v);
    for (const auto& v : y) e += std::norm(v);
    return e;
}

std::vector<cplx> TxRecord::symbols(std::size_t channel, int pol) const {
    const auto& idx = indices[channel][static_cast<std::size_t>(pol)];
    std::vector<cplx> out(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) out[i] = constellation.points[idx[i]];
    return out;
}

std::vector<double> rrc_taps(double rolloff, int span_symbols, int sps) {
    if (rolloff <= 0.0 || rolloff > 1.0)
        throw std::invalid_argument("rolloff must be in (0,1]");
    if (span_symbols % 2 != 0) throw std::invalid_argument("span_symbols must be even");
    const int n = span_symbols * sps + 1;
    const int center = span_symbols * sps / 2;
    const double b = rolloff;
    std::vector<double> h(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i - center) / sps;  // in symbols
        double v;
        if (std::abs(t) < 1e-12) {
            v = 1.0 - b + 4.0 * b / M_PI;
        } else if (std::abs(std::abs(t) - 1.0 / (4.0 * b)) < 1e-9) {
            v = b / std::sqrt(2.0) *
                ((1.0 + 2.0 / M_PI) * std::sin(M_PI / (4.0 * b)) +
                 (1.0 - 2.0 / M_PI) * std::cos(M_PI / (4.0 * b)));
        } else {
            v = (std::sin(M_PI * t * (1.0 - b)) +
                 4.0 * b * t * std::cos(M_PI * t * (1.0 + b))) /
                (M_PI * t * (1.0 - 16.0 * b * b * t * t));
        }
        h[static_cast<std::size_t>(i)] = v;
    }
    double e = 0.0;
    for (double v : h) e += v * v;
    const double s = 1.0 / std::sqrt(e);
    for (double& v : h) v *= s;
    return h;
}

cvec rrc_frame_spectrum(const LinkConfig& cfg) {
    const std::size_t n = cfg.samples_per_frame();
    const auto taps = rrc_taps(cfg.rrc_rolloff, cfg.rrc_span_symbols, cfg.sps_sim);
    if (taps.size() > n) throw std::invalid_argument("frame shorter than the RRC filter");
    const std::size_t center = taps.size() / 2;
    cvec buf(n, cplx{0.0, 0.0});
    // center tap at index 0 so the filter is zero-delay on the circular frame
    for (std::size_t j = 0; j < taps.size(); ++j) {
        const std::size_t pos = (n + j - center) % n;
        buf[pos] = cplx{taps[j], 0.0};
    }
    fft_inplace(buf);
    return buf;
}

std::pair<FieldFrame, TxRecord> build_wdm_frame(const LinkConfig& cfg,
                                                const Constellation& c,
                                                std::mt19937_64& rng) {
    cfg.validate();
    const std::size_t n = cfg.samples_per_frame();
    const double fs = cfg.sample_rate();
    const double df = fs / static_cast<double>(n);
    const double p_channel =
        std::pow(10.0, cfg.launch_power_dbm_per_channel / 10.0) * 1e-3;  // W
    const cvec shape = rrc_frame_spectrum(cfg);

    TxRecord record;
    record.constellation = c;
    record.indices.resize(static_cast<std::size_t>(cfg.n_channels));
    record.center_channel = static_cast<std::size_t>(cfg.n_channels - 1) / 2;

    cvec agg_x(n, cplx{0.0, 0.0});
    cvec agg_y(n, cplx{0.0, 0.0});
    cvec chan(n);

    for (int ch = 0; ch < cfg.n_channels; ++ch) {
        const int k = ch - (cfg.n_channels - 1) / 2;
        const long shift = std::lround(k * cfg.channel_spacing / df);
        for (int pol = 0; pol < 2; ++pol) {
            auto idx = symbols_from_pmf(c.pmf, cfg.n_symbols, rng);
            std::fill(chan.begin(), chan.end(), cplx{0.0, 0.0});
            for (std::size_t i = 0; i < idx.size(); ++i)
                chan[i * static_cast<std::size_t>(cfg.sps_sim)] = c.points[idx[i]];
            fft_inplace(chan);
            double power = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                chan[i] *= shape[i];
                power += std::norm(chan[i]);
            }
            power /= static_cast<double>(n) * static_cast<double>(n);  // Parseval
            // each polarization carries half of the channel launch power
            const double g = std::sqrt(0.5 * p_channel / power);
            cvec& agg = (pol == 0) ? agg_x : agg_y;
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t dst =
                    static_cast<std::size_t>((static_cast<long>(i) + shift % static_cast<long>(n) +
                                              static_cast<long>(n)) %
                                             static_cast<long>(n));
                agg[dst] += g * chan[i];
            }
            record.indices[static_cast<std::size_t>(ch)][static_cast<std::size_t>(pol)] =
                std::move(idx);
        }
    }

    FieldFrame field;
    field.sample_rate = fs;
    field.x = ifft(std::move(agg_x));
    field.y = ifft(std::move(agg_y));
    return {std::move(field), std::move(record)};
}

void ssfm_span(FieldFrame& field, const LinkConfig& cfg, int span_index) {
    ssfm_integrate(field, cfg.span_length, cfg.step_size_m(), cfg.alpha_per_m(),
                   cfg.beta2(), (8.0 / 9.0) * cfg.gamma, span_index);
}

void edfa(FieldFrame& field, double gain_db, double noise_figure_db,
          double center_frequency, std::mt19937_64& rng) {
    const double gain = std::pow(10.0, gain_db / 10.0);
    if (gain < 1.0) throw std::invalid_argument("EDFA gain must be at least 1");
    const double n_sp = 0.5 * std::pow(10.0, noise_figure_db / 10.0);
    const double sigma_sq =
        (gain - 1.0) * kPlanck * center_frequency * n_sp * field.sample_rate;
    const double amp = std::sqrt(gain);
    const double s = std::sqrt(0.5 * sigma_sq);
    for (auto* pol : {&field.x, &field.y}) {
        for (auto& v : *pol) {
            double a, b;
            standard_normal_pair(rng, a, b);
            v = amp * v + cplx{s * a, s * b};
        }
    }
}

void propagate_link(FieldFrame& field, const LinkConfig& cfg, std::mt19937_64& rng) {
    const double nu = kSpeedOfLight / cfg.center_wavelength;
    for (int s = 0; s < cfg.n_spans; ++s) {
        ssfm_span(field, cfg, s);
        edfa(field, cfg.span_gain_db(), cfg.edfa_noise_figure_db, nu, rng);
    }
}

// Shared with digital back-propagation (declared in dsp.cpp).
void ssfm_integrate_raw(FieldFrame& f, double length, double step_m,
                        double alpha_per_m, double beta2, double gamma_eff,
                        int span_index) {
    ssfm_integrate(f, length, step_m, alpha_per_m, beta2, gamma_eff, span_index);
}

}  // namespace fiber
