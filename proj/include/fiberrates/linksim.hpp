#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "fiberrates/constellation.hpp"
#include "fiberrates/fft.hpp"

namespace fiber {

// Physical-layer parameter set for the WDM link. Defaults are the standard
// long-haul SMF configuration at 28 GBaud.
struct LinkConfig {
    double symbol_rate = 28e9;         // Hz
    double rrc_rolloff = 0.05;
    int rrc_span_symbols = 32;         // filter span, symbols
    int sps_sim = 32;                  // samples per symbol during propagation
    int n_channels = 15;               // odd
    double channel_spacing = 30e9;     // Hz
    double span_length = 100e3;        // m
    int n_spans = 60;
    double alpha_db_per_km = 0.2;
    double gamma = 1.3e-3;             // 1/(W m)
    double dispersion_D = 17e-6;       // s/m^2  (17 ps/nm/km)
    double edfa_noise_figure_db = 4.0;
    double center_wavelength = 1550e-9;  // m
    double step_linear_m = 100.0;
    double step_nonlinear_m = 10.0;
    // Launch power at or above this switches to the fine step size.
    double nonlinear_power_threshold_dbm = 0.0;
    double launch_power_dbm_per_channel = 0.0;
    std::size_t n_symbols = 1u << 16;
    std::uint64_t seed = 1;

    double sample_rate() const { return sps_sim * symbol_rate; }
    std::size_t samples_per_frame() const { return n_symbols * static_cast<std::size_t>(sps_sim); }
    double alpha_per_m() const;   // field-power attenuation, 1/m
    double beta2() const;         // s^2/m, negative for anomalous dispersion
    double span_gain_db() const { return alpha_db_per_km * span_length / 1e3; }
    double step_size_m() const;   // per the launch-power threshold
    double occupied_bandwidth() const;  // WDM comb incl. RRC excess, Hz

    // Throws std::invalid_argument when the comb does not fit the simulation
    // bandwidth or a physical parameter is out of range.
    void validate() const;
};

// Sampled dual-polarization complex baseband field, amplitudes in sqrt(W).
struct FieldFrame {
    cvec x;  // x polarization
    cvec y;  // y polarization
    double sample_rate = 0.0;
    double center_frequency_offset = 0.0;

    std::size_t size() const { return x.size(); }
    double mean_power() const;  // W, both polarizations
    double energy() const;
};

// Transmitted symbols per channel and polarization, plus the constellation
// they were drawn from.
struct TxRecord {
    Constellation constellation;
    // indices[channel][pol][n]; channel 0 is the center channel.
    std::vector<std::array<std::vector<std::uint32_t>, 2>> indices;
    std::size_t center_channel = 0;

    std::vector<cplx> symbols(std::size_t channel, int pol) const;
};

// Unit-energy root-raised-cosine taps, length span_symbols*sps + 1.
std::vector<double> rrc_taps(double rolloff, int span_symbols, int sps);

// DFT of the RRC taps circularly centered at index 0 (zero-delay filtering
// on whole frames). Shared by the TX shaper and the RX matched filter.
cvec rrc_frame_spectrum(const LinkConfig& cfg);

// Symmetric split-step pass with explicit coefficients; back-propagation
// reuses this with negated alpha, beta2 and gamma.
void ssfm_integrate_raw(FieldFrame& f, double length, double step_m,
                        double alpha_per_m, double beta2, double gamma_eff,
                        int span_index);

// Build the multiplexed dual-polarization WDM frame: per channel and
// polarization, i.i.d. symbols from the constellation PMF are upsampled,
// RRC-shaped, scaled so the channel's dual-pol average power equals the
// launch power, and frequency-shifted onto the grid k*channel_spacing.
// All filtering is circular, so the frame has no edge transients.
std::pair<FieldFrame, TxRecord> build_wdm_frame(const LinkConfig& cfg,
                                                const Constellation& c,
                                                std::mt19937_64& rng);

// One fiber span: symmetric split-step integration of the dual-polarization
// Manakov equation (effective nonlinearity (8/9) gamma). span_index is only
// used in the divergence diagnostic.
void ssfm_span(FieldFrame& field, const LinkConfig& cfg, int span_index = 0);

// Amplifier: field scaled by sqrt(gain); circularly symmetric ASE with
// per-polarization variance (G-1) h nu n_sp B_sim, n_sp = 10^(NF/10)/2.
void edfa(FieldFrame& field, double gain_db, double noise_figure_db,
          double center_frequency, std::mt19937_64& rng);

// n_spans x (ssfm_span + edfa with gain equal to the span loss).
void propagate_link(FieldFrame& field, const LinkConfig& cfg, std::mt19937_64& rng);

}  // namespace fiber
