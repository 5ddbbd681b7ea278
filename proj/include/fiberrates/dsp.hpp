#pragma once

#include <span>

#include <array>
#include <string>
#include <vector>

#include "fiberrates/linksim.hpp"
#include "fiberrates/symbol_batch.hpp"

namespace fiber {

enum class DspMode { Edc, ScDbp, McDbp };

std::string to_string(DspMode mode);
DspMode dsp_mode_from_string(const std::string& s);

// Ideal brick-wall band-pass filter in the discrete Fourier domain.
// Throws when the band extends beyond the simulation Nyquist range.
void optical_bpf(FieldFrame& field, double center_offset, double bandwidth);

// Exact inverse of the accumulated dispersion over total_length (all-pass).
void edc(FieldFrame& field, double total_length, const LinkConfig& cfg);

// Digital back-propagation: mirrors the forward link span by span with
// negated attenuation, dispersion and nonlinearity, undoing each amplifier
// gain first. SC mode expects the BPF-selected center channel as input,
// MC mode the full comb; the integration itself is identical.
void dbp(FieldFrame& field, const LinkConfig& cfg, DspMode mode);

// RRC matched filter plus symbol-rate downsampling. Zero-delay circular
// filtering, so output n corresponds to transmitted symbol n; output length
// is exactly n_symbols per polarization.
std::array<std::vector<cplx>, 2> matched_filter_downsample(const FieldFrame& field,
                                                           const LinkConfig& cfg);

// Complex least-squares gain a = sum(x conj(y)) / sum(|y|^2) mapping rx onto
// the tx constellation scale. Throws on zero-energy input.
cplx align_gain(std::span<const cplx> tx, std::span<const cplx> rx);

// sigma^2 = (1/(2N)) sum |y_n - x_n|^2: per-quadrature noise variance of the
// circularly symmetric Gaussian auxiliary channel. Values below 1e-12 are
// floored (and flagged) so the rate estimator stays defined.
double estimate_noise_variance(std::span<const cplx> tx, std::span<const cplx> rx,
                               bool* floored = nullptr);

// Trim + align + variance estimation: build the SymbolBatch for the center
// channel from downsampled rx symbols. Discards rrc_span_symbols symbols per
// edge (filter transient convention).
SymbolBatch normalize_and_align(const TxRecord& tx,
                                const std::array<std::vector<cplx>, 2>& rx,
                                int trim_symbols);

// Full receiver chain for the center channel: channel/comb BPF, EDC or DBP,
// matched filter, alignment and noise estimation.
SymbolBatch rx_pipeline(FieldFrame field, const LinkConfig& cfg,
                        const TxRecord& tx, DspMode mode);

}  // namespace fiber
