#include "fiberrates/dsp.hpp"

#include <cmath>
#include <stdexcept>

namespace fiber {

std::string to_string(DspMode mode) {
    switch (mode) {
        case DspMode::Edc: return "edc";
        case DspMode::ScDbp: return "sc-dbp";
        case DspMode::McDbp: return "mc-dbp";
    }
    return "edc";
}

DspMode dsp_mode_from_string(const std::string& s) {
    if (s == "edc") return DspMode::Edc;
    if (s == "sc-dbp") return DspMode::ScDbp;
    if (s == "mc-dbp") return DspMode::McDbp;
    throw std::invalid_argument("unknown dsp mode: " + s);
}

void optical_bpf(FieldFrame& field, double center_offset, double bandwidth) {
    const double nyq = 0.5 * field.sample_rate;
    if (bandwidth <= 0.0) throw std::invalid_argument("bandwidth must be positive");
    if (std::abs(center_offset) + 0.5 * bandwidth > nyq)
        throw std::invalid_argument("band-pass filter exceeds the simulation bandwidth");
    const std::size_t n = field.size();
    for (auto* pol : {&field.x, &field.y}) {
        fft_inplace(*pol);
        for (std::size_t i = 0; i < n; ++i) {
            const double f = bin_frequency(i, n, field.sample_rate);
            if (std::abs(f - center_offset) > 0.5 * bandwidth) (*pol)[i] = cplx{0.0, 0.0};
        }
        ifft_inplace(*pol);
    }
}

void edc(FieldFrame& field, double total_length, const LinkConfig& cfg) {
    if (total_length == 0.0) return;
    const std::size_t n = field.size();
    const double b2 = cfg.beta2();
    for (auto* pol : {&field.x, &field.y}) {
        fft_inplace(*pol);
        for (std::size_t i = 0; i < n; ++i) {
            const double w = 2.0 * M_PI * bin_frequency(i, n, field.sample_rate);
            (*pol)[i] *= std::polar(1.0, -0.5 * b2 * w * w * total_length);
        }
        ifft_inplace(*pol);
    }
}

void dbp(FieldFrame& field, const LinkConfig& cfg, DspMode /*mode*/) {
    const double inv_gain = std::pow(10.0, -cfg.span_gain_db() / 20.0);
    for (int s = cfg.n_spans - 1; s >= 0; --s) {
        for (auto* pol : {&field.x, &field.y})
            for (auto& v : *pol) v *= inv_gain;
        ssfm_integrate_raw(field, cfg.span_length, cfg.step_size_m(),
                           -cfg.alpha_per_m(), -cfg.beta2(),
                           -(8.0 / 9.0) * cfg.gamma, s);
    }
}

std::array<std::vector<cplx>, 2> matched_filter_downsample(const FieldFrame& field,
                                                           const LinkConfig& cfg) {
    const std::size_t n = cfg.samples_per_frame();
    if (field.size() != n) throw std::invalid_argument("field length does not match config");
    const cvec shape = rrc_frame_spectrum(cfg);
    const std::size_t sps = static_cast<std::size_t>(cfg.sps_sim);
    std::array<std::vector<cplx>, 2> out;
    for (int pol = 0; pol < 2; ++pol) {
        cvec buf = (pol == 0) ? field.x : field.y;
        fft_inplace(buf);
        for (std::size_t i = 0; i < n; ++i) buf[i] *= shape[i];
        ifft_inplace(buf);
        auto& sym = out[static_cast<std::size_t>(pol)];
        sym.resize(cfg.n_symbols);
        for (std::size_t i = 0; i < cfg.n_symbols; ++i) sym[i] = buf[i * sps];
    }
    return out;
}

cplx align_gain(std::span<const cplx> tx, std::span<const cplx> rx) {
    if (tx.size() != rx.size() || tx.empty())
        throw std::invalid_argument("alignment input mismatch");
    cplx num{0.0, 0.0};
    double den = 0.0;
    for (std::size_t i = 0; i < tx.size(); ++i) {
        num += tx[i] * std::conj(rx[i]);
        den += std::norm(rx[i]);
    }
    if (den <= 0.0) throw std::invalid_argument("degenerate input: zero-energy rx");
    return num / den;
}

double estimate_noise_variance(std::span<const cplx> tx, std::span<const cplx> rx,
                               bool* floored) {
    if (tx.size() != rx.size() || tx.empty())
        throw std::invalid_argument("empty batch in noise estimation");
    double sum = 0.0;
    for (std::size_t i = 0; i < tx.size(); ++i) sum += std::norm(rx[i] - tx[i]);
    double s2 = sum / (2.0 * static_cast<double>(tx.size()));
    bool fl = false;
    if (s2 < 1e-12) {
        s2 = 1e-12;
        fl = true;
    }
    if (floored) *floored = fl;
    return s2;
}

SymbolBatch normalize_and_align(const TxRecord& tx,
                                const std::array<std::vector<cplx>, 2>& rx,
                                int trim_symbols) {
    const std::size_t trim = static_cast<std::size_t>(std::max(0, trim_symbols));
    SymbolBatch batch;
    batch.constellation = tx.constellation;
    for (int pol = 0; pol < 2; ++pol) {
        const auto& idx = tx.indices[tx.center_channel][static_cast<std::size_t>(pol)];
        const auto& r = rx[static_cast<std::size_t>(pol)];
        if (idx.size() != r.size()) throw std::invalid_argument("tx/rx length mismatch");
        if (idx.size() <= 2 * trim) throw std::invalid_argument("batch too short for edge trim");
        const std::size_t n = idx.size() - 2 * trim;
        auto& ti = batch.tx_indices[static_cast<std::size_t>(pol)];
        auto& ry = batch.rx_symbols[static_cast<std::size_t>(pol)];
        ti.assign(idx.begin() + static_cast<std::ptrdiff_t>(trim),
                  idx.end() - static_cast<std::ptrdiff_t>(trim));
        ry.assign(r.begin() + static_cast<std::ptrdiff_t>(trim),
                  r.end() - static_cast<std::ptrdiff_t>(trim));
        std::vector<cplx> txs(n);
        for (std::size_t i = 0; i < n; ++i) txs[i] = tx.constellation.points[ti[i]];
        const cplx a = align_gain(txs, ry);
        for (auto& v : ry) v *= a;
        batch.align_gain[static_cast<std::size_t>(pol)] = a;
        bool fl = false;
        batch.sigma_sq[static_cast<std::size_t>(pol)] = estimate_noise_variance(txs, ry, &fl);
        batch.sigma_floored[static_cast<std::size_t>(pol)] = fl;
    }
    return batch;
}

SymbolBatch rx_pipeline(FieldFrame field, const LinkConfig& cfg,
                        const TxRecord& tx, DspMode mode) {
    const double total_length = cfg.n_spans * cfg.span_length;
    switch (mode) {
        case DspMode::Edc:
            optical_bpf(field, 0.0, cfg.channel_spacing);
            edc(field, total_length, cfg);
            break;
        case DspMode::ScDbp:
            optical_bpf(field, 0.0, cfg.channel_spacing);
            dbp(field, cfg, mode);
            break;
        case DspMode::McDbp:
            optical_bpf(field, 0.0, std::min(cfg.occupied_bandwidth(), field.sample_rate));
            dbp(field, cfg, mode);
            break;
    }
    const auto rx = matched_filter_downsample(field, cfg);
    return normalize_and_align(tx, rx, cfg.rrc_span_symbols);
}

}  // namespace fiber
