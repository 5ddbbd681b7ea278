#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fiberrates/dsp.hpp"
#include "fiberrates/rates.hpp"

namespace fiber {

enum class ShapingMode { Off, Fixed, Auto };

enum class SweepAxis { LaunchPower, Spacing, Spans };

// One experiment grid: a base link configuration plus the swept axis,
// DSP modes, modulation orders and shaping policy.
struct SweepSpec {
    LinkConfig base;
    SweepAxis axis = SweepAxis::LaunchPower;
    std::vector<double> axis_values;     // dBm, Hz or span counts
    std::vector<DspMode> dsp_modes{DspMode::Edc};
    std::vector<int> modulations{4};     // m values
    ShapingMode shaping = ShapingMode::Off;
    double shaping_lambda = 0.0;         // used when shaping == Fixed
    // Spacing axis only: recompute n_channels as the largest odd count whose
    // comb stays within total_comb_bandwidth.
    bool auto_channels = false;
    double total_comb_bandwidth = 450e9;
    std::vector<std::uint64_t> seeds;    // empty -> {base.seed}
    int workers = 1;

    std::size_t point_count() const;
    void validate() const;
};

// Center-channel evaluation of a single configured link: TX build, forward
// propagation, one RX chain per DSP mode, rate estimation.
std::vector<RateReport> evaluate_link(const LinkConfig& cfg, const Constellation& c,
                                      double shaping_lambda,
                                      const std::vector<DspMode>& modes,
                                      std::uint64_t seed);

// Run every sweep point. Points are ordered (seed, modulation, axis value,
// dsp mode), innermost last; forward propagation is shared across the DSP
// modes of a point group. on_row, when set, is called once per finished point
// in point order (used for incremental flushing). start_index skips the first
// points (resume support); the returned vector holds only the computed tail.
std::vector<RateReport> run_sweep(const SweepSpec& spec,
                                  std::size_t start_index = 0,
                                  const std::function<void(std::size_t, const RateReport&)>& on_row = {});

std::string report_csv_header();
std::string report_csv_row(const RateReport& r);

// Write reports as CSV or a JSON array. Byte-identical for identical inputs.
void emit_results(const std::vector<RateReport>& reports, const std::string& format,
                  const std::string& path);

std::vector<RateReport> parse_results_csv(const std::string& path);

// Run a sweep and stream CSV rows to path. If the file already exists its
// data rows are kept and the sweep resumes at the first missing point index.
void run_sweep_to_csv(const SweepSpec& spec, const std::string& path);

// Named parameter presets: "paper" (the full-scale configuration) and "desk"
// (3 channels, 10 spans, 2^14 symbols, 16 samples/symbol, quadrupled steps).
void apply_profile(SweepSpec& spec, const std::string& profile);

// Flat dotted key=value configuration text applied on top of `spec`;
// unknown keys are rejected.
SweepSpec parse_sweep_config(const std::string& text, SweepSpec spec = {});
SweepSpec load_sweep_config_file(const std::string& path, SweepSpec spec = {});

// Largest odd channel count with n * spacing <= total bandwidth (>= 1).
int channels_for_spacing(double spacing, double total_bandwidth);

}  // namespace fiber
