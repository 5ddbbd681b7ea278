#include "fiberrates/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "fiberrates/rng.hpp"
#include "json.hpp"

namespace fiber {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

LinkConfig config_for_axis(const SweepSpec& spec, double value) {
    LinkConfig cfg = spec.base;
    switch (spec.axis) {
        case SweepAxis::LaunchPower:
            cfg.launch_power_dbm_per_channel = value;
            break;
        case SweepAxis::Spacing:
            cfg.channel_spacing = value;
            if (spec.auto_channels)
                cfg.n_channels = channels_for_spacing(value, spec.total_comb_bandwidth);
            break;
        case SweepAxis::Spans:
            cfg.n_spans = static_cast<int>(std::lround(value));
            break;
    }
    return cfg;
}

Constellation shaped_constellation(int m, double lambda) {
    Constellation c = build_qam(m);
    if (lambda > 0.0) c.set_pmf(maxwell_boltzmann_pmf(c, lambda));
    return c;
}

RateReport nan_report(const LinkConfig& cfg, DspMode mode, double lambda) {
    RateReport r;
    r.power_dbm = cfg.launch_power_dbm_per_channel;
    r.spacing_ghz = cfg.channel_spacing / 1e9;
    r.n_spans = cfg.n_spans;
    r.dsp_mode = to_string(mode);
    r.lambda = lambda;
    const double nan = std::nan("");
    r.r_sd = r.r_hd_m = r.r_hd_1 = r.ber_avg = r.sigma_sq_x = r.sigma_sq_y = r.se = nan;
    r.r_sd_raw = nan;
    return r;
}

}  // namespace

int channels_for_spacing(double spacing, double total_bandwidth) {
    if (spacing <= 0.0) throw std::invalid_argument("spacing must be positive");
    int n = static_cast<int>(std::floor(total_bandwidth / spacing));
    if (n % 2 == 0) --n;
    return std::max(1, n);
}

std::size_t SweepSpec::point_count() const {
    const std::size_t n_seeds = seeds.empty() ? 1 : seeds.size();
    return n_seeds * modulations.size() * axis_values.size() * dsp_modes.size();
}

void SweepSpec::validate() const {
    if (axis_values.empty()) throw std::invalid_argument("sweep has no points");
    if (dsp_modes.empty()) throw std::invalid_argument("sweep has no dsp modes");
    if (modulations.empty()) throw std::invalid_argument("sweep has no modulations");
    if (workers < 1) throw std::invalid_argument("workers must be >= 1");
}

std::vector<RateReport> evaluate_link(const LinkConfig& cfg, const Constellation& c,
                                      double shaping_lambda,
                                      const std::vector<DspMode>& modes,
                                      std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto [field, tx] = build_wdm_frame(cfg, c, rng);
    propagate_link(field, cfg, rng);

    std::vector<RateReport> out;
    out.reserve(modes.size());
    for (DspMode mode : modes) {
        SymbolBatch batch = rx_pipeline(field, cfg, tx, mode);
        RateReport r;
        r.power_dbm = cfg.launch_power_dbm_per_channel;
        r.spacing_ghz = cfg.channel_spacing / 1e9;
        r.n_spans = cfg.n_spans;
        r.dsp_mode = to_string(mode);
        r.lambda = shaping_lambda;
        r.r_sd = estimate_r_sd(batch, &r.r_sd_raw);
        const BitErrorRates ber = per_bit_ber(batch);
        r.per_bit_ber = ber.per_bit;
        r.ber_avg = ber.average;
        r.r_hd_m = r_hd_m(ber.per_bit);
        r.r_hd_1 = r_hd_1(ber.average, c.bits_per_symbol);
        r.sigma_sq_x = batch.sigma_sq[0];
        r.sigma_sq_y = batch.sigma_sq[1];
        r.se = spectral_efficiency(r.r_sd, cfg.symbol_rate, cfg.channel_spacing);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<RateReport> run_sweep(const SweepSpec& spec, std::size_t start_index,
                                  const std::function<void(std::size_t, const RateReport&)>& on_row) {
    spec.validate();
    const std::vector<std::uint64_t> seeds =
        spec.seeds.empty() ? std::vector<std::uint64_t>{spec.base.seed} : spec.seeds;

    struct Group {
        std::uint64_t seed;
        int m;
        double axis_value;
        std::size_t first_point;  // index of its first (seed,m,value,mode) point
    };
    std::vector<Group> groups;
    std::size_t point = 0;
    for (std::uint64_t s : seeds)
        for (int m : spec.modulations)
            for (double v : spec.axis_values) {
                groups.push_back({s, m, v, point});
                point += spec.dsp_modes.size();
            }
    const std::size_t n_points = point;
    if (start_index >= n_points && n_points > 0 && start_index != 0)
        return {};

    std::vector<RateReport> results(n_points);
    std::vector<char> done(groups.size(), 0);

    auto run_group = [&](std::size_t gi) {
        const Group& g = groups[gi];
        LinkConfig cfg = config_for_axis(spec, g.axis_value);
        const std::uint64_t seed = derive_seed(g.seed, gi);
        double lambda = 0.0;
        try {
            Constellation c;
            switch (spec.shaping) {
                case ShapingMode::Off:
                    c = build_qam(g.m);
                    break;
                case ShapingMode::Fixed:
                    lambda = spec.shaping_lambda;
                    c = shaped_constellation(g.m, lambda);
                    break;
                case ShapingMode::Auto: {
                    // Pass 1: uniform input through the first DSP mode to
                    // measure the operating SNR; lambda is optimized for the
                    // matching AWGN channel, then the shaped link is re-run.
                    auto probe = evaluate_link(cfg, build_qam(g.m), 0.0,
                                               {spec.dsp_modes.front()}, seed);
                    const double s2 = 0.5 * (probe[0].sigma_sq_x + probe[0].sigma_sq_y);
                    const double snr_db = -10.0 * std::log10(2.0 * s2);
                    optimize_shaping(build_qam(g.m), snr_db, &lambda);
                    c = shaped_constellation(g.m, lambda);
                    break;
                }
            }
            auto reports = evaluate_link(cfg, c, lambda, spec.dsp_modes, seed);
            for (std::size_t i = 0; i < reports.size(); ++i)
                results[g.first_point + i] = std::move(reports[i]);
        } catch (const std::exception& e) {
            std::cerr << "point group " << gi << " failed: " << e.what() << "\n";
            for (std::size_t i = 0; i < spec.dsp_modes.size(); ++i)
                results[g.first_point + i] = nan_report(cfg, spec.dsp_modes[i], lambda);
        }
        done[gi] = 1;
    };

    // Skip whole groups that are already flushed (resume support).
    std::vector<std::size_t> todo;
    for (std::size_t gi = 0; gi < groups.size(); ++gi)
        if (groups[gi].first_point + spec.dsp_modes.size() > start_index)
            todo.push_back(gi);

    if (spec.workers <= 1 || todo.size() <= 1) {
        for (std::size_t gi : todo) run_group(gi);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= todo.size()) return;
                run_group(todo[i]);
            }
        };
        std::vector<std::thread> pool;
        const std::size_t n_threads =
            std::min<std::size_t>(static_cast<std::size_t>(spec.workers), todo.size());
        for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    if (on_row)
        for (std::size_t i = start_index; i < n_points; ++i) on_row(i, results[i]);

    return std::vector<RateReport>(results.begin() + static_cast<std::ptrdiff_t>(start_index),
                                   results.end());
}

std::string report_csv_header() {
    return "power_dbm,spacing_ghz,n_spans,dsp_mode,lambda,r_sd,r_hd_m,r_hd_1,"
           "ber_avg,sigma_sq_x,sigma_sq_y,se";
}

std::string report_csv_row(const RateReport& r) {
    std::ostringstream os;
    os << fmt_double(r.power_dbm) << ',' << fmt_double(r.spacing_ghz) << ','
       << r.n_spans << ',' << r.dsp_mode << ',' << fmt_double(r.lambda) << ','
       << fmt_double(r.r_sd) << ',' << fmt_double(r.r_hd_m) << ','
       << fmt_double(r.r_hd_1) << ',' << fmt_double(r.ber_avg) << ','
       << fmt_double(r.sigma_sq_x) << ',' << fmt_double(r.sigma_sq_y) << ','
       << fmt_double(r.se);
    return os.str();
}

void emit_results(const std::vector<RateReport>& reports, const std::string& format,
                  const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    if (format == "csv") {
        out << report_csv_header() << '\n';
        for (const auto& r : reports) out << report_csv_row(r) << '\n';
    } else if (format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : reports) {
            nlohmann::json j;
            j["power_dbm"] = r.power_dbm;
            j["spacing_ghz"] = r.spacing_ghz;
            j["n_spans"] = r.n_spans;
            j["dsp_mode"] = r.dsp_mode;
            j["lambda"] = r.lambda;
            j["r_sd"] = r.r_sd;
            j["r_hd_m"] = r.r_hd_m;
            j["r_hd_1"] = r.r_hd_1;
            j["ber_avg"] = r.ber_avg;
            j["sigma_sq_x"] = r.sigma_sq_x;
            j["sigma_sq_y"] = r.sigma_sq_y;
            j["se"] = r.se;
            arr.push_back(std::move(j));
        }
        out << arr.dump(2) << '\n';
    } else {
        throw std::invalid_argument("unknown output format: " + format);
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<RateReport> parse_results_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV: " + path);
    if (line != report_csv_header()) throw std::runtime_error("unexpected CSV header");
    std::vector<RateReport> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) f.push_back(tok);
        if (f.size() != 12) throw std::runtime_error("malformed CSV row");
        RateReport r;
        r.power_dbm = std::stod(f[0]);
        r.spacing_ghz = std::stod(f[1]);
        r.n_spans = std::stoi(f[2]);
        r.dsp_mode = f[3];
        r.lambda = std::stod(f[4]);
        r.r_sd = std::stod(f[5]);
        r.r_hd_m = std::stod(f[6]);
        r.r_hd_1 = std::stod(f[7]);
        r.ber_avg = std::stod(f[8]);
        r.sigma_sq_x = std::stod(f[9]);
        r.sigma_sq_y = std::stod(f[10]);
        r.se = std::stod(f[11]);
        out.push_back(std::move(r));
    }
    return out;
}

void run_sweep_to_csv(const SweepSpec& spec, const std::string& path) {
    std::size_t existing = 0;
    {
        std::ifstream in(path);
        if (in) {
            std::string line;
            bool first = true;
            while (std::getline(in, line)) {
                if (first) {
                    if (line != report_csv_header())
                        throw std::runtime_error("existing file has a different schema: " + path);
                    first = false;
                } else if (!line.empty()) {
                    ++existing;
                }
            }
            if (first) existing = 0;  // empty file, start over
        }
    }
    std::ofstream out;
    if (existing == 0) {
        out.open(path, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + path);
        out << report_csv_header() << '\n';
    } else {
        out.open(path, std::ios::app);
        if (!out) throw std::runtime_error("cannot write " + path);
    }
    out.flush();
    run_sweep(spec, existing, [&](std::size_t, const RateReport& r) {
        out << report_csv_row(r) << '\n';
        out.flush();
    });
    if (!out) throw std::runtime_error("write failed: " + path);
}

void apply_profile(SweepSpec& spec, const std::string& profile) {
    if (profile == "paper") {
        // LinkConfig defaults are the full-scale configuration already.
        LinkConfig base;
        base.seed = spec.base.seed;
        base.launch_power_dbm_per_channel = spec.base.launch_power_dbm_per_channel;
        spec.base = base;
    } else if (profile == "desk") {
        LinkConfig base;
        base.seed = spec.base.seed;
        base.launch_power_dbm_per_channel = spec.base.launch_power_dbm_per_channel;
        base.n_channels = 3;
        base.n_spans = 10;
        base.n_symbols = std::size_t{1} << 14;
        base.sps_sim = 16;
        base.step_linear_m = 400.0;
        base.step_nonlinear_m = 40.0;
        // keep the whole default power grid on the coarse step; 400 m is
        // ample at desk-scale powers
        base.nonlinear_power_threshold_dbm = 8.0;
        spec.base = base;
    } else {
        throw std::invalid_argument("unknown profile: " + profile);
    }
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, sep)) {
        const auto b = tok.find_first_not_of(" \t");
        const auto e = tok.find_last_not_of(" \t");
        out.push_back(b == std::string::npos ? "" : tok.substr(b, e - b + 1));
    }
    return out;
}

}  // namespace

SweepSpec parse_sweep_config(const std::string& text, SweepSpec spec) {
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        auto trim = [](std::string s) {
            const auto x = s.find_first_not_of(" \t\r");
            const auto y = s.find_last_not_of(" \t\r");
            return x == std::string::npos ? std::string() : s.substr(x, y - x + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        LinkConfig& L = spec.base;
        if (key == "link.symbol_rate") L.symbol_rate = std::stod(val);
        else if (key == "link.rrc_rolloff") L.rrc_rolloff = std::stod(val);
        else if (key == "link.rrc_span_symbols") L.rrc_span_symbols = std::stoi(val);
        else if (key == "link.sps_sim") L.sps_sim = std::stoi(val);
        else if (key == "link.n_channels") L.n_channels = std::stoi(val);
        else if (key == "link.channel_spacing") L.channel_spacing = std::stod(val);
        else if (key == "link.span_length") L.span_length = std::stod(val);
        else if (key == "link.n_spans") L.n_spans = std::stoi(val);
        else if (key == "link.alpha_db_per_km") L.alpha_db_per_km = std::stod(val);
        else if (key == "link.gamma") L.gamma = std::stod(val);
        else if (key == "link.dispersion_ps_nm_km") L.dispersion_D = std::stod(val) * 1e-6;
        else if (key == "link.edfa_noise_figure_db") L.edfa_noise_figure_db = std::stod(val);
        else if (key == "link.center_wavelength") L.center_wavelength = std::stod(val);
        else if (key == "link.step_linear_m") L.step_linear_m = std::stod(val);
        else if (key == "link.step_nonlinear_m") L.step_nonlinear_m = std::stod(val);
        else if (key == "link.nonlinear_power_threshold_dbm")
            L.nonlinear_power_threshold_dbm = std::stod(val);
        else if (key == "link.launch_power_dbm") L.launch_power_dbm_per_channel = std::stod(val);
        else if (key == "link.n_symbols") L.n_symbols = std::stoul(val);
        else if (key == "link.seed") L.seed = std::stoull(val);
        else if (key == "sweep.axis") {
            if (val == "power") spec.axis = SweepAxis::LaunchPower;
            else if (val == "spacing") spec.axis = SweepAxis::Spacing;
            else if (val == "spans") spec.axis = SweepAxis::Spans;
            else throw std::invalid_argument("unknown sweep axis: " + val);
        } else if (key == "sweep.values") {
            spec.axis_values.clear();
            for (const auto& v : split(val, ',')) spec.axis_values.push_back(std::stod(v));
        } else if (key == "sweep.dsp_modes") {
            spec.dsp_modes.clear();
            for (const auto& v : split(val, ',')) spec.dsp_modes.push_back(dsp_mode_from_string(v));
        } else if (key == "sweep.modulations") {
            spec.modulations.clear();
            for (const auto& v : split(val, ',')) spec.modulations.push_back(std::stoi(v));
        } else if (key == "sweep.shaping") {
            if (val == "off") spec.shaping = ShapingMode::Off;
            else if (val == "auto") spec.shaping = ShapingMode::Auto;
            else {
                spec.shaping = ShapingMode::Fixed;
                spec.shaping_lambda = std::stod(val);
            }
        } else if (key == "sweep.auto_channels") {
            spec.auto_channels = (val == "true" || val == "1");
        } else if (key == "sweep.total_comb_ghz") {
            spec.total_comb_bandwidth = std::stod(val) * 1e9;
        } else if (key == "sweep.seeds") {
            spec.seeds.clear();
            for (const auto& v : split(val, ',')) spec.seeds.push_back(std::stoull(v));
        } else if (key == "sweep.workers") {
            spec.workers = std::stoi(val);
        } else {
            throw std::invalid_argument("unknown config key: " + key);
        }
    }
    return spec;
}

SweepSpec load_sweep_config_file(const std::string& path, SweepSpec spec) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_sweep_config(ss.str(), std::move(spec));
}

}  // namespace fiber
