#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "fiberrates/sweep.hpp"

int main(int argc, char** argv) {
    CLI::App app{"WDM fiber link simulator and achievable-rate estimator"};
    app.require_subcommand(1);

    // run: sweep a configured link and emit one RateReport row per point
    auto* run = app.add_subcommand("run", "run a sweep and write CSV/JSON results");
    std::string config_path, profile, out_path = "results.csv", format = "csv";
    int workers = 0;
    std::uint64_t seed = 0;
    bool have_seed = false;
    run->add_option("--config", config_path, "key=value config file");
    run->add_option("--profile", profile, "parameter preset: desk or paper")
        ->check(CLI::IsMember({"desk", "paper"}));
    run->add_option("--out", out_path, "output path");
    run->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    run->add_option("--workers", workers, "concurrent sweep points");
    run->add_option("--seed", seed, "override the base seed")->each([&](const std::string&) {
        have_seed = true;
    });

    // oracle: exact AWGN mutual information for a QAM format
    auto* oracle = app.add_subcommand("oracle", "print the exact AWGN MI in bit/sym");
    int m = 4;
    double snr_db = 10.0, lambda = 0.0;
    bool shape_auto = false;
    oracle->add_option("--m", m, "bits per symbol (2, 4 or 6)")->required();
    oracle->add_option("--snr-db", snr_db, "Es/N0 in dB")->required();
    auto* lam_opt = oracle->add_option("--lambda", lambda, "Maxwell-Boltzmann shaping parameter");
    oracle->add_flag("--shape-auto", shape_auto, "optimize the shaping parameter");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*oracle) {
            fiber::Constellation c = fiber::build_qam(m);
            double lam = 0.0;
            if (shape_auto) {
                c.set_pmf(fiber::optimize_shaping(c, snr_db, &lam));
            } else if (lam_opt->count() > 0) {
                lam = lambda;
                c.set_pmf(fiber::maxwell_boltzmann_pmf(c, lam));
            }
            const double mi = fiber::awgn_mi_oracle(c, fiber::snr_db_to_sigma_sq(snr_db));
            std::printf("m=%d snr_db=%.6g lambda=%.6g mi=%.6f\n", m, snr_db, lam, mi);
            return 0;
        }

        fiber::SweepSpec spec;
        if (!profile.empty()) fiber::apply_profile(spec, profile);
        if (!config_path.empty()) spec = fiber::load_sweep_config_file(config_path, spec);
        if (have_seed) spec.base.seed = seed;
        if (workers > 0) spec.workers = workers;
        if (spec.axis_values.empty() && spec.axis == fiber::SweepAxis::LaunchPower)
            for (int p = -10; p <= 8; p += 2) spec.axis_values.push_back(p);

        if (format == "csv") {
            fiber::run_sweep_to_csv(spec, out_path);
        } else {
            const auto reports = fiber::run_sweep(spec);
            fiber::emit_results(reports, format, out_path);
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
