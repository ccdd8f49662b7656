// Command-line front end: scenario ingestion, single solves, parameter
// sweeps, simulation, model verification, and the closed-form bounds.
// Exit codes: 0 ok, 1 error, 2 infeasible.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "edgedim/config.hpp"
#include "edgedim/simulator.hpp"

using namespace edgedim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

struct Overrides {
    std::optional<double> radius_km, lambda, beta1, deadline_ms, omega_min, a_min;
};

Scenario load_scenario(const std::string& config_path, const Overrides& ov) {
    Scenario sc;
    if (!config_path.empty()) sc = scenario_from_config(ConfigMap::load(config_path));
    if (ov.radius_km) sc.radius_km = *ov.radius_km;
    if (ov.lambda) sc.traffic_density = *ov.lambda;
    if (ov.beta1) sc.beta1 = *ov.beta1;
    if (ov.deadline_ms) sc.deadline_s = *ov.deadline_ms * 1e-3;
    if (ov.omega_min) sc.omega_min = *ov.omega_min;
    if (ov.a_min) sc.a_min = *ov.a_min;
    return sc;
}

void write_effective_config(const Scenario& sc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config echo: " + path);
    out.precision(17);
    const ConfigMap cfg = effective_config(sc);
    for (const auto& [key, v] : cfg.values())
        out << key << " = " << v << "\n";
}

void print_solution_text(const DimensioningSolution& sol) {
    std::printf("status            %s\n", to_string(sol.status));
    if (sol.status == SolveStatus::infeasible) {
        std::printf("certificate       %s\n", to_string(sol.reason));
        std::printf("detail            %s\n", sol.certificate.c_str());
        return;
    }
    std::printf("bandwidth         %.6e Hz\n", sol.bandwidth_hz);
    std::printf("compute           %.6f TFLOPS\n", sol.compute_tflops);
    std::printf("queue slack       %.6e s\n", sol.slack_T);
    std::printf("resolution        %.2f px\n", sol.resolution_px);
    std::printf("objective         %.6e\n", sol.objective);
    std::printf("compute per frame %.6f TFLOP\n", sol.compute_per_frame);
    std::printf("load              %.4f\n", sol.load);
    std::printf("original feasible %s\n", sol.feasible_for_original ? "yes" : "no");
    std::printf("kkt residuals     stationarity %.2e, complementarity %.2e\n",
                sol.kkt.stationarity, sol.kkt.complementarity);
}

int cmd_solve(const Scenario& sc, bool json, const std::string& emit_config) {
    const DimensioningSolution sol = solve(sc);
    if (!emit_config.empty()) write_effective_config(sc, emit_config);
    if (json) std::cout << solution_to_json(sol).dump(2) << "\n";
    else print_solution_text(sol);
    if (sol.status == SolveStatus::infeasible) return kExitInfeasible;
    if (sol.status == SolveStatus::stall) {
        std::fprintf(stderr, "solver stall: %s\n", sol.certificate.c_str());
        return kExitError;
    }
    return kExitOk;
}

std::string csv_cell(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

int cmd_sweep(const Scenario& base, const std::string& axis, double from, double to,
              int points, bool log_spacing, const std::string& out_path) {
    if (points < 1 || !(from > 0.0 || !log_spacing) || (points > 1 && from == to))
        throw std::runtime_error("sweep: need points >= 1 and a non-degenerate range");
    std::vector<double> values;
    for (int i = 0; i < points; ++i) {
        const double f = (points == 1) ? 0.0 : static_cast<double>(i) / (points - 1);
        values.push_back(log_spacing ? from * std::pow(to / from, f)
                                     : from + (to - from) * f);
    }

    auto apply_axis = [&axis](Scenario sc, double v) {
        if (axis == "radius_km") sc.radius_km = v;
        else if (axis == "traffic_density") sc.traffic_density = v;
        else if (axis == "beta1") sc.beta1 = v;
        else if (axis == "deadline") sc.deadline_s = v * 1e-3;  // ms, like the flag
        else if (axis == "omega_min") sc.omega_min = v;
        else throw std::runtime_error("sweep: unknown axis '" + axis + "'");
        return sc;
    };
    apply_axis(base, values.front());  // validate the axis name up front

    std::vector<std::string> rows(values.size());
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= values.size()) return;
            std::ostringstream row;
            row << csv_cell(values[i]) << ",";
            try {
                const Scenario sc = apply_axis(base, values[i]);
                const DimensioningSolution sol = solve(sc);
                std::string bmin, hmin;
                try {
                    bmin = csv_cell(min_bandwidth(sc).b_hz);
                    hmin = csv_cell(min_compute(sc));
                } catch (const InfeasibleError&) { /* leave empty */ }
                if (sol.status == SolveStatus::optimal) {
                    row << csv_cell(sol.bandwidth_hz) << "," << csv_cell(sol.compute_tflops)
                        << "," << csv_cell(sol.compute_per_frame) << ","
                        << csv_cell(sol.resolution_px) << "," << csv_cell(sol.load) << ","
                        << csv_cell(sol.objective) << "," << bmin << "," << hmin << ","
                        << (sol.feasible_for_original ? "1" : "0") << ",";
                } else {
                    row << ",,,,,," << bmin << "," << hmin << ",,"
                        << (sol.status == SolveStatus::infeasible ? to_string(sol.reason)
                                                                  : "STALL");
                }
            } catch (const std::exception& e) {
                row << ",,,,,,,,," << e.what();
            }
            rows[i] = row.str();
        }
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned nw = static_cast<unsigned>(
        std::min<std::size_t>(hw, values.size()));
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < nw; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw std::runtime_error("cannot write: " + out_path);
        os = &file;
    }
    *os << axis << ",b_hz,h_tflops,h_f,s_px,load,objective,b_min,h_min,"
           "feasible_original,reason\n";
    for (const auto& r : rows) *os << r << "\n";
    return kExitOk;
}

int cmd_bounds(const Scenario& sc, bool json) {
    const Kappas k = compute_kappas(sc);
    const double om1 = k.omega1(sc.deadline_s);
    const double om2 = k.omega2(sc.detector);
    nlohmann::json j;
    j["kappa1"] = k.kappa1;
    j["kappa2_low"] = k.kappa2_low;
    j["kappa2_peak"] = k.kappa2_peak;
    j["kappa3"] = k.kappa3;
    j["kappa4"] = k.kappa4;
    j["omega1"] = om1;
    j["omega2"] = om2;
    if (om1 < 1.0) {
        const MinBandwidth mb = min_bandwidth(sc);
        j["b_min_hz"] = mb.b_hz;
        j["b_min_variant"] = mb.peak_variant ? "peak" : "low";
        j["h_min_tflops"] = min_compute(sc);
        j["h_f_min"] = min_compute(sc) / sc.arrival_rate();
    } else {
        j["infeasible"] = "DEADLINE";
    }
    if (json) {
        std::cout << j.dump(2) << "\n";
    } else {
        for (const auto& [key, v] : j.items())
            std::cout << key << " = " << (v.is_string() ? v.get<std::string>()
                                                        : v.dump()) << "\n";
    }
    return om1 < 1.0 ? kExitOk : kExitInfeasible;
}

int cmd_simulate(const Scenario& sc, std::uint64_t frames, std::uint64_t seed,
                 bool sampled_uplink, bool json, const std::string& out_path) {
    const DimensioningSolution sol = solve(sc);
    if (sol.status == SolveStatus::infeasible) {
        std::fprintf(stderr, "infeasible scenario: %s\n", to_string(sol.reason));
        return kExitInfeasible;
    }
    SimConfig cfg;
    cfg.n_arrivals = frames;
    cfg.seed = seed;
    cfg.sampled_uplink = sampled_uplink;
    // keep the frame spanning many fading blocks, per the ergodic premise
    FrameFormat fr = sc.frame;
    fr.resolution_px = sol.resolution_px;
    const double tul = uplink_time(sol.bandwidth_hz, sc.radius_km, fr, sc.channel);
    cfg.coherence_time_s = tul / 400.0;
    const SimulationReport rep = simulate_end_to_end(sol, sc, cfg);

    nlohmann::json j;
    j["success_probability"] = rep.success_probability;
    j["success_ci_halfwidth"] = rep.success_ci_halfwidth;
    j["mean_uplink_s"] = rep.mean_uplink_s;
    j["mean_wait_s"] = rep.mean_wait_s;
    j["mean_service_s"] = rep.mean_service_s;
    j["n_samples"] = rep.n_samples;
    j["seed"] = rep.seed;
    j["omega_min"] = sc.omega_min;
    j["blocks_per_frame"] = 400;
    if (json) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::printf("success probability %.4f +- %.4f (target %.2f)\n",
                    rep.success_probability, rep.success_ci_halfwidth, sc.omega_min);
        std::printf("mean uplink %.4e s, mean wait %.4e s, service %.4e s\n",
                    rep.mean_uplink_s, rep.mean_wait_s, rep.mean_service_s);
        std::printf("samples %llu, seed %llu\n",
                    static_cast<unsigned long long>(rep.n_samples),
                    static_cast<unsigned long long>(rep.seed));
    }
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write: " + out_path);
        out << "t_seconds,ccdf,ci_halfwidth\n";
        for (const auto& s : rep.empirical_ccdf)
            out << csv_cell(s.t_seconds) << "," << csv_cell(s.ccdf) << ","
                << csv_cell(s.ci_halfwidth) << "\n";
    }
    return kExitOk;
}

int cmd_verify(const Scenario& sc, std::uint64_t seed, bool no_compensation) {
    bool all_ok = true;
    auto report = [&](const char* name, bool ok, const std::string& detail) {
        std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
        all_ok = all_ok && ok;
    };

    {  // tail-approximation gap over the full load range
        std::vector<double> grid;
        for (int i = 1; i <= 99; ++i) grid.push_back(0.01 * i);
        double worst = 0.0;
        for (const auto& p : certify_error_bound(grid)) worst = std::max(worst, p.max_error());
        char d[96];
        std::snprintf(d, sizeof d, "max approximation gap %.6f (bound 0.017)", worst);
        report("error-bound", worst <= 0.017, d);
    }

    {  // queue simulation against the exact distribution
        bool ok = true;
        double worst = 0.0;
        for (double rho : {0.3, 0.5, 0.9}) {
            const QueueModel q = QueueModel::from_load_service(rho, 1.0);
            SimConfig cfg;
            cfg.n_arrivals = 1'000'000;
            cfg.seed = seed;
            const std::vector<double> tp{0.0, 0.5, 1.0, 2.0, 5.0};
            const auto emp = simulate_queue(q, cfg, tp);
            for (std::size_t i = 0; i < tp.size(); ++i) {
                const double diff = std::fabs(emp[i].ccdf - mdone_wait_ccdf(q, tp[i]));
                worst = std::max(worst, diff);
                ok = ok && diff <= 0.01;
            }
        }
        char d[96];
        std::snprintf(d, sizeof d, "worst |sim - exact| = %.4f (limit 0.01)", worst);
        report("queue-simulation", ok, d);
    }

    {  // uplink Monte Carlo against the closed-form rate
        const double B = 1e6, r = sc.radius_km;
        const double closed = ergodic_rate(B, r, sc.channel);
        const double power = effective_tx_power(r, sc.channel);
        const double snr_scale = power / (std::pow(r, sc.channel.path_loss_exponent) *
                                          sc.channel.noise_psd_mw_hz * B);
        CounterRng rng(seed, kStreamFading);
        double sum = 0.0;
        const int n = 500'000;
        for (int i = 0; i < n; ++i)
            sum += B * std::log2(1.0 + rng.exponential(sc.channel.antenna_gain()) * snr_scale);
        const double rel = std::fabs(sum / n - closed) / closed;
        char d[96];
        std::snprintf(d, sizeof d, "closed form vs Monte Carlo: %.3f%% relative", 100.0 * rel);
        report("uplink-rate", rel <= 0.005, d);
    }

    {  // end-to-end validation of the dimensioned scenario
        Scenario run = sc;
        if (no_compensation) {
            // emulate a solver without the error compensation: lower the
            // target so the compensated constraint equals the raw one
            run.omega_min = sc.omega_min - kHenkCompensation;
        }
        const DimensioningSolution sol = solve(run);
        if (sol.status != SolveStatus::optimal) {
            report("end-to-end", false, std::string("solve: ") + to_string(sol.status));
        } else {
            SimConfig cfg;
            cfg.n_arrivals = 100'000;
            cfg.seed = seed;
            const SimulationReport rep = simulate_end_to_end(sol, sc, cfg);
            const bool ok =
                rep.success_probability >= sc.omega_min - rep.success_ci_halfwidth;
            char d[128];
            std::snprintf(d, sizeof d, "success %.4f +- %.4f vs target %.2f%s",
                          rep.success_probability, rep.success_ci_halfwidth, sc.omega_min,
                          no_compensation ? " (compensation disabled)" : "");
            report("end-to-end", ok, d);
        }
    }

    return all_ok ? kExitOk : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dimensioning engine for single-cell edge video analytics"};
    app.require_subcommand(1);

    std::string config_path, out_path, emit_config, axis = "radius_km";
    Overrides ov;
    bool json = false, log_spacing = false, sampled_uplink = false, no_comp = false;
    std::uint64_t seed = 1, frames = 100'000;
    double from = 0.1, to = 5.0;
    int points = 25;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "scenario config file (key = value)");
        cmd->add_option("--radius-km", ov.radius_km, "cell radius in km");
        cmd->add_option("--lambda", ov.lambda, "traffic density in frames/s/km^2");
        cmd->add_option("--beta1", ov.beta1, "bandwidth weight in (0,1)");
        cmd->add_option("--deadline", ov.deadline_ms, "frame deadline in ms");
        cmd->add_option("--omega-min", ov.omega_min, "success-probability target");
        cmd->add_option("--a-min", ov.a_min, "detection-accuracy target");
        cmd->add_flag("--json", json, "JSON output");
    };

    CLI::App* c_solve = app.add_subcommand("solve", "dimension a single scenario");
    add_common(c_solve);
    c_solve->add_option("--emit-config", emit_config,
                        "write the effective configuration to this path");

    CLI::App* c_sweep = app.add_subcommand("sweep", "solve along one scenario axis");
    add_common(c_sweep);
    c_sweep->add_option("--axis", axis,
                        "radius_km | traffic_density | beta1 | deadline | omega_min");
    c_sweep->add_option("--from", from, "first axis value")->required();
    c_sweep->add_option("--to", to, "last axis value")->required();
    c_sweep->add_option("--points", points, "number of sweep points");
    c_sweep->add_flag("--log", log_spacing, "geometric spacing");
    c_sweep->add_option("--out", out_path, "CSV output path (default stdout)");

    CLI::App* c_sim = app.add_subcommand("simulate", "validate a solution by simulation");
    add_common(c_sim);
    c_sim->add_option("--seed", seed, "simulation seed");
    c_sim->add_option("--frames", frames, "number of simulated frames");
    c_sim->add_flag("--sampled-uplink", sampled_uplink,
                    "sample per-frame fading instead of the deterministic uplink time");
    c_sim->add_option("--out", out_path, "empirical CCDF CSV path");

    CLI::App* c_verify = app.add_subcommand("verify", "run the model cross-checks");
    add_common(c_verify);
    c_verify->add_option("--seed", seed, "Monte Carlo seed");
    c_verify->add_flag("--no-compensation", no_comp,
                       "demo: dimension without the approximation-error margin");

    CLI::App* c_bounds = app.add_subcommand("bounds", "closed-form resource floors");
    add_common(c_bounds);

    CLI11_PARSE(app, argc, argv);

    try {
        const Scenario sc = load_scenario(config_path, ov);
        if (app.got_subcommand(c_solve)) return cmd_solve(sc, json, emit_config);
        if (app.got_subcommand(c_sweep))
            return cmd_sweep(sc, axis, from, to, points, log_spacing, out_path);
        if (app.got_subcommand(c_sim))
            return cmd_simulate(sc, frames, seed, sampled_uplink, json, out_path);
        if (app.got_subcommand(c_verify)) return cmd_verify(sc, seed, no_comp);
        if (app.got_subcommand(c_bounds)) return cmd_bounds(sc, json);
    } catch (const InfeasibleError& e) {
        std::fprintf(stderr, "infeasible: %s (%s)\n", e.what(), to_string(e.reason));
        return kExitInfeasible;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitError;
    }
    return kExitError;
}
