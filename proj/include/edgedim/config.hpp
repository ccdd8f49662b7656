#ifndef EDGEDIM_CONFIG_HPP
#define EDGEDIM_CONFIG_HPP

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "edgedim/dimensioning.hpp"
#include "edgedim/scenario.hpp"

// Scenario ingestion from a flat key-value file. Keys and units mirror
// the system-parameter table (dBm, dBm/Hz, GHz, km, ms) so values can be
// copied verbatim; everything is converted to internal units once.

namespace edgedim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

class ConfigMap {
public:
    static ConfigMap parse(std::istream& in) {
        ConfigMap cfg;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (const auto hash = line.find('#'); hash != std::string::npos)
                line.erase(hash);
            const auto strip = [](std::string s) {
                const auto a = s.find_first_not_of(" \t\r");
                if (a == std::string::npos) return std::string{};
                const auto b = s.find_last_not_of(" \t\r");
                return s.substr(a, b - a + 1);
            };
            if (strip(line).empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": expected key = value");
            const std::string key = strip(line.substr(0, eq));
            const std::string val = strip(line.substr(eq + 1));
            std::size_t used = 0;
            double v;
            try {
                v = std::stod(val, &used);
            } catch (const std::exception&) {
                throw ConfigError("config key '" + key + "': not a number: '" + val + "'");
            }
            if (used != val.size())
                throw ConfigError("config key '" + key + "': trailing junk in '" + val + "'");
            cfg.values_[key] = v;
        }
        return cfg;
    }

    static ConfigMap load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        return parse(in);
    }

    static ConfigMap parse_string(const std::string& text) {
        std::istringstream in(text);
        return parse(in);
    }

    void set(const std::string& key, double v) { values_[key] = v; }
    const std::map<std::string, double>& values() const { return values_; }

private:
    std::map<std::string, double> values_;
};

// Config keys -> Scenario fields, Table-1 units on the config side.
inline Scenario scenario_from_config(const ConfigMap& cfg) {
    Scenario sc;  // defaults are the Table-1 values
    for (const auto& [key, v] : cfg.values()) {
        if (key == "radius_km") sc.radius_km = v;
        else if (key == "traffic_density") sc.traffic_density = v;
        else if (key == "path_loss_exponent") sc.channel.path_loss_exponent = v;
        else if (key == "power_control_epsilon") sc.channel.power_control = v;
        else if (key == "peak_power_dbm") sc.channel.peak_power_mw = dbm_to_mw(v);
        else if (key == "ref_power_dbm") sc.channel.ref_power_mw = dbm_to_mw(v);
        else if (key == "noise_psd_dbm_hz") sc.channel.noise_psd_mw_hz = dbm_to_mw(v);
        else if (key == "carrier_ghz") sc.channel.carrier_hz = v * 1e9;
        else if (key == "frame_bits_per_pixel") sc.frame.bits_per_pixel = v;
        else if (key == "frame_compression") sc.frame.compression = v;
        else if (key == "rho_max") sc.rho_max = v;
        else if (key == "deadline_ms") sc.deadline_s = v * 1e-3;
        else if (key == "omega_min") sc.omega_min = v;
        else if (key == "a_min") sc.a_min = v;
        else if (key == "beta1") sc.beta1 = v;
        else if (key == "beta2") sc.beta2 = v;
        else if (key == "c1") sc.detector.c1 = v;
        else if (key == "c2") sc.detector.c2 = v;
        else if (key == "c3") sc.detector.c3 = v;
        else if (key == "c4") sc.detector.c4 = v;
        else if (key == "c5") sc.detector.c5 = v;
        else throw ConfigError("unknown config key: '" + key + "'");
    }
    return sc;
}

// Inverse mapping; emitted so a run's effective configuration can be
// re-parsed into an identical Scenario.
inline ConfigMap effective_config(const Scenario& sc) {
    ConfigMap cfg;
    cfg.set("radius_km", sc.radius_km);
    cfg.set("traffic_density", sc.traffic_density);
    cfg.set("path_loss_exponent", sc.channel.path_loss_exponent);
    cfg.set("power_control_epsilon", sc.channel.power_control);
    cfg.set("peak_power_dbm", mw_to_dbm(sc.channel.peak_power_mw));
    cfg.set("ref_power_dbm", mw_to_dbm(sc.channel.ref_power_mw));
    cfg.set("noise_psd_dbm_hz", mw_to_dbm(sc.channel.noise_psd_mw_hz));
    cfg.set("carrier_ghz", sc.channel.carrier_hz / 1e9);
    cfg.set("frame_bits_per_pixel", sc.frame.bits_per_pixel);
    cfg.set("frame_compression", sc.frame.compression);
    cfg.set("rho_max", sc.rho_max);
    cfg.set("deadline_ms", sc.deadline_s * 1e3);
    cfg.set("omega_min", sc.omega_min);
    cfg.set("a_min", sc.a_min);
    cfg.set("beta1", sc.beta1);
    cfg.set("beta2", sc.beta2);
    cfg.set("c1", sc.detector.c1);
    cfg.set("c2", sc.detector.c2);
    cfg.set("c3", sc.detector.c3);
    cfg.set("c4", sc.detector.c4);
    cfg.set("c5", sc.detector.c5);
    return cfg;
}

inline nlohmann::json solution_to_json(const DimensioningSolution& sol) {
    nlohmann::json j;
    j["status"] = to_string(sol.status);
    if (sol.status == SolveStatus::infeasible) {
        j["certificate"] = to_string(sol.reason);
        j["detail"] = sol.certificate;
        return j;
    }
    j["b_hz"] = sol.bandwidth_hz;
    j["h_tflops"] = sol.compute_tflops;
    j["t_slack_s"] = sol.slack_T;
    j["s_px"] = sol.resolution_px;
    j["objective"] = sol.objective;
    j["h_f"] = sol.compute_per_frame;
    j["load"] = sol.load;
    j["feasible_original"] = sol.feasible_for_original;
    j["kkt"] = {{"stationarity", sol.kkt.stationarity},
                {"complementarity", sol.kkt.complementarity},
                {"max_violation", sol.kkt.max_violation}};
    j["resolution_at_bound"] = sol.resolution_at_bound;
    j["newton_iterations"] = sol.newton_iterations;
    return j;
}

}  // namespace edgedim

#endif
