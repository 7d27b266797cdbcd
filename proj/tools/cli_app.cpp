#include "cli_app.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "ctc/csv.hpp"
#include "ctc/errors.hpp"
#include "ctc/svg.hpp"

namespace fs = std::filesystem;

namespace ctc::cli {

namespace {

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for '" + path + "'");
}

std::string pass_fail(bool ok) { return ok ? "PASS" : "FAIL"; }

struct Overrides {
    std::string mode;
    double dt = 0.0;
    double t_end = 0.0;

    void apply(ScenarioConfig& cfg) const {
        if (!mode.empty()) apply_override(cfg, "controller.mode", mode);
        if (dt > 0.0) apply_override(cfg, "sim.dt", std::to_string(dt));
        if (t_end > 0.0) apply_override(cfg, "sim.t_end", std::to_string(t_end));
    }
};

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const Overrides& overrides) {
    ScenarioConfig cfg = parse_config(config_path);
    overrides.apply(cfg);
    const RunReport report = execute_run(cfg, out_dir);
    std::cout << format_report(report, cfg);
    std::cout << "wall time: " << report.wall_seconds << " s\n";
    if (report.aborted) return kSimulationAbort;
    return report.objectives_met() ? kOk : kObjectivesNotMet;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              const std::string& param, const std::string& values_csv,
              const Overrides& overrides) {
    const ScenarioConfig base = [&] {
        ScenarioConfig cfg = parse_config(config_path);
        overrides.apply(cfg);
        return cfg;
    }();

    std::vector<std::string> values;
    {
        std::istringstream in(values_csv);
        std::string v;
        while (std::getline(in, v, ',')) {
            if (!v.empty()) values.push_back(v);
        }
    }
    if (values.empty()) throw ConfigError("sweep: --values must list at least one value");

    // Validate every point before starting any run.
    std::vector<ScenarioConfig> cfgs;
    for (const std::string& v : values) {
        ScenarioConfig cfg = base;
        apply_override(cfg, param, v);
        std::string suffix = param + "_" + v;
        for (char& ch : suffix) {
            if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-')) {
                ch = '-';
            }
        }
        cfg.name = base.name + "_" + suffix;
        cfgs.push_back(std::move(cfg));
    }

    ensure_dir(out_dir);
    std::vector<std::future<RunReport>> jobs;
    jobs.reserve(cfgs.size());
    for (const ScenarioConfig& cfg : cfgs) {
        jobs.push_back(std::async(std::launch::async,
                                  [&cfg, &out_dir] { return execute_run(cfg, out_dir); }));
    }

    std::ostringstream table;
    table << "param,value,aborted,objectives_met,v_err_max,dist_max,att_err_max,settling_time\n";
    std::cout << param << " sweep over " << values.size() << " values\n";
    for (size_t i = 0; i < jobs.size(); ++i) {
        const RunReport r = jobs[i].get();
        const double att = std::max(
            {r.metrics.att_err_max[0], r.metrics.att_err_max[1], r.metrics.att_err_max[2]});
        table << param << ',' << values[i] << ',' << (r.aborted ? 1 : 0) << ','
              << (r.objectives_met() ? 1 : 0) << ',' << r.metrics.v_err_max << ','
              << r.metrics.dist_max << ',' << att << ',' << r.metrics.settling_time << '\n';
        std::cout << "  " << param << " = " << values[i] << ": "
                  << (r.aborted ? "ABORTED"
                                : (r.objectives_met() ? "objectives met" : "objectives NOT met"))
                  << ", dist_max = " << r.metrics.dist_max
                  << ", v_err_max = " << r.metrics.v_err_max << "\n";
    }
    const std::string table_path = out_dir + "/sweep_" + param + ".csv";
    write_text(table_path, table.str());
    std::cout << "table: " << table_path << "\n";
    return kOk;
}

int cmd_validate(const std::vector<std::string>& paths) {
    bool ok = true;
    for (const std::string& p : paths) {
        try {
            (void)parse_config(p);
            std::cout << p << ": OK\n";
        } catch (const ConfigError& e) {
            std::cout << p << ": " << e.what() << "\n";
            ok = false;
        }
    }
    return ok ? kOk : kConfigError;
}

}  // namespace

RunReport execute_run(const ScenarioConfig& cfg, const std::string& out_dir) {
    RunReport report;
    report.scenario = cfg.name;
    report.mode = cfg.mode;

    const std::string dir = out_dir + "/" + cfg.name;
    ensure_dir(dir);

    const auto t0 = std::chrono::steady_clock::now();
    const RunResult result = run_scenario(cfg);
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.metrics = result.metrics;
    report.aborted = result.aborted;
    report.diagnostic = result.diagnostic;

    const std::string csv_path = dir + "/log.csv";
    if (result.log.size() > 0) {
        write_csv(result.log, csv_path);
        report.artifacts.push_back(csv_path);
        const auto curve = cfg.build_curve();
        for (const std::string& p : write_plots(result.log, *curve, dir)) {
            report.artifacts.push_back(p);
        }
    }
    write_text(dir + "/report.txt", format_report(report, cfg));
    report.artifacts.push_back(dir + "/report.txt");

    if (result.aborted) {
        std::ostringstream manifest;
        manifest << "status = aborted\n";
        manifest << "diagnostic = " << result.diagnostic << "\n";
        manifest << "samples_logged = " << result.log.size() << "\n";
        for (const std::string& p : report.artifacts) manifest << "artifact = " << p << "\n";
        write_text(dir + "/MANIFEST.txt", manifest.str());
        report.artifacts.push_back(dir + "/MANIFEST.txt");
    }
    return report;
}

std::string format_report(const RunReport& report, const ScenarioConfig& cfg) {
    std::ostringstream out;
    out << "scenario: " << report.scenario << "\n";
    out << "mode: " << (report.mode == ControllerMode::FullState ? "state" : "output") << "\n";
    if (report.aborted) {
        out << "status: ABORTED (" << report.diagnostic << ")\n";
    } else {
        out << "status: completed\n";
    }
    const Metrics& m = report.metrics;
    out << "velocity: max |s_dot - v*| = " << m.v_err_max << " (tol " << cfg.tol.v_tilde_max
        << ") " << pass_fail(m.velocity_ok) << "\n";
    out << "distance: max dist(P, S) = " << m.dist_max << " (tol " << cfg.tol.e_max << ") "
        << pass_fail(m.distance_ok) << "\n";
    out << "attitude: max |Theta - Theta*| = "
        << std::max({m.att_err_max[0], m.att_err_max[1], m.att_err_max[2]}) << " (tol "
        << cfg.tol.theta_tilde_max << ") " << pass_fail(m.attitude_ok) << "\n";
    out << "settling time to e_max: " << m.settling_time << " s\n";
    out << "negative rotor-force samples: " << m.negative_thrust_steps << "\n";
    out << "objectives: " << (report.objectives_met() ? "MET" : "NOT MET") << "\n";
    for (const std::string& p : report.artifacts) out << "artifact: " << p << "\n";
    return out.str();
}

int run(int argc, const char* const* argv) {
    CLI::App app{"ctcsim: coordinated trajectory control simulation for a quadcopter"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", param, values;
    Overrides overrides;
    std::vector<std::string> validate_paths;

    CLI::App* run_cmd = app.add_subcommand("run", "simulate one scenario");
    run_cmd->add_option("--config", config_path, "scenario file")->required();
    run_cmd->add_option("--out", out_dir, "output directory");
    run_cmd->add_option("--mode", overrides.mode, "controller mode: state|output");
    run_cmd->add_option("--dt", overrides.dt, "integration step override");
    run_cmd->add_option("--t-end", overrides.t_end, "duration override");

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "vary one scalar config key");
    sweep_cmd->add_option("--config", config_path, "scenario file")->required();
    sweep_cmd->add_option("--param", param, "config key to vary, e.g. observer.k")->required();
    sweep_cmd->add_option("--values", values, "comma-separated values")->required();
    sweep_cmd->add_option("--out", out_dir, "output directory");
    sweep_cmd->add_option("--mode", overrides.mode, "controller mode: state|output");
    sweep_cmd->add_option("--dt", overrides.dt, "integration step override");
    sweep_cmd->add_option("--t-end", overrides.t_end, "duration override");

    CLI::App* validate_cmd = app.add_subcommand("validate", "parse-only check");
    validate_cmd->add_option("configs", validate_paths, "scenario files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(config_path, out_dir, overrides);
        if (sweep_cmd->parsed()) return cmd_sweep(config_path, out_dir, param, values, overrides);
        return cmd_validate(validate_paths);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kIoError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kSimulationAbort;
    }
}

}  // namespace ctc::cli
