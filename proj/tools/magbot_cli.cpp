#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "magbot/beam_mech.hpp"
#include "magbot/config.hpp"
#include "magbot/errors.hpp"
#include "magbot/safety.hpp"
#include "magbot/scaling.hpp"
#include "magbot/scenario.hpp"

using namespace magbot;

namespace {

enum Exit { kOk = 0, kConfig = 2, kSolver = 3, kSafety = 4, kIo = 5 };

template <class F>
int guarded(std::ostream& err, F&& f) {
    try {
        return f();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const SolverFailure& e) {
        err << "solver failure: " << e.what() << " (residual " << format_sig9(e.residual()) << ")\n";
        return kSolver;
    } catch (const SafetyRefusal& e) {
        err << "refused: " << e.what() << '\n';
        return kSafety;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kIo;
    } catch (const std::invalid_argument& e) {
        err << "invalid argument: " << e.what() << '\n';
        return kConfig;
    }
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_one(const std::string& config, const std::string& out_dir, const std::string& env, std::ostream& out,
            std::ostream& err) {
    return guarded(err, [&] {
        Scenario sc = load_scenario(config);
        if (!env.empty()) {
            sc.env_name = env;
            sc.env = SimEnv::preset(env);
        }
        const RunResult r = run(sc);
        const RunOutput o = write_outputs(r, out_dir);
        out << config << ": " << r.waveform.size() << " samples, " << r.events.size() << " events -> " << out_dir
            << '\n';
        if (!r.safety_passed()) {
            err << config << ": safety audit failed, see " << o.safety_report_path << '\n';
            return static_cast<int>(kSafety);
        }
        return static_cast<int>(kOk);
    });
}

std::vector<std::pair<double, double>> read_measurements(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<std::pair<double, double>> rows;
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#' || line.rfind("b_mT", 0) == 0) continue;
        std::istringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ','))
            throw ConfigError(path + ":" + std::to_string(n) + ": expected b_mT,angle_deg");
        try {
            rows.emplace_back(deg2rad(std::stod(b)), std::stod(a) * 1e-3);
        } catch (const std::exception&) {
            throw ConfigError(path + ":" + std::to_string(n) + ": bad number");
        }
    }
    return rows;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation and safety toolkit for a reprogrammable magnetic soft robot"};
    app.require_subcommand(1);

    // run
    auto* run_cmd = app.add_subcommand("run", "Execute scenario files");
    std::vector<std::string> configs;
    std::string out_dir = "out";
    std::string env;
    int jobs = 1;
    run_cmd->add_option("--config,-c", configs, "Scenario file(s)")->required();
    run_cmd->add_option("--out-dir,-o", out_dir, "Output directory");
    run_cmd->add_option("--env", env, "Environment preset")->check(CLI::IsMember({"air", "oil", "ideal"}));
    run_cmd->add_option("--jobs,-j", jobs, "Scenarios run concurrently")->check(CLI::PositiveNumber);

    // safety
    auto* safety_cmd = app.add_subcommand("safety", "Audit the field categories or a waveform CSV");
    std::string waveform_path, format = "text";
    safety_cmd->add_option("--waveform", waveform_path, "Waveform CSV to audit");
    safety_cmd->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "kv"}));

    // scale
    auto* scale_cmd = app.add_subcommand("scale", "Miniaturization feasibility table");
    std::string scale_config;
    double lambda_body = 1, lambda_tent = 1, lambda_width = 1;
    scale_cmd->add_option("--config,-c", scale_config, "Config with a scaling section");
    auto* lb_opt = scale_cmd->add_option("--lambda-body", lambda_body, "Body scale factor");
    auto* lt_opt = scale_cmd->add_option("--lambda-tent", lambda_tent, "Tentacle scale factor");
    auto* lw_opt = scale_cmd->add_option("--lambda-width", lambda_width, "Inner-beam width factor");

    // characterize
    auto* char_cmd = app.add_subcommand("characterize", "Fit a deflection slope and derive EI or magnetization");
    std::string meas_path;
    double volume = 0, length = 0, ei = -1, moment = -1;
    char_cmd->add_option("--input,-i", meas_path, "CSV b_mT,angle_deg")->required();
    char_cmd->add_option("--volume", volume, "Magnetic sample volume, m^3")->required();
    char_cmd->add_option("--length", length, "Beam length, m")->required();
    auto* ei_opt = char_cmd->add_option("--ei", ei, "Known bending stiffness, N m^2");
    auto* m_opt = char_cmd->add_option("--magnetization", moment, "Known magnetization, A/m");
    ei_opt->excludes(m_opt);

    // solve-beam
    auto* beam_cmd = app.add_subcommand("solve-beam", "One-shot beam deflection query");
    std::string kind = "tentacle", beam_config, shape = "inverted_u";
    double b_mt = 0;
    beam_cmd->add_option("--kind", kind, "tentacle or inner")->check(CLI::IsMember({"tentacle", "inner"}));
    beam_cmd->add_option("--b-mT", b_mt, "Field magnitude, mT")->required();
    beam_cmd->add_option("--shape", shape, "Tentacle shape")->check(CLI::IsMember({"inverted_u", "upright_u"}));
    beam_cmd->add_option("--config,-c", beam_config, "Config with robot overrides");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfig;
    }

    if (*run_cmd) {
        const size_t n = configs.size();
        std::vector<int> codes(n, 0);
        std::vector<std::ostringstream> outs(n), errs(n);
        auto dir_for = [&](size_t i) {
            if (n == 1) return out_dir;
            return (std::filesystem::path(out_dir) / std::filesystem::path(configs[i]).stem()).string();
        };
        std::atomic<size_t> next{0};
        auto worker = [&] {
            for (size_t i = next++; i < n; i = next++) codes[i] = run_one(configs[i], dir_for(i), env, outs[i], errs[i]);
        };
        const int nt = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
        std::vector<std::thread> pool;
        for (int k = 1; k < nt; ++k) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();
        int rc = 0;
        for (size_t i = 0; i < n; ++i) {
            std::cout << outs[i].str();
            std::cerr << errs[i].str();
            if (rc == 0) rc = codes[i];
        }
        return rc;
    }

    if (*safety_cmd) {
        return guarded(std::cerr, [&] {
            std::vector<SafetyReport> reports;
            if (!waveform_path.empty()) {
                AuditOptions o;
                o.label = "waveform";
                reports.push_back(audit(parse_waveform_csv(waveform_path), o));
            } else {
                for (const auto& c : standard_categories()) reports.push_back(audit(c.spec, c.options));
            }
            std::cout << (format == "kv" ? format_report_kv(reports) : format_report_text(reports));
            bool ok = true;
            for (const auto& r : reports) ok = ok && r.passed();
            return !ok ? static_cast<int>(kSafety) : static_cast<int>(kOk);
        });
    }

    if (*scale_cmd) {
        return guarded(std::cerr, [&] {
            ScalePlan plan;
            CapacityData data;
            if (!scale_config.empty()) parse_scaling_section(read_text(scale_config), plan, data);
            if (*lb_opt) plan.lambda_body = lambda_body;
            if (*lt_opt) plan.lambda_tent = lambda_tent;
            if (*lw_opt) plan.lambda_width = lambda_width;
            plan.validate();
            std::cout << format_scale_table(plan, data);
            return static_cast<int>(kOk);
        });
    }

    if (*char_cmd) {
        return guarded(std::cerr, [&] {
            CharacterizationKnown k;
            k.v_sample = volume;
            k.l_beam = length;
            if (*ei_opt) k.ei = ei;
            if (*m_opt) k.m_sample = moment;
            const CharacterizationFit f = characterize(read_measurements(meas_path), k);
            std::cout << "slope_rad_per_T=" << format_sig9(f.slope) << '\n';
            std::cout << (f.derived_is_ei ? "ei_Nm2=" : "magnetization_A_per_m=") << format_sig9(f.derived) << '\n';
            std::cout << "relative_rms_residual=" << format_sig9(f.residual) << '\n';
            return static_cast<int>(kOk);
        });
    }

    if (*beam_cmd) {
        return guarded(std::cerr, [&] {
            const Robot robot = beam_config.empty() ? default_robot() : parse_robot_section(read_text(beam_config));
            const double b = b_mt * 1e-3;
            if (kind == "tentacle") {
                const double bz = shape == "inverted_u" ? b : -b;
                const TentacleDeflection t = solve_tentacle(bz, TentacleParams::from_robot(robot));
                const auto [dy, dz] = t.tip_offset();
                std::cout << "tip_angle_rad=" << format_sig9(t.tip_angle()) << '\n';
                std::cout << "tip_offset_y_m=" << format_sig9(dy) << '\n';
                std::cout << "tip_offset_z_m=" << format_sig9(dz) << '\n';
                std::cout << "chord_m=" << format_sig9(t.chord()) << '\n';
                std::cout << "residual=" << format_sig9(t.residual) << '\n';
            } else {
                const InnerBeamParams p = InnerBeamParams::from_robot(robot);
                const double g = solve_inner_beam(b, p);
                std::cout << "gamma_rad=" << format_sig9(g) << '\n';
                std::cout << "contact=" << (g >= robot.inner_beam.gamma_contact ? "true" : "false") << '\n';
                std::cout << "contact_field_T=" << format_sig9(inner_contact_field(p, robot.inner_beam.gamma_contact))
                          << '\n';
            }
            return static_cast<int>(kOk);
        });
    }
    return kOk;
}
