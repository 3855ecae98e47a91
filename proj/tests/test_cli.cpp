#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "magbot/config.hpp"
#include "magbot/errors.hpp"
#include "magbot/scenario.hpp"
#include "support.hpp"

using namespace magbot;
namespace fs = std::filesystem;

namespace {

const std::string kScenarios = std::string(MAGBOT_SOURCE_DIR) + "/scenarios";

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("magbot_test_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

int count_lines(const std::string& s) {
    int n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

int cli(const std::string& args) {
    const std::string cmd = std::string("\"") + MAGBOT_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

Scenario scenario(const std::string& steps) {
    return parse_scenario("{\"environment\": \"oil\", \"steps\": [" + steps + "]}", kScenarios);
}

// values carried at 9 significant digits, the precision of the file format
double q9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.8e", v);
    return std::strtod(buf, nullptr);
}

Waveform random_waveform(ts::Gen& gen, int n) {
    Waveform w;
    const Frame frames[] = {Frame::Global, Frame::Intermediate, Frame::Local};
    double t = 0;
    for (int i = 0; i < n; ++i) {
        WaveformSample s;
        t += gen.uniform(1e-6, 1e-1);
        s.t = q9(t);
        s.fs.b = gen.vec3(40e-3).unaryExpr(&q9);
        s.fs.grad = gen.grad(0.5).unaryExpr(&q9);
        s.fs.frame = frames[gen.integer(0, 2)];
        s.tag = gen.integer(0, 1) ? "roll_length" : "function_cutting";
        w.samples.push_back(s);
    }
    return w;
}

bool same_sample(const WaveformSample& a, const WaveformSample& b) {
    return a.t == b.t && a.fs.b == b.fs.b && a.fs.grad == b.fs.grad && a.fs.frame == b.fs.frame && a.tag == b.tag;
}

}  // namespace

TEST_CASE("waveform csv round trip") {
    ts::Gen gen(91);
    for (int k = 0; k < 30; ++k) {
        const Waveform w = random_waveform(gen, gen.integer(0, 40));
        std::stringstream ss;
        write_waveform_csv(w, ss);
        const Waveform r = read_waveform_csv(ss);
        REQUIRE(r.size() == w.size());
        for (size_t i = 0; i < w.size(); ++i) CHECK(same_sample(w.samples[i], r.samples[i]));
        // the text form is a fixed point
        std::stringstream again;
        write_waveform_csv(r, again);
        std::stringstream first;
        write_waveform_csv(w, first);
        CHECK(again.str() == first.str());
    }
}

TEST_CASE("waveform csv layout") {
    Waveform w;
    w.samples.push_back(WaveformSample{});
    std::stringstream ss;
    write_waveform_csv(w, ss);
    std::string header, row;
    std::getline(ss, header);
    std::getline(ss, row);
    CHECK(header == kWaveformCsvHeader);
    int commas = 0;
    for (char c : row) commas += c == ',';
    CHECK(commas == 10);
    std::istringstream cells(row);
    std::string cell;
    for (int i = 0; i < 9; ++i) {
        std::getline(cells, cell, ',');
        CHECK(std::strtod(cell.c_str(), nullptr) == 0.0);
    }
    CHECK(row.find("global") != std::string::npos);
    CHECK(format_sig9(0.0) == format_sig9(-0.0 + 0.0));
    CHECK(format_sig9(1.5e-3) == "1.50000000e-03");
}

TEST_CASE("malformed waveform csv is rejected") {
    std::stringstream bad_header("t,B\n0,0\n");
    CHECK_THROWS_AS(read_waveform_csv(bad_header), ConfigError);
    std::stringstream short_row(std::string(kWaveformCsvHeader) + "\n0,1,2\n");
    CHECK_THROWS_AS(read_waveform_csv(short_row), ConfigError);
    CHECK_THROWS_AS(parse_waveform_csv("/nonexistent/waveform.csv"), IoError);
}

TEST_CASE("roll output has 200 rows per period and constant magnitude") {
    const Scenario sc =
        scenario(R"({"type": "gait", "gait": "roll_length", "b_mT": 15, "f_Hz": 0.5, "duration_s": 4})");
    const RunResult r = run(sc);
    const fs::path dir = scratch("roll");
    const RunOutput o = write_outputs(r, dir.string());
    const Waveform w = parse_waveform_csv(o.waveform_path);
    REQUIRE(w.size() >= 400);
    int first_period = 0;
    for (const auto& s : w.samples) {
        first_period += s.t < 2.0 - 1e-12;
        CHECK(s.fs.b.norm() == ts::approx(15e-3).epsilon(1e-8));
    }
    CHECK(first_period == 200);
    CHECK(r.safety_passed());
    CHECK(r.activity() == std::vector<std::string>{"gait:roll_length"});
}

TEST_CASE("empty scenario writes header-only files") {
    const RunResult r = run(scenario(""));
    CHECK(r.waveform.empty());
    CHECK(r.trajectory.empty());
    const fs::path dir = scratch("empty");
    const RunOutput o = write_outputs(r, dir.string());
    CHECK(count_lines(slurp(o.waveform_path)) == 1);
    CHECK(count_lines(slurp(o.trajectory_path)) == 1);
    CHECK(slurp(o.event_log_path).empty());
    CHECK(fs::exists(o.safety_report_path));
}

TEST_CASE("dispensing above threshold opens the valve") {
    const RunResult r = run(scenario(R"({"type": "set_mode", "phi_deg": 90},
                                        {"type": "function", "mode": "drug_dispensing", "b_mT": 15, "duration_s": 2})"));
    CHECK(r.final_state.mode == Mode::DrugDispensing);
    bool open = false;
    for (const auto& e : r.events) open = open || (e.kind == "threshold" && e.detail.rfind("opening > 0", 0) == 0);
    CHECK(open);
    const RunResult low = run(scenario(R"({"type": "set_mode", "phi_deg": 90},
                                          {"type": "function", "mode": "drug_dispensing", "b_mT": 2, "duration_s": 2})"));
    bool closed = false;
    for (const auto& e : low.events) closed = closed || (e.kind == "threshold" && e.detail.rfind("opening = 0", 0) == 0);
    CHECK(closed);
}

TEST_CASE("shipped multi-step scenario") {
    const Scenario sc = load_scenario(kScenarios + "/mission.json");
    const RunResult r = run(sc);
    const std::vector<std::string> expect = {
        "gait:roll_length",      "function:drug_dispensing", "demagnetize:locomotion",
        "gait:crawl", "function:cutting",         "function:gripping_storage",
        "demagnetize:locomotion", "gait:crawl"};
    const std::vector<std::string> got = r.activity();
    CHECK(got == expect);
    CHECK(r.safety_passed());
    CHECK(r.final_state.mode == Mode::Locomotion);
    for (size_t i = 1; i < r.waveform.size(); ++i) CHECK(r.waveform.samples[i].t >= r.waveform.samples[i - 1].t);
}

TEST_CASE("invalid scenarios name the step") {
    auto step_of = [](const std::string& steps) {
        try {
            run(scenario(steps));
        } catch (const ConfigError& e) {
            return e.step_index();
        }
        return -100;
    };
    // function mode without reprogramming
    CHECK(step_of(R"({"type": "wait", "duration_s": 1},
                     {"type": "function", "mode": "cutting", "b_mT": 20, "duration_s": 1})") == 1);
    // crawling outside the locomotion mode
    CHECK(step_of(R"({"type": "set_mode", "mode": "cutting"},
                     {"type": "gait", "gait": "crawl", "cycles": 1, "f_Hz": 1})") == 1);
    CHECK(step_of(R"({"type": "gait", "gait": "roll_length", "b_mT": 15, "f_Hz": -1, "duration_s": 1})") == 0);
    CHECK(step_of(R"({"type": "gait", "gait": "roll_length", "b_mT": 80, "f_Hz": 1, "duration_s": 1})") == 0);
    CHECK(step_of(R"({"type": "wait", "duration_s": 1}, {"type": "dance"})") == 1);
    CHECK(step_of(R"({"type": "wait"})") == 0);
    CHECK_THROWS_AS(parse_scenario("{not json", "."), ConfigError);
    CHECK_THROWS_AS(parse_scenario(R"({"bogus": 1})", "."), ConfigError);
    CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), IoError);
}

TEST_CASE("interlocks refuse before anything is written") {
    // spin walk at the dispensing threshold
    const Scenario sc = scenario(R"({"type": "set_mode", "mode": "drug_dispensing"},
                                    {"type": "gait", "gait": "spin_walk", "steps": 2, "b_mT": 4, "f_Hz": 1,
                                     "mode": "drug_dispensing"})");
    CHECK_THROWS_AS(run(sc), SafetyRefusal);
    const fs::path dir = scratch("refused");
    spit(dir / "s.json", R"({"steps": [{"type": "set_mode", "mode": "drug_dispensing"},
        {"type": "gait", "gait": "spin_walk", "steps": 2, "b_mT": 4, "f_Hz": 1, "mode": "drug_dispensing"}]})");
    CHECK(cli("run --config \"" + (dir / "s.json").string() + "\" --out-dir \"" + (dir / "out").string() + "\"") == 4);
    CHECK_FALSE(fs::exists(dir / "out" / "waveform.csv"));
    // reprogramming peak above the hard coercivity
    CHECK_THROWS_AS(run(parse_scenario(R"({"reprogram": {"b_mag": 0.1}, "steps": [{"type": "set_mode", "phi_deg": 90}]})")),
                    SafetyRefusal);
}

TEST_CASE("identical runs give identical bytes") {
    const Scenario sc = load_scenario(kScenarios + "/mission.json");
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    const RunOutput oa = write_outputs(run(sc), a.string());
    const RunOutput ob = write_outputs(run(sc), b.string());
    for (const auto& [pa, pb] : {std::pair{oa.waveform_path, ob.waveform_path},
                                 std::pair{oa.trajectory_path, ob.trajectory_path},
                                 std::pair{oa.event_log_path, ob.event_log_path},
                                 std::pair{oa.safety_report_path, ob.safety_report_path}}) {
        const std::string x = slurp(pa), y = slurp(pb);
        CHECK_FALSE(x.empty());
        CHECK(x == y);
    }
}

TEST_CASE("command line exit codes") {
    const fs::path dir = scratch("exit");
    const std::string out = " --out-dir \"" + (dir / "out").string() + "\"";
    CHECK(cli("run --config \"" + kScenarios + "/mission.json\"" + out) == 0);
    CHECK(fs::exists(dir / "out" / "waveform.csv"));
    CHECK(fs::exists(dir / "out" / "safety_report.txt"));

    spit(dir / "bad.json", R"({"steps": [{"type": "function", "mode": "cutting", "b_mT": 20, "duration_s": 1}]})");
    CHECK(cli("run --config \"" + (dir / "bad.json").string() + "\"" + out) == 2);
    CHECK(cli("run --config /nonexistent/x.json" + out) == 5);
    CHECK(cli("no-such-command") == 2);
    CHECK(cli("run") == 2);

    // the standard field categories include a failing step magnetization
    CHECK(cli("safety") == 4);
    CHECK(cli("safety --format kv") == 4);
    CHECK(cli("safety --waveform /nonexistent/w.csv") == 5);
    spit(dir / "roll.json", R"({"steps": [{"type": "gait", "gait": "roll_length", "b_mT": 15, "f_Hz": 0.5, "duration_s": 4}]})");
    CHECK(cli("run --config \"" + (dir / "roll.json").string() + "\" --out-dir \"" + (dir / "roll").string() + "\"") == 0);
    CHECK(cli("safety --waveform \"" + (dir / "roll" / "waveform.csv").string() + "\"") == 0);

    spit(dir / "meas.csv", "b_mT,angle_deg\n0,0\n1,0.5\n2,1.0\n");
    CHECK(cli("characterize --input \"" + (dir / "meas.csv").string() + "\" --volume 7e-9 --length 9e-3 --ei 1e-7") ==
          0);
    CHECK(cli("characterize --input /nonexistent/m.csv --volume 7e-9 --length 9e-3 --ei 1e-7") == 5);
    CHECK(cli("characterize --input \"" + (dir / "meas.csv").string() + "\" --volume 7e-9 --length 9e-3") == 2);
    CHECK(cli("scale") == 0);
    CHECK(cli("scale --lambda-body 0") == 2);
    CHECK(cli("solve-beam --b-mT 15") == 0);
    CHECK(cli("solve-beam --kind inner --b-mT 1") == 0);
}

TEST_CASE("batch mode isolates outputs") {
    const fs::path dir = scratch("batch");
    spit(dir / "a.json", R"({"steps": [{"type": "gait", "gait": "roll_length", "b_mT": 15, "f_Hz": 0.5, "duration_s": 2}]})");
    spit(dir / "b.json", R"({"steps": [{"type": "gait", "gait": "crawl", "cycles": 2, "f_Hz": 1}]})");
    const std::string cfgs = " --config \"" + (dir / "a.json").string() + "\" --config \"" + (dir / "b.json").string() + "\"";
    CHECK(cli("run" + cfgs + " --jobs 2 --out-dir \"" + (dir / "par").string() + "\"") == 0);
    CHECK(cli("run" + cfgs + " --jobs 1 --out-dir \"" + (dir / "seq").string() + "\"") == 0);
    for (const char* name : {"a", "b"})
        for (const char* f : {"waveform.csv", "trajectory.csv", "events.log", "safety_report.txt"}) {
            const fs::path p = dir / "par" / name / f, q = dir / "seq" / name / f;
            REQUIRE(fs::exists(p));
            CHECK(slurp(p) == slurp(q));
        }
    CHECK(slurp(dir / "par" / "a" / "events.log") != slurp(dir / "par" / "b" / "events.log"));
}
