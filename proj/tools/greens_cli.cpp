#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <thread>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "greens/errors.hpp"
#include "greens/experiments.hpp"

namespace fs = std::filesystem;
using namespace greens;

namespace {

enum Exit { ok = 0, tolerance = 1, config = 2, numerical = 3 };

struct Flags {
    std::string out;
    std::string format = "csv";
    int jobs = 1;
    double tol_scale = 1.0;
};

void add_flags(CLI::App* app, Flags& f) {
    app->add_option("--out", f.out, "output directory");
    app->add_option("--format", f.format, "table format")->check(CLI::IsMember({"csv", "json"}));
    app->add_option("--jobs", f.jobs, "scenarios run in parallel")->check(CLI::PositiveNumber);
    app->add_option("--tol-scale", f.tol_scale, "multiplies every declared tolerance")->check(CLI::PositiveNumber);
}

void setup_logging() {
    auto log = spdlog::stderr_color_mt("greens");
    spdlog::set_default_logger(log);
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::warn);
    if (const char* env = std::getenv("GREENS_LOG")) {
        const auto lvl = spdlog::level::from_str(env);
        // from_str maps unknown names to off
        if (lvl == spdlog::level::off && std::string(env) != "off") spdlog::warn("GREENS_LOG={} not recognized", env);
        else spdlog::set_level(lvl);
    }
}

struct Outcome {
    int code = ok;
    std::optional<ExperimentResult> result;
    std::string message;
    double seconds = 0.0;
};

Outcome execute(const Scenario& s, const Flags& f) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        spdlog::info("running {} ({}/{})", s.name, s.kind, s.mode);
        o.result = run_scenario(s, RunOptions{f.tol_scale});
        o.code = o.result->passed() ? ok : tolerance;
    } catch (const NumericalError& e) {
        o.code = numerical;
        o.message = std::string(e.kind()) + " in " + e.operation() + ": " + e.what();
    } catch (const ConfigError& e) {
        o.code = config;
        o.message = e.what();
    } catch (const DomainError& e) {
        o.code = config;
        o.message = std::string("invalid parameters: ") + e.what();
    }
    o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return o;
}

void report(const Scenario& s, const Outcome& o) {
    if (o.code == numerical) {
        std::cout << "ERROR " << s.name << ": numerical failure: " << o.message << "\n";
        return;
    }
    if (o.code == config) {
        std::cout << "ERROR " << s.name << ": " << o.message << "\n";
        return;
    }
    const auto& r = *o.result;
    std::cout << (r.passed() ? "PASS " : "FAIL ") << s.name << " (" << r.checks.size() << " checks, "
              << std::fixed << std::setprecision(1) << o.seconds << " s)\n";
    std::cout.unsetf(std::ios::fixed);
    for (const auto& c : r.checks) {
        if (c.passed) spdlog::debug("  ok   {}: {:.3e} <= {:.3e}", c.name, c.value, c.tol);
        else std::cout << "  fail " << c.name << ": " << std::setprecision(4) << c.value << " > " << c.tol << "\n";
    }
}

int write(const Outcome& o, const std::string& dir, TableFormat fmt) {
    if (!o.result) return o.code;
    try {
        write_result(*o.result, dir, fmt);
        spdlog::info("wrote {}", dir);
    } catch (const std::exception& e) {
        std::cout << "ERROR output: " << e.what() << "\n";
        return config;
    }
    return o.code;
}

int cmd_run(const std::string& path, const Flags& f) {
    Scenario s;
    TableFormat fmt;
    try {
        fmt = parse_format(f.format);
        s = load_scenario(path);
    } catch (const ConfigError& e) {
        std::cout << "ERROR config: " << e.what() << "\n";
        return config;
    }
    const Outcome o = execute(s, f);
    report(s, o);
    if (o.code == config || o.code == numerical) return o.code;
    const std::string dir = !f.out.empty() ? f.out : !s.output_dir.empty() ? s.output_dir : ("results/" + s.name);
    return write(o, dir, fmt);
}

int cmd_verify(const std::string& dir, const Flags& f) {
    std::vector<fs::path> files;
    std::error_code ec;
    for (const auto& e : fs::directory_iterator(dir, ec))
        if (e.is_regular_file() && (e.path().extension() == ".yaml" || e.path().extension() == ".yml"))
            files.push_back(e.path());
    if (ec || files.empty()) {
        std::cout << "ERROR config: no scenarios under " << dir << "\n";
        return config;
    }
    std::sort(files.begin(), files.end());
    const TableFormat fmt = parse_format(f.format);

    std::vector<std::optional<Scenario>> scen(files.size());
    std::vector<Outcome> out(files.size());
    int code = ok;
    for (std::size_t i = 0; i < files.size(); ++i) {
        try {
            scen[i] = load_scenario(files[i].string());
        } catch (const ConfigError& e) {
            std::cout << "ERROR config: " << e.what() << "\n";
            code = config;
        }
    }
    for (std::size_t i = 0; i < files.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (scen[i] && scen[j] && scen[i]->name == scen[j]->name) {
                std::cout << "ERROR config: duplicate scenario name " << scen[i]->name << "\n";
                return config;
            }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < files.size();)
            if (scen[i]) out[i] = execute(*scen[i], f);
    };
    std::vector<std::thread> pool;
    for (int k = 1; k < std::min<int>(f.jobs, int(files.size())); ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    const fs::path root = f.out.empty() ? fs::path("verify_out") : fs::path(f.out);
    bool numeric = false, failed = false;
    int passed = 0, ran = 0;
    for (std::size_t i = 0; i < files.size(); ++i) {
        if (!scen[i]) continue;
        ++ran;
        report(*scen[i], out[i]);
        const int c = write(out[i], (root / scen[i]->name).string(), fmt);
        if (c == numerical) numeric = true;
        else if (c == config) code = config;
        else if (c == tolerance) failed = true;
        else ++passed;
    }
    std::cout << passed << "/" << files.size() << " scenarios passed";
    if (ran < int(files.size())) std::cout << " (" << files.size() - ran << " not run)";
    std::cout << "\n";
    if (code == config) return config;
    if (numeric) return numerical;
    return failed ? tolerance : ok;
}

void cmd_catalog() {
    auto show = [](const char* title, const std::vector<CatalogEntry>& cat) {
        std::cout << title << ":\n";
        for (const auto& e : cat) {
            std::cout << "  " << e.name;
            for (const auto& p : e.params) std::cout << " " << p;
            std::cout << "\n      " << e.description << "\n";
        }
    };
    show("potentials", potential_catalog());
    show("surfaces", surface_catalog());
    show("experiments (kind followed by modes)", experiment_catalog());
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"Green's function experiments"};
    app.set_version_flag("--version", GREENS_VERSION);
    app.require_subcommand(1);
    Flags f;
    std::string config_path, fixtures_dir;

    auto* run = app.add_subcommand("run", "run one scenario");
    run->add_option("config", config_path, "scenario file")->required();
    add_flags(run, f);
    auto* cat = app.add_subcommand("list-catalog", "list potentials, surfaces and experiment kinds");
    auto* ver = app.add_subcommand("verify", "run every scenario in a directory");
    ver->add_option("fixtures", fixtures_dir, "directory of scenario files")->required();
    add_flags(ver, f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int c = app.exit(e);
        return c == 0 ? ok : config;
    }
    if (*run) return cmd_run(config_path, f);
    if (*ver) return cmd_verify(fixtures_dir, f);
    if (*cat) cmd_catalog();
    return ok;
}
