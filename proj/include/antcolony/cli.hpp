#pragma once

// Command-line front end shared by tools/antsim and the tests.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "antcolony/engine.hpp"
#include "antcolony/habitat.hpp"
#include "antcolony/metrics.hpp"

namespace antcolony::cli {

struct SwapSpec {
    std::uint64_t step = 0;
    std::string path;

    friend bool operator==(const SwapSpec&, const SwapSpec&) = default;
};

inline SwapSpec parse_swap(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == text.size()) {
        throw std::invalid_argument("malformed swap spec '" + std::string(text) +
                                    "' (expected <step>:<path>)");
    }
    SwapSpec s;
    const auto digits = text.substr(0, colon);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), s.step);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
        throw std::invalid_argument("malformed swap spec '" + std::string(text) +
                                    "': step must be a non-negative integer");
    }
    s.path = std::string(text.substr(colon + 1));
    return s;
}

struct RunConfig {
    std::string habitat_path;
    std::string out_dir = "out";
    std::uint64_t iterations = 1000;
    std::uint64_t snapshot_every = 0;          // 0 = final step only
    std::vector<std::uint64_t> snapshot_at;    // extra snapshot steps
    std::optional<SwapSpec> swap;
    bool dump_fields = false;

    // Model parameters, as given by the user (weights are normalised later).
    double eta = 0.07;
    double kappa = 0.015;
    double beta = 3.5;
    double delta = 0.2;
    double p = 1.5;
    double density = 0.3;
    double a = 1.0 / 3.0;
    double b = 1.0 / 3.0;
    double c = 1.0 / 3.0;
    Metric metric = Metric::Statistical;
    WindowPairing pairing = WindowPairing::Previous;
    bool allow_stacking = false;
    std::uint64_t seed = 1;

    Params to_params() const {
        Params prm;
        prm.eta = eta;
        prm.k = kappa;
        prm.beta = beta;
        prm.delta = delta;
        prm.p = p;
        prm.density = density;
        prm.weights = MetricWeights::normalized(a, b, c);
        prm.metric = metric;
        prm.pairing = pairing;
        prm.exclusion = !allow_stacking;
        prm.seed = seed;
        prm.validate();
        return prm;
    }

    /// Sorted snapshot steps implied by snapshot_every / snapshot_at.
    std::vector<std::uint64_t> snapshot_steps() const {
        std::set<std::uint64_t> steps(snapshot_at.begin(), snapshot_at.end());
        if (snapshot_every > 0) {
            for (std::uint64_t s = snapshot_every; s <= iterations; s += snapshot_every) steps.insert(s);
        }
        if (iterations > 0) steps.insert(iterations);
        return {steps.begin(), steps.end()};
    }

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// ---------------------------------------------------------------------------
// config.txt: one key=value per line.

namespace detail {

inline std::string format_double(double v) {
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw std::invalid_argument("config: bad value '" + std::string(text) + "' for " +
                                    std::string(key));
    }
    return value;
}

inline bool parse_bool(std::string_view key, std::string_view text) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw std::invalid_argument("config: bad boolean '" + std::string(text) + "' for " + std::string(key));
}

inline std::vector<std::uint64_t> parse_step_list(std::string_view key, std::string_view text) {
    std::vector<std::uint64_t> steps;
    while (!text.empty()) {
        const auto comma = text.find(',');
        steps.push_back(parse_number<std::uint64_t>(key, text.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return steps;
}

}  // namespace detail

inline std::string serialize_config(const RunConfig& cfg) {
    using detail::format_double;
    std::ostringstream out;
    out << "habitat=" << cfg.habitat_path << '\n'
        << "out=" << cfg.out_dir << '\n'
        << "iters=" << cfg.iterations << '\n'
        << "seed=" << cfg.seed << '\n'
        << "eta=" << format_double(cfg.eta) << '\n'
        << "kappa=" << format_double(cfg.kappa) << '\n'
        << "beta=" << format_double(cfg.beta) << '\n'
        << "delta=" << format_double(cfg.delta) << '\n'
        << "p=" << format_double(cfg.p) << '\n'
        << "density=" << format_double(cfg.density) << '\n'
        << "a=" << format_double(cfg.a) << '\n'
        << "b=" << format_double(cfg.b) << '\n'
        << "c=" << format_double(cfg.c) << '\n'
        << "metric=" << metric_name(cfg.metric) << '\n'
        << "pairing=" << pairing_name(cfg.pairing) << '\n'
        << "allow_stacking=" << (cfg.allow_stacking ? "true" : "false") << '\n'
        << "swap=";
    if (cfg.swap) out << cfg.swap->step << ':' << cfg.swap->path;
    out << '\n' << "snapshot_every=" << cfg.snapshot_every << '\n' << "snapshot_at=";
    for (std::size_t i = 0; i < cfg.snapshot_at.size(); ++i) out << (i ? "," : "") << cfg.snapshot_at[i];
    out << '\n' << "dump_fields=" << (cfg.dump_fields ? "true" : "false") << '\n';
    return out.str();
}

/// Reads key=value lines written by serialize_config. Blank lines and '#' comments are skipped.
inline RunConfig parse_config(std::string_view text, RunConfig cfg = {}) {
    using namespace detail;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("config: missing '=' in line: " + line);
        const std::string key = line.substr(0, eq);
        const std::string_view val = std::string_view(line).substr(eq + 1);
        if (key == "habitat") cfg.habitat_path = val;
        else if (key == "out") cfg.out_dir = val;
        else if (key == "iters") cfg.iterations = parse_number<std::uint64_t>(key, val);
        else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, val);
        else if (key == "eta") cfg.eta = parse_number<double>(key, val);
        else if (key == "kappa") cfg.kappa = parse_number<double>(key, val);
        else if (key == "beta") cfg.beta = parse_number<double>(key, val);
        else if (key == "delta") cfg.delta = parse_number<double>(key, val);
        else if (key == "p") cfg.p = parse_number<double>(key, val);
        else if (key == "density") cfg.density = parse_number<double>(key, val);
        else if (key == "a") cfg.a = parse_number<double>(key, val);
        else if (key == "b") cfg.b = parse_number<double>(key, val);
        else if (key == "c") cfg.c = parse_number<double>(key, val);
        else if (key == "metric") cfg.metric = parse_metric(val);
        else if (key == "pairing") cfg.pairing = parse_pairing(val);
        else if (key == "allow_stacking") cfg.allow_stacking = parse_bool(key, val);
        else if (key == "swap") cfg.swap = val.empty() ? std::nullopt : std::optional(parse_swap(val));
        else if (key == "snapshot_every") cfg.snapshot_every = parse_number<std::uint64_t>(key, val);
        else if (key == "snapshot_at") cfg.snapshot_at = parse_step_list(key, val);
        else if (key == "dump_fields") cfg.dump_fields = parse_bool(key, val);
        else throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// Synthetic habitats

/// Centred plus sign of `fg` on `bg`; each arm is `thickness` cells wide.
inline Habitat gen_cross(std::size_t width, std::size_t height, std::uint8_t fg, std::uint8_t bg,
                         std::size_t thickness) {
    if (width < kMinHabitatSide || height < kMinHabitatSide) {
        throw std::invalid_argument("cross: dimensions must be at least 3x3");
    }
    if (fg == bg) throw std::invalid_argument("cross: foreground and background must differ");
    if (thickness == 0 || thickness > width || thickness > height) {
        throw std::invalid_argument("cross: arm thickness " + std::to_string(thickness) +
                                    " must lie in [1, min(width, height)]");
    }
    const std::size_t x0 = (width - thickness) / 2;
    const std::size_t y0 = (height - thickness) / 2;
    Gray8 g(width, height, bg);
    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            const bool in_col = x >= x0 && x < x0 + thickness;
            const bool in_row = y >= y0 && y < y0 + thickness;
            if (in_col || in_row) g(x, y) = fg;
        }
    }
    return Habitat(std::move(g));
}

// ---------------------------------------------------------------------------
// Commands

struct MetricsCommand {
    Window9 first{};
    Window9 second{};
    double a = 1.0 / 3.0, b = 1.0 / 3.0, c = 1.0 / 3.0;
};

struct GenCommand {
    enum class Kind { Cross, Homogeneous } kind = Kind::Cross;
    std::size_t width = 100;
    std::size_t height = 100;
    unsigned fg = 0;
    unsigned bg = 255;
    std::size_t thickness = 20;
    unsigned value = 128;
    std::string out_path;
};

using Command = std::variant<RunConfig, MetricsCommand, GenCommand>;

/// Thrown for bad command lines; `what()` carries the message and `usage` the help text.
class UsageError : public std::invalid_argument {
public:
    UsageError(const std::string& what, std::string usage_text)
        : std::invalid_argument(what), usage(std::move(usage_text)) {}
    std::string usage;
};

/// Raised for --help; carries the help text.
struct HelpRequested {
    std::string text;
};

namespace detail {

inline std::uint8_t to_pixel(unsigned v, const char* what) {
    if (v > 255) throw std::invalid_argument(std::string(what) + " must lie in [0,255]");
    return static_cast<std::uint8_t>(v);
}

}  // namespace detail

/// Parses argv (without the program name) into a command.
inline Command parse_args(const std::vector<std::string>& args) {
    CLI::App app{"Ant colony simulator on grayscale image habitats", "antsim"};
    app.require_subcommand(1);

    // run
    auto* run_cmd = app.add_subcommand("run", "Simulate a colony and write snapshots");
    std::optional<std::string> config_path, habitat, out, swap, metric, pairing;
    std::optional<std::uint64_t> iters, seed, snap_every;
    std::optional<double> eta, kappa, beta, delta, p, density, a, b, c;
    std::vector<std::uint64_t> snap_at;
    bool allow_stacking = false, dump_fields = false;
    run_cmd->add_option("--config", config_path, "key=value file (e.g. a previous config.txt)");
    run_cmd->add_option("--habitat", habitat, "PGM habitat image");
    run_cmd->add_option("--out", out, "output directory");
    run_cmd->add_option("--iters", iters, "number of time steps");
    run_cmd->add_option("--seed", seed, "RNG seed");
    run_cmd->add_option("--eta", eta, "base deposition rate");
    run_cmd->add_option("--kappa", kappa, "evaporation rate");
    run_cmd->add_option("--beta", beta, "osmotropotaxic sensitivity");
    run_cmd->add_option("--delta", delta, "inverse sensory capacity");
    run_cmd->add_option("--p", p, "heterogeneity gain");
    run_cmd->add_option("--density", density, "ants per cell");
    run_cmd->add_option("--a", a, "mean-term weight");
    run_cmd->add_option("--b", b, "variance-term weight");
    run_cmd->add_option("--c", c, "histogram-term weight");
    run_cmd->add_option("--metric", metric, "heterogeneity metric: stat | ulam");
    run_cmd->add_option("--pairing", pairing, "window pair: prev | flat");
    run_cmd->add_flag("--allow-stacking", allow_stacking, "let several ants share a cell");
    run_cmd->add_option("--swap", swap, "replace the habitat before a step: <step>:<path>");
    run_cmd->add_option("--snapshot-every", snap_every, "snapshot period (0 = final only)");
    run_cmd->add_option("--snapshot-at", snap_at, "extra snapshot steps")->delimiter(',');
    run_cmd->add_flag("--dump-fields", dump_fields, "also write raw field_NNNNNN.bin dumps");

    // metrics
    auto* metrics_cmd =
        app.add_subcommand("metrics", "Print every intermediate of both measures for two 3x3 windows");
    std::vector<unsigned> pixels;
    double ma = 1.0 / 3.0, mb = 1.0 / 3.0, mc = 1.0 / 3.0;
    metrics_cmd->add_option("pixels", pixels, "18 intensities: first window then second, raster order")
        ->required()
        ->expected(18);
    metrics_cmd->add_option("--a", ma, "mean-term weight");
    metrics_cmd->add_option("--b", mb, "variance-term weight");
    metrics_cmd->add_option("--c", mc, "histogram-term weight");

    // gen
    auto* gen_cmd = app.add_subcommand("gen", "Write a synthetic PGM habitat");
    GenCommand gen;
    std::string kind;
    gen_cmd->add_option("kind", kind, "cross | homogeneous")
        ->required()
        ->check(CLI::IsMember({"cross", "homogeneous"}));
    gen_cmd->add_option("--out", gen.out_path, "output PGM path")->required();
    gen_cmd->add_option("--width", gen.width, "image width");
    gen_cmd->add_option("--height", gen.height, "image height");
    gen_cmd->add_option("--fg", gen.fg, "cross intensity");
    gen_cmd->add_option("--bg", gen.bg, "background intensity");
    gen_cmd->add_option("--thickness", gen.thickness, "cross arm thickness");
    gen_cmd->add_option("--value", gen.value, "homogeneous intensity");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested{app.help()};
    } catch (const CLI::CallForAllHelp&) {
        throw HelpRequested{app.help("", CLI::AppFormatMode::All)};
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what(), app.help("", CLI::AppFormatMode::All));
    }

    try {
        if (metrics_cmd->parsed()) {
            MetricsCommand m;
            for (std::size_t i = 0; i < 9; ++i) {
                m.first[i] = detail::to_pixel(pixels[i], "pixel");
                m.second[i] = detail::to_pixel(pixels[9 + i], "pixel");
            }
            m.a = ma, m.b = mb, m.c = mc;
            MetricWeights::normalized(m.a, m.b, m.c);
            return m;
        }
        if (gen_cmd->parsed()) {
            gen.kind = kind == "cross" ? GenCommand::Kind::Cross : GenCommand::Kind::Homogeneous;
            detail::to_pixel(gen.fg, "--fg");
            detail::to_pixel(gen.bg, "--bg");
            detail::to_pixel(gen.value, "--value");
            return gen;
        }

        RunConfig cfg;
        if (config_path) cfg = parse_config(read_file_bytes(*config_path));
        if (habitat) cfg.habitat_path = *habitat;
        if (out) cfg.out_dir = *out;
        if (iters) cfg.iterations = *iters;
        if (seed) cfg.seed = *seed;
        if (eta) cfg.eta = *eta;
        if (kappa) cfg.kappa = *kappa;
        if (beta) cfg.beta = *beta;
        if (delta) cfg.delta = *delta;
        if (p) cfg.p = *p;
        if (density) cfg.density = *density;
        if (a) cfg.a = *a;
        if (b) cfg.b = *b;
        if (c) cfg.c = *c;
        if (metric) cfg.metric = parse_metric(*metric);
        if (pairing) cfg.pairing = parse_pairing(*pairing);
        if (allow_stacking) cfg.allow_stacking = true;
        if (swap) cfg.swap = parse_swap(*swap);
        if (snap_every) cfg.snapshot_every = *snap_every;
        if (!snap_at.empty()) cfg.snapshot_at = snap_at;
        if (dump_fields) cfg.dump_fields = true;

        if (cfg.habitat_path.empty()) throw std::invalid_argument("run: --habitat is required");
        cfg.to_params();  // validates
        return cfg;
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception& e) {
        throw UsageError(e.what(), app.help("", CLI::AppFormatMode::All));
    }
}

// ---------------------------------------------------------------------------
// Execution

inline std::string snapshot_name(std::uint64_t step, std::string_view stem = "snap",
                                 std::string_view ext = ".pgm") {
    std::ostringstream name;
    name << stem << '_' << std::setw(6) << std::setfill('0') << step << ext;
    return name.str();
}

/// Runs a configured experiment; returns the process exit status.
inline int run_experiment(const RunConfig& cfg, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    namespace fs = std::filesystem;
    try {
        const Params prm = cfg.to_params();
        Habitat habitat = load_pgm_file(cfg.habitat_path);

        RunSchedule sched;
        sched.total_steps = cfg.iterations;
        sched.snapshot_steps = cfg.snapshot_steps();
        if (cfg.swap) sched.swaps.emplace_back(cfg.swap->step, load_pgm_file(cfg.swap->path));
        sched.validate(habitat);

        const fs::path dir(cfg.out_dir);
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw std::runtime_error("cannot create '" + dir.string() + "': " + ec.message());
        write_file_bytes(dir / "config.txt", serialize_config(cfg));

        const auto started = std::chrono::steady_clock::now();
        SimState state = init(std::move(habitat), prm);
        const RunReport report =
            run(state, prm, sched, [&](std::uint64_t step, const Gray8& img, const PheromoneField& f) {
                write_file_bytes(dir / snapshot_name(step), save_pgm(img));
                if (cfg.dump_fields) write_file_bytes(dir / snapshot_name(step, "field", ".bin"), dump_field(f));
            });
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
        write_file_bytes(dir / "report.csv", report.to_csv());

        const double final_gini = report.rows.empty() ? field_gini(state.field) : report.rows.back().gini;
        out << "steps=" << report.rows.size() << " ants=" << state.ants.size() << " wall="
            << std::fixed << std::setprecision(3) << elapsed.count() << "s final_gini="
            << std::setprecision(6) << final_gini << '\n';
        out.unsetf(std::ios::floatfield);
        return 0;
    } catch (const std::exception& e) {
        err << "antsim: " << e.what() << '\n';
        return 1;
    }
}

/// Prints both measures with all intermediates.
inline void print_metrics(const MetricsCommand& m, std::ostream& out) {
    auto row = [&](const char* name, const auto& values) {
        out << name << " =";
        for (auto v : values) out << ' ' << static_cast<int>(v);
        out << '\n';
    };
    const UlamCorrelation u = ulam_tau(m.first, m.second);
    row("window1", m.first);
    row("window2", m.second);
    row("pi1", u.ranks1);
    row("pi2", u.ranks2);
    row("s", u.composition);
    row("s*", u.reversed);
    out << "lis(s) = " << lis_length(u.composition) << '\n'
        << "lis(s*) = " << lis_length(u.reversed) << '\n'
        << "delta1 = " << u.delta1 << '\n'
        << "delta2 = " << u.delta2 << '\n'
        << std::setprecision(12) << "tau_u = " << u.tau_u << '\n'
        << "tau_r = " << u.tau_r << '\n'
        << "tau = " << u.tau << '\n'
        << "ulam_heterogeneity = " << (1.0 - u.tau) / 2.0 << '\n';

    const MetricWeights wt = MetricWeights::normalized(m.a, m.b, m.c);
    const StatDelta d = stat_delta(m.first, m.second, wt);
    out << "weights = " << wt.a() << ' ' << wt.b() << ' ' << wt.c() << '\n'
        << "mean1 = " << d.mean1 << '\n'
        << "mean2 = " << d.mean2 << '\n'
        << "variance1 = " << d.variance1 << '\n'
        << "variance2 = " << d.variance2 << '\n'
        << "histogram_diff = " << d.histogram_diff << '\n'
        << "mean_term = " << d.mean_term << '\n'
        << "variance_term = " << d.variance_term << '\n'
        << "histogram_term = " << d.histogram_term << '\n'
        << "stat_delta = " << d.value << '\n';
}

inline int run_gen(const GenCommand& g, std::ostream& err = std::cerr) {
    try {
        const Habitat h = g.kind == GenCommand::Kind::Cross
                              ? gen_cross(g.width, g.height, static_cast<std::uint8_t>(g.fg),
                                          static_cast<std::uint8_t>(g.bg), g.thickness)
                              : homogeneous_habitat(g.width, g.height, static_cast<std::uint8_t>(g.value));
        write_file_bytes(g.out_path, save_pgm(h.pixels()));
        return 0;
    } catch (const std::exception& e) {
        err << "antsim: " << e.what() << '\n';
        return 1;
    }
}

/// Full dispatcher used by main().
inline int main_entry(const std::vector<std::string>& args, std::ostream& out = std::cout,
                      std::ostream& err = std::cerr) {
    Command cmd;
    try {
        cmd = parse_args(args);
    } catch (const HelpRequested& h) {
        out << h.text;
        return 0;
    } catch (const UsageError& e) {
        err << "antsim: " << e.what() << "\n\n" << e.usage;
        return 2;
    }
    if (const auto* cfg = std::get_if<RunConfig>(&cmd)) return run_experiment(*cfg, out, err);
    if (const auto* m = std::get_if<MetricsCommand>(&cmd)) {
        print_metrics(*m, out);
        return 0;
    }
    return run_gen(std::get<GenCommand>(cmd), err);
}

}  // namespace antcolony::cli
