// Command-line front end: model ingestion, tail solving, simulation,
// asymptotics verification. Machine-readable CSV out, RunRecord header on
// every output. Exit codes: 0 ok, 2 config error, 3 numerical failure,
// 4 verification FAIL.

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "cbrw/asymptotics.hpp"
#include "cbrw/criticality.hpp"
#include "cbrw/errors.hpp"
#include "cbrw/model.hpp"
#include "cbrw/monte_carlo.hpp"
#include "cbrw/rng.hpp"
#include "cbrw/tail_solver.hpp"
#include "cbrw/version.hpp"

namespace {

using namespace cbrw;

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);  // shortest round-trip
    return std::string(buf, res.ptr);
}

struct Sink {
    std::ofstream file;
    std::ostream* os = nullptr;

    explicit Sink(const std::string& path) {
        if (path.empty() || path == "-") {
            os = &std::cout;
            return;
        }
        file.open(path, std::ios::binary);  // binary: keep golden files byte-stable
        if (!file) throw ConfigError("cannot open output file: " + path);
        os = &file;
    }
    std::ostream& out() { return *os; }
};

using Params = std::vector<std::pair<std::string, std::string>>;

// RunRecord: enough to reproduce the run. Parameters that cannot change the
// numbers (parallelism degree) are deliberately left out so reruns at any
// stream count stay byte-identical.
void write_record(std::ostream& os, const char* command, const Model& model, const Params& params) {
    char digest[32];
    std::snprintf(digest, sizeof digest, "%016" PRIx64, config_digest(model));
    os << "# tool: cbrw " << kVersion << "\n";
    os << "# command: " << command << "\n";
    os << "# config-digest: fnv1a64:" << digest << "\n";
    for (const auto& [k, v] : params) os << "# " << k << ": " << v << "\n";
}

std::vector<long> make_grid(long from, long to, const std::string& kind) {
    if (from > to) throw ConfigError("--x-from must not exceed --x-to");
    std::vector<long> grid;
    if (kind == "lin") {
        if (to - from > 5000000)
            throw ConfigError("linear grid with more than 5e6 levels; use --grid geo");
        for (long x = from; x <= to; ++x) grid.push_back(x);
    } else if (kind == "geo") {
        if (from < 1) throw ConfigError("geometric grid needs --x-from >= 1");
        for (long x = from; x <= to && x > 0; x *= 2) grid.push_back(x);
        if (grid.empty() || grid.back() != to) grid.push_back(to);
    } else {
        throw ConfigError("--grid must be lin or geo");
    }
    return grid;
}

int cmd_classify(const Model& model, const std::string& out) {
    const Regime regime = classify(model.walk, model.catalysts);
    const std::size_t n = model.catalysts.size();
    const std::vector<double> d = criticality_matrix(model.walk, model.catalysts);

    Sink sink(out);
    write_record(sink.out(), "classify", model, {});
    char rho[48];
    std::snprintf(rho, sizeof rho, "%.9f", regime.perron_root);
    sink.out() << to_string(regime.label) << ", rho=" << rho << "\n";
    if (regime.near_critical && regime.label != RegimeLabel::critical)
        sink.out() << "# near-critical: |rho-1| < 1e-6, label is within noise of critical\n";
    for (std::size_t i = 0; i < n; ++i) {
        sink.out() << "D[" << i << "]:";
        for (std::size_t j = 0; j < n; ++j) sink.out() << ' ' << fmt(d[i * n + j]);
        sink.out() << "\n";
    }
    return 0;
}

int cmd_tail(const Model& model, const std::string& out, long x_from, long x_to,
             const std::string& grid_kind) {
    const std::vector<long> grid = make_grid(x_from, x_to, grid_kind);
    const TailCurve curve = tail_curve(model, model.start, grid);

    Sink sink(out);
    write_record(sink.out(), "tail", model,
                 {{"x-from", std::to_string(x_from)},
                  {"x-to", std::to_string(x_to)},
                  {"grid", grid_kind}});
    sink.out() << "x,tail,residual,iterations\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
        sink.out() << grid[i] << ',' << fmt(curve.values[i]) << ',' << fmt(curve.residuals[i])
                   << ',' << curve.iterations[i] << "\n";
    return 0;
}

int cmd_simulate(const Model& model, const std::string& out, long x_from, long x_to,
                 const std::string& grid_kind, std::uint64_t trials, std::uint64_t seed,
                 unsigned streams) {
    const std::vector<long> grid = make_grid(x_from, x_to, grid_kind);

    Sink sink(out);
    write_record(sink.out(), "simulate", model,
                 {{"x-from", std::to_string(x_from)},
                  {"x-to", std::to_string(x_to)},
                  {"grid", grid_kind},
                  {"trials", std::to_string(trials)},
                  {"seed", std::to_string(seed)}});
    sink.out() << "x,estimate,ci_lo,ci_hi,n,censored\n";
    for (const long x : grid) {
        SimConfig cfg;
        cfg.trials = trials;
        // Per-level substream: levels draw independent randomness, trials
        // within a level are seeded by (level seed, trial index).
        cfg.seed = mix64(seed ^ mix64(static_cast<std::uint64_t>(x)));
        cfg.parallel_streams = streams;
        const TailEstimate est = estimate_tail(model, model.start, x, cfg);
        sink.out() << x << ',' << fmt(est.estimate) << ',' << fmt(est.ci_lo) << ','
                   << fmt(est.ci_hi) << ',' << est.trials << ',' << est.censored << "\n";
    }
    return 0;
}

int cmd_verify(const Model& model, const std::string& out, int theorem, long x_from, long x_to,
               const std::string& grid_kind) {
    const AsymptoticLaw law = make_law(model, theorem);
    const std::vector<long> grid = make_grid(x_from, x_to, grid_kind);
    const TailCurve curve = tail_curve(model, model.start, grid);
    const std::vector<ConvergenceRow> rows = convergence_report(curve, law);

    Sink sink(out);
    write_record(sink.out(), "verify", model,
                 {{"theorem", std::to_string(theorem)},
                  {"x-from", std::to_string(x_from)},
                  {"x-to", std::to_string(x_to)},
                  {"grid", grid_kind}});
    if (law.limit_constant) sink.out() << "# s0: " << fmt(law.s0) << "\n";
    sink.out() << "x,solver,predicted,ratio\n";
    for (const ConvergenceRow& r : rows)
        sink.out() << r.x << ',' << fmt(r.solver) << ',' << fmt(r.predicted) << ',' << fmt(r.ratio)
                   << "\n";

    const ConvergenceRow& last = rows.back();
    bool pass;
    std::string detail;
    if (law.limit_constant) {
        const double gap = std::abs(last.solver - law.s0);
        pass = gap <= 1e-6;
        detail = "|tail - s0| = " + fmt(gap) + " (tol 1e-06) at x=" + std::to_string(last.x) +
                 ", s0 = " + fmt(law.s0) + ", tail = " + fmt(last.solver);
    } else {
        const double tol = theorem == 2 ? 0.01 : 0.02;
        const double dev = std::abs(last.ratio - 1.0);
        pass = dev <= tol;
        detail = "|solver/predicted - 1| = " + fmt(dev) + " (tol " + fmt(tol) +
                 ") at x=" + std::to_string(last.x);
    }
    sink.out() << (pass ? "PASS: " : "FAIL: ") << detail << "\n";
    return pass ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"catalytic branching random walk: maximum displacement tails"};
    app.require_subcommand(1);

    std::string config, out = "-", grid_kind = "lin";
    long x_from = 0, x_to = 0;
    std::uint64_t trials = 100000, seed = 1;
    unsigned streams = 1;
    int theorem = 0;

    auto add_common = [&](CLI::App* sub, bool levels) {
        sub->add_option("--config", config, "model JSON")->required();
        sub->add_option("--out", out, "output path, - for stdout");
        if (levels) {
            sub->add_option("--x-from", x_from, "first level")->required();
            sub->add_option("--x-to", x_to, "last level")->required();
            sub->add_option("--grid", grid_kind, "level spacing: lin or geo");
        }
    };

    CLI::App* classify_cmd = app.add_subcommand("classify", "regime label, perron root, matrix D");
    add_common(classify_cmd, false);

    CLI::App* tail_cmd = app.add_subcommand("tail", "exact tail curve by fixed-point solving");
    add_common(tail_cmd, true);

    CLI::App* sim_cmd = app.add_subcommand("simulate", "excursion-level Monte Carlo tail estimates");
    add_common(sim_cmd, true);
    sim_cmd->add_option("--trials", trials, "trials per level");
    sim_cmd->add_option("--seed", seed, "base RNG seed");
    sim_cmd->add_option("--streams", streams, "worker cap; never changes the numbers");

    CLI::App* verify_cmd = app.add_subcommand("verify", "compare solver curve against a theorem");
    add_common(verify_cmd, true);
    verify_cmd->add_option("--theorem", theorem, "asymptotic law: 1, 2, 3, or 4")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const Model model = load_model_file(config);
        if (app.got_subcommand(classify_cmd)) return cmd_classify(model, out);
        if (app.got_subcommand(tail_cmd)) return cmd_tail(model, out, x_from, x_to, grid_kind);
        if (app.got_subcommand(sim_cmd))
            return cmd_simulate(model, out, x_from, x_to, grid_kind, trials, seed, streams);
        return cmd_verify(model, out, theorem, x_from, x_to, grid_kind);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericsError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
