// Command-line front end: flux evaluation, verification suites, the
// switching-energy bound, parameter sweeps and the constrained minimizer.
// Exit codes: 0 success, 1 failed checks or failed sweep rows, 2 bad
// configuration or validation failure. Diagnostics go to stderr only.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "qei/analysis.hpp"
#include "qei/flux.hpp"
#include "qei/genfun_json.hpp"
#include "qei/reports.hpp"
#include "qei/verify.hpp"

namespace {

using qei::ConfigError;
using ordered_json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << content;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text;
    else
        write_file(out_path, text);
}

std::string csv_quote(const std::string& s) {
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    q += '"';
    return q;
}

std::string sidecar_path(const std::string& out) {
    std::filesystem::path p(out);
    p.replace_extension();
    return p.string() + ".deltas.json";
}

// ---------------------------------------------------------------------------

int run_flux(const std::string& config_path, double xmin, double xmax, bool have_range,
             int samples, const std::string& out, bool have_hbar, double hbar_flag,
             const std::string& format) {
    const auto f = qei::from_json_text(read_file(config_path));
    const double hbar = have_hbar ? hbar_flag : f.hbar();

    const auto rep = qei::validate(f);
    if (!rep.passed()) {
        std::cerr << "generating function failed validation:\n";
        for (const auto& msg : rep.failures) std::cerr << "  - " << msg << "\n";
        std::cerr << "  worst C0 mismatch: " << qei::format_g17(rep.worst_c0) << "\n"
                  << "  worst C1 mismatch: " << qei::format_g17(rep.worst_c1) << "\n"
                  << "  min sampled slope: " << qei::format_g17(rep.min_slope) << "\n";
        return 2;
    }

    double lo = -1.0, hi = 1.0;
    if (const auto hull = f.curved_hull()) {
        lo = hull->lo - 1.0;
        hi = hull->hi + 1.0;
    }
    if (have_range) {
        lo = xmin;
        hi = xmax;
    }
    const auto dom = f.domain();
    lo = std::max(lo, dom.lo);
    hi = std::min(hi, dom.hi);
    if (!(lo < hi)) throw ConfigError("empty sampling range");

    const auto sample = qei::sample_flux(f, hbar, lo, hi, samples);

    if (format == "json") {
        ordered_json j;
        j["hbar"] = hbar;
        j["samples"] = ordered_json::array();
        for (std::size_t i = 0; i < sample.xs.size(); ++i)
            j["samples"].push_back({sample.xs[i], sample.density[i]});
        j["deltas"] = ordered_json::array();
        for (const auto& d : sample.deltas) j["deltas"].push_back({d.location, d.weight});
        emit(j.dump(2) + "\n", out);
        return 0;
    }

    if (out.empty()) throw ConfigError("csv output requires --out");
    write_file(out, qei::flux_csv(sample));
    write_file(sidecar_path(out), qei::deltas_json_text(sample.deltas) + "\n");
    return 0;
}

int run_verify(const std::string& suite, std::uint64_t seed, const std::string& out,
               const std::string& format) {
    const auto rep = qei::run_suite(suite, seed);
    const std::string text = (format == "csv") ? qei::suite_report_csv(rep)
                                               : qei::suite_report_json(rep).dump(2) + "\n";
    emit(text, out);
    if (!out.empty()) std::cout << (rep.all_pass() ? "PASS " : "FAIL ") << suite << "\n";
    return rep.all_pass() ? 0 : 1;
}

int run_bound(double ts, double hbar, int pol, const std::string& out) {
    const auto chain = qei::gedanken_chain(ts, hbar);
    if (pol < 1) throw ConfigError("polarization count must be >= 1");
    emit(qei::chain_report_json(chain, pol).dump(2) + "\n", out);
    return 0;
}

int run_minimize(double en, double L, double hbar, int dim, std::uint64_t seed,
                 const std::string& out) {
    qei::MinimizerProblem p{en, L, hbar, dim};
    const double closed = qei::min_compensation_energy(p);
    try {
        const auto r = qei::numeric_min_oracle(p, seed);
        emit(qei::minimize_report_json(p, seed, closed, r, false).dump(2) + "\n", out);
        return 0;
    } catch (const qei::OptimizerStall& e) {
        emit(qei::minimize_report_json(p, seed, closed, e.best, true).dump(2) + "\n", out);
        std::cerr << "minimize: " << e.what() << "\n";
        return 1;
    }
}

// ------------------------------------------------------------------- sweep

struct SweepRow {
    double value = 0.0;
    bool ok = true;
    std::string error_kind;
    std::vector<std::pair<std::string, double>> outputs;
    ordered_json inputs;
    double wall_time = 0.0;
};

int run_sweep(const std::string& config_path, const std::string& out_flag,
              bool have_seed_flag, std::uint64_t seed_flag, bool timings) {
    ordered_json cfg = ordered_json::parse(read_file(config_path), nullptr, false);
    if (cfg.is_discarded()) throw ConfigError("sweep config is not valid JSON");
    if (!cfg.is_object() || !cfg.contains("command") || !cfg.contains("parameter"))
        throw ConfigError("sweep config requires 'command' and 'parameter'");

    const std::string command = cfg.at("command").get<std::string>();
    const std::string parameter = cfg.at("parameter").get<std::string>();
    const std::uint64_t seed = have_seed_flag ? seed_flag
                               : cfg.contains("seed") ? cfg.at("seed").get<std::uint64_t>()
                                                      : 0;
    std::string out = out_flag;
    if (out.empty() && cfg.contains("output")) out = cfg.at("output").get<std::string>();

    std::vector<double> values;
    if (cfg.contains("values")) {
        for (const auto& v : cfg.at("values")) values.push_back(v.get<double>());
    } else if (cfg.contains("log_range")) {
        const auto& lr = cfg.at("log_range");
        const double from = lr.at("from").get<double>();
        const double to = lr.at("to").get<double>();
        const int n = lr.at("count").get<int>();
        if (!(from > 0.0 && to > 0.0 && n >= 2))
            throw ConfigError("log_range requires positive endpoints and count >= 2");
        for (int i = 0; i < n; ++i)
            values.push_back(from * std::pow(to / from, double(i) / (n - 1)));
    }
    if (values.empty()) throw ConfigError("sweep requires a non-empty 'values' list");
    for (double v : values)
        if (!std::isfinite(v)) throw ConfigError("sweep values must be finite");

    ordered_json fixed = cfg.contains("fixed") ? cfg.at("fixed") : ordered_json::object();
    auto fixed_or = [&](const std::string& key, double dflt) {
        return fixed.contains(key) ? fixed.at(key).get<double>() : dflt;
    };

    const double pi = std::numbers::pi;
    std::vector<std::string> out_cols;

    // pre-validate every value against the sub-command's admissible region
    if (command == "bound") {
        out_cols = {"bound_per_pol", "bound_total"};
        if (parameter != "t_s" && parameter != "hbar" && parameter != "polarizations")
            throw ConfigError("bound sweeps accept parameter t_s, hbar or polarizations");
        for (double v : values) {
            const double ts = parameter == "t_s" ? v : fixed_or("t_s", 1.0);
            const double hb = parameter == "hbar" ? v : fixed_or("hbar", 1.0);
            const double pol = parameter == "polarizations" ? v : fixed_or("polarizations", 2.0);
            if (!(ts > 0.0 && hb > 0.0 && pol >= 1.0))
                throw ConfigError("bound sweep value outside the admissible region");
        }
    } else if (command == "chain_step2") {
        out_cols = {"substituted_value"};
        if (parameter != "E_n")
            throw ConfigError("chain_step2 sweeps accept parameter E_n");
        const double ts = fixed_or("t_s", 1.0);
        const double hb = fixed_or("hbar", 1.0);
        if (!(ts > 0.0 && hb > 0.0)) throw ConfigError("chain_step2 requires t_s, hbar > 0");
        for (double v : values)
            if (!(v > 0.0 && v < hb / (12.0 * pi * ts)))
                throw ConfigError("chain_step2 E_n outside the admissible region");
    } else if (command == "minimize") {
        out_cols = {"closed_form", "oracle_energy", "rel_gap"};
        if (parameter != "E_n" && parameter != "L")
            throw ConfigError("minimize sweeps accept parameter E_n or L");
        for (double v : values) {
            const double en = parameter == "E_n" ? v : fixed_or("E_n", 0.01);
            const double L = parameter == "L" ? v : fixed_or("L", 1.0);
            const double hb = fixed_or("hbar", 1.0);
            if (!(en >= 0.0 && L > 0.0 && hb > 0.0 && en * L < hb / (12.0 * pi)))
                throw ConfigError("minimize sweep value outside the admissible region");
        }
    } else {
        throw ConfigError("unknown sweep command '" + command + "'");
    }

    std::vector<SweepRow> rows;
    for (double v : values) {
        SweepRow row;
        row.value = v;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            if (command == "bound") {
                const double ts = parameter == "t_s" ? v : fixed_or("t_s", 1.0);
                const double hb = parameter == "hbar" ? v : fixed_or("hbar", 1.0);
                const int pol = static_cast<int>(
                    parameter == "polarizations" ? v : fixed_or("polarizations", 2.0));
                const auto chain = qei::gedanken_chain(ts, hb);
                row.outputs = {{"bound_per_pol", chain.bound_per_pol},
                               {"bound_total", pol * chain.bound_per_pol}};
                row.inputs = {{"command", command}, {"t_s", ts}, {"hbar", hb},
                              {"polarizations", pol}, {"seed", seed}};
            } else if (command == "chain_step2") {
                const double ts = fixed_or("t_s", 1.0);
                const double hb = fixed_or("hbar", 1.0);
                const double q = 12.0 * pi * v / hb;
                const double xi = 1.0 / q - ts;
                row.outputs = {{"substituted_value", v / (1.0 - q * xi)}};
                row.inputs = {{"command", command}, {"E_n", v}, {"t_s", ts}, {"hbar", hb},
                              {"seed", seed}};
            } else {
                qei::MinimizerProblem p;
                p.E_n = parameter == "E_n" ? v : fixed_or("E_n", 0.01);
                p.L = parameter == "L" ? v : fixed_or("L", 1.0);
                p.hbar = fixed_or("hbar", 1.0);
                p.family_dim = static_cast<int>(fixed_or("family_dim", 8.0));
                const double closed = qei::min_compensation_energy(p);
                const auto r = qei::numeric_min_oracle(p, seed);
                row.outputs = {{"closed_form", closed},
                               {"oracle_energy", r.energy},
                               {"rel_gap", closed != 0.0 ? (r.energy - closed) / closed : 0.0}};
                row.inputs = {{"command", command}, {"E_n", p.E_n}, {"L", p.L},
                              {"hbar", p.hbar}, {"family_dim", p.family_dim}, {"seed", seed}};
            }
        } catch (const qei::Error& e) {
            row.ok = false;
            row.error_kind = e.what();
        }
        row.wall_time =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rows.push_back(std::move(row));
    }

    std::string csv = "index,parameter,value,status,error_kind";
    for (const auto& c : out_cols) csv += "," + c;
    if (timings) csv += ",wall_time";
    csv += ",inputs\n";
    bool any_error = false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        csv += std::to_string(i) + "," + parameter + "," + qei::format_g17(r.value) + ",";
        csv += r.ok ? "ok" : "error";
        csv += ",";
        csv += csv_quote(r.error_kind);
        for (const auto& c : out_cols) {
            csv += ",";
            for (const auto& [k, val] : r.outputs)
                if (k == c) csv += qei::format_g17(val);
        }
        if (timings) csv += "," + qei::format_g17(r.wall_time);
        csv += "," + csv_quote(r.inputs.is_null() ? "" : r.inputs.dump()) + "\n";
        if (!r.ok) any_error = true;
    }
    emit(csv, out);
    return any_error ? 1 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"squeezed-state flux toolkit"};
    app.require_subcommand(1);

    // flux
    auto* flux = app.add_subcommand("flux", "sample the flux density of a serialized profile");
    std::string flux_config, flux_out, flux_format = "csv";
    double flux_xmin = 0.0, flux_xmax = 0.0, flux_hbar = 1.0;
    int flux_samples = 201;
    flux->add_option("--config", flux_config, "generating-function JSON document")->required();
    auto* oxmin = flux->add_option("--xmin", flux_xmin, "grid start");
    auto* oxmax = flux->add_option("--xmax", flux_xmax, "grid end");
    flux->add_option("--samples", flux_samples, "grid resolution")->check(CLI::Range(2, 2000000));
    flux->add_option("--out", flux_out, "output path (csv plus .deltas.json sidecar)");
    auto* ohbar = flux->add_option("--hbar", flux_hbar, "override the document's hbar");
    flux->add_option("--format", flux_format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));

    // verify
    auto* verify = app.add_subcommand("verify", "run a named invariant suite");
    std::string verify_suite, verify_out, verify_format = "json";
    std::uint64_t verify_seed = 0;
    verify->add_option("--suite", verify_suite, "modes|conformal|oracle|shock|minimizer|chain")
        ->required();
    verify->add_option("--seed", verify_seed, "PRNG seed");
    verify->add_option("--out", verify_out, "report path");
    verify->add_option("--format", verify_format, "json|csv")
        ->check(CLI::IsMember({"json", "csv"}));

    // bound
    auto* bound = app.add_subcommand("bound", "switching-energy bound and its derivation chain");
    double bound_ts = 0.0, bound_hbar = 1.0;
    int bound_pol = 2;
    std::string bound_out;
    bound->add_option("--ts", bound_ts, "switching time")->required();
    bound->add_option("--hbar", bound_hbar, "Planck constant");
    bound->add_option("--pol", bound_pol, "polarization count");
    bound->add_option("--out", bound_out, "report path");

    // minimize
    auto* minimize = app.add_subcommand("minimize", "constrained minimum compensation energy");
    double min_en = 0.0, min_L = 1.0, min_hbar = 1.0;
    int min_dim = 8;
    std::uint64_t min_seed = 0;
    std::string min_out;
    minimize->add_option("--en", min_en, "negative shock energy")->required();
    minimize->add_option("--L", min_L, "constraint length")->required();
    minimize->add_option("--hbar", min_hbar, "Planck constant");
    minimize->add_option("--dim", min_dim, "oracle family dimension");
    minimize->add_option("--seed", min_seed, "PRNG seed");
    minimize->add_option("--out", min_out, "report path");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "repeat a sub-command over parameter values");
    std::string sweep_config, sweep_out;
    std::uint64_t sweep_seed = 0;
    bool sweep_timings = false;
    sweep->add_option("--config", sweep_config, "sweep configuration JSON")->required();
    sweep->add_option("--out", sweep_out, "output CSV path (overrides config)");
    auto* oseed = sweep->add_option("--seed", sweep_seed, "PRNG seed (overrides config)");
    sweep->add_flag("--timings", sweep_timings, "append a wall_time column");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*flux) {
            if (oxmin->count() != oxmax->count())
                throw ConfigError("--xmin and --xmax must be given together");
            return run_flux(flux_config, flux_xmin, flux_xmax, oxmin->count() > 0,
                            flux_samples, flux_out, ohbar->count() > 0, flux_hbar, flux_format);
        }
        if (*verify) return run_verify(verify_suite, verify_seed, verify_out, verify_format);
        if (*bound) return run_bound(bound_ts, bound_hbar, bound_pol, bound_out);
        if (*minimize)
            return run_minimize(min_en, min_L, min_hbar, min_dim, min_seed, min_out);
        if (*sweep)
            return run_sweep(sweep_config, sweep_out, oseed->count() > 0, sweep_seed,
                             sweep_timings);
    } catch (const qei::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
