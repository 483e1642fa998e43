// bregman_cli: prox, envelope, gradient checks, certification, BPAM runs,
// BPG equivalence, tangency figure data and the experiment suite.

#include "experiments.hpp"

#include "CLI11.hpp"

#include <chrono>

using namespace bregman;
using namespace bregman::cli;

namespace {

struct Common {
    std::string config;
    std::string section;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::vector<std::string> sets;
    std::map<std::string, std::string> named;
};

void add_common(CLI::App* app, Common& c, const std::vector<std::string>& keys) {
    app->add_option("--config", c.config, "config file");
    app->add_option("--section", c.section, "config section (default: the subcommand name)");
    app->add_option("--out", c.out, "output directory");
    app->add_option("--seed", c.seed, "64-bit seed");
    app->add_option("--tol", c.tol, "tolerance override");
    app->add_option("--set", c.sets, "key=value override (repeatable)");
    for (const auto& key : keys) {
        std::string opt = "--" + key;
        std::replace(opt.begin(), opt.end(), '_', '-');
        app->add_option_function<std::string>(opt, [&c, key](const std::string& v) { c.named[key] = v; },
                                              "sets '" + key + "'");
    }
}

std::uint64_t global_seed(const Config& cfg, const Common& c) {
    if (c.seed) return *c.seed;
    return static_cast<std::uint64_t>(cfg.global.get_int("seed", 0));
}

/// The section a subcommand works on: config section (if any) plus
/// command-line overrides.
ConfigSection section_for(const std::string& cmd, const Common& c, Config& cfg) {
    ConfigSection s{cmd, {}};
    if (!c.config.empty()) {
        cfg = parse_config_file(c.config);
        const std::string name = c.section.empty() ? cmd : c.section;
        if (const auto* found = cfg.find(name)) s = *found;
        else if (cfg.sections.size() == 1 && c.section.empty()) s = cfg.sections.front();
        else if (!c.section.empty()) throw ConfigError("no section [" + name + "] in " + c.config);
    }
    for (const auto& [k, v] : c.named) s.values[k] = v;
    for (const auto& kv : c.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got " + kv);
        s.values[trim(kv.substr(0, eq))] = trim(kv.substr(eq + 1));
    }
    if (c.tol) s.values["tol"] = format_number(*c.tol);
    return s;
}

/// Runs `body` with a CSV sink: <out>/<file> when --out is given, stdout otherwise.
int with_sink(const Common& c, const std::string& file, const std::function<Outcome(std::ostream&)>& body) {
    Outcome o;
    if (c.out.empty()) {
        o = body(std::cout);
    } else {
        std::filesystem::create_directories(c.out);
        std::ofstream f(std::filesystem::path(c.out) / file);
        if (!f) throw ConfigError("cannot write " + (std::filesystem::path(c.out) / file).string());
        o = body(f);
    }
    for (const auto& m : o.metrics)
        std::cerr << m.name << " = " << format_number(m.value) << (m.passed ? "" : "  FAILED") << '\n';
    return o.passed() ? kOk : kCheckFailed;
}

int run_suite(const Common& c) {
    if (c.config.empty()) throw ConfigError("run-suite needs --config");
    Config cfg = parse_config_file(c.config);
    const std::uint64_t seed = global_seed(cfg, c);
    const std::filesystem::path dir = c.out.empty() ? cfg.global.get("out", "suite_out") : c.out;
    for (auto& s : cfg.sections) {
        if (c.tol) s.values["tol"] = format_number(*c.tol);
        validate_section(s);
    }
    std::filesystem::create_directories(dir);

    struct Row {
        std::string experiment, kind;
        Metric m;
    };
    std::vector<Row> rows;
    bool all = true;
    for (const auto& s : cfg.sections) {
        const std::string kind = s.get("kind");
        const std::uint64_t es = derive_seed(seed, s.name);
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            if (kind == "certify") {
                std::ofstream f(dir / (s.name + ".txt"));
                o = run_certify(s, f);
            } else if (kind == "figure") {
                std::ofstream f(dir / (s.name + ".txt"));
                o = run_figure(s, dir, s.name + "_", f);
            } else {
                std::ofstream f(dir / (s.name + ".csv"));
                if (kind == "prox") o = run_prox(s, f);
                else if (kind == "envelope") o = run_envelope(s, f);
                else if (kind == "grad-check") o = run_grad_check(s, f);
                else if (kind == "bpam") o = run_bpam(s, es, f);
                else if (kind == "bpg-equivalence") o = run_bpg(s, f);
                else if (kind == "kernel-duality") o = run_kernel_duality(s, es, f);
            }
        } catch (const std::exception& e) {
            std::cerr << s.name << ": " << e.what() << '\n';
            o.add("error", 1.0, 0.0, false);
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (const auto& m : o.metrics) rows.push_back({s.name, kind, m});
        all = all && o.passed();
        std::printf("%-4s %-28s %-16s %.2fs\n", o.passed() ? "PASS" : "FAIL", s.name.c_str(), kind.c_str(), secs);
    }
    std::ofstream f(dir / "summary.csv");
    CsvWriter csv(f, {"experiment", "kind", "metric", "value", "tolerance", "passed"});
    for (const auto& r : rows)
        csv.row({r.experiment, r.kind, r.m.name, format_number(r.m.value), format_number(r.m.tolerance),
                 flag(r.m.passed)});
    return all ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bregman proximal mappings, envelopes and BPAM experiments"};
    app.require_subcommand(1);

    const std::vector<std::string> prox_keys = {"f",    "p",    "scale", "center", "lo",    "hi",
                                                "a",    "kernel", "q",   "dim",    "lambda", "side",
                                                "y",    "y_min", "y_max", "y_step", "compare", "resolution"};
    std::vector<std::string> grad_keys = prox_keys;
    grad_keys.push_back("formula");

    Common prox_c, env_c, grad_c, cert_c, bpam_c, bpg_c, fig_c, suite_c;
    auto* prox = app.add_subcommand("prox", "prox minimizers and envelope values over a list of points");
    add_common(prox, prox_c, prox_keys);
    auto* env = app.add_subcommand("envelope", "envelope values over a list of points");
    add_common(env, env_c, prox_keys);
    auto* grad = app.add_subcommand("grad-check", "envelope gradient formula against finite differences");
    add_common(grad, grad_c, grad_keys);
    auto* cert = app.add_subcommand("certify", "relative prox-regularity certificate");
    add_common(cert, cert_c, {"f", "kernel", "dim", "xbar", "vbar", "eps", "resolution", "max_doubling", "expect"});
    auto* bpam = app.add_subcommand("run-bpam", "BPAM on the sparse-recovery toy");
    add_common(bpam, bpam_c,
               {"n", "p", "alpha", "lambda", "mu", "sigma_scale", "omega_scale", "nonzeros", "M", "init", "max_iter",
                "step_tol", "trace"});
    auto* bpg = app.add_subcommand("bpg-equiv", "partial BPAM against the BPG update");
    add_common(bpg, bpg_c, {"p", "alpha", "lambda", "mu", "b", "c", "u0", "steps"});
    auto* fig = app.add_subcommand("figure", "Bregman-ball tangency data");
    add_common(fig, fig_c, {"kernel", "dim", "lambda", "tbar", "v", "half_width", "expect"});
    auto* suite = app.add_subcommand("run-suite", "run every experiment of a config");
    add_common(suite, suite_c, {});

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigError;
    }

    try {
        Config cfg;
        if (*prox) {
            const auto s = section_for("prox", prox_c, cfg);
            return with_sink(prox_c, "prox.csv", [&](std::ostream& o) { return run_prox(s, o); });
        }
        if (*env) {
            const auto s = section_for("envelope", env_c, cfg);
            return with_sink(env_c, "envelope.csv", [&](std::ostream& o) { return run_envelope(s, o); });
        }
        if (*grad) {
            const auto s = section_for("grad-check", grad_c, cfg);
            return with_sink(grad_c, "grad_check.csv", [&](std::ostream& o) { return run_grad_check(s, o); });
        }
        if (*cert) {
            const auto s = section_for("certify", cert_c, cfg);
            std::ostringstream text;
            const Outcome o = run_certify(s, text);
            std::cout << text.str();
            if (!cert_c.out.empty()) {
                std::filesystem::create_directories(cert_c.out);
                std::ofstream(std::filesystem::path(cert_c.out) / "certificate.txt") << text.str();
            }
            return o.passed() ? kOk : kCheckFailed;
        }
        if (*bpam) {
            const auto s = section_for("run-bpam", bpam_c, cfg);
            const std::uint64_t seed = derive_seed(global_seed(cfg, bpam_c), s.name);
            if (s.has("trace")) {
                const std::filesystem::path path = s.get("trace");
                if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
                std::ofstream f(path);
                if (!f) throw ConfigError("cannot write trace " + path.string());
                const Outcome o = run_bpam(s, seed, f);
                for (const auto& m : o.metrics)
                    std::cerr << m.name << " = " << format_number(m.value) << (m.passed ? "" : "  FAILED") << '\n';
                return o.passed() ? kOk : kCheckFailed;
            }
            return with_sink(bpam_c, "trace.csv", [&](std::ostream& o) { return run_bpam(s, seed, o); });
        }
        if (*bpg) {
            const auto s = section_for("bpg-equiv", bpg_c, cfg);
            return with_sink(bpg_c, "bpg_equivalence.csv", [&](std::ostream& o) { return run_bpg(s, o); });
        }
        if (*fig) {
            const auto s = section_for("figure", fig_c, cfg);
            const Outcome o = run_figure(s, fig_c.out.empty() ? "figure" : fig_c.out, "", std::cout);
            return o.passed() ? kOk : kCheckFailed;
        }
        if (*suite) return run_suite(suite_c);
    } catch (const NotProxBounded& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUnbounded;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const InvalidArgument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return kConfigError;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kCheckFailed;
    }
    return kOk;
}
