#include "cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "ipdsaw/acceptance.hpp"
#include "ipdsaw/critical_constants.hpp"
#include "ipdsaw/dp.hpp"
#include "ipdsaw/errors.hpp"
#include "ipdsaw/exact_sampler.hpp"
#include "ipdsaw/experiments.hpp"
#include "ipdsaw/parallel.hpp"
#include "ipdsaw/partition.hpp"
#include "ipdsaw/samplers.hpp"
#include "ipdsaw/thermo.hpp"

namespace ipdsaw::cli {

using nlohmann::json;
namespace fs = std::filesystem;

nlohmann::json to_json(const RunConfig& c) {
    return {{"command", c.command}, {"target", c.target},   {"beta", c.beta},       {"L", c.L},
            {"q", c.q},             {"n", c.n},             {"replicas", c.replicas}, {"seed", c.seed},
            {"threads", c.threads}, {"out", c.out},         {"cache", c.cache},     {"budget", c.budget},
            {"quick", c.quick}};
}

RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig c;
    c.command = j.value("command", std::string{});
    c.target = j.value("target", std::string{});
    c.beta = j.value("beta", 0.0);
    c.L = j.value("L", std::vector<Int>{});
    c.q = j.value("q", 0.0);
    c.n = j.value("n", 0);
    c.replicas = j.value("replicas", std::size_t{0});
    c.seed = j.value("seed", std::uint64_t{20240611});
    c.threads = j.value("threads", 0u);
    c.out = j.value("out", std::string{});
    c.cache = j.value("cache", std::string{});
    c.budget = j.value("budget", std::uint64_t{0});
    c.quick = j.value("quick", false);
    return c;
}

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::string csv() const {
        std::string s;
        for (std::size_t i = 0; i < header.size(); ++i) s += (i ? "," : "") + header[i];
        s += '\n';
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + num(r[i]);
            s += '\n';
        }
        return s;
    }
};

Table xy_table(const std::vector<double>& x, const std::vector<double>& y) {
    Table t{{"x", "y", "yerr"}, {}};
    for (std::size_t i = 0; i < x.size(); ++i) t.rows.push_back({x[i], y[i], 0.0});
    return t;
}

// Collects output files; without an output directory everything goes to stdout.
class Sink {
public:
    Sink(const RunConfig& c, std::ostream& out) : config_(c), out_(out) {
        if (!c.out.empty()) fs::create_directories(c.out);
    }

    bool to_dir() const { return !config_.out.empty(); }

    void file(const std::string& name, const std::string& content) {
        if (!to_dir()) {
            out_ << content;
            if (!content.empty() && content.back() != '\n') out_ << '\n';
            return;
        }
        std::ofstream f(fs::path(config_.out) / name, std::ios::binary);
        if (!f) throw DomainError("cannot write " + (fs::path(config_.out) / name).string());
        f << content;
        written_.push_back(name);
    }

    // Run config for reproduction plus a sidecar with the non-deterministic fields.
    void finish(const std::string& stem, double seconds, unsigned threads) {
        if (!to_dir()) return;
        file(stem + ".config.json", to_json(config_).dump(1) + "\n");
        json meta = {{"wall_seconds", seconds},
                     {"threads", threads},
                     {"finished_unix", std::chrono::duration_cast<std::chrono::seconds>(
                                           std::chrono::system_clock::now().time_since_epoch())
                                           .count()},
                     {"files", written_}};
        std::ofstream f(fs::path(config_.out) / (stem + ".meta.json"));
        f << meta.dump(1) << '\n';
        out_ << json{{"out", config_.out}, {"files", written_}}.dump() << '\n';
    }

private:
    const RunConfig& config_;
    std::ostream& out_;
    std::vector<std::string> written_;
};

unsigned threads_of(const RunConfig& c) { return c.threads ? c.threads : default_threads(); }
double beta_or(const RunConfig& c, double fallback) { return c.beta > 0.0 ? c.beta : fallback; }
std::size_t replicas_or(const RunConfig& c, std::size_t fallback) { return c.replicas ? c.replicas : fallback; }
std::uint64_t budget_or(const RunConfig& c, std::uint64_t fallback) { return c.budget ? c.budget : fallback; }

std::vector<Int> lengths_or(const RunConfig& c, std::vector<Int> fallback) {
    auto ls = c.L.empty() ? fallback : c.L;
    for (Int L : ls)
        if (L < 1) throw DomainError("--L must be positive");
    return ls;
}

std::string cache_dir(const RunConfig& c) {
    if (!c.cache.empty()) return c.cache;
    if (const char* env = std::getenv("IPDSAW_CACHE")) return env;
    return {};
}

std::string phase_name(double beta) {
    const double bc = beta_c();
    if (beta == bc) return "critical";
    return beta < bc ? "extended" : "collapsed";
}

json constants_report(const RunConfig& c) {
    const double beta = beta_or(c, beta_c());
    const auto p = model_params(beta);
    json r = {{"beta", beta},           {"x", p.x},        {"c_beta", p.c_beta},
              {"gamma_beta", p.gamma_beta}, {"beta_c", beta_c()}, {"phase", phase_name(beta)}};
    if (beta < beta_c()) {
        const auto rc = extended_constants(beta);
        r["extended"] = {{"f_tilde", rc.f_tilde},
                         {"e_beta", rc.e_beta},
                         {"sigma_beta", rc.sigma_beta},
                         {"c_renewal", rc.c_renewal},
                         {"mean_sigma", rc.mean_sigma},
                         {"partition_limit", std::exp(beta + rc.f_tilde) * rc.c_renewal}};
    }
    if (beta > beta_c()) {
        const double a = a_beta(beta);
        r["collapsed"] = {{"a_beta", a}, {"g_tilde_max", g_tilde(beta, a)}, {"q_beta", 1.0 / (a * a)}};
        std::vector<double> qs = c.q > 0.0 ? std::vector<double>{c.q} : std::vector<double>{0.1, 0.25, 0.5, 1.0, 2.0};
        json rows = json::array();
        for (double q : qs) {
            const auto t = solve_tilt(beta, q);
            rows.push_back({{"q", q}, {"h0", t.h0}, {"h1", t.h1}, {"rho", rho(beta, q)}});
        }
        r["rho"] = rows;
        json wulff_rows = json::array();
        const double q = c.q > 0.0 ? c.q : 1.0 / (a * a);
        for (int i = 0; i <= 10; ++i) {
            const double t = i / 10.0;
            wulff_rows.push_back({{"t", t}, {"wulff", wulff(beta, q, t)}});
        }
        r["wulff"] = {{"q", q}, {"table", wulff_rows}};
    }
    const auto cc = crit_constants(beta);
    r["crit_constants"] = {{"var_v1", cc.var_v1},
                           {"c_big", cc.c_big},
                           {"airy_integral", cc.airy_integral},
                           {"c_tail", cc.c_tail},
                           {"z_prefactor", cc.z_prefactor},
                           {"c_tau", cc.c_tau},
                           {"c_tail_ladder", cc.c_tail_ladder},
                           {"z_prefactor_ladder", cc.z_prefactor_ladder},
                           {"c_tau_ladder", cc.c_tau_ladder}};
    return r;
}

int cmd_constants(const RunConfig& c, Sink& sink) {
    sink.file("constants.json", constants_report(c).dump(1) + "\n");
    return ok;
}

int cmd_zpartition(const RunConfig& c, Sink& sink) {
    const double beta = beta_or(c, beta_c());
    const auto ls = lengths_or(c, {256});
    Int top = 0;
    for (Int L : ls) top = std::max(top, L);
    const auto curve = partition_curve(beta, top);
    std::vector<double> x, y, yc;
    for (Int L = 1; L <= top; ++L) {
        x.push_back(static_cast<double>(L));
        y.push_back(curve.log_z[static_cast<std::size_t>(L)]);
        yc.push_back(curve.log_zc[static_cast<std::size_t>(L)]);
    }
    sink.file("zpartition.csv", xy_table(x, y).csv());
    if (sink.to_dir()) sink.file("zpartition_constrained.csv", xy_table(x, yc).csv());
    return ok;
}

int cmd_extension(const RunConfig& c, Sink& sink) {
    const double beta = beta_or(c, beta_c());
    const auto ls = lengths_or(c, {256});
    Int top = 0;
    for (Int L : ls) top = std::max(top, L);
    const auto curve = partition_curve(beta, top);
    json summary = json::array();
    for (Int L : ls) {
        const auto law = extension_law(curve, L);
        summary.push_back({{"L", L}, {"mean", law.mean()}, {"argmax", law.argmax()}, {"log_z", law.log_z}});
        if (sink.to_dir()) {
            std::vector<double> x, y;
            for (std::size_t n = 1; n < law.probs.size(); ++n) {
                x.push_back(static_cast<double>(n));
                y.push_back(law.probs[n]);
            }
            sink.file("extension_L" + std::to_string(L) + ".csv", xy_table(x, y).csv());
        } else {
            sink.file("", extension_law_csv(law));
        }
    }
    if (sink.to_dir()) sink.file("extension.json", summary.dump(1) + "\n");
    return ok;
}

json path_record(Int L, std::uint64_t trials, const PolymerPath& p) {
    return {{"L", L}, {"trials", trials}, {"stretches", p.stretches()}};
}

int cmd_sample(const RunConfig& c, Sink& sink) {
    const std::string& kind = c.target;
    const std::size_t count = replicas_or(c, 1);
    const auto budget = budget_or(c, 100000000);
    const unsigned threads = threads_of(c);
    std::vector<json> lines;
    if (kind == "perfect") {
        const Int L = lengths_or(c, {100}).front();
        lines = replicate(count, c.seed, threads, [&](std::size_t, RngStream& rng) {
            const auto s = perfect_critical_sample(L, rng, budget);
            return path_record(L, s.trials, s.path);
        });
    } else if (kind == "exact") {
        const Int L = lengths_or(c, {100}).front();
        const double beta = beta_or(c, beta_c());
        if (L > kEngineLimit) throw DomainError("L beyond the engine limit");
        DpBuildOptions opts;
        opts.length_cap = L;
        ExactSampler sampler(cached_table(cache_dir(c), beta, L, L, Constraint::free, opts));
        lines = replicate(count, c.seed, threads,
                          [&](std::size_t, RngStream& rng) { return path_record(L, 1, sampler.sample(L, rng)); });
    } else if (kind == "lifetime") {
        const Int L = lengths_or(c, {20}).front();
        const double beta = beta_or(c, 2.0);
        lines = replicate(count, c.seed, threads, [&](std::size_t, RngStream& rng) {
            auto s = lifetime_sample(beta, L, rng, budget);
            if (!s) throw BudgetError("lifetime sampler exceeded " + std::to_string(budget) + " trials", budget);
            return path_record(L, s->trials, s->path);
        });
    } else if (kind == "tilted") {
        const double beta = beta_or(c, 2.0);
        const int n = c.n > 0 ? c.n : 100;
        const double q = c.q > 0.0 ? c.q : 1.0 / std::pow(a_beta(beta), 2.0);
        TiltedWalker walker(beta, n, q);
        lines = replicate(count, c.seed, threads, [&](std::size_t, RngStream& rng) {
            const auto w = walker.sample(rng);
            return json{{"n", n}, {"q", q}, {"area", w.alg_area}, {"values", w.values}};
        });
    } else if (kind == "mixture") {
        const Int L = lengths_or(c, {100}).front();
        MixtureSampler sampler(beta_or(c, beta_c()), L, kEngineLimit);
        lines = replicate(count, c.seed, threads, [&](std::size_t, RngStream& rng) {
            const auto d = sampler.sample(rng);
            auto j = path_record(d.length, 1, d.path);
            j["target"] = L;
            return j;
        });
    } else {
        throw DomainError("unknown sampler '" + kind + "' (perfect, exact, lifetime, tilted, mixture)");
    }
    std::string text;
    for (const auto& j : lines) text += j.dump() + "\n";
    sink.file("samples_" + kind + ".jsonl", text);
    return ok;
}

int cmd_excursions(const RunConfig& c, Sink& sink) {
    RngStream rng(c.seed, 0);
    ExcursionOptions opts;
    opts.beta = beta_or(c, beta_c());
    const auto ex = critical_excursions(replicas_or(c, 1000), rng, ExcursionStart::mu_beta, opts);
    std::string s = "k,ext,area,vtau\n";
    for (std::size_t k = 0; k < ex.size(); ++k)
        s += std::to_string(k + 1) + "," + std::to_string(ex[k].extension) + "," + std::to_string(ex[k].area) + "," +
             std::to_string(ex[k].vtau) + "\n";
    sink.file("excursions.csv", s);
    return ok;
}

int cmd_shape(const RunConfig& c, Sink& sink) {
    const double beta = beta_or(c, 2.0);
    const double q = c.q > 0.0 ? c.q : 1.0 / std::pow(a_beta(beta), 2.0);
    const int points = c.n > 0 ? c.n : 200;
    std::vector<double> ts;
    for (int i = 0; i <= points; ++i) ts.push_back(static_cast<double>(i) / points);
    const auto profile = wulff_profile(beta, q, ts);
    sink.file("shape.csv", xy_table(ts, profile).csv());
    if (sink.to_dir()) {
        std::vector<double> half;
        for (double v : profile) half.push_back(0.5 * v);
        sink.file("shape_envelope.csv", xy_table(ts, half).csv());
    }
    return ok;
}

int cmd_experiment(const RunConfig& c, Sink& sink) {
    auto p = default_params(c.target);
    if (c.beta > 0.0) p.beta = c.beta;
    if (!c.L.empty()) p.sizes = c.L;
    if (c.q > 0.0) p.q = c.q;
    if (c.n > 0) p.n = c.n;
    if (c.replicas) p.replicas = c.replicas;
    p.seed = c.seed;
    p.threads = threads_of(c);
    if (c.budget) p.budget = c.budget;
    const auto report = run_experiment(c.target, p);
    if (sink.to_dir()) {
        sink.file(c.target + ".json", report.to_json().dump(1) + "\n");
        for (const auto& curve : report.curves) sink.file(c.target + "_" + curve.name + ".csv", curve_csv(curve));
        std::ofstream(fs::path(c.out) / (c.target + ".report.meta.json")) << report.metadata_json().dump(1) << '\n';
    } else {
        sink.file("", report.to_json().dump(1));
    }
    return report.passed() ? ok : criteria_failed;
}

int cmd_selftest(const RunConfig& c, Sink& sink, std::ostream& out) {
    const auto ids = c.quick ? quick_acceptance_ids() : acceptance_ids();
    bool all = true;
    std::string log;
    for (const auto& id : ids) {
        const auto r = run_acceptance(id, threads_of(c));
        const auto line = format_result(r);
        out << line << std::flush;
        log += line;
        all = all && r.pass();
    }
    if (sink.to_dir()) sink.file("selftest.txt", log);
    return all ? ok : criteria_failed;
}

void report_error(std::ostream& err, const std::string& kind, const std::string& what, const json& extra = {}) {
    json j = {{"error", kind}, {"message", what}};
    if (extra.is_object())
        for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    err << j.dump() << '\n';
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        const auto start = std::chrono::steady_clock::now();
        Sink sink(config, out);
        int code = ok;
        const auto& cmd = config.command;
        if (cmd == "constants") code = cmd_constants(config, sink);
        else if (cmd == "zpartition") code = cmd_zpartition(config, sink);
        else if (cmd == "extension") code = cmd_extension(config, sink);
        else if (cmd == "sample") code = cmd_sample(config, sink);
        else if (cmd == "excursions") code = cmd_excursions(config, sink);
        else if (cmd == "shape") code = cmd_shape(config, sink);
        else if (cmd == "experiment") code = cmd_experiment(config, sink);
        else if (cmd == "selftest") code = cmd_selftest(config, sink, out);
        else {
            report_error(err, "usage", "unknown command '" + cmd + "'");
            return usage;
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        sink.finish(cmd + (config.target.empty() ? "" : "_" + config.target), seconds, threads_of(config));
        return code;
    } catch (const BudgetError& e) {
        report_error(err, "budget", e.what(), {{"spent", e.spent()}});
        return budget;
    } catch (const SolverError& e) {
        report_error(err, "solver", e.what(), {{"residual", e.residual()}});
        return solver;
    } catch (const DomainError& e) {
        report_error(err, "usage", e.what());
        return usage;
    } catch (const json::exception& e) {
        report_error(err, "usage", e.what());
        return usage;
    } catch (const fs::filesystem_error& e) {
        report_error(err, "io", e.what());
        return usage;
    } catch (const std::exception& e) {
        report_error(err, "solver", e.what());
        return solver;
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Interacting partially directed self-avoiding walk toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_file;
    RunConfig flags;
    app.add_option("--config", config_file, "JSON run config; flags override it")->check(CLI::ExistingFile);
    auto* o_beta = app.add_option("--beta", flags.beta, "inverse temperature")->check(CLI::PositiveNumber);
    auto* o_L = app.add_option("--L", flags.L, "length, or several lengths");
    auto* o_q = app.add_option("--q", flags.q, "area per squared length")->check(CLI::PositiveNumber);
    auto* o_n = app.add_option("--n", flags.n, "walk length or grid size")->check(CLI::PositiveNumber);
    auto* o_rep = app.add_option("--replicas", flags.replicas, "number of samples");
    auto* o_seed = app.add_option("--seed", flags.seed, "master seed");
    auto* o_thr = app.add_option("--threads", flags.threads, "worker cap (default: all cores)");
    auto* o_out = app.add_option("--out", flags.out, "output directory");
    auto* o_cache = app.add_option("--cache", flags.cache, "table cache directory (env IPDSAW_CACHE)");
    auto* o_budget = app.add_option("--budget", flags.budget, "trial budget");
    auto* o_quick = app.add_flag("--quick", flags.quick, "quick selftest subset");

    std::string target;
    app.add_subcommand("constants", "model constants as JSON");
    app.add_subcommand("zpartition", "normalized partition function curve");
    app.add_subcommand("extension", "exact horizontal extension laws");
    app.add_subcommand("excursions", "excursion lengths, areas and overshoots");
    app.add_subcommand("shape", "collapsed-phase profile and envelope");
    app.add_subcommand("selftest", "run the acceptance criteria");
    app.add_subcommand("sample", "draw paths")
        ->add_option("kind", target, "perfect, exact, lifetime, tilted or mixture")
        ->required();
    app.add_subcommand("experiment", "run a registered experiment")
        ->add_option("name", target, "experiment name")
        ->required()
        ->check(CLI::IsMember(experiment_names()));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        report_error(err, "usage", e.what());
        return usage;
    }

    RunConfig c;
    if (!config_file.empty()) {
        try {
            std::ifstream f(config_file);
            c = config_from_json(json::parse(f));
        } catch (const json::exception& e) {
            report_error(err, "usage", std::string("bad config: ") + e.what());
            return usage;
        }
    }
    c.command = app.get_subcommands().front()->get_name();
    if (!target.empty()) c.target = target;
    if (o_beta->count()) c.beta = flags.beta;
    if (o_L->count()) c.L = flags.L;
    if (o_q->count()) c.q = flags.q;
    if (o_n->count()) c.n = flags.n;
    if (o_rep->count()) c.replicas = flags.replicas;
    if (o_seed->count()) c.seed = flags.seed;
    if (o_thr->count()) c.threads = flags.threads;
    if (o_out->count()) c.out = flags.out;
    if (o_cache->count()) c.cache = flags.cache;
    if (o_budget->count()) c.budget = flags.budget;
    if (o_quick->count()) c.quick = flags.quick;
    return run(c, out, err);
}

}  // namespace ipdsaw::cli
