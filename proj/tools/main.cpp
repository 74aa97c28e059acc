// roughwalk: generate -> solve -> simulate -> lift -> measure -> report.
//
// Exit codes: 0 ok, 1 verdict failure, 2 usage/config error, 3 integrity error.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "roughwalk/diagnostics.hpp"
#include "roughwalk/io.hpp"
#include "roughwalk/pvar.hpp"
#include "roughwalk/rng.hpp"
#include "roughwalk/roughpath.hpp"

namespace fs = std::filesystem;
using namespace rw;

namespace {

Environment load_env(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IntegrityError("cannot open environment file: " + path);
    return Environment::deserialize(is);
}

CocycleField load_field(const std::string& path, const Environment& env) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IntegrityError("cannot open field file: " + path);
    CocycleField field = deserialize_field(is);
    if (field.env_hash != env.content_hash())
        throw IntegrityError("field/environment hash mismatch (mixed provenance)");
    return field;
}

int cmd_gen_env(const RunConfig& cfg) {
    const Environment env = gen_env(cfg.law, cfg.d, cfg.L, cfg.master_seed);
    fs::create_directories(cfg.out_dir);
    const std::string out = cfg.out_dir + "/env.bin";
    std::ofstream os(out, std::ios::binary);
    env.serialize(os);
    os.close();
    write_meta(cfg.out_dir + "/env.meta.json", cfg.hash(), env.content_hash());
    std::cout << "wrote " << out << " (hash " << env.content_hash() << ")\n";
    return 0;
}

int cmd_solve(const RunConfig& cfg, const std::string& env_path) {
    const Environment env = load_env(env_path);
    const ClusterLabels labels = clusters(env);
    const CocycleField field = solve_harmonic(env, labels, cfg.solver_tol, cfg.solver_max_iters);
    const HomogenizedStats stats = sigma_gamma(env, labels, field);
    fs::create_directories(cfg.out_dir);
    {
        std::ofstream os(cfg.out_dir + "/field.bin", std::ios::binary);
        serialize_field(field, os);
    }
    {
        std::ofstream os(cfg.out_dir + "/stats.json");
        write_stats_json(stats, field, cfg.hash(), cfg.solver_tol, os);
    }
    std::cout << "solved corrector: residual " << field.residual << ", iters "
              << field.solver_iters << "\n";
    return 0;
}

int cmd_simulate(const RunConfig& cfg, const std::string& env_path, int count) {
    const Environment env = load_env(env_path);
    const ClusterLabels labels = clusters(env);
    fs::create_directories(cfg.out_dir);
    for (int k = 0; k < count; ++k) {
        const JumpPath path =
            simulate(env, labels, cfg.ensemble.n_list.back() * cfg.ensemble.T,
                     mix_seed(cfg.master_seed, static_cast<uint64_t>(k)), cfg.ensemble.start);
        std::ofstream os(cfg.out_dir + "/path_" + std::to_string(k) + ".csv");
        export_path_csv(path, os);
    }
    write_meta(cfg.out_dir + "/paths.meta.json", cfg.hash(), env.content_hash());
    std::cout << "wrote " << count << " path file(s) to " << cfg.out_dir << "\n";
    return 0;
}

int cmd_lift(const std::string& path_csv, const std::string& out, bool stratonovich) {
    std::ifstream is(path_csv);
    if (!is) throw IntegrityError("cannot open path CSV: " + path_csv);
    const JumpPath path = parse_path_csv(is);
    const Level2Path l2 = stratonovich ? stratonovich_lift(path) : ito_lift(path);
    std::ofstream os(out);
    export_lift_csv(l2, os);
    std::cout << "wrote " << out << "\n";
    return 0;
}

int cmd_pvar(const std::string& path_csv, double p, int64_t block) {
    std::ifstream is(path_csv);
    if (!is) throw IntegrityError("cannot open path CSV: " + path_csv);
    const JumpPath path = parse_path_csv(is);
    const VecPath v = to_vec_path(path);
    if (v.n_jumps() <= kExactPvarCap) {
        std::cout << "pvar_exact(p=" << p << ") = " << pvar_exact(v, p).value << "\n";
    } else {
        const PvarInterval iv = pvar_capped(v, p, block);
        std::cout << "pvar_capped(p=" << p << ", block=" << block << ") in [" << iv.lower << ", "
                  << iv.upper << "]\n";
    }
    return 0;
}

int cmd_diagnose(const RunConfig& cfg, const std::string& env_path,
                 const std::string& field_path) {
    const Environment env = load_env(env_path);
    const ClusterLabels labels = clusters(env);
    const CocycleField field = load_field(field_path, env);
    const HomogenizedStats stats = sigma_gamma(env, labels, field);

    DiagnosticsReport report = run_diagnostics(env, labels, field, stats, cfg.ensemble, cfg.checks);
    report.config_hash = cfg.hash();
    fs::create_directories(cfg.out_dir);
    {
        std::ofstream os(cfg.out_dir + "/report.json");
        report_to_json(report, os);
    }
    {
        std::ofstream os(cfg.out_dir + "/report.csv");
        report_to_csv(report, os);
    }
    for (const auto& c : report.checks)
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
    return report.all_pass() ? 0 : 1;
}

int cmd_verify(const std::string& report_path, const RunConfig* cfg) {
    std::ifstream is(report_path);
    if (!is) throw IntegrityError("cannot open report: " + report_path);
    const DiagnosticsReport report = report_from_json(is);
    if (cfg && report.config_hash != cfg->hash())
        throw IntegrityError("report/config hash mismatch (mixed provenance)");
    int failed = 0;
    for (const auto& c : report.checks) {
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
        if (!c.pass) ++failed;
    }
    if (failed > 0) {
        std::cout << failed << " check(s) failed\n";
        return 1;
    }
    std::cout << "all checks passed\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"random walks among random conductances, lifted to rough paths"};
    app.require_subcommand(1);

    std::string config_path, env_path, field_path, path_csv, report_path, out_override;
    uint64_t seed_override = 0;
    bool has_seed = false;
    int threads = 0;

    app.add_option("--config", config_path, "run configuration JSON");
    app.add_option("--seed", seed_override, "override master seed")->each([&](const std::string&) {
        has_seed = true;
    });
    app.add_option("--out", out_override, "override output directory");
    app.add_option("--threads", threads, "worker threads (0 = hardware)");

    auto* gen = app.add_subcommand("gen-env", "generate an environment file");
    auto* solve = app.add_subcommand("solve", "solve corrector and homogenized stats");
    solve->add_option("--env", env_path, "environment file")->required();
    auto* sim = app.add_subcommand("simulate", "simulate walks to CSV");
    sim->add_option("--env", env_path, "environment file")->required();
    int sim_count = 1;
    sim->add_option("--count", sim_count, "number of walks");
    auto* lift = app.add_subcommand("lift", "lift a path CSV to level 2");
    lift->add_option("--path", path_csv, "path CSV")->required();
    std::string lift_out = "lift.csv";
    lift->add_option("--lift-out", lift_out, "output CSV");
    bool strat = false;
    lift->add_flag("--stratonovich", strat, "Stratonovich lift (default Ito)");
    auto* pvar = app.add_subcommand("pvar", "p-variation of a path CSV");
    pvar->add_option("--path", path_csv, "path CSV")->required();
    double pexp = 3.0;
    pvar->add_option("-p", pexp, "variation exponent");
    int64_t block = 1024;
    pvar->add_option("--block", block, "block size for capped method");
    auto* diag = app.add_subcommand("diagnose", "run the diagnostics suite");
    diag->add_option("--env", env_path, "environment file")->required();
    diag->add_option("--field", field_path, "corrector field file")->required();
    auto* verify = app.add_subcommand("verify", "re-check verdicts of a report");
    verify->add_option("--report", report_path, "report JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        RunConfig cfg;
        const bool needs_cfg = gen->parsed() || solve->parsed() || sim->parsed() || diag->parsed();
        if (!config_path.empty()) {
            cfg = load_config(config_path);
        } else if (needs_cfg) {
            throw ConfigError("--config is required for this subcommand");
        }
        if (has_seed) {
            cfg.master_seed = seed_override;
            cfg.ensemble.master_seed = seed_override;
        }
        if (!out_override.empty()) cfg.out_dir = out_override;
        if (threads > 0) cfg.ensemble.threads = threads;

        if (gen->parsed()) return cmd_gen_env(cfg);
        if (solve->parsed()) return cmd_solve(cfg, env_path);
        if (sim->parsed()) return cmd_simulate(cfg, env_path, sim_count);
        if (lift->parsed()) return cmd_lift(path_csv, lift_out, strat);
        if (pvar->parsed()) return cmd_pvar(path_csv, pexp, block);
        if (diag->parsed()) return cmd_diagnose(cfg, env_path, field_path);
        if (verify->parsed())
            return cmd_verify(report_path, config_path.empty() ? nullptr : &cfg);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ParamError& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return 2;
    } catch (const IntegrityError& e) {
        std::cerr << "integrity error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
