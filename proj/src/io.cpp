#include "roughwalk/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace rw {

using nlohmann::json;

uint64_t fnv1a_bytes(const void* data, size_t n) {
    uint64_t h = 0xcbf29ce484222325ULL;
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

void reject_unknown(const json& j, const std::vector<std::string>& allowed,
                    const std::string& path) {
    for (const auto& [key, _] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError("unknown config key: " + path + key);
    }
}

ConductanceLaw parse_law(const json& j) {
    reject_unknown(j, {"kind", "c", "a", "b", "p", "alpha", "range"}, "law.");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") return ConductanceLaw::constant(j.value("c", 1.0));
    if (kind == "uniform")
        return ConductanceLaw::uniform_interval(j.at("a").get<double>(), j.at("b").get<double>());
    if (kind == "percolation")
        return ConductanceLaw::percolation_weighted(j.at("p").get<double>(),
                                                    j.at("a").get<double>(),
                                                    j.at("b").get<double>());
    if (kind == "line")
        return ConductanceLaw::line_model(j.at("a").get<double>(), j.at("b").get<double>());
    if (kind == "longrange")
        return ConductanceLaw::long_range_poly(j.at("alpha").get<double>(),
                                               j.at("range").get<int>(), j.at("a").get<double>(),
                                               j.at("b").get<double>());
    throw ConfigError("unknown config value: law.kind = " + kind);
}

json law_to_json(const ConductanceLaw& law) {
    json j;
    switch (law.kind) {
        case LawKind::Constant:
            j["kind"] = "constant";
            j["c"] = law.a;
            break;
        case LawKind::UniformInterval:
            j["kind"] = "uniform";
            j["a"] = law.a;
            j["b"] = law.b;
            break;
        case LawKind::PercolationWeighted:
            j["kind"] = "percolation";
            j["p"] = law.p;
            j["a"] = law.a;
            j["b"] = law.b;
            break;
        case LawKind::LineModel:
            j["kind"] = "line";
            j["a"] = law.a;
            j["b"] = law.b;
            break;
        case LawKind::LongRangePoly:
            j["kind"] = "longrange";
            j["alpha"] = law.alpha;
            j["range"] = law.range;
            j["a"] = law.a;
            j["b"] = law.b;
            break;
    }
    return j;
}

}  // namespace

RunConfig parse_config(std::istream& is) {
    json j;
    try {
        j = json::parse(is);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        reject_unknown(j, {"law", "d", "L", "solver", "ensemble", "master_seed", "out", "checks"},
                       "");
        RunConfig cfg;
        cfg.law = parse_law(j.at("law"));
        cfg.d = j.value("d", 2);
        cfg.L = j.value("L", 16);
        if (j.contains("solver")) {
            reject_unknown(j["solver"], {"tol", "max_iters"}, "solver.");
            cfg.solver_tol = j["solver"].value("tol", 1e-10);
            cfg.solver_max_iters = j["solver"].value("max_iters", 20000);
        }
        if (j.contains("ensemble")) {
            const auto& je = j["ensemble"];
            reject_unknown(je, {"K", "n_list", "T", "p", "mode", "start", "threads"},
                           "ensemble.");
            cfg.ensemble.K = je.value("K", 200);
            if (je.contains("n_list"))
                cfg.ensemble.n_list = je["n_list"].get<std::vector<double>>();
            cfg.ensemble.T = je.value("T", 1.0);
            cfg.ensemble.p = je.value("p", 3.0);
            const std::string mode = je.value("mode", std::string("quenched"));
            if (mode == "quenched")
                cfg.ensemble.mode = EnsembleMode::Quenched;
            else if (mode == "annealed")
                cfg.ensemble.mode = EnsembleMode::Annealed;
            else
                throw ConfigError("unknown config value: ensemble.mode = " + mode);
            const std::string start = je.value("start", std::string("uniform"));
            if (start == "uniform")
                cfg.ensemble.start = StartPolicy::UniformOnGiant;
            else if (start == "origin")
                cfg.ensemble.start = StartPolicy::OriginIfInGiant;
            else
                throw ConfigError("unknown config value: ensemble.start = " + start);
            cfg.ensemble.threads = je.value("threads", 0);
        }
        cfg.master_seed = j.value("master_seed", uint64_t{1});
        cfg.out_dir = j.value("out", std::string("out"));
        if (j.contains("checks")) cfg.checks = j["checks"].get<std::vector<std::string>>();

        cfg.ensemble.master_seed = cfg.master_seed;
        cfg.ensemble.law = cfg.law;
        cfg.ensemble.solver_tol = cfg.solver_tol;
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config schema violation: ") + e.what());
    }
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    return parse_config(is);
}

std::string config_to_json(const RunConfig& cfg) {
    json j;
    j["law"] = law_to_json(cfg.law);
    j["d"] = cfg.d;
    j["L"] = cfg.L;
    j["solver"] = {{"tol", cfg.solver_tol}, {"max_iters", cfg.solver_max_iters}};
    json je;
    je["K"] = cfg.ensemble.K;
    je["n_list"] = cfg.ensemble.n_list;
    je["T"] = cfg.ensemble.T;
    je["p"] = cfg.ensemble.p;
    je["mode"] = cfg.ensemble.mode == EnsembleMode::Quenched ? "quenched" : "annealed";
    je["start"] = cfg.ensemble.start == StartPolicy::UniformOnGiant ? "uniform" : "origin";
    j["ensemble"] = std::move(je);
    j["master_seed"] = cfg.master_seed;
    j["out"] = cfg.out_dir;
    j["checks"] = cfg.checks;
    return j.dump(2);
}

uint64_t RunConfig::hash() const {
    const std::string s = config_to_json(*this);
    return fnv1a_bytes(s.data(), s.size());
}

void write_meta(const std::string& path, uint64_t config_hash, uint64_t env_hash) {
    json j;
    j["schema_version"] = 1;
    j["config_hash"] = config_hash;
    j["env_hash"] = env_hash;
    std::ofstream os(path);
    os << j.dump(2) << "\n";
}

void write_stats_json(const HomogenizedStats& stats, const CocycleField& field,
                      uint64_t config_hash, double tol, std::ostream& os) {
    auto mat_to_json = [&](const Mat& m) {
        json rows = json::array();
        for (int i = 0; i < m.d; ++i) {
            json row = json::array();
            for (int j = 0; j < m.d; ++j) row.push_back(m(i, j));
            rows.push_back(std::move(row));
        }
        return rows;
    };
    json j;
    j["schema_version"] = 1;
    j["config_hash"] = config_hash;
    j["env_hash"] = field.env_hash;
    j["tol"] = tol;
    j["residual"] = field.residual;
    j["solver_iters"] = field.solver_iters;
    j["sigma2"] = mat_to_json(stats.sigma2);
    j["gamma"] = mat_to_json(stats.gamma);
    j["m2"] = mat_to_json(stats.m2);
    j["m2_scalar"] = stats.m2_scalar;
    j["density"] = stats.density;
    os << j.dump(2) << "\n";
}

JumpPath parse_path_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw IntegrityError("empty path CSV");
    int d = 0;
    for (char c : line)
        if (c == ',') ++d;
    if (d < 1 || d > kMaxDim) throw IntegrityError("bad path CSV header");

    JumpPath path;
    path.d = d;
    bool first = true;
    double t = 0;
    Vec x = Vec::zero(d);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::getline(ls, cell, ',');
        t = std::stod(cell);
        for (int i = 0; i < d; ++i) {
            std::getline(ls, cell, ',');
            x[i] = std::stod(cell);
        }
        if (first) {
            first = false;  // t = 0 row
            continue;
        }
        path.times.push_back(t);
        path.positions.push_back(x);
    }
    if (path.times.empty()) throw IntegrityError("path CSV has no rows");
    // Final row is the t = T sentinel (no jump).
    path.T = path.times.back();
    path.times.pop_back();
    path.positions.pop_back();
    return path;
}

}  // namespace rw
