#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "roughwalk/corrector.hpp"
#include "roughwalk/diagnostics.hpp"
#include "roughwalk/env.hpp"
#include "roughwalk/walk.hpp"

// Run configuration (single JSON file, schema-validated, unknown keys
// rejected) and artifact helpers shared by the CLI and tests.

namespace rw {

struct RunConfig {
    ConductanceLaw law;
    int d = 2;
    int L = 16;
    double solver_tol = 1e-10;
    int solver_max_iters = 20000;
    EnsembleSpec ensemble;
    uint64_t master_seed = 1;
    std::string out_dir = "out";
    std::vector<std::string> checks;  // empty = all

    uint64_t hash() const;  // FNV-1a over the canonical JSON dump
};

RunConfig parse_config(std::istream& is);           // throws ConfigError with key path
RunConfig load_config(const std::string& path);
std::string config_to_json(const RunConfig& cfg);   // canonical dump

uint64_t fnv1a_bytes(const void* data, size_t n);

// Artifact sidecar: {schema_version, config_hash, env_hash}.
void write_meta(const std::string& path, uint64_t config_hash, uint64_t env_hash);

void write_stats_json(const HomogenizedStats& stats, const CocycleField& field,
                      uint64_t config_hash, double tol, std::ostream& os);

// Path CSV round trip (the simulate/lift exchange format).
JumpPath parse_path_csv(std::istream& is);

}  // namespace rw
