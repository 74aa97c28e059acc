#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "roughwalk/corrector.hpp"
#include "roughwalk/env.hpp"
#include "roughwalk/pvar.hpp"
#include "roughwalk/roughpath.hpp"
#include "roughwalk/walk.hpp"

// Monte Carlo estimators and pass/fail verdicts for the hypotheses behind the
// invariance principle: quadratic-variation limits, UCV, Lindeberg, corrector
// p-variation decay, corrector area convergence, mixed covariations, the area
// anomaly, percolation isotropy, and a CLT moment surrogate.
//
// Convergence-in-probability claims carry no rate, so verdicts are
// monotone-trend plus final-threshold checks over a geometric n_list.
// All sup_t statistics are evaluated at jump times, left limits, and T.

namespace rw {

enum class EnsembleMode { Quenched, Annealed };

struct EnsembleSpec {
    int K = 200;                               // walks per scale
    std::vector<double> n_list = {25, 100, 400};
    double T = 1.0;                            // horizon after rescaling
    double p = 3.0;                            // variation exponent (> 2)
    uint64_t master_seed = 1;
    EnsembleMode mode = EnsembleMode::Quenched;
    StartPolicy start = StartPolicy::UniformOnGiant;
    int threads = 0;                           // 0 = hardware concurrency
    // Annealed mode regenerates the environment per walk from this law.
    ConductanceLaw law;
    double solver_tol = 1e-10;

    void validate() const;
};

struct StatRow {
    double n = 0;
    std::string stat;
    double value = 0;
    double stderr_ = 0;  // 0 when not a mean
};

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
    std::vector<StatRow> rows;
};

struct DiagnosticsReport {
    int schema_version = 1;
    uint64_t env_hash = 0;
    uint64_t config_hash = 0;
    uint64_t master_seed = 0;
    double solver_residual = 0;
    std::vector<CheckResult> checks;

    bool all_pass() const;
};

CheckResult qv_limit_check(const Environment& env, const ClusterLabels& labels,
                           const CocycleField& field, const HomogenizedStats& stats,
                           const EnsembleSpec& spec);

CheckResult ucv_check(const Environment& env, const ClusterLabels& labels,
                      const CocycleField& field, const HomogenizedStats& stats,
                      const EnsembleSpec& spec);

CheckResult lindeberg_check(const Environment& env, const ClusterLabels& labels,
                            const CocycleField& field, const HomogenizedStats& stats,
                            const EnsembleSpec& spec, const Vec& v, double delta);

CheckResult corrector_pvar_decay(const Environment& env, const ClusterLabels& labels,
                                 const CocycleField& field, const EnsembleSpec& spec);

CheckResult corrector_area_check(const Environment& env, const ClusterLabels& labels,
                                 const CocycleField& field, const HomogenizedStats& stats,
                                 const EnsembleSpec& spec);

CheckResult mixed_q_check(const Environment& env, const ClusterLabels& labels,
                          const CocycleField& field, const HomogenizedStats& stats,
                          const EnsembleSpec& spec);

// Means of the Ito and Stratonovich level-2 endpoints at the largest n:
// E XX^n_{0,T} -> T Gamma and E XXbar^n_{0,T} -> T/2 Sigma^2.
CheckResult area_anomaly_mc(const Environment& env, const ClusterLabels& labels,
                            const CocycleField& field, const HomogenizedStats& stats,
                            const EnsembleSpec& spec);

CheckResult gaussianity_check(const Environment& env, const ClusterLabels& labels,
                              const CocycleField& field, const HomogenizedStats& stats,
                              const EnsembleSpec& spec, const Vec& v);

// Scalar structure over independent percolation environments:
// Sigma^2 = sigma^2 I, Gamma = gamma I, gamma = -(m^2 - sigma^2)/2.
CheckResult isotropy_check(const ConductanceLaw& law, int d, int L, int n_envs, double tol,
                           uint64_t master_seed, int threads = 0);

DiagnosticsReport run_diagnostics(const Environment& env, const ClusterLabels& labels,
                                  const CocycleField& field, const HomogenizedStats& stats,
                                  const EnsembleSpec& spec, const std::vector<std::string>& checks);

void report_to_json(const DiagnosticsReport& report, std::ostream& os);
DiagnosticsReport report_from_json(std::istream& is);
void report_to_csv(const DiagnosticsReport& report, std::ostream& os);

// Sample summary helpers (also used by tests).
double sample_mean(const std::vector<double>& xs);
double sample_stderr(const std::vector<double>& xs);
double sample_quantile(std::vector<double> xs, double q);

}  // namespace rw
