// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are pinned here and nowhere else.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <vector>

#include "roughwalk/diagnostics.hpp"
#include "roughwalk/pvar.hpp"
#include "roughwalk/rng.hpp"
#include "roughwalk/roughpath.hpp"

using namespace rw;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("%s  criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

VecPath random_vec_path(Rng& rng, int m, double T = 1.0) {
    VecPath p;
    p.d = 2;
    p.T = T;
    Vec x = Vec::zero(2);
    std::vector<double> ts;
    for (int k = 0; k < m; ++k) ts.push_back(rng.uniform(0.0, T));
    std::sort(ts.begin(), ts.end());
    for (int k = 0; k < m; ++k) {
        const int dir = static_cast<int>(rng.next_u64() % 4);
        x[dir / 2] += (dir % 2) ? 1.0 : -1.0;
        p.times.push_back(ts[k]);
        p.vals.push_back(x);
    }
    return p;
}

struct Solved {
    Environment env;
    ClusterLabels labels;
    CocycleField field;
    HomogenizedStats stats;
};

Solved solve_env(const ConductanceLaw& law, int L, uint64_t seed, double tol = 1e-10) {
    Solved s;
    s.env = gen_env(law, 2, L, seed);
    s.labels = clusters(s.env);
    s.field = solve_harmonic(s.env, s.labels, tol, 100000);
    s.stats = sigma_gamma(s.env, s.labels, s.field);
    return s;
}

// ---- criteria 1-3: level-2 algebra on simulated paths --------------------

void criteria_1_to_3() {
    const Environment env = gen_env(ConductanceLaw::uniform_interval(1.0, 10.0), 2, 16, 1);
    const ClusterLabels labels = clusters(env);
    const JumpSampler sampler(env);

    double worst_chen = 0, worst_sbp = 0, worst_iss = 0;
    Rng rng(0xc0ffee);
    for (int pi = 0; pi < 100; ++pi) {
        const JumpPath jp =
            simulate(env, labels, sampler, 1.0, mix_seed(2, pi), StartPolicy::UniformOnGiant);
        const VecPath x = to_vec_path(jp);
        const Level2Path ito = ito_lift(x);
        const Level2Path strat = stratonovich_lift(x);
        const TwoParamAccumulator q = quadratic_covariation(x, x);

        double maxx = 0;
        for (const Vec& v : x.vals) maxx = std::max(maxx, max_abs(v));
        const double chen_scale = 1e-9 * (1.0 + maxx * maxx);

        for (int probe = 0; probe < 1000; ++probe) {
            double r = rng.uniform(0.0, 1.0), s = rng.uniform(0.0, 1.0),
                   t = rng.uniform(0.0, 1.0);
            if (r > s) std::swap(r, s);
            if (s > t) std::swap(s, t);
            if (r > s) std::swap(r, s);
            const Mat defect = chen_eval(ito, r, t) - chen_eval(ito, r, s) -
                               chen_eval(ito, s, t) -
                               outer(x.at(s) - x.at(r), x.at(t) - x.at(s));
            worst_chen = std::max(worst_chen, max_abs(defect) / chen_scale);
        }

        // Y: an independent functional on the same skeleton.
        VecPath y = x;
        for (size_t k = 0; k < y.vals.size(); ++k)
            y.vals[k] = Vec{2, {x.vals[k][1] - 0.5 * x.vals[k][0], 2.0 * x.vals[k][0], 0}};
        for (int probe = 0; probe < 100; ++probe) {
            double s = rng.uniform(0.0, 1.0), t = rng.uniform(0.0, 1.0);
            if (s > t) std::swap(s, t);
            const Mat lhs =
                left_point_integral(x, y, s, t) + left_point_integral(y, x, s, t).transpose();
            const Mat rhs =
                outer(x.at(t) - x.at(s), y.at(t) - y.at(s)) - quadratic_covariation(x, y, s, t);
            const double scale = std::max(1.0, std::max(max_abs(lhs), max_abs(rhs)));
            worst_sbp = std::max(worst_sbp, max_abs(lhs - rhs) / scale);
        }

        for (int64_t c = 0; c <= x.n_jumps(); ++c)
            worst_iss = std::max(
                worst_iss, max_abs(strat.prefix_at(c) - ito.prefix_at(c) - 0.5 * q.prefix_at(c)));
    }

    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "Chen defect %.3e of the 1e-9(1+max|X|^2) budget on 100 paths x 1000 triples",
                  worst_chen);
    report(1, worst_chen <= 1.0, buf);
    std::snprintf(buf, sizeof buf, "summation-by-parts max relative defect %.3e (tol 1e-10)",
                  worst_sbp);
    report(2, worst_sbp <= 1e-10, buf);
    std::snprintf(buf, sizeof buf,
                  "Stratonovich - Ito - Q/2 max entry %.3e (must be exactly 0)", worst_iss);
    report(3, worst_iss == 0.0, buf);
}

// ---- criterion 4: DP vs brute force ---------------------------------------

double brute_pvar_p(const VecPath& p, double pw) {
    const int m = static_cast<int>(p.n_jumps());
    double best = 0;
    for (uint32_t mask = 0; mask < (1u << (m - 1)); ++mask) {
        double total = 0;
        int64_t prev = 0;
        for (int c = 1; c <= m; ++c) {
            if (c != m && !((mask >> (c - 1)) & 1)) continue;
            total += std::pow(norm2(p.value_at(c) - p.value_at(prev)), pw);
            prev = c;
        }
        best = std::max(best, total);
    }
    return best;
}

double brute_p2var_q(const Level2Path& l2, double q) {
    const int m = static_cast<int>(l2.base.n_jumps());
    double best = 0;
    for (uint32_t mask = 0; mask < (1u << (m - 1)); ++mask) {
        double total = 0;
        int64_t prev = 0;
        for (int c = 1; c <= m; ++c) {
            if (c != m && !((mask >> (c - 1)) & 1)) continue;
            total += std::pow(frobenius(l2.window(prev, c)), q);
            prev = c;
        }
        best = std::max(best, total);
    }
    return best;
}

void criterion_4() {
    Rng rng(0xdb);
    double worst = 0;
    for (int rep = 0; rep < 500; ++rep) {
        const int m = 3 + static_cast<int>(rng.next_u64() % 10);  // 3..12 jumps
        const VecPath p = random_vec_path(rng, m);
        for (double pw : {2.5, 3.0, 4.0}) {
            const double dp = pvar_exact(p, pw).value;
            const double oracle = std::pow(brute_pvar_p(p, pw), 1.0 / pw);
            worst = std::max(worst, std::fabs(dp - oracle) / std::max(1e-300, oracle));
        }
    }
    double worst2 = 0;
    for (int rep = 0; rep < 200; ++rep) {
        const int m = 3 + static_cast<int>(rng.next_u64() % 6);  // 3..8 jumps
        const Level2Path l2 = ito_lift(random_vec_path(rng, m));
        for (double q : {1.25, 1.5, 2.0}) {
            const double dp = p2var_exact(l2, q).value;
            const double oracle = std::pow(brute_p2var_q(l2, q), 1.0 / q);
            if (oracle == 0.0) {
                worst2 = std::max(worst2, dp);
                continue;
            }
            worst2 = std::max(worst2, std::fabs(dp - oracle) / oracle);
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "p-var DP vs exhaustive: rel err %.3e (1-param), %.3e (2-param); tol 1e-12",
                  worst, worst2);
    report(4, worst <= 1e-12 && worst2 <= 1e-12, buf);
}

// ---- criteria 5-6: solver identities --------------------------------------

void criteria_5_and_6(const Solved& u64) {
    const double tol = 1e-10;
    double worst = 0;
    const Solved perc = solve_env(ConductanceLaw::percolation_weighted(0.7, 1.0, 2.0), 64, 3, tol);
    const Solved cons = solve_env(ConductanceLaw::constant(1.0), 2 * 8, 1, tol);
    const Solved line = solve_env(ConductanceLaw::line_model(1.0, 2.0), 16, 2, tol);
    for (const Solved* s : {&u64, &perc, &cons, &line}) {
        const Mat defect = s->stats.m2 - (s->stats.sigma2 - 2.0 * s->stats.gamma);
        worst = std::max(worst, max_abs(defect) / std::max(1e-300, max_abs(s->stats.m2)));
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "Pythagoras |M2-(Sigma2-2Gamma)| %.3e of |M2| (cap 10*tol = 1e-9)", worst);
    report(5, worst <= 10 * tol, buf);

    double chi_inf = 0;
    for (int64_t s = 0; s < cons.env.n_sites(); ++s)
        chi_inf = std::max(chi_inf, max_abs(cons.field.chi_at(s)));
    double line_chi = 0;
    for (int64_t s = 0; s < line.env.n_sites(); ++s)
        line_chi = std::max(line_chi, max_abs(line.field.chi_at(s)));
    const bool pass = chi_inf <= 1e-8 &&
                      max_abs(cons.stats.sigma2 - 2.0 * Mat::identity(2)) <= 1e-8 &&
                      max_abs(cons.stats.gamma) <= 1e-8 && line_chi == 0.0 &&
                      max_abs(line.stats.gamma) == 0.0;
    std::snprintf(buf, sizeof buf,
                  "degenerate refs: const |chi| %.1e, |Sigma2-2I| %.1e, |Gamma| %.1e; "
                  "line |chi| %.1e, |Gamma| %.1e",
                  chi_inf, max_abs(cons.stats.sigma2 - 2.0 * Mat::identity(2)),
                  max_abs(cons.stats.gamma), line_chi, max_abs(line.stats.gamma));
    report(6, pass, buf);
}

// ---- criteria 7-8: the main Monte Carlo run --------------------------------

void criterion_7(const Solved& s) {
    EnsembleSpec spec;
    spec.K = 20000;
    spec.n_list = {400};
    spec.T = 1.0;
    spec.p = 6.0;
    spec.master_seed = 7;
    spec.start = StartPolicy::UniformOnGiant;
    const CheckResult r = area_anomaly_mc(s.env, s.labels, s.field, s.stats, spec);
    report(7, r.pass, "area anomaly, n=400 K=2e4: " + r.detail);
}

void criterion_8(const Solved& s) {
    EnsembleSpec spec;
    spec.K = 200;
    spec.n_list = {25, 100, 400};
    spec.T = 1.0;
    // p = 6: the corrector p-variation shrinks like n^{-(p-2)/(2p)} per scale
    // step, so the required 1.5x decay per 4x in n needs p >= 4.82.
    spec.p = 6.0;
    spec.master_seed = 8;
    spec.start = StartPolicy::UniformOnGiant;

    const CheckResult qv = qv_limit_check(s.env, s.labels, s.field, s.stats, spec);
    const CheckResult ucv = ucv_check(s.env, s.labels, s.field, s.stats, spec);
    const CheckResult lind =
        lindeberg_check(s.env, s.labels, s.field, s.stats, spec, Vec{2, {1, 0, 0}}, 0.5);
    const CheckResult cpv = corrector_pvar_decay(s.env, s.labels, s.field, spec);
    const CheckResult ca = corrector_area_check(s.env, s.labels, s.field, s.stats, spec);
    // The mixed-Q statistic is bounded below by the endpoint value
    // |Q(M,R)_{0,T}|, whose mean is a CLT-scale fluctuation (~n^{-1/4} after
    // the square root). At n = 400 on this environment that floor already
    // sits at the 10% threshold, so this sub-check is expected to report a
    // failure for any choice of p; the measured value is left visible rather
    // than papering over it with a looser threshold.
    const CheckResult mq = mixed_q_check(s.env, s.labels, s.field, s.stats, spec);

    bool pass = true;
    std::string detail = "suite:";
    for (const CheckResult* c : {&qv, &ucv, &lind, &cpv, &ca, &mq}) {
        pass = pass && c->pass;
        detail += " " + c->name + (c->pass ? "=ok" : "=FAIL(" + c->detail + ")");
    }
    report(8, pass, detail);
}

// ---- criterion 9: transfer lemma decay -------------------------------------

void criterion_9() {
    std::vector<double> r4, r8;
    for (uint64_t seed = 1; seed <= 5; ++seed) {
        const Solved s = solve_env(ConductanceLaw::uniform_interval(1.0, 10.0), 64, seed);
        const double e4 = potential_box_average(s.env, s.labels, s.field, 4).e_rms;
        const double e8 = potential_box_average(s.env, s.labels, s.field, 8).e_rms;
        const double e16 = potential_box_average(s.env, s.labels, s.field, 16).e_rms;
        r4.push_back(e8 / e4);
        r8.push_back(e16 / e8);
    }
    const double m4 = sample_quantile(r4, 0.5), m8 = sample_quantile(r8, 0.5);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "transfer E_rms ratios (5-seed medians): E(8)/E(4)=%.3f, E(16)/E(8)=%.3f "
                  "(need [0.3, 0.8])",
                  m4, m8);
    report(9, m4 >= 0.3 && m4 <= 0.8 && m8 >= 0.3 && m8 <= 0.8, buf);
}

// ---- criteria 10-11 ---------------------------------------------------------

void criterion_10() {
    const CheckResult r = isotropy_check(ConductanceLaw::percolation_weighted(0.7, 1.0, 2.0), 2,
                                         64, 20, 1e-10, 10);
    report(10, r.pass, "percolation scalar structure over 20 envs: " + r.detail);
}

void criterion_11() {
    const Solved s = solve_env(ConductanceLaw::constant(1.0), 16, 1);
    EnsembleSpec spec;
    spec.K = 10000;
    spec.n_list = {400};
    spec.T = 1.0;
    spec.p = 3.0;
    spec.master_seed = 11;
    const CheckResult r =
        gaussianity_check(s.env, s.labels, s.field, s.stats, spec, Vec{2, {1, 0, 0}});
    report(11, r.pass, "gaussianity surrogate at n=400, K=1e4: " + r.detail);
}

}  // namespace

int main() {
    criteria_1_to_3();
    criterion_4();

    const Solved u64 = solve_env(ConductanceLaw::uniform_interval(1.0, 10.0), 64, 1);
    criteria_5_and_6(u64);
    criterion_7(u64);
    criterion_8(u64);
    criterion_9();
    criterion_10();
    criterion_11();

    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
