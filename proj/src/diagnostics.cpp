#include "roughwalk/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "roughwalk/rng.hpp"

namespace rw {

using nlohmann::json;

void EnsembleSpec::validate() const {
    if (K < 100) throw ParamError("spec.K must be >= 100");
    if (n_list.empty()) throw ParamError("spec.n_list must be nonempty");
    for (double n : n_list)
        if (!(n > 0)) throw ParamError("spec.n_list entries must be > 0");
    if (!(T > 0)) throw ParamError("spec.T must be > 0");
    if (!(p > 2)) throw ParamError("spec.p must be > 2");
}

double sample_mean(const std::vector<double>& xs) {
    double s = 0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double sample_stderr(const std::vector<double>& xs) {
    const double m = sample_mean(xs);
    double s2 = 0;
    for (double x : xs) s2 += (x - m) * (x - m);
    const auto k = static_cast<double>(xs.size());
    return std::sqrt(s2 / (k - 1) / k);
}

double sample_quantile(std::vector<double> xs, double q) {
    std::sort(xs.begin(), xs.end());
    const double pos = q * (static_cast<double>(xs.size()) - 1);
    const auto lo = static_cast<size_t>(pos);
    const size_t hi = std::min(lo + 1, xs.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return xs[lo] * (1 - frac) + xs[hi] * frac;
}

namespace {

int resolve_threads(int threads) {
    if (threads > 0) return threads;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs fn(k) for k in [0, K) on a fixed thread grid. Callers store results
// in slot k, so the reduction order is independent of scheduling.
void parallel_for(int K, int threads, const std::function<void(int)>& fn) {
    threads = std::min(resolve_threads(threads), K);
    if (threads <= 1) {
        for (int k = 0; k < K; ++k) fn(k);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mu;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (int k = t; k < K; k += threads) fn(k);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

// Per-walk context handed to check kernels. In annealed mode the environment,
// cluster labels and corrector are regenerated per walk with derived seeds.
struct WalkCtx {
    const Environment* env;
    const ClusterLabels* labels;
    const CocycleField* field;
    JumpPath raw;  // horizon n * T, unscaled
};

struct Runner {
    const Environment* env;
    const ClusterLabels* labels;
    const CocycleField* field;
    const EnsembleSpec* spec;

    // n_tag distinguishes seed streams across scales and checks.
    void run(double n, uint64_t n_tag, const std::function<void(int, const WalkCtx&)>& fn) const {
        const double horizon = n * spec->T;
        const uint64_t scale_seed = mix_seed(spec->master_seed, n_tag);
        if (spec->mode == EnsembleMode::Quenched) {
            const JumpSampler sampler(*env);
            parallel_for(spec->K, spec->threads, [&](int k) {
                WalkCtx ctx{env, labels, field, {}};
                ctx.raw = simulate(*env, *labels, sampler, horizon,
                                   mix_seed(scale_seed, static_cast<uint64_t>(k)), spec->start);
                fn(k, ctx);
            });
        } else {
            parallel_for(spec->K, spec->threads, [&](int k) {
                const uint64_t wseed = mix_seed(scale_seed, static_cast<uint64_t>(k));
                const Environment e =
                    gen_env(spec->law, env->dim(), env->side(), mix_seed(wseed, 0xe4));
                const ClusterLabels l = clusters(e);
                const CocycleField f = solve_harmonic(e, l, spec->solver_tol);
                WalkCtx ctx{&e, &l, &f, {}};
                ctx.raw = simulate(e, l, horizon, mix_seed(wseed, 0x3a), spec->start);
                fn(k, ctx);
            });
        }
    }
};

struct MRPair {
    VecPath m, r;
};

MRPair rescaled_mr(const WalkCtx& ctx, double n, double T) {
    auto [m_raw, r_raw] = decompose(ctx.raw, *ctx.env, *ctx.labels, *ctx.field);
    return {rescale(m_raw, n, T), rescale(r_raw, n, T)};
}

void push_row(CheckResult& res, double n, const std::string& stat, double value,
              double err = 0) {
    res.rows.push_back({n, stat, value, err});
}

bool decreasing(const std::vector<double>& v, bool strict) {
    for (size_t i = 1; i < v.size(); ++i) {
        if (strict ? !(v[i] < v[i - 1]) : !(v[i] <= v[i - 1])) return false;
    }
    return true;
}

std::string ij_name(const std::string& base, int i, int j) {
    return base + "_" + std::to_string(i + 1) + std::to_string(j + 1);
}

}  // namespace

CheckResult qv_limit_check(const Environment& env, const ClusterLabels& labels,
                           const CocycleField& field, const HomogenizedStats& stats,
                           const EnsembleSpec& spec) {
    spec.validate();
    Runner runner{&env, &labels, &field, &spec};
    CheckResult res;
    res.name = "qv_limit";
    const int d = env.dim();

    std::vector<double> medians;
    for (size_t ni = 0; ni < spec.n_list.size(); ++ni) {
        const double n = spec.n_list[ni];
        std::vector<double> supdev(static_cast<size_t>(spec.K));
        runner.run(n, 0x71760000u + ni, [&](int k, const WalkCtx& ctx) {
            const MRPair mr = rescaled_mr(ctx, n, spec.T);
            const TwoParamAccumulator q = quadratic_covariation(mr.m, mr.m);
            double worst = 0;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    std::vector<double> pre(q.prefix.size());
                    for (size_t r = 0; r < pre.size(); ++r) pre[r] = q.prefix[r](i, j);
                    worst = std::max(
                        worst, sup_deviation_from_drift(q.times, q.T, pre, stats.sigma2(i, j)));
                }
            supdev[static_cast<size_t>(k)] = worst;
        });
        const double med = sample_quantile(supdev, 0.5);
        medians.push_back(med);
        push_row(res, n, "supdev_median", med);
        push_row(res, n, "supdev_q75", sample_quantile(supdev, 0.75));
    }
    res.pass = decreasing(medians, /*strict=*/true);
    res.detail = res.pass ? "medians strictly decreasing over n_list"
                          : "medians not strictly decreasing";
    return res;
}

CheckResult ucv_check(const Environment& env, const ClusterLabels& labels,
                      const CocycleField& field, const HomogenizedStats& stats,
                      const EnsembleSpec& spec) {
    spec.validate();
    Runner runner{&env, &labels, &field, &spec};
    CheckResult res;
    res.name = "ucv";
    const int d = env.dim();
    double trace_sigma2 = 0;
    for (int i = 0; i < d; ++i) trace_sigma2 += stats.sigma2(i, i);
    const double cap = 1.2 * trace_sigma2 * spec.T;

    bool pass = true;
    for (size_t ni = 0; ni < spec.n_list.size(); ++ni) {
        const double n = spec.n_list[ni];
        std::vector<std::vector<double>> qv_T(static_cast<size_t>(d * d));
        for (auto& v : qv_T) v.resize(static_cast<size_t>(spec.K));
        runner.run(n, 0x75630000u + ni, [&](int k, const WalkCtx& ctx) {
            const MRPair mr = rescaled_mr(ctx, n, spec.T);
            const TwoParamAccumulator q = quadratic_covariation(mr.m, mr.m);
            const Mat qT = q.prefix_at(static_cast<int64_t>(q.times.size()));
            for (int i = 0; i < d * d; ++i) qv_T[static_cast<size_t>(i)][static_cast<size_t>(k)] = qT.a[i];
        });
        double trace_mean = 0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                const auto& xs = qv_T[static_cast<size_t>(i * d + j)];
                const double mean = sample_mean(xs), err = sample_stderr(xs);
                push_row(res, n, ij_name("qv_T_mean", i, j), mean, err);
                if (i == j) {
                    trace_mean += mean;
                    if (std::fabs(mean - spec.T * stats.sigma2(i, j)) > 3 * err) pass = false;
                }
            }
        push_row(res, n, "qv_trace_mean", trace_mean);
        if (trace_mean > cap) pass = false;
    }
    res.pass = pass;
    res.detail = pass ? "diagonal means match T*Sigma2 within 3 stderr; trace below UCV cap"
                      : "UCV bound or mean-match failed";
    return res;
}

CheckResult lindeberg_check(const Environment& env, const ClusterLabels& labels,
                            const CocycleField& field, const HomogenizedStats& stats,
                            const EnsembleSpec& spec, const Vec& v, double delta) {
    spec.validate();
    CheckResult res;
    res.name = "lindeberg";
    if (norm2(v) == 0) {
        res.pass = true;
        res.detail = "skipped: degenerate direction v = 0";
        return res;
    }
    Runner runner{&env, &labels, &field, &spec};

    double vSv = 0;
    for (int i = 0; i < env.dim(); ++i)
        for (int j = 0; j < env.dim(); ++j) vSv += v[i] * stats.sigma2(i, j) * v[j];
    const double threshold = 0.01 * vSv * spec.T;

    std::vector<double> means;
    for (size_t ni = 0; ni < spec.n_list.size(); ++ni) {
        const double n = spec.n_list[ni];
        std::vector<double> stat(static_cast<size_t>(spec.K));
        runner.run(n, 0x6c640000u + ni, [&](int k, const WalkCtx& ctx) {
            const MRPair mr = rescaled_mr(ctx, n, spec.T);
            double acc = 0;
            Vec prev = Vec::zero(mr.m.d);
            for (const auto& cur : mr.m.vals) {
                const double jump = dot(v, cur - prev);
                if (std::fabs(jump) > delta) acc += jump * jump;
                prev = cur;
            }
            stat[static_cast<size_t>(k)] = acc;
        });
        const double mean = sample_mean(stat);
        means.push_back(mean);
        push_row(res, n, "truncated_sum_mean", mean, sample_stderr(stat));
    }
    res.pass = means.back() <= threshold && means.back() <= means.front();
    std::ostringstream os;
    os << "final mean " << means.back() << " vs threshold " << threshold;
    res.detail = os.str();
    return res;
}

CheckResult corrector_pvar_decay(const Environment& env, const ClusterLabels& labels,
                                 const CocycleField& field, const EnsembleSpec& spec) {
    spec.validate();
    Runner runner{&env, &labels, &field, &spec};
    CheckResult res;
    res.name = "corrector_pvar";

    std::vector<double> means;
    for (size_t ni = 0; ni < spec.n_list.size(); ++ni) {
        const double n = spec.n_list[ni];
        std::vector<double> stat(static_cast<size_t>(spec.K));
        runner.run(n, 0x52700000u + ni, [&](int k, const WalkCtx& ctx) {
            const MRPair mr = rescaled_mr(ctx, n, spec.T);
            double value;
            if (mr.r.n_jumps() <= kExactPvarCap) {
                value = pvar_exact(mr.r, spec.p).value;
            } else {
                value = pvar_capped(mr.r, spec.p, 1024).lower;
            }
            stat[static_cast<size_t>(k)] = value;
        });
        means.push_back(sample_mean(stat));
        push_row(res, n, "pvar_mean", means.back(), sample_stderr(stat));
    }
    // Required decay: factor 1.5 per 4x in n, interpolated for other steps.
    bool pass = true;
    for (size_t i = 1; i < spec.n_list.size(); ++i) {
        const double steps = std::log(spec.n_list[i] / spec.n_list[i - 1]) / std::log(4.0);
        const double factor = std::pow(1.5, steps);
        if (!(means[i] <= means[i - 1] / factor + 1e-300)) pass = false;
    }
    res.pass = pass;
    res.detail = pass ? "means decay by >= 1.5x per 4x in n" : "decay factor below 1.5 per 4x";
    return res;
}

CheckResult corrector_area_check(const Environment& env, const ClusterLabels& labels,
                                 const CocycleField& field, const HomogenizedStats& stats,
                                 const EnsembleSpec& spec) {
    spec.validate();
    Runner runner{&env, &labels, &field, &spec};
    CheckResult res;
    res.name = "corrector_area";
    const int d = env.dim();

    std::vector<double> medians;
    std::vector<std::vector<double>> endpoint(static_cast<size_t>(d * d));
    for (size_t ni = 0; ni < spec.n_list.size(); ++ni) {
        const double n = spec.n_list[ni];
        std::vector<double> supdev(static_cast<size_t>(spec.K));
        const bool largest = (ni + 1 == spec.n_list.size());
        if (largest)
            for (auto& v : endpoint) v.resize(static_cast<size_t>(spec.K));
        runner.run(n, 0x52610000u + ni, [&](int k, const WalkCtx& ctx) {
            const MRPair mr = rescaled_mr(ctx, n, spec.T);
            const TwoParamAccumulator rr = left_point_prefix(mr.r, mr.r);  // I(R,R) prefix
            supdev[static_cast<size_t>(k)] = sup_deviation_from_drift(rr, stats.gamma);
            if (largest) {
                const Mat end = rr.prefix_at(static_cast<int64_t>(rr.times.size()));
                for (int i = 0; i < d * d; ++i)
                    endpoint[static_cast<size_t>(i)][static_cast<size_t>(k)] = end.a[i];
            }
        });
        medians.push_back(sample_quantile(supdev, 0.5));
        push_row(res, n, "supdev_median", medians.back());
    }
    bool pass = decreasing(medians, /*strict=*/false);
    // Single-environment sanity: E I(R,R)_{0,T} ~ T*Gamma at the largest n.
    const double n_max = spec.n_list.back();
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const auto& xs = endpoint[static_cast<size_t>(i * d + j)];
            const double mean = sample_mean(xs), err = sample_stderr(xs);
            push_row(res, n_max, ij_name("area_T_mean", i, j), mean, err);
            if (std::fabs(mean - spec.T * stats.gamma(i, j)) > 3 * std::max(err, 1e-12))
                pass = false;
        }
    res.pass = pass;
    res.detail = pass ? "median deviation non-increasing; endpoint mean matches T*Gamma"
                      : "area deviation trend or endpoint match failed";
    return res;
}

CheckResult mixed_q_check(const Environment& env, const ClusterLabels& labels,
                          const CocycleField& field, const HomogenizedStats& stats,
                          const EnsembleSpec& spec) {
    spec.validate();
    Runner runner{&env, &labels, &field, &spec};
    CheckResult res;
    res.name = "mixed_q";

    std::vector<double> means;
    for (size_t ni = 0; ni < spec.n_list.size(); ++ni) {
        const double n = spec.n_list[ni];
        std::vector<double> stat(static_cast<size_t>(spec.K));
        runner.run(n, 0x6d710000u + ni, [&](int k, const WalkCtx& ctx) {
            const MRPair mr = rescaled_mr(ctx, n, spec.T);
            const TwoParamAccumulator q = quadratic_covariation(mr.m, mr.r);
            stat[static_cast<size_t>(k)] =
                std::sqrt(p2var_additive(q, spec.p / 2, kExactPvarCap * 4));
        });
        means.push_back(sample_mean(stat));
        push_row(res, n, "mixed_q_mean", means.back(), sample_stderr(stat));
    }
    const double guard = 1e-12;
    const double threshold =
        0.1 * std::sqrt(spec.T * spectral_norm(stats.sigma2) * spectral_norm(2.0 * stats.gamma) +
                        guard);
    // Torus realization of the orthogonality <Phi, chi> = 0 driving the limit.
    const Mat cross = phi_chi_cross_sum(env, labels, field);
    push_row(res, 1, "phi_chi_cross_max", max_abs(cross));

    bool pass = decreasing(means, /*strict=*/false) && means.back() <= threshold;
    if (max_abs(cross) > 10 * spec.solver_tol * std::max(1.0, max_abs(stats.m2))) pass = false;
    res.pass = pass;
    std::ostringstream os;
    os << "final mean " << means.back() << " vs threshold " << threshold;
    res.detail = os.str();
    return res;
}

CheckResult area_anomaly_mc(const Environment& env, const ClusterLabels& labels,
                            const CocycleField& field, const HomogenizedStats& stats,
                            const EnsembleSpec& spec) {
    spec.validate();
    Runner runner{&env, &labels, &field, &spec};
    CheckResult res;
    res.name = "area_anomaly";
    const int d = env.dim();
    const double n = spec.n_list.back();

    std::vector<std::vector<double>> ito(static_cast<size_t>(d * d)),
        strat(static_cast<size_t>(d * d));
    for (auto& v : ito) v.resize(static_cast<size_t>(spec.K));
    for (auto& v : strat) v.resize(static_cast<size_t>(spec.K));

    runner.run(n, 0x61610000u, [&](int k, const WalkCtx& ctx) {
        // Unscaled prefix lift, then divide: XX^n_{0,T} = XX_{0,nT} / n.
        const VecPath x = to_vec_path(ctx.raw);
        const Level2Path l2 = ito_lift(x);
        const TwoParamAccumulator q = quadratic_covariation(x, x);
        const int64_t m = x.n_jumps();
        const Mat xxT = (1.0 / n) * l2.prefix_at(m);
        const Mat qT = (1.0 / n) * q.prefix_at(m);
        for (int i = 0; i < d * d; ++i) {
            ito[static_cast<size_t>(i)][static_cast<size_t>(k)] = xxT.a[i];
            strat[static_cast<size_t>(i)][static_cast<size_t>(k)] = xxT.a[i] + 0.5 * qT.a[i];
        }
    });

    bool pass = true;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const auto& xi = ito[static_cast<size_t>(i * d + j)];
            const auto& xs = strat[static_cast<size_t>(i * d + j)];
            const double mi = sample_mean(xi), ei = sample_stderr(xi);
            const double ms = sample_mean(xs), es = sample_stderr(xs);
            push_row(res, n, ij_name("ito_mean", i, j), mi, ei);
            push_row(res, n, ij_name("strat_mean", i, j), ms, es);
            if (std::fabs(mi - spec.T * stats.gamma(i, j)) > 3 * ei) pass = false;
            if (std::fabs(ms - 0.5 * spec.T * stats.sigma2(i, j)) > 3 * es) pass = false;
        }
    res.pass = pass;
    res.detail = pass ? "Ito mean matches T*Gamma and Stratonovich mean matches T/2*Sigma2"
                      : "level-2 means outside 3 stderr of solver references";
    return res;
}

CheckResult gaussianity_check(const Environment& env, const ClusterLabels& labels,
                              const CocycleField& field, const HomogenizedStats& stats,
                              const EnsembleSpec& spec, const Vec& v) {
    spec.validate();
    CheckResult res;
    res.name = "gaussianity";
    if (norm2(v) == 0) {
        res.pass = true;
        res.detail = "skipped: degenerate direction v = 0";
        return res;
    }
    Runner runner{&env, &labels, &field, &spec};
    const double n = spec.n_list.back();
    double vSv = 0;
    for (int i = 0; i < env.dim(); ++i)
        for (int j = 0; j < env.dim(); ++j) vSv += v[i] * stats.sigma2(i, j) * v[j];
    const double scale = std::sqrt(vSv * spec.T);

    std::vector<double> zs(static_cast<size_t>(spec.K));
    runner.run(n, 0x67610000u, [&](int k, const WalkCtx& ctx) {
        const Vec xT =
            ctx.raw.positions.empty() ? Vec::zero(env.dim()) : ctx.raw.positions.back();
        zs[static_cast<size_t>(k)] = dot(v, xT) / std::sqrt(n) / scale;
    });

    const double K = static_cast<double>(spec.K);
    const double mean = sample_mean(zs);
    double m2 = 0, m4 = 0;
    for (double z : zs) {
        const double c = z - mean;
        m2 += c * c;
        m4 += c * c * c * c;
    }
    m2 /= K;
    m4 /= K;
    const double variance = m2 * K / (K - 1);
    const double kurt = m4 / (m2 * m2) - 3.0;

    push_row(res, n, "std_mean", mean);
    push_row(res, n, "std_variance", variance);
    push_row(res, n, "excess_kurtosis", kurt);
    res.pass = std::fabs(mean) <= 3.0 / std::sqrt(K) &&
               std::fabs(variance - 1.0) <= 3.0 * std::sqrt(2.0 / K) &&
               std::fabs(kurt) <= 3.0 * std::sqrt(24.0 / K);
    res.detail = res.pass ? "standardized moments within CLT bounds" : "moment bound failed";
    return res;
}

CheckResult isotropy_check(const ConductanceLaw& law, int d, int L, int n_envs, double tol,
                           uint64_t master_seed, int threads) {
    if (n_envs < 2) throw ParamError("isotropy_check needs >= 2 environments");
    CheckResult res;
    res.name = "isotropy";

    std::vector<double> offdiag(static_cast<size_t>(n_envs)), diag_diff(static_cast<size_t>(n_envs)),
        sdiag(static_cast<size_t>(n_envs)), gdiag(static_cast<size_t>(n_envs)),
        m2s(static_cast<size_t>(n_envs)), ident(static_cast<size_t>(n_envs));
    parallel_for(n_envs, threads, [&](int k) {
        const Environment env =
            gen_env(law, d, L, mix_seed(master_seed, 0x69736f00u + static_cast<uint64_t>(k)));
        const ClusterLabels labels = clusters(env);
        const CocycleField field = solve_harmonic(env, labels, tol);
        const HomogenizedStats st = sigma_gamma(env, labels, field);
        offdiag[static_cast<size_t>(k)] = st.sigma2(0, 1);
        diag_diff[static_cast<size_t>(k)] = st.sigma2(0, 0) - st.sigma2(1, 1);
        double sd = 0, gd = 0;
        for (int i = 0; i < d; ++i) {
            sd += st.sigma2(i, i);
            gd += st.gamma(i, i);
        }
        sdiag[static_cast<size_t>(k)] = sd / d;
        gdiag[static_cast<size_t>(k)] = gd / d;
        m2s[static_cast<size_t>(k)] = st.m2_scalar / d;  // per-coordinate m^2
        // gamma = -(m^2 - sigma^2)/2, the Pythagoras identity under isotropy.
        ident[static_cast<size_t>(k)] = std::fabs(gd / d + (st.m2_scalar / d - sd / d) / 2.0) -
                                        10 * tol * (st.m2_scalar / d);
    });

    const double off_mean = sample_mean(offdiag), off_err = sample_stderr(offdiag);
    const double dd_mean = sample_mean(diag_diff), dd_err = sample_stderr(diag_diff);
    push_row(res, n_envs, "sigma2_offdiag_mean", off_mean, off_err);
    push_row(res, n_envs, "sigma2_diag_diff_mean", dd_mean, dd_err);
    push_row(res, n_envs, "sigma2_scalar", sample_mean(sdiag), sample_stderr(sdiag));
    push_row(res, n_envs, "gamma_scalar", sample_mean(gdiag), sample_stderr(gdiag));
    push_row(res, n_envs, "m2_scalar", sample_mean(m2s), sample_stderr(m2s));

    bool pass = std::fabs(off_mean) <= 3 * off_err && std::fabs(dd_mean) <= 3 * dd_err;
    for (double x : ident)
        if (x > 0) pass = false;
    res.pass = pass;
    res.detail = pass ? "off-diagonals and diagonal gaps within 3 stderr; gamma identity holds"
                      : "isotropy or gamma identity failed";
    return res;
}

bool DiagnosticsReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

DiagnosticsReport run_diagnostics(const Environment& env, const ClusterLabels& labels,
                                  const CocycleField& field, const HomogenizedStats& stats,
                                  const EnsembleSpec& spec,
                                  const std::vector<std::string>& checks) {
    DiagnosticsReport report;
    report.env_hash = env.content_hash();
    report.master_seed = spec.master_seed;
    report.solver_residual = field.residual;

    auto wants = [&](const std::string& name) {
        return checks.empty() || std::find(checks.begin(), checks.end(), name) != checks.end();
    };
    Vec e1 = Vec::zero(env.dim());
    e1[0] = 1;

    if (wants("qv_limit")) report.checks.push_back(qv_limit_check(env, labels, field, stats, spec));
    if (wants("ucv")) report.checks.push_back(ucv_check(env, labels, field, stats, spec));
    if (wants("lindeberg"))
        report.checks.push_back(lindeberg_check(env, labels, field, stats, spec, e1, 0.5));
    if (wants("corrector_pvar"))
        report.checks.push_back(corrector_pvar_decay(env, labels, field, spec));
    if (wants("corrector_area"))
        report.checks.push_back(corrector_area_check(env, labels, field, stats, spec));
    if (wants("mixed_q")) report.checks.push_back(mixed_q_check(env, labels, field, stats, spec));
    if (wants("area_anomaly"))
        report.checks.push_back(area_anomaly_mc(env, labels, field, stats, spec));
    if (wants("gaussianity"))
        report.checks.push_back(gaussianity_check(env, labels, field, stats, spec, e1));
    return report;
}

void report_to_json(const DiagnosticsReport& report, std::ostream& os) {
    json j;
    j["schema_version"] = report.schema_version;
    j["env_hash"] = report.env_hash;
    j["config_hash"] = report.config_hash;
    j["master_seed"] = report.master_seed;
    j["solver_residual"] = report.solver_residual;
    j["checks"] = json::array();
    for (const auto& c : report.checks) {
        json jc;
        jc["name"] = c.name;
        jc["pass"] = c.pass;
        jc["detail"] = c.detail;
        jc["rows"] = json::array();
        for (const auto& r : c.rows)
            jc["rows"].push_back({{"n", r.n}, {"stat", r.stat}, {"value", r.value},
                                  {"stderr", r.stderr_}});
        j["checks"].push_back(std::move(jc));
    }
    os << j.dump(2) << "\n";
}

DiagnosticsReport report_from_json(std::istream& is) {
    json j = json::parse(is);
    DiagnosticsReport report;
    report.schema_version = j.at("schema_version").get<int>();
    report.env_hash = j.at("env_hash").get<uint64_t>();
    report.config_hash = j.value("config_hash", uint64_t{0});
    report.master_seed = j.at("master_seed").get<uint64_t>();
    report.solver_residual = j.at("solver_residual").get<double>();
    for (const auto& jc : j.at("checks")) {
        CheckResult c;
        c.name = jc.at("name").get<std::string>();
        c.pass = jc.at("pass").get<bool>();
        c.detail = jc.value("detail", std::string{});
        for (const auto& jr : jc.at("rows"))
            c.rows.push_back({jr.at("n").get<double>(), jr.at("stat").get<std::string>(),
                              jr.at("value").get<double>(), jr.value("stderr", 0.0)});
        report.checks.push_back(std::move(c));
    }
    return report;
}

void report_to_csv(const DiagnosticsReport& report, std::ostream& os) {
    os << "check,n,stat,value,stderr\n";
    for (const auto& c : report.checks)
        for (const auto& r : c.rows)
            os << c.name << "," << r.n << "," << r.stat << "," << r.value << "," << r.stderr_
               << "\n";
}

}  // namespace rw
