#include "roughwalk/pvar.hpp"

#include <algorithm>
#include <cmath>

namespace rw {

namespace {

double window_norm(const Mat& m, MatNorm norm) {
    return norm == MatNorm::Frobenius ? frobenius(m) : spectral_norm(m);
}

// Generic O(M^2) max-plus DP over candidate indices 0..M with weight
// w(i,j)^p; returns value^p and the attaining cut indices.
template <typename WeightFn>
double run_dp(int64_t M, double p, WeightFn w, std::vector<int64_t>* cuts) {
    std::vector<double> best(static_cast<size_t>(M + 1), 0.0);
    std::vector<int64_t> from(static_cast<size_t>(M + 1), 0);
    for (int64_t j = 1; j <= M; ++j) {
        double v = -1;
        int64_t arg = 0;
        for (int64_t i = 0; i < j; ++i) {
            const double cand = best[static_cast<size_t>(i)] + std::pow(w(i, j), p);
            if (cand > v) {
                v = cand;
                arg = i;
            }
        }
        best[static_cast<size_t>(j)] = v;
        from[static_cast<size_t>(j)] = arg;
    }
    if (cuts) {
        cuts->clear();
        int64_t c = M;
        while (true) {
            cuts->push_back(c);
            if (c == 0) break;
            c = from[static_cast<size_t>(c)];
        }
        std::reverse(cuts->begin(), cuts->end());
    }
    return best[static_cast<size_t>(M)];
}

std::vector<double> cut_times(const VecPath& path, const std::vector<int64_t>& cuts) {
    std::vector<double> ts;
    ts.reserve(cuts.size() + 1);
    for (int64_t c : cuts) ts.push_back(path.time_at(c));
    if (ts.empty() || ts.back() < path.T) ts.push_back(path.T);
    return ts;
}

}  // namespace

VariationResult pvar_exact(const VecPath& path, double p, int64_t cap) {
    if (!(p >= 1)) throw ParamError("p must be >= 1");
    const int64_t m = path.n_jumps();
    if (m > cap)
        throw RangeError("jump count exceeds the exact-DP cap; use pvar_capped or greedy");
    std::vector<int64_t> cuts;
    const double vp = run_dp(
        m, p, [&](int64_t i, int64_t j) { return norm2(path.value_at(j) - path.value_at(i)); },
        &cuts);
    VariationResult r;
    r.p = p;
    r.method = PvarMethod::ExactDp;
    r.value = std::pow(vp, 1.0 / p);
    r.partition = cut_times(path, cuts);
    return r;
}

VariationResult p2var_exact(const Level2Path& l2, double q, int64_t cap, MatNorm norm) {
    if (!(q >= 1)) throw ParamError("q must be >= 1");
    const int64_t m = l2.base.n_jumps();
    if (m > cap)
        throw RangeError("jump count exceeds the exact-DP cap; use pvar_capped or greedy");
    std::vector<int64_t> cuts;
    const double vq = run_dp(
        m, q, [&](int64_t i, int64_t j) { return window_norm(l2.window(i, j), norm); }, &cuts);
    VariationResult r;
    r.p = q;
    r.method = PvarMethod::ExactDp;
    r.value = std::pow(vq, 1.0 / q);
    r.partition = cut_times(l2.base, cuts);
    return r;
}

double p2var_additive(const TwoParamAccumulator& acc, double q, int64_t cap, MatNorm norm) {
    if (!(q >= 1)) throw ParamError("q must be >= 1");
    const int64_t m = static_cast<int64_t>(acc.times.size());
    if (m > cap)
        throw RangeError("jump count exceeds the exact-DP cap");
    const double vq = run_dp(
        m, q,
        [&](int64_t i, int64_t j) { return window_norm(acc.prefix_at(j) - acc.prefix_at(i), norm); },
        nullptr);
    return std::pow(vq, 1.0 / q);
}

VariationResult pvar_greedy_lower(const VecPath& path, double p) {
    if (!(p >= 1)) throw ParamError("p must be >= 1");
    const int64_t m = path.n_jumps();
    // Scalar projection: total-displacement direction, e1 if degenerate.
    Vec u = path.value_at(m) - path.value_at(0);
    if (norm2(u) < 1e-300) {
        u = Vec::zero(path.d);
        u[0] = 1;
    }
    std::vector<int64_t> cuts{0};
    for (int64_t c = 1; c < m; ++c) {
        const double prev = dot(u, path.value_at(c - 1));
        const double cur = dot(u, path.value_at(c));
        const double next = dot(u, path.value_at(c + 1));
        if ((cur - prev) * (next - cur) < 0) cuts.push_back(c);  // local extremum
    }
    if (m > 0) cuts.push_back(m);

    double vp = 0;
    for (size_t k = 1; k < cuts.size(); ++k)
        vp += std::pow(norm2(path.value_at(cuts[k]) - path.value_at(cuts[k - 1])), p);
    VariationResult r;
    r.p = p;
    r.method = PvarMethod::GreedyLower;
    r.value = std::pow(vp, 1.0 / p);
    r.partition = cut_times(path, cuts);
    return r;
}

PvarInterval pvar_capped(const VecPath& path, double p, int64_t block) {
    if (block < 1) throw ParamError("block must be >= 1");
    const int64_t m = path.n_jumps();
    if (m <= block) {
        const double v = pvar_exact(path, p, m).value;
        return {v, v};
    }
    // Block boundaries over candidate indices.
    std::vector<int64_t> bounds{0};
    for (int64_t c = block; c < m; c += block) bounds.push_back(c);
    bounds.push_back(m);

    double inner = 0;  // sum over blocks of (in-block exact DP)^p
    for (size_t b = 0; b + 1 < bounds.size(); ++b) {
        const int64_t lo = bounds[b], hi = bounds[b + 1];
        inner += run_dp(
            hi - lo, p,
            [&](int64_t i, int64_t j) {
                return norm2(path.value_at(lo + j) - path.value_at(lo + i));
            },
            nullptr);
    }
    const int64_t nb = static_cast<int64_t>(bounds.size()) - 1;
    const double boundary = run_dp(
        nb, p,
        [&](int64_t i, int64_t j) {
            return norm2(path.value_at(bounds[static_cast<size_t>(j)]) -
                         path.value_at(bounds[static_cast<size_t>(i)]));
        },
        nullptr);

    // Lower: concatenation of the in-block attaining partitions.
    // Upper: split any interval at the first/last block boundary it crosses;
    // three pieces give the 3^{p-1} constant (within-block twice + skeleton).
    PvarInterval iv;
    iv.lower = std::pow(inner, 1.0 / p);
    iv.upper = std::pow(std::pow(3.0, p - 1) * (2.0 * inner + boundary), 1.0 / p);
    return iv;
}

double uniform_norm(const VecPath& path, double s, double t) {
    if (s < 0 || t > path.T || s > t) throw RangeError("window outside [0, T]");
    double sup = norm2(path.at(s));
    const int64_t ci = path.index_of(s), cj = path.index_of(t);
    for (int64_t c = ci + 1; c <= cj; ++c) sup = std::max(sup, norm2(path.value_at(c)));
    return sup;
}

double infty_var(const VecPath& path) {
    const int64_t m = path.n_jumps();
    double sup = 0;
    for (int64_t i = 0; i <= m; ++i)
        for (int64_t j = i + 1; j <= m; ++j)
            sup = std::max(sup, norm2(path.value_at(j) - path.value_at(i)));
    return sup;
}

double rough_norm(const Level2Path& l2, double p) {
    const double level1 = pvar_exact(l2.base, p).value;
    const double level2 = p2var_exact(l2, p / 2).value;
    return norm2(l2.base.value_at(0)) + level1 + std::sqrt(level2);
}

double sup_deviation_from_drift(const std::vector<double>& times, double T,
                                const std::vector<double>& prefix, double drift) {
    double sup = 0;  // t = 0 contributes 0
    double prev = 0;
    for (size_t k = 0; k < times.size(); ++k) {
        sup = std::max(sup, std::fabs(prev - drift * times[k]));      // left limit
        sup = std::max(sup, std::fabs(prefix[k] - drift * times[k]));  // at the jump
        prev = prefix[k];
    }
    sup = std::max(sup, std::fabs(prev - drift * T));
    return sup;
}

double sup_deviation_from_drift(const TwoParamAccumulator& acc, const Mat& drift) {
    double sup = 0;
    Mat prev = Mat::zero(acc.d);
    for (size_t k = 0; k < acc.times.size(); ++k) {
        sup = std::max(sup, max_abs(prev - acc.times[k] * drift));
        sup = std::max(sup, max_abs(acc.prefix[k] - acc.times[k] * drift));
        prev = acc.prefix[k];
    }
    sup = std::max(sup, max_abs(prev - acc.T * drift));
    return sup;
}

}  // namespace rw
