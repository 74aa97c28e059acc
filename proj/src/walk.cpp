#include "roughwalk/walk.hpp"

#include <algorithm>
#include <ostream>

#include "roughwalk/rng.hpp"

namespace rw {

JumpSampler::JumpSampler(const Environment& env) : env_(&env), nf_(env.n_full()) {
    const int64_t n = env.n_sites();
    cum_.assign(static_cast<size_t>(n) * nf_, 0.0);
    for (int64_t s = 0; s < n; ++s) {
        double acc = 0;
        for (int k = 0; k < nf_; ++k) {
            acc += env.cond_row(s, k);
            cum_[static_cast<size_t>(s) * nf_ + k] = acc;
        }
    }
}

int JumpSampler::sample(int64_t site, double u01) const {
    const double* row = cum_.data() + static_cast<size_t>(site) * nf_;
    const double target = u01 * row[nf_ - 1];
    for (int k = 0; k < nf_; ++k)
        if (target <= row[k] && (k == 0 ? row[k] > 0 : row[k] > row[k - 1])) return k;
    // u01 == 1 landed on trailing zero-weight directions; take last positive.
    for (int k = nf_ - 1; k >= 0; --k)
        if (env_->cond_row(site, k) > 0) return k;
    return -1;
}

JumpPath simulate(const Environment& env, const ClusterLabels& labels, double T, uint64_t seed,
                  StartPolicy policy) {
    const JumpSampler sampler(env);
    return simulate(env, labels, sampler, T, seed, policy);
}

JumpPath simulate(const Environment& env, const ClusterLabels& labels, const JumpSampler& sampler,
                  double T, uint64_t seed, StartPolicy policy) {
    if (!(T > 0)) throw ParamError("T must be > 0");
    Rng rng(seed);

    int64_t start;
    if (policy == StartPolicy::OriginIfInGiant) {
        start = 0;
        if (!labels.in_giant(start))
            throw ParamError("origin is not in the giant cluster");
    } else {
        if (labels.giant_size == 0) throw ParamError("giant cluster is empty");
        // Rejection sampling keeps the start uniform on the giant cluster.
        do {
            start = static_cast<int64_t>(rng.next_u64() % static_cast<uint64_t>(env.n_sites()));
        } while (!labels.in_giant(start));
    }
    if (!(env.mu(start) > 0)) throw ParamError("start site has mu = 0");

    JumpPath path;
    path.d = env.dim();
    path.T = T;
    path.seed = seed;
    path.start_site = start;

    const int d = env.dim();
    int64_t site = start;
    Vec disp = Vec::zero(d);
    double t = 0;
    // ~mu*T jumps expected
    path.times.reserve(static_cast<size_t>(env.mu(start) * T * 1.2) + 16);
    path.positions.reserve(path.times.capacity());

    for (;;) {
        const double rate = env.mu(site);
        t += rng.exponential(rate);
        if (t > T) break;
        const int k = sampler.sample(site, rng.uniform01());
        const Offset& z = env.jump_full()[k];
        for (int i = 0; i < d; ++i) disp[i] += z[i];
        site = env.neighbor(site, k);
        path.times.push_back(t);
        path.positions.push_back(disp);
    }
    return path;
}

Vec position_at(const JumpPath& path, double t) {
    if (t < 0 || t > path.T) throw RangeError("t outside [0, T]");
    const auto it = std::upper_bound(path.times.begin(), path.times.end(), t);
    const auto k = static_cast<int64_t>(it - path.times.begin());
    return k == 0 ? Vec::zero(path.d) : path.positions[static_cast<size_t>(k - 1)];
}

void export_path_csv(const JumpPath& path, std::ostream& os) {
    os.precision(17);  // shortest round-trippable double representation
    os << "t";
    for (int i = 0; i < path.d; ++i) os << ",x" << (i + 1);
    os << "\n";
    auto row = [&](double t, const Vec& x) {
        os << t;
        for (int i = 0; i < path.d; ++i) os << "," << x[i];
        os << "\n";
    };
    row(0.0, Vec::zero(path.d));
    for (size_t k = 0; k < path.times.size(); ++k) row(path.times[k], path.positions[k]);
    row(path.T, path.positions.empty() ? Vec::zero(path.d) : path.positions.back());
}

}  // namespace rw
