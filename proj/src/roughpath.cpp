#include "roughwalk/roughpath.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace rw {

namespace {

// Entrywise Kahan accumulator; keeps long-horizon lifts accurate.
struct KahanMat {
    Mat sum, comp;
    explicit KahanMat(int d) : sum(Mat::zero(d)), comp(Mat::zero(d)) {}
    void add(const Mat& x) {
        for (int i = 0; i < sum.d * sum.d; ++i) {
            const double y = x.a[i] - comp.a[i];
            const double t = sum.a[i] + y;
            comp.a[i] = (t - sum.a[i]) - y;
            sum.a[i] = t;
        }
    }
};

void check_window(double s, double t, double T) {
    if (s < 0 || t > T || s > t) throw RangeError("window outside [0, T]");
}

}  // namespace

int64_t VecPath::index_of(double t) const {
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    return static_cast<int64_t>(it - times.begin());
}

Vec VecPath::at(double t) const {
    if (t < 0 || t > T) throw RangeError("t outside [0, T]");
    return value_at(index_of(t));
}

VecPath to_vec_path(const JumpPath& path) {
    VecPath v;
    v.d = path.d;
    v.T = path.T;
    v.times = path.times;
    v.vals = path.positions;
    return v;
}

bool same_skeleton(const VecPath& f, const VecPath& g) {
    return f.d == g.d && f.T == g.T && f.times == g.times;
}

Level2Path ito_lift(const VecPath& path) {
    Level2Path l2;
    l2.base = path;
    l2.kind = LiftKind::Ito;
    const int64_t m = path.n_jumps();
    l2.xx0.resize(static_cast<size_t>(m));
    KahanMat acc(path.d);
    Vec prev = Vec::zero(path.d);
    for (int64_t k = 0; k < m; ++k) {
        const Vec& cur = path.vals[static_cast<size_t>(k)];
        acc.add(outer(prev, cur - prev));  // X_{0,r-} (x) X_{r-,r}
        l2.xx0[static_cast<size_t>(k)] = acc.sum;
        prev = cur;
    }
    return l2;
}

Level2Path ito_lift(const JumpPath& path) { return ito_lift(to_vec_path(path)); }

Level2Path stratonovich_lift(const VecPath& path) {
    Level2Path l2 = ito_lift(path);
    const TwoParamAccumulator q = quadratic_covariation(path, path);
    for (size_t k = 0; k < l2.xx0.size(); ++k) l2.xx0[k] += 0.5 * q.prefix[k];
    l2.kind = LiftKind::Stratonovich;
    return l2;
}

Level2Path stratonovich_lift(const JumpPath& path) {
    return stratonovich_lift(to_vec_path(path));
}

Mat Level2Path::window(int64_t ci, int64_t cj) const {
    const Vec xs = base.value_at(ci);
    const Vec xt = base.value_at(cj);
    return prefix_at(cj) - prefix_at(ci) - outer(xs, xt - xs);
}

Mat chen_eval(const Level2Path& l2, double s, double t) {
    check_window(s, t, l2.base.T);
    return l2.window(l2.base.index_of(s), l2.base.index_of(t));
}

Mat TwoParamAccumulator::eval(double s, double t) const {
    check_window(s, t, T);
    const auto ci = std::upper_bound(times.begin(), times.end(), s) - times.begin();
    const auto cj = std::upper_bound(times.begin(), times.end(), t) - times.begin();
    return prefix_at(cj) - prefix_at(ci);
}

TwoParamAccumulator quadratic_covariation(const VecPath& f, const VecPath& g) {
    if (!same_skeleton(f, g)) throw ParamError("paths do not share a jump skeleton");
    TwoParamAccumulator q;
    q.d = f.d;
    q.T = f.T;
    q.times = f.times;
    const int64_t m = f.n_jumps();
    q.prefix.resize(static_cast<size_t>(m));
    KahanMat acc(f.d);
    Vec fp = Vec::zero(f.d), gp = Vec::zero(f.d);
    for (int64_t k = 0; k < m; ++k) {
        const Vec& fc = f.vals[static_cast<size_t>(k)];
        const Vec& gc = g.vals[static_cast<size_t>(k)];
        acc.add(outer(fc - fp, gc - gp));
        q.prefix[static_cast<size_t>(k)] = acc.sum;
        fp = fc;
        gp = gc;
    }
    return q;
}

Mat quadratic_covariation(const VecPath& f, const VecPath& g, double s, double t) {
    return quadratic_covariation(f, g).eval(s, t);
}

TwoParamAccumulator left_point_prefix(const VecPath& f, const VecPath& g) {
    if (!same_skeleton(f, g)) throw ParamError("paths do not share a jump skeleton");
    TwoParamAccumulator s;
    s.d = f.d;
    s.T = f.T;
    s.times = f.times;
    const int64_t m = f.n_jumps();
    s.prefix.resize(static_cast<size_t>(m));
    KahanMat acc(f.d);
    Vec fp = Vec::zero(f.d), gp = Vec::zero(f.d);
    for (int64_t k = 0; k < m; ++k) {
        const Vec& fc = f.vals[static_cast<size_t>(k)];
        const Vec& gc = g.vals[static_cast<size_t>(k)];
        acc.add(outer(fp, gc - gp));  // f_{u-} (x) dg_u
        s.prefix[static_cast<size_t>(k)] = acc.sum;
        fp = fc;
        gp = gc;
    }
    return s;
}

Mat left_point_integral(const VecPath& f, const VecPath& g, double s, double t) {
    const TwoParamAccumulator pre = left_point_prefix(f, g);
    const Vec fs = f.at(s);
    const Vec gst = g.at(t) - g.at(s);
    return pre.eval(s, t) - outer(fs, gst);
}

namespace {
double resolve_new_T(double T, double n, double new_T) {
    if (!(n > 0)) throw ParamError("scale n must be > 0");
    if (new_T < 0) return T / n;
    if (n * new_T > T * (1 + 1e-12)) throw RangeError("rescaled horizon exceeds original T");
    return new_T;
}
}  // namespace

VecPath rescale(const VecPath& path, double n, double new_T) {
    VecPath out;
    out.d = path.d;
    out.T = resolve_new_T(path.T, n, new_T);
    const double inv_sqrt = 1.0 / std::sqrt(n);
    for (size_t k = 0; k < path.times.size(); ++k) {
        const double t = path.times[k] / n;
        if (t > out.T) break;
        out.times.push_back(t);
        out.vals.push_back(inv_sqrt * path.vals[k]);
    }
    return out;
}

JumpPath rescale(const JumpPath& path, double n, double new_T) {
    JumpPath out;
    out.d = path.d;
    out.T = resolve_new_T(path.T, n, new_T);
    out.seed = path.seed;
    out.start_site = path.start_site;
    const double inv_sqrt = 1.0 / std::sqrt(n);
    for (size_t k = 0; k < path.times.size(); ++k) {
        const double t = path.times[k] / n;
        if (t > out.T) break;
        out.times.push_back(t);
        out.positions.push_back(inv_sqrt * path.positions[k]);
    }
    return out;
}

Level2Path rescale_lift(const Level2Path& l2, double n, double new_T) {
    Level2Path out;
    out.kind = l2.kind;
    out.base = rescale(l2.base, n, new_T);
    const double inv = 1.0 / n;
    out.xx0.assign(l2.xx0.begin(), l2.xx0.begin() + static_cast<int64_t>(out.base.times.size()));
    for (auto& m : out.xx0) m *= inv;
    return out;
}

std::pair<VecPath, VecPath> decompose(const JumpPath& path, const Environment& env,
                                      const ClusterLabels& labels, const CocycleField& field) {
    VecPath x = to_vec_path(path);
    VecPath m = x, r = x;
    const Site start = env.site_coords(path.start_site);
    const Vec chi0 = corrector_eval(field, labels, path.start_site, field.base_site);
    for (size_t k = 0; k < x.vals.size(); ++k) {
        Site s{};
        for (int i = 0; i < path.d; ++i)
            s[i] = start[i] + static_cast<int>(std::llround(x.vals[k][i]));
        const int64_t site = env.site_index(s);
        if (!labels.in_giant(site)) throw RangeError("walk left the solved cluster");
        const Vec rc = field.chi_at(site) - field.chi_at(field.base_site) - chi0;
        r.vals[k] = rc;
        m.vals[k] = x.vals[k] - rc;
    }
    return {m, r};
}

void export_lift_csv(const Level2Path& l2, std::ostream& os) {
    os.precision(17);
    const int d = l2.base.d;
    os << "t";
    for (int i = 0; i < d; ++i) os << ",x" << (i + 1);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) os << ",xx" << (i + 1) << (j + 1);
    os << "\n";
    for (int64_t c = 0; c <= l2.base.n_jumps(); ++c) {
        os << l2.base.time_at(c);
        const Vec x = l2.base.value_at(c);
        for (int i = 0; i < d; ++i) os << "," << x[i];
        const Mat xx = l2.prefix_at(c);
        for (int i = 0; i < d * d; ++i) os << "," << xx.a[i];
        os << "\n";
    }
}

}  // namespace rw
