#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "roughwalk/corrector.hpp"
#include "roughwalk/linalg.hpp"
#include "roughwalk/walk.hpp"

// Level-2 calculus on piecewise-constant paths: the Ito sum lift, the
// Stratonovich lift (Ito + half the quadratic covariation), Chen window
// evaluation, left-point integrals I, quadratic covariations Q, diffusive
// rescaling, and the martingale/corrector decomposition X = M + R.

namespace rw {

// Cadlag vector path on a jump skeleton with value 0 at t = 0. Candidate
// index c in [0, n_jumps()] addresses t=0 (c=0) and each jump (c-1).
struct VecPath {
    int d = 0;
    double T = 0;
    std::vector<double> times;
    std::vector<Vec> vals;  // value at times[k], right-continuous

    int64_t n_jumps() const { return static_cast<int64_t>(times.size()); }
    double time_at(int64_t c) const { return c == 0 ? 0.0 : times[static_cast<size_t>(c - 1)]; }
    Vec value_at(int64_t c) const {
        return c == 0 ? Vec::zero(d) : vals[static_cast<size_t>(c - 1)];
    }
    // Largest candidate index with time <= t.
    int64_t index_of(double t) const;
    Vec at(double t) const;  // right-continuous evaluation, t in [0, T]
};

VecPath to_vec_path(const JumpPath& path);
bool same_skeleton(const VecPath& f, const VecPath& g);

enum class LiftKind { Ito, Stratonovich };

struct Level2Path {
    VecPath base;
    LiftKind kind = LiftKind::Ito;
    std::vector<Mat> xx0;  // XX_{0, times[k]}, cumulative

    Mat prefix_at(int64_t c) const {
        return c == 0 ? Mat::zero(base.d) : xx0[static_cast<size_t>(c - 1)];
    }
    // XX_{t_ci, t_cj} for candidate indices via Chen's relation.
    Mat window(int64_t ci, int64_t cj) const;
};

Level2Path ito_lift(const JumpPath& path);
Level2Path ito_lift(const VecPath& path);
Level2Path stratonovich_lift(const JumpPath& path);
Level2Path stratonovich_lift(const VecPath& path);

// XX_{s,t} = XX_{0,t} - XX_{0,s} - X_s (x) X_{s,t}.
Mat chen_eval(const Level2Path& l2, double s, double t);

// Additive two-parameter prefix (used for Q and for the S-part of I).
struct TwoParamAccumulator {
    int d = 0;
    double T = 0;
    std::vector<double> times;
    std::vector<Mat> prefix;  // value over (0, times[k]]

    Mat prefix_at(int64_t c) const {
        return c == 0 ? Mat::zero(d) : prefix[static_cast<size_t>(c - 1)];
    }
    Mat eval(double s, double t) const;  // additive over disjoint windows
};

// Q_{0,.}(f,g) with Q_{s,t}(f,g)^{ij} = sum_{s<u<=t} df^i_u dg^j_u.
TwoParamAccumulator quadratic_covariation(const VecPath& f, const VecPath& g);
Mat quadratic_covariation(const VecPath& f, const VecPath& g, double s, double t);

// I_{s,t}(f,g)^{ij} = sum_{s<u<=t} f^i_{u-} dg^j_u - f^i_s g^j_{s,t}.
Mat left_point_integral(const VecPath& f, const VecPath& g, double s, double t);
// Prefix of the raw left-point sum S(t) = sum_{0<u<=t} f_{u-} (x) dg_u;
// I_{s,t} = S(t) - S(s) - f_s (x) g_{s,t}. For f with f_0 = 0, I_{0,t} = S(t).
TwoParamAccumulator left_point_prefix(const VecPath& f, const VecPath& g);

// Diffusive rescaling: times /= n, values /= sqrt(n); level 2 scales by 1/n.
// new_T defaults to T/n; requires n * new_T <= T.
VecPath rescale(const VecPath& path, double n, double new_T = -1);
JumpPath rescale(const JumpPath& path, double n, double new_T = -1);
Level2Path rescale_lift(const Level2Path& l2, double n, double new_T = -1);

// X = M + R with R_t = chi(site_t) - chi(site_0); M is the harmonic
// (martingale) part. Both share the jump skeleton of the walk.
std::pair<VecPath, VecPath> decompose(const JumpPath& path, const Environment& env,
                                      const ClusterLabels& labels, const CocycleField& field);

// CSV rows "t, X(d entries), XX(d^2 entries)" at jump times.
void export_lift_csv(const Level2Path& l2, std::ostream& os);

}  // namespace rw
