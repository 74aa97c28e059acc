#pragma once

#include <string>
#include <vector>

#include "roughwalk/roughpath.hpp"

// p-variation functionals over jump data. For piecewise-constant paths the
// supremum over partitions of [0,T] is attained on cut points drawn from
// {0, jump times, T}, so an O(m^2) dynamic program is exact.

namespace rw {

enum class PvarMethod { ExactDp, GreedyLower, Capped };
enum class MatNorm { Frobenius, Spectral };

struct VariationResult {
    double value = 0;  // the norm: 1/p power already applied
    double p = 0;
    PvarMethod method = PvarMethod::ExactDp;
    std::vector<double> partition;  // attaining cut times (ExactDp / GreedyLower)
};

inline constexpr int64_t kExactPvarCap = 20000;

// One-parameter p-variation norm ||f||_{p-var,[0,T]} of a vector path.
VariationResult pvar_exact(const VecPath& path, double p, int64_t cap = kExactPvarCap);

// q-variation norm of the two-parameter level-2 increments (no square root
// applied; callers take ^{1/2} for the homogeneous norm). q = p/2 typically.
VariationResult p2var_exact(const Level2Path& l2, double q, int64_t cap = kExactPvarCap,
                            MatNorm norm = MatNorm::Frobenius);

// q-variation norm of an additive two-parameter prefix (window = prefix
// difference), e.g. quadratic covariations.
double p2var_additive(const TwoParamAccumulator& acc, double q, int64_t cap = kExactPvarCap,
                      MatNorm norm = MatNorm::Frobenius);

// Certified lower bound: evaluates the single partition cut at local extrema
// of a scalar projection of the path.
VariationResult pvar_greedy_lower(const VecPath& path, double p);

// Block-DP bounds for long paths: [lower, upper]. A path that fits a single
// block gets the exact value on both ends. Otherwise
// lower^p = sum of in-block exact DP values^p  (a concatenated partition),
// upper^p = 3^{p-1} (2 * sum of in-block values^p + boundary-skeleton DP^p),
// from splitting any partition interval into at most three certified pieces.
struct PvarInterval {
    double lower = 0, upper = 0;
};
PvarInterval pvar_capped(const VecPath& path, double p, int64_t block);

double uniform_norm(const VecPath& path, double s, double t);
double infty_var(const VecPath& path);

// Homogeneous rough norm |X_0| + ||X||_{p-var} + ||XX||_{p/2-var}^{1/2};
// X_0 = 0 by the path convention here.
double rough_norm(const Level2Path& l2, double p);

// sup_{t in [0,T]} |P(t) - drift * t| for an additive prefix (piecewise
// constant minus linear drift); attained at a jump time, its left limit, or T.
double sup_deviation_from_drift(const TwoParamAccumulator& acc, const Mat& drift);
double sup_deviation_from_drift(const std::vector<double>& times, double T,
                                const std::vector<double>& prefix, double drift);

}  // namespace rw
