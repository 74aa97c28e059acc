#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "roughwalk/env.hpp"
#include "roughwalk/linalg.hpp"

// Exact simulation of the variable-speed random walk among conductances:
// holding time Exp(mu(x)), jump to y with probability w({x,y})/mu(x).
// Displacements are recorded unwrapped, so the path lives in Z^d; the torus
// is only used for conductance lookup.

namespace rw {

struct JumpPath {
    int d = 0;
    double T = 0;
    uint64_t seed = 0;
    int64_t start_site = 0;              // torus site index of X_0
    std::vector<double> times;           // strictly increasing, in (0, T]
    std::vector<Vec> positions;          // unwrapped displacement after each jump; X_0 = 0
    int64_t n_jumps() const { return static_cast<int64_t>(times.size()); }
};

enum class StartPolicy { OriginIfInGiant, UniformOnGiant };

class JumpSampler;

JumpPath simulate(const Environment& env, const ClusterLabels& labels, double T, uint64_t seed,
                  StartPolicy policy = StartPolicy::OriginIfInGiant);
// Overload with a prebuilt sampler for ensemble runs.
JumpPath simulate(const Environment& env, const ClusterLabels& labels, const JumpSampler& sampler,
                  double T, uint64_t seed, StartPolicy policy = StartPolicy::OriginIfInGiant);

// Right-continuous evaluation of the displacement path; t in [0, T].
Vec position_at(const JumpPath& path, double t);

// CSV export: header "t,x1,...,xd", rows for t=0, each jump, and t=T.
void export_path_csv(const JumpPath& path, std::ostream& os);

// Per-site cumulative jump weights; built once per environment, shared by
// all walks. The sequential inverse-CDF scan below is the reference sampler.
class JumpSampler {
public:
    explicit JumpSampler(const Environment& env);
    // k-th full-range direction chosen with probability cond_row(s,k)/mu(s).
    int sample(int64_t site, double u01) const;

private:
    const Environment* env_;
    std::vector<double> cum_;  // n_sites * n_full cumulative sums
    int nf_;
};

}  // namespace rw
