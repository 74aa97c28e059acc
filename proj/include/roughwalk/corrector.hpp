#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "roughwalk/env.hpp"
#include "roughwalk/linalg.hpp"

// Periodic cell problem for the corrector chi and harmonic coordinates
// Phi = Pi - chi on the giant cluster, plus the homogenized matrices
// Sigma^2 = <Phi,Phi>, Gamma = -1/2 <chi,chi> in the conductance-weighted
// inner product normalized by the cluster size, and the box-averaged
// potential phi_n with its error field E_n.

namespace rw {

struct CocycleField {
    int d = 0;
    int64_t base_site = -1;               // gauge: chi(base_site) = 0
    int32_t cluster_id = -1;
    double residual = 0;                  // max_x |L Phi(x)| / mu(x) over the cluster
    int solver_iters = 0;
    uint64_t env_hash = 0;
    std::vector<double> chi;              // n_sites * d; NaN off-cluster

    Vec chi_at(int64_t site) const {
        Vec v{d, {}};
        for (int i = 0; i < d; ++i) v[i] = chi[static_cast<size_t>(site) * d + i];
        return v;
    }
};

struct HomogenizedStats {
    int d = 0;
    Mat sigma2;        // <Phi^i, Phi^j>, positive semidefinite
    Mat gamma;         // -1/2 <chi^i, chi^j>, negative semidefinite
    Mat m2;            // cluster average of sum_z w(x,x+z) z_i z_j
    double m2_scalar;  // cluster average of mu
    double density;    // giant_size / L^d
};

struct PotentialField {
    int n = 0;
    std::vector<Vec> phi_n;  // per site; only cluster entries meaningful
    double e_rms = 0;        // RMS of the error field over nearest-neighbor cluster pairs
};

CocycleField solve_harmonic(const Environment& env, const ClusterLabels& labels,
                            double tol = 1e-10, int max_iters = 20000);

HomogenizedStats sigma_gamma(const Environment& env, const ClusterLabels& labels,
                             const CocycleField& field);

PotentialField potential_box_average(const Environment& env, const ClusterLabels& labels,
                                     const CocycleField& field, int n);

// chi(x) - chi(z_base); both sites must lie in the giant cluster.
Vec corrector_eval(const CocycleField& field, const ClusterLabels& labels, int64_t x,
                   int64_t z_base);

// Cluster edge-sum (1/|C|) sum_x sum_z w dPhi^i dchi^j; the torus realization
// of the <Phi, chi> orthogonality (zero up to solver tolerance).
Mat phi_chi_cross_sum(const Environment& env, const ClusterLabels& labels,
                      const CocycleField& field);

void serialize_field(const CocycleField& field, std::ostream& os);
CocycleField deserialize_field(std::istream& is);

}  // namespace rw
