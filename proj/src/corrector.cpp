#include "roughwalk/corrector.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>

namespace rw {

namespace {

// Giant-cluster site list plus dense reindexing for the solver.
struct ClusterIndex {
    std::vector<int64_t> sites;      // ascending site indices
    std::vector<int64_t> dense_of;   // site -> dense index or -1
};

ClusterIndex index_cluster(const Environment& env, const ClusterLabels& labels) {
    ClusterIndex ci;
    ci.dense_of.assign(static_cast<size_t>(env.n_sites()), -1);
    for (int64_t s = 0; s < env.n_sites(); ++s) {
        if (labels.in_giant(s)) {
            ci.dense_of[s] = static_cast<int64_t>(ci.sites.size());
            ci.sites.push_back(s);
        }
    }
    return ci;
}

// y = A x with A the weighted graph Laplacian restricted to the cluster:
// (A x)(s) = sum_z w(s,s+z) (x(s) - x(s+z)). Edges leaving the cluster have
// zero conductance by definition of the cluster.
void apply_laplacian(const Environment& env, const ClusterIndex& ci, const std::vector<double>& x,
                     std::vector<double>& y) {
    const int nf = env.n_full();
    const int64_t m = static_cast<int64_t>(ci.sites.size());
    for (int64_t i = 0; i < m; ++i) {
        const int64_t s = ci.sites[i];
        double acc = 0;
        const double xi = x[i];
        for (int k = 0; k < nf; ++k) {
            const double w = env.cond_row(s, k);
            if (w <= 0) continue;
            acc += w * (xi - x[ci.dense_of[env.neighbor(s, k)]]);
        }
        y[i] = acc;
    }
}

void project_mean_zero(std::vector<double>& v) {
    double mean = 0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    for (double& x : v) x -= mean;
}

}  // namespace

CocycleField solve_harmonic(const Environment& env, const ClusterLabels& labels, double tol,
                            int max_iters) {
    if (!(tol > 0)) throw ParamError("tol must be > 0");
    if (labels.giant_size <= 0) throw ParamError("giant cluster is empty");

    const ClusterIndex ci = index_cluster(env, labels);
    const int64_t m = static_cast<int64_t>(ci.sites.size());
    const int d = env.dim();
    const int nf = env.n_full();
    const auto& jf = env.jump_full();

    CocycleField field;
    field.d = d;
    field.cluster_id = labels.giant_id;
    field.base_site = ci.sites.front();  // lowest lexicographic representative
    field.chi.assign(static_cast<size_t>(env.n_sites()) * d,
                     std::numeric_limits<double>::quiet_NaN());
    field.env_hash = env.content_hash();

    // Jacobi preconditioner: diag(A)(s) = mu(s).
    std::vector<double> inv_diag(static_cast<size_t>(m));
    for (int64_t i = 0; i < m; ++i) inv_diag[i] = 1.0 / env.mu(ci.sites[i]);

    std::vector<double> b(static_cast<size_t>(m)), x(static_cast<size_t>(m));
    std::vector<double> r(static_cast<size_t>(m)), z(static_cast<size_t>(m)),
        p(static_cast<size_t>(m)), ap(static_cast<size_t>(m));

    double worst_residual = 0;
    int total_iters = 0;

    for (int j = 0; j < d; ++j) {
        // Harmonicity of Phi^j = Pi^j - chi^j reads A chi^j = -b^j with
        // b^j(x) = sum_z w(x,x+z) z_j.
        for (int64_t i = 0; i < m; ++i) {
            const int64_t s = ci.sites[i];
            double acc = 0;
            for (int k = 0; k < nf; ++k) acc += env.cond_row(s, k) * jf[k][j];
            b[i] = -acc;
        }
        project_mean_zero(b);  // consistency against roundoff; exact sum is 0

        // Stop on the harmonicity criterion itself: max |r(s)| / mu(s) <= tol
        // with margin, so downstream identities inherit the stated tolerance.
        const double stop = 0.02 * tol;
        std::fill(x.begin(), x.end(), 0.0);
        r = b;
        for (int64_t i = 0; i < m; ++i) z[i] = r[i] * inv_diag[i];
        p = z;
        double rz = 0;
        for (int64_t i = 0; i < m; ++i) rz += r[i] * z[i];

        int it = 0;
        double maxres = 0;
        for (; it < max_iters; ++it) {
            maxres = 0;
            for (int64_t i = 0; i < m; ++i)
                maxres = std::max(maxres, std::fabs(r[i]) * inv_diag[i]);
            if (maxres <= stop) break;

            apply_laplacian(env, ci, p, ap);
            double pap = 0;
            for (int64_t i = 0; i < m; ++i) pap += p[i] * ap[i];
            if (!(pap > 0)) break;  // p in the constant kernel; converged or stalled
            const double alpha = rz / pap;
            for (int64_t i = 0; i < m; ++i) {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            if ((it + 1) % 50 == 0) {
                // Re-project and recompute the true residual to shed drift.
                project_mean_zero(x);
                apply_laplacian(env, ci, x, ap);
                for (int64_t i = 0; i < m; ++i) r[i] = b[i] - ap[i];
            }
            double rz_new = 0;
            for (int64_t i = 0; i < m; ++i) {
                z[i] = r[i] * inv_diag[i];
                rz_new += r[i] * z[i];
            }
            const double beta = rz_new / rz;
            rz = rz_new;
            for (int64_t i = 0; i < m; ++i) p[i] = z[i] + beta * p[i];
        }
        total_iters += it;

        // True residual of the returned iterate.
        project_mean_zero(x);
        apply_laplacian(env, ci, x, ap);
        maxres = 0;
        for (int64_t i = 0; i < m; ++i)
            maxres = std::max(maxres, std::fabs(b[i] - ap[i]) * inv_diag[i]);
        if (maxres > tol)
            throw SolverError("corrector CG did not reach tolerance", maxres);
        worst_residual = std::max(worst_residual, maxres);

        const double x0 = x[ci.dense_of[field.base_site]];
        for (int64_t i = 0; i < m; ++i)
            field.chi[static_cast<size_t>(ci.sites[i]) * d + j] = x[i] - x0;
    }

    field.residual = worst_residual;
    field.solver_iters = total_iters;
    return field;
}

HomogenizedStats sigma_gamma(const Environment& env, const ClusterLabels& labels,
                             const CocycleField& field) {
    if (field.cluster_id != labels.giant_id || field.d != env.dim())
        throw ParamError("field does not match environment");

    const int d = env.dim();
    const int nf = env.n_full();
    const auto& jf = env.jump_full();

    HomogenizedStats st;
    st.d = d;
    st.sigma2 = Mat::zero(d);
    st.gamma = Mat::zero(d);
    st.m2 = Mat::zero(d);
    st.m2_scalar = 0;

    int64_t count = 0;
    for (int64_t s = 0; s < env.n_sites(); ++s) {
        if (!labels.in_giant(s)) continue;
        ++count;
        st.m2_scalar += env.mu(s);
        const Vec chi_s = field.chi_at(s);
        for (int k = 0; k < nf; ++k) {
            const double w = env.cond_row(s, k);
            if (w <= 0) continue;
            const Vec chi_t = field.chi_at(env.neighbor(s, k));
            for (int i = 0; i < d; ++i) {
                const double dchi_i = chi_t[i] - chi_s[i];
                const double dphi_i = jf[k][i] - dchi_i;
                for (int j = 0; j < d; ++j) {
                    const double dchi_j = chi_t[j] - chi_s[j];
                    const double dphi_j = jf[k][j] - dchi_j;
                    st.sigma2(i, j) += w * dphi_i * dphi_j;
                    st.gamma(i, j) += w * dchi_i * dchi_j;
                    st.m2(i, j) += w * double(jf[k][i]) * double(jf[k][j]);
                }
            }
        }
    }
    const double inv = 1.0 / static_cast<double>(count);
    st.sigma2 *= inv;
    st.gamma *= -0.5 * inv;
    st.m2 *= inv;
    st.m2_scalar *= inv;
    st.density = static_cast<double>(labels.giant_size) / static_cast<double>(env.n_sites());
    return st;
}

Mat phi_chi_cross_sum(const Environment& env, const ClusterLabels& labels,
                      const CocycleField& field) {
    const int d = env.dim();
    const int nf = env.n_full();
    const auto& jf = env.jump_full();
    Mat cross = Mat::zero(d);
    int64_t count = 0;
    for (int64_t s = 0; s < env.n_sites(); ++s) {
        if (!labels.in_giant(s)) continue;
        ++count;
        const Vec chi_s = field.chi_at(s);
        for (int k = 0; k < nf; ++k) {
            const double w = env.cond_row(s, k);
            if (w <= 0) continue;
            const Vec chi_t = field.chi_at(env.neighbor(s, k));
            for (int i = 0; i < d; ++i) {
                const double dchi_i = chi_t[i] - chi_s[i];
                const double dphi_i = jf[k][i] - dchi_i;
                for (int j = 0; j < d; ++j)
                    cross(i, j) += w * dphi_i * (chi_t[j] - chi_s[j]);
            }
        }
    }
    cross *= 1.0 / static_cast<double>(count);
    return cross;
}

PotentialField potential_box_average(const Environment& env, const ClusterLabels& labels,
                                     const CocycleField& field, int n) {
    if (n < 1 || n > env.side() / 4) throw RangeError("box radius n must be in [1, L/4]");
    const int d = env.dim();

    // Box offsets {-n..n}^d.
    std::vector<Offset> box;
    for (int x = -n; x <= n; ++x)
        for (int y = -n; y <= n; ++y)
            for (int w = (d == 3 ? -n : 0); w <= (d == 3 ? n : 0); ++w)
                box.push_back({x, y, w});

    PotentialField pf;
    pf.n = n;
    pf.phi_n.assign(static_cast<size_t>(env.n_sites()),
                    Vec{d, {std::numeric_limits<double>::quiet_NaN(),
                            std::numeric_limits<double>::quiet_NaN(),
                            std::numeric_limits<double>::quiet_NaN()}});

    for (int64_t s = 0; s < env.n_sites(); ++s) {
        if (!labels.in_giant(s)) continue;
        const Site base = env.site_coords(s);
        const Vec chi_base = field.chi_at(s);
        Vec acc = Vec::zero(d);
        int64_t cnt = 0;
        for (const auto& off : box) {
            Site y{};
            for (int i = 0; i < d; ++i) y[i] = base[i] + off[i];
            const int64_t t = env.site_index(y);
            if (!labels.in_giant(t)) continue;
            acc += field.chi_at(t) - chi_base;  // chi re-based at s
            ++cnt;
        }
        pf.phi_n[s] = (cnt > 0) ? (-1.0 / static_cast<double>(cnt)) * acc : Vec::zero(d);
    }

    // Error field over nearest-neighbor cluster pairs:
    // E_n(s, e) = phi_n(s+e) - phi_n(s) - (chi(s+e) - chi(s)).
    double sq = 0;
    int64_t cnt = 0;
    for (int64_t s = 0; s < env.n_sites(); ++s) {
        if (!labels.in_giant(s)) continue;
        const Site x = env.site_coords(s);
        for (int i = 0; i < d; ++i) {
            Site y = x;
            y[i] += 1;
            const int64_t t = env.site_index(y);
            if (!labels.in_giant(t)) continue;
            const Vec e = pf.phi_n[t] - pf.phi_n[s] - (field.chi_at(t) - field.chi_at(s));
            sq += dot(e, e);
            ++cnt;
        }
    }
    pf.e_rms = cnt > 0 ? std::sqrt(sq / static_cast<double>(cnt)) : 0.0;
    return pf;
}

Vec corrector_eval(const CocycleField& field, const ClusterLabels& labels, int64_t x,
                   int64_t z_base) {
    if (!labels.in_giant(x) || !labels.in_giant(z_base))
        throw RangeError("site outside the solved cluster");
    return field.chi_at(x) - field.chi_at(z_base);
}

namespace {
constexpr char kFieldMagic[8] = {'R', 'W', 'F', 'L', 'D', '0', '0', '1'};
template <typename T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw IntegrityError("field file truncated");
    return v;
}
}  // namespace

void serialize_field(const CocycleField& field, std::ostream& os) {
    os.write(kFieldMagic, sizeof(kFieldMagic));
    put<uint32_t>(os, static_cast<uint32_t>(field.d));
    put<int64_t>(os, field.base_site);
    put<int32_t>(os, field.cluster_id);
    put<double>(os, field.residual);
    put<int32_t>(os, field.solver_iters);
    put<uint64_t>(os, field.env_hash);
    put<uint64_t>(os, static_cast<uint64_t>(field.chi.size()));
    os.write(reinterpret_cast<const char*>(field.chi.data()),
             static_cast<std::streamsize>(field.chi.size() * sizeof(double)));
}

CocycleField deserialize_field(std::istream& is) {
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kFieldMagic, 8) != 0)
        throw IntegrityError("bad field file magic");
    CocycleField f;
    f.d = static_cast<int>(get<uint32_t>(is));
    f.base_site = get<int64_t>(is);
    f.cluster_id = get<int32_t>(is);
    f.residual = get<double>(is);
    f.solver_iters = get<int32_t>(is);
    f.env_hash = get<uint64_t>(is);
    const auto n = get<uint64_t>(is);
    f.chi.resize(n);
    is.read(reinterpret_cast<char*>(f.chi.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (!is) throw IntegrityError("field file truncated");
    return f;
}

}  // namespace rw
