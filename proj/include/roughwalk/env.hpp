#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "roughwalk/errors.hpp"

// Finite periodic realizations of the random conductance environment on the
// torus (Z/LZ)^d with a finite symmetric jump range J. Conductances are stored
// once per undirected edge {x, x+z}, z running over a canonical half of J.

namespace rw {

using Site = std::array<int, 3>;    // coordinates, entries >= d unused
using Offset = std::array<int, 3>;  // lattice offset, entries >= d unused

enum class LawKind { Constant, UniformInterval, PercolationWeighted, LineModel, LongRangePoly };

struct ConductanceLaw {
    LawKind kind = LawKind::Constant;
    double a = 1.0, b = 1.0;  // weight interval [a,b] (or the constant, in a)
    double p = 1.0;           // percolation open probability
    double alpha = 0.0;       // polynomial decay exponent, long-range only
    int range = 1;            // truncation radius R, long-range only

    static ConductanceLaw constant(double c);
    static ConductanceLaw uniform_interval(double a, double b);
    static ConductanceLaw percolation_weighted(double p, double a, double b);
    static ConductanceLaw line_model(double a, double b);
    static ConductanceLaw long_range_poly(double alpha, int range, double a, double b);

    void validate(int d) const;  // throws ParamError naming the offending field
    std::string tag() const;
};

class Environment {
public:
    Environment() = default;

    int dim() const { return d_; }
    int side() const { return L_; }
    int64_t n_sites() const { return n_sites_; }
    uint64_t seed() const { return seed_; }
    const std::string& law_tag() const { return law_tag_; }

    const std::vector<Offset>& jump_half() const { return jhalf_; }
    const std::vector<Offset>& jump_full() const { return jfull_; }
    int n_half() const { return static_cast<int>(jhalf_.size()); }
    int n_full() const { return static_cast<int>(jfull_.size()); }

    int64_t site_index(const Site& x) const {
        int64_t idx = 0;
        for (int i = 0; i < d_; ++i) idx = idx * L_ + wrap_coord(x[i]);
        return idx;
    }
    Site site_coords(int64_t idx) const {
        Site x{};
        for (int i = d_ - 1; i >= 0; --i) {
            x[i] = static_cast<int>(idx % L_);
            idx /= L_;
        }
        return x;
    }
    int wrap_coord(int c) const {
        int r = c % L_;
        return r < 0 ? r + L_ : r;
    }

    // Conductance of edge {x, x+z}; z must be in J or -J.
    double conductance(const Site& x, const Offset& z) const;

    // Fast row access: per-site conductances over jump_full(), and the
    // torus neighbor index for each direction.
    double cond_row(int64_t site, int k) const { return cond_full_[site * n_full_ + k]; }
    int64_t neighbor(int64_t site, int k) const { return nbr_[site * n_full_ + k]; }

    double mu(int64_t site) const { return mu_[site]; }
    double mu(const Site& x) const { return mu_[site_index(x)]; }

    // Raw half-edge storage, site-major, direction-minor (serialization order).
    const std::vector<double>& half_conductances() const { return cond_; }

    void serialize(std::ostream& os) const;
    static Environment deserialize(std::istream& is);
    uint64_t content_hash() const;  // FNV-1a over the serialized bytes

    friend Environment gen_env(const ConductanceLaw& law, int d, int L, uint64_t seed);

private:
    void finalize();  // builds jfull_, cond_full_, nbr_, mu_; asserts validity

    int d_ = 0, L_ = 0;
    int64_t n_sites_ = 0;
    int n_full_ = 0;
    uint64_t seed_ = 0;
    std::string law_tag_;
    std::vector<Offset> jhalf_, jfull_;
    std::vector<double> cond_;       // n_sites * n_half
    std::vector<double> cond_full_;  // n_sites * n_full
    std::vector<int64_t> nbr_;       // n_sites * n_full
    std::vector<double> mu_;
};

Environment gen_env(const ConductanceLaw& law, int d, int L, uint64_t seed);

struct ClusterLabels {
    std::vector<int32_t> label;  // -1 where mu == 0
    int32_t giant_id = -1;
    int64_t giant_size = 0;

    bool in_giant(int64_t site) const { return giant_id >= 0 && label[site] == giant_id; }
};

ClusterLabels clusters(const Environment& env);

// Read-only translated view: conductance({u,v}) of the view equals
// conductance({u+z, v+z}) of the base environment, torus-wrapped.
class ShiftView {
public:
    ShiftView(const Environment& env, const Offset& z) : env_(&env), z_(z) {}

    double conductance(const Site& x, const Offset& off) const {
        Site y{};
        for (int i = 0; i < env_->dim(); ++i) y[i] = x[i] + z_[i];
        return env_->conductance(y, off);
    }
    double mu(const Site& x) const {
        Site y{};
        for (int i = 0; i < env_->dim(); ++i) y[i] = x[i] + z_[i];
        return env_->mu(y);
    }
    ShiftView shifted(const Offset& w) const {
        Offset s{};
        for (int i = 0; i < env_->dim(); ++i) s[i] = z_[i] + w[i];
        return ShiftView(*this->base(), s);
    }
    const Environment* base() const { return env_; }
    const Offset& shift() const { return z_; }

private:
    const Environment* env_;
    Offset z_;
};

}  // namespace rw
