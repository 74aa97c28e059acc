#include "roughwalk/env.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "roughwalk/rng.hpp"

namespace rw {

ConductanceLaw ConductanceLaw::constant(double c) {
    ConductanceLaw law;
    law.kind = LawKind::Constant;
    law.a = law.b = c;
    return law;
}
ConductanceLaw ConductanceLaw::uniform_interval(double a, double b) {
    ConductanceLaw law;
    law.kind = LawKind::UniformInterval;
    law.a = a;
    law.b = b;
    return law;
}
ConductanceLaw ConductanceLaw::percolation_weighted(double p, double a, double b) {
    ConductanceLaw law;
    law.kind = LawKind::PercolationWeighted;
    law.p = p;
    law.a = a;
    law.b = b;
    return law;
}
ConductanceLaw ConductanceLaw::line_model(double a, double b) {
    ConductanceLaw law;
    law.kind = LawKind::LineModel;
    law.a = a;
    law.b = b;
    return law;
}
ConductanceLaw ConductanceLaw::long_range_poly(double alpha, int range, double a, double b) {
    ConductanceLaw law;
    law.kind = LawKind::LongRangePoly;
    law.alpha = alpha;
    law.range = range;
    law.a = a;
    law.b = b;
    return law;
}

void ConductanceLaw::validate(int d) const {
    if (!(a > 0)) throw ParamError("law.a must be > 0");
    if (!(b >= a)) throw ParamError("law.b must be >= law.a");
    if (kind == LawKind::PercolationWeighted) {
        if (!(p > 0 && p <= 1)) throw ParamError("law.p must be in (0,1]");
    }
    if (kind == LawKind::LongRangePoly) {
        if (range < 1) throw ParamError("law.range must be >= 1");
        // alpha > d+2 keeps the truncated second-moment sum close to the
        // full series (see README); weaker decay is rejected.
        if (!(alpha > d + 2)) throw ParamError("law.alpha must be > d+2");
    }
}

std::string ConductanceLaw::tag() const {
    std::ostringstream os;
    switch (kind) {
        case LawKind::Constant: os << "constant(" << a << ")"; break;
        case LawKind::UniformInterval: os << "uniform(" << a << "," << b << ")"; break;
        case LawKind::PercolationWeighted:
            os << "percolation(" << p << "," << a << "," << b << ")";
            break;
        case LawKind::LineModel: os << "line(" << a << "," << b << ")"; break;
        case LawKind::LongRangePoly:
            os << "longrange(" << alpha << "," << range << "," << a << "," << b << ")";
            break;
    }
    return os.str();
}

namespace {

// Canonical half of J: first nonzero coordinate positive.
bool canonical_half(const Offset& z, int d) {
    for (int i = 0; i < d; ++i) {
        if (z[i] > 0) return true;
        if (z[i] < 0) return false;
    }
    return false;
}

std::vector<Offset> make_jump_half(const ConductanceLaw& law, int d) {
    std::vector<Offset> half;
    if (law.kind == LawKind::LongRangePoly) {
        const int R = law.range;
        Offset z{};
        for (int x = -R; x <= R; ++x)
            for (int y = -R; y <= R; ++y)
                for (int w = (d == 3 ? -R : 0); w <= (d == 3 ? R : 0); ++w) {
                    z = {x, y, w};
                    const double r2 = double(x) * x + double(y) * y + double(w) * w;
                    if (r2 == 0 || r2 > double(R) * R) continue;
                    if (canonical_half(z, d)) half.push_back(z);
                }
        std::sort(half.begin(), half.end());
    } else {
        for (int i = 0; i < d; ++i) {
            Offset z{};
            z[i] = 1;
            half.push_back(z);
        }
    }
    return half;
}

uint64_t fnv1a(const void* data, size_t n, uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

template <typename T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw IntegrityError("environment file truncated");
    return v;
}

constexpr char kMagic[8] = {'R', 'W', 'E', 'N', 'V', '0', '0', '1'};

}  // namespace

Environment gen_env(const ConductanceLaw& law, int d, int L, uint64_t seed) {
    if (d != 2 && d != 3) throw ParamError("d must be 2 or 3");
    if (L < 4 || L % 2 != 0) throw ParamError("L must be even and >= 4");
    law.validate(d);
    if (law.kind == LawKind::LongRangePoly && 2 * law.range >= L)
        throw ParamError("law.range must be < L/2");

    Environment env;
    env.d_ = d;
    env.L_ = L;
    env.seed_ = seed;
    env.law_tag_ = law.tag();
    env.jhalf_ = make_jump_half(law, d);
    env.n_sites_ = 1;
    for (int i = 0; i < d; ++i) env.n_sites_ *= L;
    const int nh = static_cast<int>(env.jhalf_.size());
    env.cond_.assign(static_cast<size_t>(env.n_sites_) * nh, 0.0);

    Rng rng(mix_seed(seed, 0x454e5647u));  // environment stream

    if (law.kind == LawKind::LineModel) {
        // One draw per (direction, orthogonal-coordinate class): the edge
        // {x, x+e_i} ignores the coordinate of x along e_i.
        const int64_t n_ortho = env.n_sites_ / L;
        std::vector<double> table(static_cast<size_t>(d) * n_ortho);
        for (auto& t : table) t = rng.uniform(law.a, law.b);
        for (int64_t s = 0; s < env.n_sites_; ++s) {
            const Site x = env.site_coords(s);
            for (int i = 0; i < d; ++i) {
                int64_t ortho = 0;
                for (int j = 0; j < d; ++j)
                    if (j != i) ortho = ortho * L + x[j];
                env.cond_[static_cast<size_t>(s) * nh + i] =
                    table[static_cast<size_t>(i) * n_ortho + ortho];
            }
        }
    } else {
        for (int64_t s = 0; s < env.n_sites_; ++s) {
            for (int k = 0; k < nh; ++k) {
                double c = 0;
                switch (law.kind) {
                    case LawKind::Constant: c = law.a; break;
                    case LawKind::UniformInterval: c = rng.uniform(law.a, law.b); break;
                    case LawKind::PercolationWeighted: {
                        const bool open = rng.uniform01() <= law.p;
                        const double w = rng.uniform(law.a, law.b);
                        c = open ? w : 0.0;
                        break;
                    }
                    case LawKind::LongRangePoly: {
                        const Offset& z = env.jhalf_[k];
                        const double r = std::sqrt(double(z[0]) * z[0] + double(z[1]) * z[1] +
                                                   double(z[2]) * z[2]);
                        c = rng.uniform(law.a, law.b) * std::pow(r, -law.alpha);
                        break;
                    }
                    case LawKind::LineModel: break;  // handled above
                }
                env.cond_[static_cast<size_t>(s) * nh + k] = c;
            }
        }
    }

    env.finalize();
    return env;
}

void Environment::finalize() {
    const int nh = static_cast<int>(jhalf_.size());
    jfull_ = jhalf_;
    for (const auto& z : jhalf_) jfull_.push_back({-z[0], -z[1], -z[2]});
    n_full_ = 2 * nh;

    cond_full_.assign(static_cast<size_t>(n_sites_) * n_full_, 0.0);
    nbr_.assign(static_cast<size_t>(n_sites_) * n_full_, 0);
    mu_.assign(static_cast<size_t>(n_sites_), 0.0);

    for (int64_t s = 0; s < n_sites_; ++s) {
        const Site x = site_coords(s);
        double m = 0;
        for (int k = 0; k < n_full_; ++k) {
            const Offset& z = jfull_[k];
            Site y{};
            for (int i = 0; i < d_; ++i) y[i] = x[i] + z[i];
            const int64_t t = site_index(y);
            nbr_[static_cast<size_t>(s) * n_full_ + k] = t;
            double c;
            if (k < nh) {
                c = cond_[static_cast<size_t>(s) * nh + k];
            } else {
                c = cond_[static_cast<size_t>(t) * nh + (k - nh)];  // symmetry
            }
            if (!(c >= 0)) throw ParamError("negative conductance");
            cond_full_[static_cast<size_t>(s) * n_full_ + k] = c;
            m += c;
        }
        mu_[s] = m;
    }
}

double Environment::conductance(const Site& x, const Offset& z) const {
    const int64_t s = site_index(x);
    for (int k = 0; k < n_full_; ++k) {
        const Offset& w = jfull_[k];
        if (w[0] == z[0] && w[1] == z[1] && (d_ < 3 || w[2] == z[2]))
            return cond_full_[static_cast<size_t>(s) * n_full_ + k];
    }
    throw RangeError("offset not in jump range");
}

void Environment::serialize(std::ostream& os) const {
    os.write(kMagic, sizeof(kMagic));
    put<uint32_t>(os, static_cast<uint32_t>(d_));
    put<uint32_t>(os, static_cast<uint32_t>(L_));
    put<uint64_t>(os, seed_);
    put<uint32_t>(os, static_cast<uint32_t>(law_tag_.size()));
    os.write(law_tag_.data(), static_cast<std::streamsize>(law_tag_.size()));
    put<uint32_t>(os, static_cast<uint32_t>(jhalf_.size()));
    for (const auto& z : jhalf_)
        for (int i = 0; i < d_; ++i) put<int32_t>(os, z[i]);
    put<uint64_t>(os, static_cast<uint64_t>(cond_.size()));
    os.write(reinterpret_cast<const char*>(cond_.data()),
             static_cast<std::streamsize>(cond_.size() * sizeof(double)));
}

Environment Environment::deserialize(std::istream& is) {
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0)
        throw IntegrityError("bad environment file magic");
    Environment env;
    env.d_ = static_cast<int>(get<uint32_t>(is));
    env.L_ = static_cast<int>(get<uint32_t>(is));
    if ((env.d_ != 2 && env.d_ != 3) || env.L_ < 4)
        throw IntegrityError("bad environment header");
    env.seed_ = get<uint64_t>(is);
    const auto tag_len = get<uint32_t>(is);
    env.law_tag_.resize(tag_len);
    is.read(env.law_tag_.data(), tag_len);
    const auto nj = get<uint32_t>(is);
    env.jhalf_.resize(nj);
    for (auto& z : env.jhalf_) {
        z = {0, 0, 0};
        for (int i = 0; i < env.d_; ++i) z[i] = get<int32_t>(is);
    }
    env.n_sites_ = 1;
    for (int i = 0; i < env.d_; ++i) env.n_sites_ *= env.L_;
    const auto n_edges = get<uint64_t>(is);
    if (n_edges != static_cast<uint64_t>(env.n_sites_) * nj)
        throw IntegrityError("environment edge count mismatch");
    env.cond_.resize(n_edges);
    is.read(reinterpret_cast<char*>(env.cond_.data()),
            static_cast<std::streamsize>(n_edges * sizeof(double)));
    if (!is) throw IntegrityError("environment file truncated");
    env.finalize();
    return env;
}

uint64_t Environment::content_hash() const {
    std::ostringstream os(std::ios::binary);
    serialize(os);
    const std::string s = os.str();
    return fnv1a(s.data(), s.size());
}

ClusterLabels clusters(const Environment& env) {
    const int64_t n = env.n_sites();
    std::vector<int64_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<int8_t> rank(n, 0);

    auto find = [&](int64_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    auto unite = [&](int64_t x, int64_t y) {
        x = find(x);
        y = find(y);
        if (x == y) return;
        if (rank[x] < rank[y]) std::swap(x, y);
        parent[y] = x;
        if (rank[x] == rank[y]) ++rank[x];
    };

    const int nh = env.n_half();
    for (int64_t s = 0; s < n; ++s)
        for (int k = 0; k < nh; ++k)
            if (env.cond_row(s, k) > 0) unite(s, env.neighbor(s, k));

    ClusterLabels out;
    out.label.assign(n, -1);
    std::vector<int64_t> count;
    std::vector<int32_t> id_of_root(n, -1);
    int32_t next_id = 0;
    for (int64_t s = 0; s < n; ++s) {
        if (env.mu(s) <= 0) continue;
        const int64_t r = find(s);
        if (id_of_root[r] < 0) {
            id_of_root[r] = next_id++;
            count.push_back(0);
        }
        out.label[s] = id_of_root[r];
        ++count[out.label[s]];
    }
    for (int32_t id = 0; id < next_id; ++id) {
        if (count[id] > out.giant_size) {
            out.giant_size = count[id];
            out.giant_id = id;
        }
    }
    return out;
}

}  // namespace rw
