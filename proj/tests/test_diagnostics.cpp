#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "roughwalk/diagnostics.hpp"

using namespace rw;

namespace {

struct Fixture {
    Environment env;
    ClusterLabels labels;
    CocycleField field;
    HomogenizedStats stats;
};

Fixture make_fixture(const ConductanceLaw& law, int L, uint64_t seed) {
    Fixture f;
    f.env = gen_env(law, 2, L, seed);
    f.labels = clusters(f.env);
    f.field = solve_harmonic(f.env, f.labels, 1e-10, 50000);
    f.stats = sigma_gamma(f.env, f.labels, f.field);
    return f;
}

EnsembleSpec small_spec(uint64_t seed) {
    EnsembleSpec s;
    s.K = 150;
    s.n_list = {4, 16};
    s.T = 1.0;
    s.p = 3.0;
    s.master_seed = seed;
    s.threads = 4;
    return s;
}

}  // namespace

TEST_CASE("spec validation") {
    EnsembleSpec s = small_spec(1);
    s.K = 50;
    CHECK_THROWS_AS(s.validate(), ParamError);
    s = small_spec(1);
    s.p = 2.0;
    CHECK_THROWS_AS(s.validate(), ParamError);
    s = small_spec(1);
    s.n_list.clear();
    CHECK_THROWS_AS(s.validate(), ParamError);
}

TEST_CASE("constant env: qv cross term zero, diagonal mean 2T") {
    const Fixture f = make_fixture(ConductanceLaw::constant(1.0), 8, 1);
    EnsembleSpec s = small_spec(7);
    s.K = 400;
    const CheckResult qv = qv_limit_check(f.env, f.labels, f.field, f.stats, s);
    CHECK(qv.pass);
    const CheckResult ucv = ucv_check(f.env, f.labels, f.field, f.stats, s);
    CHECK(ucv.pass);
    // The ucv rows carry the per-n diagonal means; verify against 2T directly.
    bool saw_mean = false;
    for (const StatRow& row : ucv.rows) {
        if (row.stat != "qv_T_mean_11") continue;
        saw_mean = true;
        CHECK(std::fabs(row.value - 2.0 * s.T) <= 3.0 * row.stderr_);
    }
    CHECK(saw_mean);
}

TEST_CASE("lindeberg: large delta truncates everything on the constant env") {
    const Fixture f = make_fixture(ConductanceLaw::constant(1.0), 8, 2);
    EnsembleSpec s = small_spec(11);
    // Jumps of v.M are 1/sqrt(n) <= 1/2; delta above that leaves nothing.
    const CheckResult r =
        lindeberg_check(f.env, f.labels, f.field, f.stats, s, Vec{2, {1, 0, 0}}, 0.6);
    CHECK(r.pass);
    for (const StatRow& row : r.rows)
        if (row.stat == "truncated_sum_mean") CHECK(row.value == 0.0);
    // v = 0 degenerates to zero exactly.
    const CheckResult z =
        lindeberg_check(f.env, f.labels, f.field, f.stats, s, Vec{2, {0, 0, 0}}, 0.5);
    CHECK(z.pass);
}

TEST_CASE("corrector p-var and mixed Q vanish identically on zero-corrector envs") {
    const Fixture f = make_fixture(ConductanceLaw::line_model(1.0, 2.0), 8, 3);
    EnsembleSpec s = small_spec(13);
    const CheckResult pv = corrector_pvar_decay(f.env, f.labels, f.field, s);
    CHECK(pv.pass);
    for (const StatRow& row : pv.rows)
        if (row.stat == "pvar_mean") CHECK(row.value <= 1e-9);
    const CheckResult mq = mixed_q_check(f.env, f.labels, f.field, f.stats, s);
    CHECK(mq.pass);
    const CheckResult ca = corrector_area_check(f.env, f.labels, f.field, f.stats, s);
    CHECK(ca.pass);
}

TEST_CASE("mixed Q exact torus identity at n=1: edge cross-sum vanishes") {
    const Fixture f = make_fixture(ConductanceLaw::uniform_interval(1.0, 10.0), 16, 5);
    CHECK(max_abs(phi_chi_cross_sum(f.env, f.labels, f.field)) <= 1e-8);
}

TEST_CASE("area anomaly on the constant env: E XX -> 0, E XXbar -> T I") {
    const Fixture f = make_fixture(ConductanceLaw::constant(1.0), 8, 4);
    EnsembleSpec s = small_spec(17);
    s.K = 2400;
    const CheckResult r = area_anomaly_mc(f.env, f.labels, f.field, f.stats, s);
    CHECK(r.pass);
    for (const StatRow& row : r.rows) {
        if (row.stat == "ito_mean_11" || row.stat == "ito_mean_12")
            CHECK(std::fabs(row.value) <= 3.0 * row.stderr_ + 1e-12);
        if (row.stat == "strat_mean_11")
            CHECK(std::fabs(row.value - s.T) <= 3.0 * row.stderr_);
        if (row.stat == "strat_mean_12")
            CHECK(std::fabs(row.value) <= 3.0 * row.stderr_ + 1e-12);
    }
}

TEST_CASE("area anomaly on the line model: E XX within 3 stderr of 0") {
    const Fixture f = make_fixture(ConductanceLaw::line_model(1.0, 2.0), 8, 6);
    EnsembleSpec s = small_spec(19);
    s.K = 400;
    const CheckResult r = area_anomaly_mc(f.env, f.labels, f.field, f.stats, s);
    for (const StatRow& row : r.rows)
        if (row.stat.rfind("ito_mean_", 0) == 0)
            CHECK(std::fabs(row.value) <= 3.0 * row.stderr_ + 1e-12);
}

TEST_CASE("gaussianity on the constant env; skipped for v = 0") {
    const Fixture f = make_fixture(ConductanceLaw::constant(1.0), 8, 8);
    EnsembleSpec s = small_spec(23);
    s.K = 2000;
    s.n_list = {64};
    const CheckResult r =
        gaussianity_check(f.env, f.labels, f.field, f.stats, s, Vec{2, {1, 0, 0}});
    CHECK(r.pass);
    const CheckResult z =
        gaussianity_check(f.env, f.labels, f.field, f.stats, s, Vec{2, {0, 0, 0}});
    CHECK(z.pass);
    CHECK(z.detail.find("skipped") != std::string::npos);
}

TEST_CASE("determinism: identical spec and seed give identical reports") {
    const Fixture f = make_fixture(ConductanceLaw::uniform_interval(1.0, 3.0), 8, 9);
    EnsembleSpec s = small_spec(29);
    s.K = 100;
    const CheckResult a = ucv_check(f.env, f.labels, f.field, f.stats, s);
    const CheckResult b = ucv_check(f.env, f.labels, f.field, f.stats, s);
    REQUIRE(a.rows.size() == b.rows.size());
    for (size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].value == b.rows[i].value);
        CHECK(a.rows[i].stderr_ == b.rows[i].stderr_);
    }
}

TEST_CASE("annealed mode regenerates the environment per walk") {
    EnsembleSpec s = small_spec(31);
    s.K = 100;
    s.n_list = {4};
    s.mode = EnsembleMode::Annealed;
    s.law = ConductanceLaw::uniform_interval(1.0, 3.0);
    const Fixture f = make_fixture(s.law, 8, 10);
    const CheckResult r = ucv_check(f.env, f.labels, f.field, f.stats, s);
    CHECK(!r.rows.empty());  // runs to completion through the annealed path
}

TEST_CASE("report JSON round trip preserves verdicts and rows") {
    const Fixture f = make_fixture(ConductanceLaw::constant(1.0), 8, 12);
    EnsembleSpec s = small_spec(37);
    DiagnosticsReport rep =
        run_diagnostics(f.env, f.labels, f.field, f.stats, s, {"ucv", "qv_limit"});
    rep.config_hash = 777;
    CHECK(rep.checks.size() == 2);
    std::stringstream ss;
    report_to_json(rep, ss);
    const DiagnosticsReport back = report_from_json(ss);
    CHECK(back.env_hash == rep.env_hash);
    CHECK(back.config_hash == 777);
    REQUIRE(back.checks.size() == rep.checks.size());
    for (size_t i = 0; i < rep.checks.size(); ++i) {
        CHECK(back.checks[i].name == rep.checks[i].name);
        CHECK(back.checks[i].pass == rep.checks[i].pass);
        REQUIRE(back.checks[i].rows.size() == rep.checks[i].rows.size());
        for (size_t j = 0; j < rep.checks[i].rows.size(); ++j)
            CHECK(back.checks[i].rows[j].value == rep.checks[i].rows[j].value);
    }
    std::stringstream csv;
    report_to_csv(rep, csv);
    std::string header;
    std::getline(csv, header);
    CHECK(header.find("check") != std::string::npos);
    CHECK(header.find("n") != std::string::npos);
    CHECK(run_diagnostics(f.env, f.labels, f.field, f.stats, s, {"nosuch"}).checks.empty());
}

TEST_CASE("isotropy identity on degenerate percolation p=1 a=b=1") {
    // Equivalent to Constant(1): sigma^2 = 2, per-coordinate m^2 = mu/d = 2,
    // and gamma = -(m^2 - sigma^2)/2 = 0 (chi = 0 forces Gamma = 0; the
    // per-coordinate normalization of m^2 is what makes the scalar identity
    // consistent with the matrix Pythagoras M^2 = Sigma^2 - 2 Gamma).
    const CheckResult r = isotropy_check(ConductanceLaw::percolation_weighted(1.0, 1.0, 1.0), 2,
                                         8, 4, 1e-10, 5, 2);
    CHECK(r.pass);
    for (const StatRow& row : r.rows) {
        if (row.stat == "sigma2_scalar") CHECK(row.value == doctest::Approx(2.0).epsilon(1e-8));
        if (row.stat == "m2_scalar") CHECK(row.value == doctest::Approx(2.0).epsilon(1e-8));
        if (row.stat == "gamma_scalar") CHECK(std::fabs(row.value) <= 1e-8);
    }
}

TEST_CASE("sample summary helpers") {
    const std::vector<double> xs = {1, 2, 3, 4};
    CHECK(sample_mean(xs) == doctest::Approx(2.5));
    // Unbiased sample sd = sqrt(5/3); stderr = sd / 2.
    CHECK(sample_stderr(xs) == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    CHECK(sample_quantile({5, 1, 3}, 0.5) == doctest::Approx(3.0));
}
