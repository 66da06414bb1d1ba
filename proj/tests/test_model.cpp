#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "gwgames/model.hpp"
#include "gwgames/simulate.hpp"
#include "generators.hpp"

using namespace gwgames;

TEST_CASE("table law validation and canonical form") {
    auto law = OffspringLaw::table(2, {{{1, 0}, 0.25},
                                       {{0, 1}, 0.5},
                                       {{1, 0}, 0.25}});
    REQUIRE(law.entries.size() == 2);  // duplicates merged
    REQUIRE(law.entries[0].counts == std::vector<int>{0, 1});
    REQUIRE(law.entries[0].prob == Catch::Approx(0.5));
    REQUIRE(law.entries[1].prob == Catch::Approx(0.5));

    // small drift is renormalized, larger drift rejected
    REQUIRE_NOTHROW(OffspringLaw::table(2, {{{0, 0}, 1.0 + 5e-13}}));
    REQUIRE_THROWS_AS(OffspringLaw::table(2, {{{0, 0}, 0.9}}), spec_error);
    REQUIRE_THROWS_AS(OffspringLaw::table(2, {{{0, 0}, -0.1}, {{1, 0}, 1.1}}), spec_error);
    REQUIRE_THROWS_AS(OffspringLaw::table(2, {{{0}, 1.0}}), spec_error);
    REQUIRE_THROWS_AS(OffspringLaw::table(2, {{{-1, 1}, 1.0}}), spec_error);
}

TEST_CASE("poisson law validation") {
    REQUIRE_NOTHROW(OffspringLaw::poisson({0.0, 2.5}));
    REQUIRE_THROWS_AS(OffspringLaw::poisson({-0.5, 1.0}), spec_error);
    REQUIRE_THROWS_AS(OffspringLaw::poisson({1.0}), spec_error);
}

TEST_CASE("prob vector clamps tiny drift and rejects real violations") {
    ProbVector ok({1.0 + 5e-13, -5e-13, 0.5});
    REQUIRE(ok[0] == 1.0);
    REQUIRE(ok[1] == 0.0);
    REQUIRE_THROWS_AS(ProbVector({1.1}), spec_error);
    REQUIRE_THROWS_AS(ProbVector({-0.2}), spec_error);
}

TEST_CASE("model spec validation") {
    auto law = [] { return OffspringLaw::table(2, {{{0, 0}, 1.0}}); };
    PermissibleSets perm;
    perm.sets = {1u, 2u};
    REQUIRE_NOTHROW(ModelSpec::create(2, {0.5, 0.5}, {law(), law()}, perm));
    REQUIRE_THROWS_AS(ModelSpec::create(2, {0.6, 0.6}, {law(), law()}, perm), spec_error);

    PermissibleSets empty_set;
    empty_set.sets = {0u, 2u};
    REQUIRE_THROWS_AS(ModelSpec::create(2, {0.5, 0.5}, {law(), law()}, empty_set), spec_error);
    PermissibleSets full;
    full.sets = {3u, 2u};
    REQUIRE_THROWS_AS(ModelSpec::create(2, {0.5, 0.5}, {law(), law()}, full), spec_error);
}

TEST_CASE("pgf evaluation basics") {
    auto law = OffspringLaw::table(2, {{{0, 0}, 0.2},
                                       {{2, 0}, 0.3},
                                       {{1, 1}, 0.5}});
    std::vector<double> ones{1.0, 1.0}, zeros{0.0, 0.0};
    REQUIRE(pgf_eval(law, 0b01, ones) == Catch::Approx(1.0));
    REQUIRE(pgf_eval(law, 0b11, ones) == Catch::Approx(1.0));
    // restricted to blue at zero: rows with no blue children survive
    REQUIRE(pgf_eval(law, 0b01, zeros) == Catch::Approx(0.2));
    // both coordinates at zero: only the childless row
    REQUIRE(pgf_eval(law, 0b11, zeros) == Catch::Approx(0.2));
    // x = (0.5, .): restriction {blue}: 0.2 + 0.3*0.25 + 0.5*0.5
    REQUIRE(pgf_eval(law, 0b01, {0.5, 0.9}) == Catch::Approx(0.2 + 0.075 + 0.25));

    auto po = OffspringLaw::poisson({0.7, 1.3});
    REQUIRE(pgf_eval(po, 0b11, ones) == Catch::Approx(1.0));
    REQUIRE(pgf_eval(po, 0b01, zeros) == Catch::Approx(std::exp(-0.7)));
    REQUIRE(pgf_eval(po, 0b10, {0.3, 0.4}) == Catch::Approx(std::exp(1.3 * (0.4 - 1.0))));

    REQUIRE_THROWS_AS(pgf_eval(law, 0u, ones), spec_error);
    REQUIRE_THROWS_AS(pgf_eval(law, 0b01, {1.5, 0.0}), spec_error);
}

TEST_CASE("pgf partial derivatives match central differences") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        ModelSpec spec = seed % 2 == 0 ? testgen::random_table_spec(seed)
                                       : testgen::random_poisson_spec(seed);
        RngStream rng(seed, 77);
        int j = (int)(rng.next_unit() * spec.m) % spec.m;
        const OffspringLaw& law = spec.offspring[j];
        ColorSet s = testgen::random_proper_subset(rng, spec.m);
        std::vector<double> x(spec.m);
        for (double& v : x) v = 0.05 + 0.9 * rng.next_unit();
        for (int k = 0; k < spec.m; ++k) {
            if (!set_contains(s, k)) continue;
            double h = 1e-6;
            std::vector<double> hi = x, lo = x;
            hi[k] += h;
            lo[k] -= h;
            double fd = (pgf_eval(law, s, hi) - pgf_eval(law, s, lo)) / (2 * h);
            double exact = pgf_partial(law, s, k, x);
            REQUIRE(std::fabs(fd - exact) < 1e-6 * (1.0 + std::fabs(exact)));
        }
    }
}

TEST_CASE("pgf partial at zero picks out single-child rows") {
    auto law = OffspringLaw::table(2, {{{1, 0}, 0.3},
                                       {{1, 1}, 0.3},
                                       {{2, 0}, 0.2},
                                       {{0, 0}, 0.2}});
    std::vector<double> zeros{0.0, 0.0};
    // restriction {b,r}: needs X_b = 1 and X_r = 0
    REQUIRE(pgf_partial(law, 0b11, 0, zeros) == Catch::Approx(0.3));
    // restriction {b}: needs X_b = 1 only
    REQUIRE(pgf_partial(law, 0b01, 0, zeros) == Catch::Approx(0.6));
    REQUIRE_THROWS_AS(pgf_partial(law, 0b01, 1, zeros), spec_error);
}

TEST_CASE("pgf is monotone in every coordinate") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        ModelSpec spec = seed % 2 == 0 ? testgen::random_table_spec(seed + 100)
                                       : testgen::random_poisson_spec(seed + 100);
        RngStream rng(seed, 13);
        ColorSet s = testgen::random_proper_subset(rng, spec.m);
        std::vector<double> x(spec.m), y(spec.m);
        for (int k = 0; k < spec.m; ++k) {
            x[k] = rng.next_unit();
            y[k] = x[k] + (1.0 - x[k]) * rng.next_unit();
        }
        for (int j = 0; j < spec.m; ++j)
            REQUIRE(pgf_eval(spec.offspring[j], s, x) <=
                    pgf_eval(spec.offspring[j], s, y) + 1e-12);
    }
}

TEST_CASE("alpha and beta") {
    // childless model: both players are always stuck
    auto childless = OffspringLaw::table(2, {{{0, 0}, 1.0}});
    PermissibleSets perm;
    perm.sets = {1u, 2u};
    ModelSpec spec = ModelSpec::create(2, {0.5, 0.5}, {childless, childless}, perm);
    auto [a, b] = alpha_beta(spec);
    REQUIRE(a[0] == 1.0);
    REQUIRE(a[1] == 1.0);
    REQUIRE(b[0] == 1.0);

    auto po = OffspringLaw::poisson({0.8, 1.1});
    ModelSpec spec2 = ModelSpec::create(2, {0.5, 0.5}, {po, po}, perm);
    auto [a2, b2] = alpha_beta(spec2);
    REQUIRE(a2[0] == Catch::Approx(std::exp(-0.8)));   // no blue children
    REQUIRE(b2[0] == Catch::Approx(std::exp(-1.1)));   // no red children
    REQUIRE(a2[1] == Catch::Approx(std::exp(-1.1)));   // permissible at red is {r}
}

TEST_CASE("mean vectors and matrices") {
    auto law = OffspringLaw::table(2, {{{2, 1}, 0.5}, {{0, 3}, 0.5}});
    auto mu = mean_vector(law);
    REQUIRE(mu[0] == Catch::Approx(1.0));
    REQUIRE(mu[1] == Catch::Approx(2.0));
    REQUIRE(restricted_mean(law, 0b10) == Catch::Approx(2.0));

    auto po = OffspringLaw::poisson({0.25, 1.5});
    REQUIRE(mean_vector(po)[1] == 1.5);

    PermissibleSets perm;
    perm.sets = {1u, 2u};
    ModelSpec spec = ModelSpec::create(2, {0.5, 0.5}, {law, po}, perm);
    auto mat = mean_matrix(spec);
    REQUIRE(mat[0][1] == Catch::Approx(2.0));
    REQUIRE(mat[1][0] == Catch::Approx(0.25));
}

static double univariate_poisson_tv(double mu1, double mu2) {
    // independent summation oracle over a generous range
    double l1 = 0.0;
    double lp1 = std::exp(-mu1), lp2 = std::exp(-mu2);
    for (int k = 0; k <= 200; ++k) {
        l1 += std::fabs(lp1 - lp2);
        lp1 *= mu1 / (k + 1);
        lp2 *= mu2 / (k + 1);
    }
    return 0.5 * l1;
}

TEST_CASE("law distance: exact table case") {
    auto a = OffspringLaw::table(2, {{{0, 0}, 0.5}, {{1, 0}, 0.5}});
    auto b = OffspringLaw::table(2, {{{0, 0}, 0.3}, {{1, 0}, 0.5}, {{0, 1}, 0.2}});
    REQUIRE(law_tv_distance(a, b) == Catch::Approx(0.2));  // 0.2 of mass moved
    REQUIRE(law_tv_distance(a, a) == 0.0);
}

TEST_CASE("law distance: poisson pair matches the univariate oracle") {
    auto a = OffspringLaw::poisson({2.0, 0.8});
    auto b = OffspringLaw::poisson({2.1, 0.8});
    double oracle = univariate_poisson_tv(2.0, 2.1);
    REQUIRE(oracle > 0.0);
    REQUIRE(oracle < 0.1);
    REQUIRE(std::fabs(law_tv_distance(a, b) - oracle) < 1e-9);
}

TEST_CASE("law distance: poisson against its own truncation is tiny") {
    double mu = 1.2;
    auto po = OffspringLaw::poisson({mu, 0.5});
    std::vector<TableEntry> rows;
    for (int i = 0; i <= 30; ++i)
        for (int j = 0; j <= 30; ++j) {
            double p = std::exp(-mu) * std::pow(mu, i) / std::tgamma(i + 1.0) *
                       std::exp(-0.5) * std::pow(0.5, j) / std::tgamma(j + 1.0);
            rows.push_back({{i, j}, p});
        }
    double total = 0.0;
    for (auto& r : rows) total += r.prob;
    for (auto& r : rows) r.prob /= total;
    auto table = OffspringLaw::table(2, std::move(rows));
    REQUIRE(law_tv_distance(po, table) < 1e-8);
}

TEST_CASE("model distance properties") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        RngStream rng(seed, 5);
        int m = 2 + (int)(rng.next_unit() * 2);
        PermissibleSets perm = testgen::random_permissible(rng, m);
        auto mk = [&](std::uint64_t s) {
            RngStream r2(s, 6);
            std::vector<OffspringLaw> laws;
            for (int j = 0; j < m; ++j) laws.push_back(testgen::random_table_law(r2, m, 4, 3));
            return ModelSpec::create(m, std::vector<double>(m, 1.0 / m), std::move(laws), perm);
        };
        ModelSpec a = mk(seed * 3), b = mk(seed * 3 + 1), c = mk(seed * 3 + 2);
        double ab = d0_distance(a, b), bc = d0_distance(b, c), ac = d0_distance(a, c);
        REQUIRE(ab >= 0.0);
        REQUIRE(ab <= 1.0 + 1e-12);
        REQUIRE(ac <= ab + bc + 2e-10);           // triangle inequality
        REQUIRE(d0_distance(a, a) == 0.0);
        REQUIRE(std::fabs(d0_distance(b, a) - ab) < 1e-15);
    }
}

TEST_CASE("model distance requires matching shape") {
    ModelSpec a = testgen::small_table_spec(1);
    ModelSpec b = a;
    b.permissible.sets[0] = b.permissible.sets[0] == 1u ? 2u : 1u;
    REQUIRE_THROWS_AS(d0_distance(a, b), spec_error);
}
