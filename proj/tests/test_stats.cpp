#include <catch2/catch_amalgamated.hpp>

#include "fkise/rng.hpp"
#include "fkise/stats.hpp"

using namespace fkise;

TEST_CASE("chi-square survival matches reference values") {
    // frozen against an independent implementation
    CHECK(stats::chi2_sf(12.3, 5) == Catch::Approx(0.03090046463546092).epsilon(1e-10));
    CHECK(stats::chi2_sf(3.1, 10) == Catch::Approx(0.9789717253848219).epsilon(1e-10));
    CHECK(stats::chi2_sf(40.0, 15) == Catch::Approx(0.00045349813510223386).epsilon(1e-8));
}

TEST_CASE("kolmogorov survival matches reference values") {
    CHECK(stats::ks_sf(0.5) == Catch::Approx(0.9639452436648751).epsilon(1e-9));
    CHECK(stats::ks_sf(1.0) == Catch::Approx(0.26999967167735456).epsilon(1e-9));
    CHECK(stats::ks_sf(2.0) == Catch::Approx(0.0006709252557796953).epsilon(1e-7));
}

TEST_CASE("normal cdf") {
    CHECK(stats::normal_cdf(1.96) == Catch::Approx(0.9750021048517795).epsilon(1e-12));
    CHECK(stats::normal_cdf(0.0) == Catch::Approx(0.5));
}

TEST_CASE("rng streams are deterministic and replica-stable") {
    auto a1 = make_stream(42, "module", 0);
    auto a2 = make_stream(42, "module", 0);
    auto b = make_stream(42, "module", 1);
    CHECK(a1() == a2());
    CHECK(a1() == a2());
    auto a3 = make_stream(42, "module", 0);
    (void)b();
    CHECK(a3() != b());  // replicas differ
}

TEST_CASE("normal and gamma sampling moments") {
    auto rng = make_stream(7, "moments");
    const int n = 200000;
    double sum = 0, sum2 = 0;
    for (int i = 0; i < n; ++i) {
        const double x = normal(rng);
        sum += x;
        sum2 += x * x;
    }
    CHECK(std::fabs(sum / n) < 0.01);
    CHECK(sum2 / n == Catch::Approx(1.0).margin(0.02));

    // Gamma(0.25): mean 0.25, var 0.25
    double gs = 0, gs2 = 0;
    for (int i = 0; i < n; ++i) {
        const double g = gamma_draw(rng, 0.25);
        gs += g;
        gs2 += g * g;
    }
    const double gm = gs / n;
    CHECK(gm == Catch::Approx(0.25).margin(0.01));
    CHECK(gs2 / n - gm * gm == Catch::Approx(0.25).margin(0.02));
}

TEST_CASE("ks test calibration on uniform samples") {
    auto rng = make_stream(11, "ks_cal");
    std::vector<double> xs(2000);
    for (auto& x : xs) x = u01(rng);
    const auto r = stats::ks_test(xs, [](double x) { return std::clamp(x, 0.0, 1.0); });
    CHECK(r.p_value > 0.01);

    std::vector<double> ys(2000);
    for (auto& y : ys) y = u01(rng);
    CHECK(stats::ks_two_sample(xs, ys).p_value > 0.01);

    // shifted sample must be rejected
    for (auto& y : ys) y += 0.2;
    CHECK(stats::ks_two_sample(xs, ys).p_value < 0.001);
}

TEST_CASE("chi2 test calibration") {
    auto rng = make_stream(3, "chi2_cal");
    std::vector<double> probs{0.1, 0.2, 0.3, 0.4};
    std::vector<std::size_t> counts(4, 0);
    for (int i = 0; i < 100000; ++i) {
        const double u = u01(rng);
        if (u < 0.1) ++counts[0];
        else if (u < 0.3) ++counts[1];
        else if (u < 0.6) ++counts[2];
        else ++counts[3];
    }
    CHECK(stats::chi2_test(counts, probs).p_value > 0.01);
    std::vector<double> wrong{0.25, 0.25, 0.25, 0.25};
    CHECK(stats::chi2_test(counts, wrong).p_value < 1e-6);
}

TEST_CASE("distance correlation and permutation test") {
    auto rng = make_stream(5, "dcor");
    std::vector<double> x(120), y_dep(120), y_ind(120);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = normal(rng);
        y_dep[i] = x[i] * x[i] + 0.2 * normal(rng);  // nonlinear dependence
        y_ind[i] = normal(rng);
    }
    CHECK(stats::distance_corr(x, y_dep) > 0.3);
    auto r1 = make_stream(6, "perm");
    CHECK(stats::independence_permutation_p(x, y_dep, 200, r1) < 0.02);
    auto r2 = make_stream(6, "perm");
    CHECK(stats::independence_permutation_p(x, y_ind, 200, r2) > 0.01);
}

TEST_CASE("linear fit recovers a slope") {
    std::vector<double> x{1, 2, 3, 4, 5}, y;
    for (double xi : x) y.push_back(3.0 - 0.5 * xi);
    const auto f = stats::linear_fit(x, y);
    CHECK(f.slope == Catch::Approx(-0.5));
    CHECK(f.intercept == Catch::Approx(3.0));
}
