#include <catch2/catch.hpp>

#include <cmath>

#include "satkit/normal.hpp"
#include "satkit/rng.hpp"

using namespace satkit;

TEST_CASE("normal quantile matches reference values") {
    CHECK(normal_quantile(0.5) == Approx(0.0).margin(1e-15));
    CHECK(normal_quantile(0.975) == Approx(1.959963984540054).epsilon(1e-12));
    CHECK(normal_quantile(0.025) == Approx(-1.959963984540054).epsilon(1e-12));
    CHECK(normal_quantile(0.84) == Approx(0.994457883209753).epsilon(1e-12));
    CHECK(normal_quantile(0.99) == Approx(2.326347874040841).epsilon(1e-12));
    CHECK(normal_quantile(0.999) == Approx(3.090232306167813).epsilon(1e-12));
    CHECK(normal_quantile(1e-10) == Approx(-6.361340902404056).epsilon(1e-10));
}

TEST_CASE("quantile and cdf are inverse on a grid") {
    for (int i = 1; i < 200; ++i) {
        const double p = i / 200.0;
        CHECK(normal_cdf(normal_quantile(p)) == Approx(p).epsilon(1e-12));
    }
}

TEST_CASE("quantile rejects endpoints") {
    CHECK_THROWS_AS(normal_quantile(0.0), error);
    CHECK_THROWS_AS(normal_quantile(1.0), error);
}

TEST_CASE("kolmogorov tail matches the classical 5% critical point") {
    // lambda = 1.3581 is the classical two-sided 5% point
    CHECK(kolmogorov_q(1.3581) == Approx(0.05).margin(2e-4));
    CHECK(kolmogorov_q(0.05) == Approx(1.0).margin(1e-6));
    CHECK(kolmogorov_q(3.0) < 1e-6);
}

TEST_CASE("ks test accepts genuine normal samples and rejects shifted ones") {
    rng::Stream stream(20240u);
    std::vector<double> z(20000);
    for (auto& v : z) v = stream.next_normal();
    const auto ok = ks_test_standard_normal(z);
    CHECK(ok.p_value > 0.01);

    for (auto& v : z) v += 0.1;
    const auto bad = ks_test_standard_normal(z);
    CHECK(bad.p_value < 1e-6);
}
