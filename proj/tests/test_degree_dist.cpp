#include <catch2/catch_amalgamated.hpp>

#include <ltkit/degree_dist.hpp>
#include <ltkit/rng.hpp>

#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <cstring>
#include <sstream>
#include <vector>

using namespace ltkit;

namespace {

// Independent construction of the robust soliton weights, kept deliberately
// separate from the library code path.
std::vector<double> reference_rsd_weights(std::uint32_t k, double c, double delta) {
    std::vector<double> rho(k + 1, 0.0), tau(k + 1, 0.0);
    rho[1] = 1.0 / k;
    for (std::uint32_t d = 2; d <= k; ++d) rho[d] = 1.0 / (double(d) * (d - 1));
    const double s = c * std::log(k / delta) * std::sqrt(double(k));
    const auto pivot = static_cast<std::uint32_t>(std::floor(k / s));
    for (std::uint32_t d = 1; d < pivot && d <= k; ++d) tau[d] = s / (double(d) * k);
    if (pivot >= 1 && pivot <= k) tau[pivot] = s * std::log(s / delta) / k;
    double beta = 0.0;
    for (std::uint32_t d = 1; d <= k; ++d) beta += rho[d] + tau[d];
    std::vector<double> w(k);
    for (std::uint32_t d = 1; d <= k; ++d) w[d - 1] = (rho[d] + tau[d]) / beta;
    return w;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

}  // namespace

TEST_CASE("construction trims trailing zeros and rejects degree 0", "[degree_dist]") {
    DegreeDistribution d(10, {0.5, 0.5, 0.0, 0.0});
    CHECK(d.d_max() == 2);
    CHECK(d.omega(2) == 0.5);
    CHECK(d.omega(7) == 0.0);
    CHECK_THROWS_AS(d.omega(0), std::invalid_argument);
    CHECK_THROWS_AS(DegreeDistribution(0, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(DegreeDistribution::from_pairs(5, {{0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(DegreeDistribution::from_pairs(5, {{2, 0.5}, {2, 0.5}}), std::invalid_argument);
}

TEST_CASE("validate reports mass, sign, and support violations", "[degree_dist]") {
    CHECK(DegreeDistribution(10, {0.5, 0.5}).validate().empty());
    CHECK_FALSE(DegreeDistribution(10, {0.5, 0.4}).validate().empty());

    auto negative = DegreeDistribution(10, {0.6, 0.5, -0.1}).validate();
    bool mentions_negative = false;
    for (const auto& msg : negative) mentions_negative |= msg.find("negative") != std::string::npos;
    CHECK(mentions_negative);

    // Support wider than k: from_pairs at degree 8 with k = 5.
    auto wide = DegreeDistribution::from_pairs(5, {{1, 0.5}, {8, 0.5}}).validate();
    bool mentions_k = false;
    for (const auto& msg : wide) mentions_k |= msg.find("exceeds k") != std::string::npos;
    CHECK(mentions_k);

    auto nan = DegreeDistribution(4, {std::nan(""), 1.0}).validate();
    CHECK_FALSE(nan.empty());
}

TEST_CASE("mean degree of simple distributions", "[degree_dist]") {
    CHECK(DegreeDistribution(8, {1.0}).mean_degree() == 1.0);
    CHECK(DegreeDistribution(8, {0.5, 0.0, 0.0, 0.5}).mean_degree() == Catch::Approx(2.5).margin(1e-15));
}

TEST_CASE("robust soliton matches an independent construction", "[degree_dist]") {
    for (auto [k, c, delta] : {std::tuple{100u, 0.1, 0.05}, {1000u, 0.09266, 0.001993}, {500u, 0.03, 0.5}}) {
        auto dist = make_rsd(k, c, delta);
        auto ref = reference_rsd_weights(k, c, delta);
        REQUIRE(dist.d_max() == k);
        for (std::uint32_t d = 1; d <= k; ++d)
            CHECK(dist.omega(d) == Catch::Approx(ref[d - 1]).margin(1e-14));
        CHECK(dist.is_valid());
    }
}

TEST_CASE("robust soliton at the standard k=1000 operating point", "[degree_dist]") {
    auto dist = make_rsd(1000, 0.09266, 0.001993);
    CHECK(rsd_spike_degree(1000, 0.09266, 0.001993) == 26);
    // These parameters are chosen to put the mean output degree at 12.
    CHECK(dist.mean_degree() == Catch::Approx(12.0).margin(0.01));
    CHECK(dist.omega(1) > 0.0);
    CHECK(dist.omega(26) > dist.omega(25));  // spike visible above the 1/d(d-1) decay
    CHECK(dist.omega(26) > dist.omega(27));
}

TEST_CASE("robust soliton handles k=1 by collapsing to degree 1", "[degree_dist]") {
    auto dist = make_rsd(1, 0.1, 0.01);
    CHECK(dist.d_max() == 1);
    CHECK(dist.omega(1) == 1.0);
    CHECK_THROWS_AS(make_rsd(10, 0.0, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(make_rsd(10, 0.1, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(make_rsd(0, 0.1, 0.1), std::invalid_argument);
}

TEST_CASE("binomial profile at k=4, mean 2 equals the closed form", "[degree_dist]") {
    auto dist = make_lrfc(4, 2.0);
    REQUIRE(dist.d_max() == 4);
    CHECK(dist.omega(1) == Catch::Approx(4.0 / 15.0).margin(1e-15));
    CHECK(dist.omega(2) == Catch::Approx(6.0 / 15.0).margin(1e-15));
    CHECK(dist.omega(3) == Catch::Approx(4.0 / 15.0).margin(1e-15));
    CHECK(dist.omega(4) == Catch::Approx(1.0 / 15.0).margin(1e-15));
    // Conditioning on d >= 1 lifts the mean to k*p / (1 - (1-p)^k).
    CHECK(dist.mean_degree() == Catch::Approx(32.0 / 15.0).margin(1e-14));
}

TEST_CASE("binomial profile respects parameter bounds", "[degree_dist]") {
    CHECK_THROWS_AS(make_lrfc(10, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_lrfc(10, 11.0), std::invalid_argument);
    auto degenerate = make_lrfc(5, 5.0);
    CHECK(degenerate.omega(5) == 1.0);
    auto tiny = make_lrfc(1, 0.7);
    CHECK(tiny.omega(1) == 1.0);

    auto big = make_lrfc(1000, 12.0);
    CHECK(big.is_valid());
    CHECK(big.mean_degree() == Catch::Approx(12.0).margin(0.001));
}

TEST_CASE("truncate lumps the tail onto d_max and preserves mass", "[degree_dist]") {
    auto dist = DegreeDistribution(10, {0.2, 0.3, 0.3, 0.2});
    auto t = truncate(dist, 2);
    REQUIRE(t.d_max() == 2);
    CHECK(t.omega(1) == Catch::Approx(0.2).margin(1e-15));
    CHECK(t.omega(2) == Catch::Approx(0.8).margin(1e-15));

    CHECK(truncate(dist, 4) == dist);
    CHECK(truncate(dist, 9) == dist);
    CHECK_THROWS_AS(truncate(dist, 0), std::invalid_argument);
    CHECK_THROWS_AS(truncate(dist, 11), std::invalid_argument);

    auto rsd = make_rsd(1000, 0.09266, 0.001993);
    auto cut = truncate(rsd, 150);
    NeumaierSum mass;
    for (double p : cut.probs()) mass.add(p);
    CHECK(std::abs(mass.value() - 1.0) <= 1e-12);
    CHECK(cut.is_valid());
    CHECK(cut.mean_degree() < rsd.mean_degree());
}

TEST_CASE("sampling follows the distribution (chi-squared)", "[degree_dist][statistical]") {
    auto dist = make_rsd(100, 0.1, 0.05);
    Rng rng(20240817);
    const int n = 50000;
    std::vector<std::uint64_t> counts(dist.d_max() + 1, 0);
    for (int i = 0; i < n; ++i) ++counts[dist.sample_degree(rng)];

    // Merge degrees with tiny expected counts into one tail bin.
    double chi2 = 0.0, tail_expected = 0.0;
    std::uint64_t tail_observed = 0;
    int bins = 0;
    for (std::uint32_t d = 1; d <= dist.d_max(); ++d) {
        const double expected = n * dist.omega(d);
        if (expected < 5.0) {
            tail_expected += expected;
            tail_observed += counts[d];
            continue;
        }
        chi2 += (counts[d] - expected) * (counts[d] - expected) / expected;
        ++bins;
    }
    if (tail_expected > 0.0) {
        chi2 += (tail_observed - tail_expected) * (tail_observed - tail_expected) / tail_expected;
        ++bins;
    }
    boost::math::chi_squared_distribution<double> ref(bins - 1);
    const double threshold = boost::math::quantile(ref, 0.999);
    INFO("chi2 = " << chi2 << ", 99.9% threshold = " << threshold << ", bins = " << bins);
    CHECK(chi2 < threshold);
}

TEST_CASE("sampling never returns zero-probability degrees", "[degree_dist]") {
    auto dist = DegreeDistribution(10, {0.5, 0.0, 0.0, 0.5});
    Rng rng(3);
    for (int i = 0; i < 5000; ++i) {
        auto d = dist.sample_degree(rng);
        CHECK((d == 1 || d == 4));
    }
    auto empty = DegreeDistribution(5, {0.0, 0.0});
    CHECK_THROWS_AS(empty.sample_degree(rng), std::runtime_error);
}

TEST_CASE("text serialization round-trips bit-for-bit", "[degree_dist]") {
    auto dist = make_rsd(300, 0.07, 0.01);
    std::stringstream ss;
    save_text(dist, ss);
    auto back = load_distribution(ss);
    CHECK(back.k() == dist.k());
    CHECK(bitwise_equal(back.probs(), dist.probs()));
}

TEST_CASE("json serialization round-trips bit-for-bit", "[degree_dist]") {
    auto dist = truncate(make_rsd(500, 0.05, 0.02), 80);
    std::stringstream ss;
    save_json(dist, ss);
    auto back = load_distribution(ss);
    CHECK(back.k() == dist.k());
    CHECK(bitwise_equal(back.probs(), dist.probs()));
}

TEST_CASE("text loader handles comments and infers k when absent", "[degree_dist]") {
    std::stringstream ss("# comment line\n1 0.25\n4 0.75  # trailing note\n");
    auto dist = load_distribution(ss);
    CHECK(dist.k() == 4);
    CHECK(dist.omega(1) == 0.25);
    CHECK(dist.omega(4) == 0.75);

    std::stringstream bad("1 0.5\nbogus 0.5\n");
    CHECK_THROWS_AS(load_distribution(bad), std::runtime_error);
    std::stringstream empty("   \n  \n");
    CHECK_THROWS_AS(load_distribution(empty), std::runtime_error);
}
