#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "rvk/stats.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

using namespace rvk;

namespace {

std::vector<double> gaussian_sample(std::mt19937& eng, size_t n, double mean, double sd) {
    std::normal_distribution<double> dist(mean, sd);
    std::vector<double> v;
    v.reserve(n);
    for (size_t i = 0; i < n; ++i) v.push_back(dist(eng));
    return v;
}

bool has_ties(std::vector<double> all) {
    std::sort(all.begin(), all.end());
    return std::adjacent_find(all.begin(), all.end()) != all.end();
}

}  // namespace

TEST_CASE("fully separated samples give U=0 and exact p=0.1") {
    const UTestResult r = mann_whitney_u({1, 2, 3}, {4, 5, 6});
    CHECK(r.u_statistic == 0.0);
    CHECK(r.method == UMethod::exact);
    CHECK(r.p_value == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("identical multisets are perfectly non-significant") {
    const std::vector<double> x{1.5, 2.5, 2.5, 7.0};
    const UTestResult r = mann_whitney_u(x, x);
    CHECK(r.u_statistic == doctest::Approx(8.0));  // n*m/2
    CHECK(r.p_value >= 0.99);
}

TEST_CASE("U antisymmetry: U(x,y) + U(y,x) = nm") {
    std::mt19937 eng(42);
    for (int trial = 0; trial < 50; ++trial) {
        const auto x = gaussian_sample(eng, 1 + size_t(eng() % 12), 0.0, 1.0);
        const auto y = gaussian_sample(eng, 1 + size_t(eng() % 12), 0.3, 1.2);
        const double uxy = mann_whitney_u(x, y).u_statistic;
        const double uyx = mann_whitney_u(y, x).u_statistic;
        CHECK(uxy + uyx == doctest::Approx(double(x.size() * y.size())).epsilon(1e-12));
        CHECK(uxy == doctest::Approx(oracle::mwu_u(x, y)).epsilon(1e-12));
    }
}

TEST_CASE("exact p matches full enumeration on random tie-free samples") {
    std::mt19937 eng(7);
    int tested = 0;
    while (tested < 30) {
        const size_t n = 2 + size_t(eng() % 5);
        const size_t m = 2 + size_t(eng() % 5);
        const auto x = gaussian_sample(eng, n, 0.0, 1.0);
        const auto y = gaussian_sample(eng, m, 0.8, 1.0);
        std::vector<double> all(x);
        all.insert(all.end(), y.begin(), y.end());
        if (has_ties(all)) continue;
        ++tested;
        const UTestResult r = mann_whitney_u(x, y);
        REQUIRE(r.method == UMethod::exact);
        CHECK(r.p_value == doctest::Approx(oracle::mwu_exact_p(x, y)).epsilon(1e-12));
    }
}

TEST_CASE("exact distribution sums to the binomial coefficient") {
    for (int n = 1; n <= 10; ++n) {
        for (int m = 1; m <= 10 && n + m <= 20; ++m) {
            const auto dist = mwu_exact_distribution(n, m);
            const double total = std::accumulate(dist.begin(), dist.end(), 0.0);
            // C(n+m, n) via multiplicative formula
            double expected = 1.0;
            for (int i = 1; i <= n; ++i) expected = expected * double(m + i) / double(i);
            CHECK(total == doctest::Approx(expected).epsilon(1e-9));
            // symmetry of the null distribution
            for (size_t u = 0; u < dist.size(); ++u)
                CHECK(dist[u] == doctest::Approx(dist[dist.size() - 1 - u]).epsilon(1e-12));
        }
    }
}

TEST_CASE("normal approximation tracks the exact tail at n=m=8") {
    std::mt19937 eng(11);
    double worst = 0.0;
    for (int trial = 0; trial < 40; ++trial) {
        const auto x = gaussian_sample(eng, 8, 0.0, 1.0);
        const auto y = gaussian_sample(eng, 8, 0.5, 1.0);
        std::vector<double> all(x);
        all.insert(all.end(), y.begin(), y.end());
        if (has_ties(all)) continue;

        const double exact = oracle::mwu_exact_p(x, y);
        // recompute the approximation on the same data: x shifted by 0
        // keeps everything tie-free but the library picks exact mode at
        // this size, so probe the approx path through a size-21 sample
        // is not possible; instead call the internal convention directly
        // by comparing against erfc with the documented formulas.
        const double u = oracle::mwu_u(x, y);
        const double mu = 32.0;
        const double var = 64.0 / 12.0 * 17.0;
        const double z = std::max(0.0, std::abs(u - mu) - 0.5) / std::sqrt(var);
        const double approx = std::erfc(z / std::sqrt(2.0));
        worst = std::max(worst, std::abs(exact - approx));
    }
    CHECK(worst <= 0.02);
}

TEST_CASE("exact and approx conventions agree within 0.03 for min size 5") {
    // Small-sample agreement between the doubled-tail exact convention and
    // the continuity-corrected normal approximation; below min(n,m)=5 the
    // discreteness gap exceeds 0.03, so sizes start there.
    std::mt19937 eng(13);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const size_t n = 5 + size_t(eng() % 4);
        const size_t m = 5 + size_t(eng() % 4);
        if (n + m > 14) continue;
        const auto x = gaussian_sample(eng, n, 0.0, 1.0);
        const auto y = gaussian_sample(eng, m, 0.7, 1.3);
        std::vector<double> all(x);
        all.insert(all.end(), y.begin(), y.end());
        if (has_ties(all)) continue;

        const double exact = mann_whitney_u(x, y).p_value;
        const double u = oracle::mwu_u(x, y);
        const double nm = double(n) * double(m);
        const double big_n = double(n + m);
        const double var = nm / 12.0 * (big_n + 1.0);
        const double z = std::max(0.0, std::abs(u - nm / 2.0) - 0.5) / std::sqrt(var);
        const double approx = std::erfc(z / std::sqrt(2.0));
        worst = std::max(worst, std::abs(exact - approx));
    }
    CHECK(worst <= 0.03);
}

TEST_CASE("large and tied samples use the tie-corrected approximation") {
    std::vector<double> x, y;
    for (int i = 0; i < 30; ++i) {
        x.push_back(double(i % 7));
        y.push_back(double((i + 3) % 7));
    }
    const UTestResult r = mann_whitney_u(x, y);
    CHECK(r.method == UMethod::normal_approx);
    CHECK(r.p_value > 0.0);
    CHECK(r.p_value <= 1.0);

    // all values identical: no evidence, p = 1
    const UTestResult tied = mann_whitney_u({2, 2, 2}, {2, 2});
    CHECK(tied.p_value == 1.0);
    CHECK(tied.u_statistic == doctest::Approx(3.0));
}

TEST_CASE("p-value decreases as the shift grows") {
    std::mt19937 eng(5);
    const auto base = gaussian_sample(eng, 40, 0.0, 1.0);
    const auto y = gaussian_sample(eng, 40, 0.0, 1.0);
    double last_p = 1.1;
    bool monotone = true;
    for (double shift : {1.0, 2.0, 3.0, 4.0}) {
        std::vector<double> x(base);
        for (double& v : x) v += shift;
        const double p = mann_whitney_u(x, y).p_value;
        if (p > last_p) monotone = false;
        last_p = p;
    }
    CHECK(monotone);
}

TEST_CASE("sample order never matters") {
    std::mt19937 eng(17);
    const auto x = gaussian_sample(eng, 12, 0.0, 1.0);
    const auto y = gaussian_sample(eng, 9, 0.4, 1.0);
    auto xs = x;
    auto ys = y;
    std::shuffle(xs.begin(), xs.end(), eng);
    std::shuffle(ys.begin(), ys.end(), eng);
    const UTestResult a = mann_whitney_u(x, y);
    const UTestResult b = mann_whitney_u(xs, ys);
    CHECK(a.u_statistic == b.u_statistic);
    CHECK(a.p_value == b.p_value);
}

TEST_CASE("empty samples are rejected") {
    CHECK_THROWS_AS(mann_whitney_u({}, {1.0}), Error);
    CHECK_THROWS_AS(mann_whitney_u({1.0}, {}), Error);
}

TEST_CASE("hmp formula on pinned examples") {
    CHECK(hmp({0.01, 0.04}) == doctest::Approx(2.0 / 125.0).epsilon(1e-12));
    CHECK(hmp({0.37}) == doctest::Approx(0.37).epsilon(1e-12));
    CHECK(hmp(std::vector<double>(192, 0.01)) == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("hmp sits between min and the arithmetic mean") {
    std::mt19937 eng(23);
    std::uniform_real_distribution<double> dist(1e-6, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> ps;
        for (int i = 0; i < 20; ++i) ps.push_back(dist(eng));
        const double h = hmp(ps);
        const double lo = *std::min_element(ps.begin(), ps.end());
        const double hi = *std::max_element(ps.begin(), ps.end());
        CHECK(h >= lo);
        CHECK(h <= hi);
        CHECK(h <= oracle::mean(ps) + 1e-12);
    }
}

TEST_CASE("hmp rejects out-of-range p-values") {
    CHECK_THROWS_AS(hmp({0.5, 0.0}), Error);
    CHECK_THROWS_AS(hmp({0.5, -0.1}), Error);
    CHECK_THROWS_AS(hmp({0.5, 1.5}), Error);
    CHECK_THROWS_AS(hmp({}), Error);
}

TEST_CASE("same-pool comparison is not significant") {
    std::mt19937 eng(31);
    std::vector<VectorF> a, b;
    for (int i = 0; i < 60; ++i) {
        VectorF v(192);
        for (int d = 0; d < 192; ++d) v(d) = float(gaussian_sample(eng, 1, 0.0, 1.0)[0]);
        (i % 2 ? a : b).push_back(v);
    }
    CompareOptions opt;
    opt.label_a = "H";
    opt.label_b = "H*";
    const PopulationComparison cmp = compare_populations(a, b, opt);
    CHECK(cmp.per_dim.size() == 192);
    CHECK(cmp.neg_log10_hmp < 3.0);
    CHECK(cmp.hmp > 0.0);
    CHECK(cmp.hmp <= 1.0);
}

TEST_CASE("constant shift on every dimension is decisively significant") {
    std::mt19937 eng(37);
    std::vector<VectorF> a, b;
    for (int i = 0; i < 25; ++i) {
        VectorF v(192);
        for (int d = 0; d < 192; ++d) v(d) = float(gaussian_sample(eng, 1, 0.0, 1.0)[0]);
        a.push_back(v);
        b.push_back((v.array() + 10.0f).matrix());
    }
    const PopulationComparison cmp = compare_populations(a, b, CompareOptions{});
    CHECK(cmp.hmp < 1e-6);
    for (const auto& r : cmp.per_dim) CHECK(r.u_statistic == 0.0);
}

TEST_CASE("population comparison validates shapes and subsamples to the cap") {
    std::vector<VectorF> a{VectorF::Zero(10)}, b{VectorF::Zero(12)};
    CHECK_THROWS_AS(compare_populations(a, b, CompareOptions{}), Error);
    CHECK_THROWS_AS(compare_populations({}, b, CompareOptions{}), Error);

    // cap smaller than the pools: equal subsample sizes drive U's range
    std::mt19937 eng(41);
    std::vector<VectorF> big_a, big_b;
    for (int i = 0; i < 30; ++i) {
        VectorF va(3), vb(3);
        for (int d = 0; d < 3; ++d) {
            va(d) = float(gaussian_sample(eng, 1, 0.0, 1.0)[0]);
            vb(d) = float(gaussian_sample(eng, 1, 5.0, 1.0)[0]);
        }
        big_a.push_back(va);
        big_b.push_back(vb);
    }
    CompareOptions opt;
    opt.subsample_cap = 8;
    const PopulationComparison cmp = compare_populations(big_a, big_b, opt);
    for (const auto& r : cmp.per_dim) {
        CHECK(r.u_statistic >= 0.0);
        CHECK(r.u_statistic <= 64.0);  // 8*8
    }

    // deterministic given the seed
    const PopulationComparison again = compare_populations(big_a, big_b, opt);
    CHECK(again.hmp == cmp.hmp);
    for (size_t i = 0; i < cmp.per_dim.size(); ++i)
        CHECK(again.per_dim[i].u_statistic == cmp.per_dim[i].u_statistic);
}

TEST_CASE("comparison CSV carries one row per dimension plus the footer") {
    std::vector<VectorF> a, b;
    std::mt19937 eng(43);
    for (int i = 0; i < 12; ++i) {
        VectorF va(4), vb(4);
        for (int d = 0; d < 4; ++d) {
            va(d) = float(gaussian_sample(eng, 1, 0.0, 1.0)[0]);
            vb(d) = float(gaussian_sample(eng, 1, 1.0, 1.0)[0]);
        }
        a.push_back(va);
        b.push_back(vb);
    }
    const PopulationComparison cmp = compare_populations(a, b, CompareOptions{});

    const auto dir = std::filesystem::temp_directory_path() / "rvk_test_stats";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "cmp.csv").string();
    write_comparison_csv(path, cmp);

    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "dimension,u,p,neg_log10_p");
    std::vector<std::string> rows;
    while (std::getline(in, line))
        if (!line.empty()) rows.push_back(line);
    REQUIRE(rows.size() == 5);  // 4 dims + hmp footer
    CHECK(rows.back().rfind("hmp,", 0) == 0);
}
