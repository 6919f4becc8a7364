#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tact/errors.hpp"
#include "tact/spectral.hpp"

using namespace tact;

namespace {

// independent oracle for one analysis step: half-sample symmetric
// extension, a[i] = sum_m h[m] x[sym(2i+1-m)]
int sym_fold(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * n;
    i = ((i % period) + period) % period;
    return i < n ? i : period - 1 - i;
}

void step_oracle(const Eigen::VectorXd& x, const WaveletFilter& f, Eigen::VectorXd& a,
                 Eigen::VectorXd& d) {
    const int n = static_cast<int>(x.size());
    const int F = f.length();
    const int out = (n + F - 1) / 2;
    a.resize(out);
    d.resize(out);
    for (int i = 0; i < out; ++i) {
        double sa = 0.0, sd = 0.0;
        for (int m = 0; m < F; ++m) {
            const double v = x(sym_fold(2 * i + 1 - m, n));
            sa += f.dec_lo(m) * v;
            sd += f.dec_hi(m) * v;
        }
        a(i) = sa;
        d(i) = sd;
    }
}

Eigen::VectorXd noisy(int n, unsigned seed = 1) {
    Eigen::VectorXd x(n);
    unsigned s = seed;
    for (int i = 0; i < n; ++i) {
        s = s * 1664525u + 1013904223u;
        x(i) = static_cast<double>(s >> 8) / static_cast<double>(1u << 24) - 0.5;
    }
    return x;
}

}  // namespace

TEST_CASE("filter banks satisfy the quadrature-mirror relations") {
    for (const std::string name : {"haar", "db2", "db4"}) {
        const auto f = WaveletFilter::by_name(name);
        const int F = f.length();
        CHECK(std::abs(f.dec_lo.sum() - std::numbers::sqrt2) < 1e-12);
        CHECK(std::abs(f.dec_hi.sum()) < 1e-12);
        CHECK(std::abs(f.dec_lo.squaredNorm() - 1.0) < 1e-12);
        for (int k = 0; k < F; ++k) {
            CHECK(f.rec_lo(k) == doctest::Approx(f.dec_lo(F - 1 - k)));
            CHECK(f.rec_hi(k) == doctest::Approx(f.dec_hi(F - 1 - k)));
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            CHECK(f.dec_hi(k) == doctest::Approx(sign * f.rec_lo(k)));
        }
    }
    CHECK(WaveletFilter::by_name("db1").length() == 2);  // alias of haar
    CHECK(WaveletFilter::by_name("db4").length() == 8);
    CHECK_THROWS_AS((void)WaveletFilter::by_name("sym9"), ConfigError);
}

TEST_CASE("analysis step matches the independent convolution oracle") {
    for (const std::string name : {"haar", "db2", "db4"}) {
        const auto f = WaveletFilter::by_name(name);
        for (int n : {8, 13, 100, 101}) {
            const Eigen::VectorXd x = noisy(n, 7 + n);
            Eigen::VectorXd a, d, oa, od;
            dwt_step(x, f, a, d);
            step_oracle(x, f, oa, od);
            REQUIRE(a.size() == oa.size());
            CHECK((a - oa).cwiseAbs().maxCoeff() < 1e-12);
            CHECK((d - od).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("one analysis/synthesis step is a perfect reconstruction") {
    for (const std::string name : {"haar", "db2", "db4"}) {
        const auto f = WaveletFilter::by_name(name);
        for (int n : {8, 9, 64, 101, 250}) {
            const Eigen::VectorXd x = noisy(n, 100 + n);
            Eigen::VectorXd a, d;
            dwt_step(x, f, a, d);
            const Eigen::VectorXd back = idwt_step(a, d, f, n);
            CHECK((back - x).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
}

TEST_CASE("multi-level cascade and coefficient lengths") {
    const auto f = WaveletFilter::by_name("db4");
    const Eigen::VectorXd x = noisy(100);
    const DwtCoeffs c = dwt_decompose(x, 4, f);
    REQUIRE(c.approx.size() == 4);
    REQUIRE(c.detail.size() == 4);
    int len = 100;
    for (int k = 0; k < 4; ++k) {
        len = (len + f.length() - 1) / 2;
        CHECK(c.approx[k].size() == len);
        CHECK(c.detail[k].size() == len);
    }
    // level-1 coefficients agree with the single step
    Eigen::VectorXd a, d;
    dwt_step(x, f, a, d);
    CHECK((c.approx[0] - a).cwiseAbs().maxCoeff() == 0.0);
    CHECK((c.detail[0] - d).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("decompose rejects signals shorter than 2^levels") {
    const auto f = WaveletFilter::by_name("db4");
    CHECK_THROWS_AS((void)dwt_decompose(noisy(15), 4, f), ConfigError);
    CHECK_NOTHROW((void)dwt_decompose(noisy(16), 4, f));
}

TEST_CASE("sub-band reconstructions telescope and sum to the input") {
    for (const std::string name : {"haar", "db4"}) {
        for (int n : {64, 100, 255}) {
            const Eigen::VectorXd x = noisy(n, 3 * n);
            const SubbandSet s = dwt_subbands(x, 4, name);
            REQUIRE(s.approx.size() == 4);
            REQUIRE(s.detail.size() == 4);
            for (int k = 0; k < 4; ++k) CHECK(s.approx[k].size() == n);

            // A1 + D1 == x
            CHECK((s.approx[0] + s.detail[0] - x).cwiseAbs().maxCoeff() < 1e-9);
            // A_k == A_{k+1} + D_{k+1}
            for (int k = 0; k < 3; ++k)
                CHECK((s.approx[k] - s.approx[k + 1] - s.detail[k + 1])
                          .cwiseAbs()
                          .maxCoeff() < 1e-9);
        }
    }
}

TEST_CASE("sub-band extraction is linear") {
    const Eigen::VectorXd x = noisy(128, 5);
    const Eigen::VectorXd y = noisy(128, 6);
    const SubbandSet sx = dwt_subbands(x, 4, "db4");
    const SubbandSet sy = dwt_subbands(y, 4, "db4");
    const SubbandSet sz = dwt_subbands(2.0 * x - 3.0 * y, 4, "db4");
    for (int k = 0; k < 4; ++k) {
        CHECK((sz.detail[k] - 2.0 * sx.detail[k] + 3.0 * sy.detail[k]).cwiseAbs().maxCoeff() <
              1e-9);
    }
}

TEST_CASE("a constant signal lives entirely in the approximation") {
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(100, 4.2);
    const SubbandSet s = dwt_subbands(x, 4, "db4");
    for (int k = 0; k < 4; ++k) {
        CHECK(s.detail[k].cwiseAbs().maxCoeff() < 1e-10);
        CHECK((s.approx[k] - x).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("band accessor and names") {
    const auto names = SubbandSet::band_names(4);
    REQUIRE(names == std::vector<std::string>{"A1", "A2", "A3", "A4", "D1", "D2", "D3", "D4"});
    const SubbandSet s = dwt_subbands(noisy(64), 4, "db4");
    CHECK(&s.band("A3") == &s.approx[2]);
    CHECK(&s.band("D1") == &s.detail[0]);
    CHECK_THROWS_AS((void)s.band("D5"), ConfigError);
    CHECK_THROWS_AS((void)s.band("X1"), ConfigError);
}

TEST_CASE("magnitude spectrum of a pure tone peaks at its frequency") {
    const int n = 1000;
    const double fs = 2000.0;
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i)
        x(i) = 3.0 * std::sin(2.0 * std::numbers::pi * 250.0 * i / fs);
    const MagnitudeSpectrum s = magnitude_spectrum(x, fs);
    REQUIRE(s.mags.size() == n / 2 + 1);
    CHECK(s.resolution_hz == doctest::Approx(fs / n));
    Eigen::Index peak;
    s.mags.maxCoeff(&peak);
    CHECK(s.freqs_hz(peak) == doctest::Approx(250.0));
    // amplitude recovered by the doubled one-sided convention
    CHECK(s.mags(peak) / n == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("dc offset lands in the unscaled zero bin") {
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(100, 2.5);
    const MagnitudeSpectrum s = magnitude_spectrum(x, 2000.0);
    CHECK(s.mags(0) == doctest::Approx(250.0));  // n * mean, unscaled
    CHECK(s.mags.tail(s.mags.size() - 1).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("parseval energy balance under the one-sided scaling") {
    const int n = 256;
    const Eigen::VectorXd x = noisy(n, 9);
    const MagnitudeSpectrum s = magnitude_spectrum(x, 2000.0);
    // undo the interior doubling, then sum |X_k|^2 over the full circle
    double energy = s.mags(0) * s.mags(0) + s.mags(n / 2) * s.mags(n / 2);
    for (int k = 1; k < n / 2; ++k) {
        const double m = s.mags(k) / 2.0;
        energy += 2.0 * m * m;
    }
    CHECK(energy / n == doctest::Approx(x.squaredNorm()).epsilon(1e-9));
}
