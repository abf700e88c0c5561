#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "ortholap/continuum.hpp"
#include "ortholap/errors.hpp"
#include "ortholap/walk.hpp"

using namespace ortholap;
using ortholap::testing::thrown_code;

namespace {

// Five-point finite-difference Laplacian, for harmonicity spot checks.
double fd_laplacian(const HarmonicOracle& o, Vec2 p, double h) {
    return (o.value({p.x + h, p.y}) + o.value({p.x - h, p.y}) + o.value({p.x, p.y + h}) +
            o.value({p.x, p.y - h}) - 4.0 * o.value(p)) /
           (h * h);
}

// Wraps a plain point function as boundary data with default norms.
HolderData data_from(std::function<double(Vec2)> g) {
    HolderData data;
    data.g = std::move(g);
    data.alpha = 1.0;
    return data;
}

}  // namespace

TEST_CASE("harmonic polynomial values match closed forms") {
    const Vec2 p{0.3, 0.4};
    CHECK(harmonic_polynomial(2, HarmonicPart::Real).value(p) == doctest::Approx(-0.07).epsilon(1e-14));
    CHECK(harmonic_polynomial(2, HarmonicPart::Imag).value(p) == doctest::Approx(0.24).epsilon(1e-14));
    const Vec2 q{0.5, 0.25};
    // x^3 - 3 x y^2 and 3 x^2 y - y^3.
    CHECK(harmonic_polynomial(3, HarmonicPart::Real).value(q) == doctest::Approx(0.03125).epsilon(1e-14));
    CHECK(harmonic_polynomial(3, HarmonicPart::Imag).value(q) ==
          doctest::Approx(3 * 0.25 * 0.25 - 0.015625).epsilon(1e-14));
    CHECK(harmonic_polynomial(0, HarmonicPart::Real).value({0.0, 0.0}) == 1.0);
    CHECK(harmonic_polynomial(0, HarmonicPart::Imag).value({0.7, -0.2}) == 0.0);
    CHECK(harmonic_polynomial(1, HarmonicPart::Real).value({0.7, -0.2}) == 0.7);
    CHECK(harmonic_polynomial(1, HarmonicPart::Imag).value({0.7, -0.2}) == -0.2);
    CHECK(harmonic_polynomial(3, HarmonicPart::Imag).value({1.0, 0.0}) == 0.0);
}

TEST_CASE("harmonic polynomial gradients agree with central differences") {
    const Vec2 p{0.37, -0.21};
    const double h = 1e-6;
    for (int k = 1; k <= 8; ++k) {
        for (HarmonicPart part : {HarmonicPart::Real, HarmonicPart::Imag}) {
            const HarmonicOracle o = harmonic_polynomial(k, part);
            const Vec2 g = o.gradient(p);
            const double gx_fd = (o.value({p.x + h, p.y}) - o.value({p.x - h, p.y})) / (2 * h);
            const double gy_fd = (o.value({p.x, p.y + h}) - o.value({p.x, p.y - h})) / (2 * h);
            CHECK(std::abs(g.x - gx_fd) <= 1e-6);
            CHECK(std::abs(g.y - gy_fd) <= 1e-6);
        }
    }
    CHECK(harmonic_polynomial(0, HarmonicPart::Real).gradient(p).norm() == 0.0);
}

TEST_CASE("harmonic polynomials are numerically harmonic at random points") {
    SplitMix64 rng(0xC0117u);
    for (int i = 0; i < 100; ++i) {
        // Random point with |z| <= 0.85 and a cycling degree/part choice.
        const double r = 0.85 * std::sqrt(rng.uniform());
        const double t = 2.0 * std::numbers::pi * rng.uniform();
        const Vec2 p{r * std::cos(t), r * std::sin(t)};
        const int k = i % 9;
        const HarmonicPart part = (i % 2 == 0) ? HarmonicPart::Real : HarmonicPart::Imag;
        const HarmonicOracle o = harmonic_polynomial(k, part);
        // Tolerance is relative to the local second-derivative scale.
        const double scale =
            std::max(1.0, static_cast<double>(k) * (k - 1) * std::pow(std::max(r, 0.1), k - 2));
        CHECK(std::abs(fd_laplacian(o, p, 1e-4)) <= 1e-6 * scale);
    }
    // Sanity on the detector itself: |z|^2 has Laplacian 4.
    HarmonicOracle fake;
    fake.value = [](Vec2 p) { return p.x * p.x + p.y * p.y; };
    CHECK(fd_laplacian(fake, {0.2, 0.1}, 1e-3) == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("harmonic polynomial derivative bounds and range checks") {
    const HarmonicOracle o = harmonic_polynomial(5, HarmonicPart::Real);
    CHECK(o.kind == OracleKind::Polynomial);
    CHECK(o.accuracy == 0.0);
    CHECK(o.sup_bound == 1.0);
    CHECK(o.grad_bound == 5.0);
    CHECK(o.hess_bound == 20.0);
    CHECK(o.third_bound == 60.0);
    CHECK(o.has_gradient());
    CHECK(harmonic_polynomial(0, HarmonicPart::Imag).sup_bound == 0.0);
    CHECK(thrown_code([] { harmonic_polynomial(9, HarmonicPart::Real); }) == "DegreeOutOfRange");
    CHECK(thrown_code([] { harmonic_polynomial(-1, HarmonicPart::Imag); }) == "DegreeOutOfRange");
}

TEST_CASE("Poisson integral has unit mass") {
    const HolderData one = data_from([](Vec2) { return 1.0; });
    for (Vec2 z : {Vec2{0.0, 0.0}, Vec2{0.5, 0.2}, Vec2{-0.937, -0.1}}) {
        CHECK(poisson_disk(one, z, 1e-12) == doctest::Approx(1.0).epsilon(1e-11));
    }
}

TEST_CASE("Poisson integral reproduces harmonic polynomials") {
    for (int k = 1; k <= 4; ++k) {
        const HarmonicOracle o = harmonic_polynomial(k, HarmonicPart::Real);
        const HolderData data = data_from(o.value);
        for (Vec2 z : {Vec2{0.3, 0.4}, Vec2{-0.62, 0.7}}) {
            CHECK(poisson_disk(data, z, 1e-10) == doctest::Approx(o.value(z)).epsilon(1e-9));
        }
    }
    // The harmonic extension of cos(theta) is Re z.
    const HolderData cosine = data_from([](Vec2 w) { return w.x; });
    CHECK(poisson_disk(cosine, {0.5, 0.0}, 1e-10) == doctest::Approx(0.5).epsilon(1e-9));
    // Close to the rim the kernel is a sharp spike; the peak-centered panels
    // must still deliver the tolerance.
    CHECK(poisson_disk(cosine, {0.999, 0.0}, 1e-10) == doctest::Approx(0.999).epsilon(1e-9));
    CHECK(poisson_disk(data_from([](Vec2 w) { return w.y; }), {0.0, -0.9999}, 1e-10) ==
          doctest::Approx(-0.9999).epsilon(1e-9));
}

TEST_CASE("Poisson integral stays inside the boundary range") {
    // Positive kernel of unit mass: values lie between min g and max g.
    const HolderData data = data_from([](Vec2 w) { return w.x * w.x - 0.3 * w.y; });
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i < 720; ++i) {
        const double t = 2.0 * std::numbers::pi * i / 720.0;
        const double v = data.g({std::cos(t), std::sin(t)});
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    for (Vec2 z : {Vec2{0.0, 0.0}, Vec2{0.6, -0.3}, Vec2{-0.9, 0.05}}) {
        const double u = poisson_disk(data, z, 1e-10);
        CHECK(u >= lo - 1e-9);
        CHECK(u <= hi + 1e-9);
    }
}

TEST_CASE("Poisson integral at the center equals the circle average") {
    const HolderData data = data_from([](Vec2 w) { return std::exp(w.x) * std::cos(0.7 * w.y); });
    const double tol = 1e-9;
    const double center = poisson_disk(data, {0.0, 0.0}, tol);
    // Independent midpoint rule over the circle.
    const int n = 4096;
    double avg = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * std::numbers::pi * (i + 0.5) / n;
        avg += data.g({std::cos(t), std::sin(t)});
    }
    avg /= n;
    CHECK(std::abs(center - avg) <= 2.0 * tol);
}

TEST_CASE("Poisson integral rejects bad inputs") {
    const HolderData one = data_from([](Vec2) { return 1.0; });
    CHECK(thrown_code([&] { poisson_disk(one, {1.0 - 1e-7, 0.0}, 1e-8); }) == "TooCloseToBoundary");
    CHECK(thrown_code([&] { poisson_disk(one, {1.5, 0.0}, 1e-8); }) == "TooCloseToBoundary");
    CHECK(thrown_code([&] { poisson_disk(one, {0.0, 0.0}, 0.0); }) == "DomainError");
    CHECK(thrown_code([&] { poisson_disk(HolderData{}, {0.0, 0.0}, 1e-8); }) == "DomainError");
    // Data with an unbounded spike can never meet the tolerance; refinement
    // must report failure rather than return a poisoned value.
    const HolderData spike = data_from(
        [](Vec2 w) { return 1.0 / std::sqrt(std::abs(std::atan2(w.y, w.x) - 0.5)); });
    CHECK(thrown_code([&] { poisson_disk(spike, {0.0, 0.0}, 1e-6); }) == "QuadratureFailure");
}

TEST_CASE("Poisson integral resolves bounded jumps in the data") {
    // Indicator of the arc (0.5, pi) as seen from the center: the exact value
    // is the normalized arc length.  Refinement bisects down to the jump and
    // settles it to near machine precision.
    const HolderData jump =
        data_from([](Vec2 w) { return std::atan2(w.y, w.x) > 0.5 ? 1.0 : 0.0; });
    const double expected = (std::numbers::pi - 0.5) / (2.0 * std::numbers::pi);
    CHECK(poisson_disk(jump, {0.0, 0.0}, 1e-12) == doctest::Approx(expected).epsilon(1e-11));
}

TEST_CASE("distance-power boundary data is Hoelder with its declared constant") {
    const HolderData g = holder_distance_data({1.0, 0.0}, 0.5);
    CHECK(g.g({1.0, 0.0}) == 0.0);
    CHECK(g.alpha == 0.5);
    CHECK(g.holder_norm == 1.0);
    CHECK(g.sup_norm == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    // Spot-check the Hoelder inequality on 1000 random circle pairs.
    SplitMix64 rng(0x601Du);
    for (int i = 0; i < 1000; ++i) {
        const double ti = 2.0 * std::numbers::pi * rng.uniform();
        const double tj = 2.0 * std::numbers::pi * rng.uniform();
        const Vec2 wi{std::cos(ti), std::sin(ti)};
        const Vec2 wj{std::cos(tj), std::sin(tj)};
        CHECK(std::abs(g.g(wi) - g.g(wj)) <=
              g.holder_norm * std::pow(dist(wi, wj), g.alpha) + 1e-15);
    }
    CHECK(thrown_code([] { holder_distance_data({1.0, 0.0}, 0.0); }) == "DomainError");
    CHECK(thrown_code([] { holder_distance_data({1.0, 0.0}, 1.5); }) == "DomainError");
    CHECK(thrown_code([] { holder_distance_data({1.0, 0.0}, -0.3); }) == "DomainError");
}

TEST_CASE("Hoelder extension matches independently computed reference values") {
    const HarmonicOracle u = holder_oracle(holder_distance_data({1.0, 0.0}, 0.5), 1e-10);
    CHECK(u.kind == OracleKind::PoissonQuadrature);
    CHECK(u.accuracy == 1e-10);
    // Reference values computed with 30-digit quadrature of the kernel
    // integral for data |w - (1,0)|^(1/2).
    CHECK(u.value({0.0, 0.0}) == doctest::Approx(1.0787052023767587).epsilon(1e-9));
    CHECK(u.value({0.3, 0.0}) == doctest::Approx(0.93370610174576115).epsilon(1e-9));
    CHECK(u.value({-0.3, 0.0}) == doctest::Approx(1.1969614278447008).epsilon(1e-9));
    CHECK(u.value({0.0, 0.3}) == doctest::Approx(1.0912625022600882).epsilon(1e-9));
    // The data is symmetric across the x-axis, so the extension must be too.
    CHECK(std::abs(u.value({0.0, 0.3}) - u.value({0.0, -0.3})) <= 1e-9);
    CHECK(std::abs(u.value({0.42, 0.17}) - u.value({0.42, -0.17})) <= 1e-9);
    CHECK(u.sup_bound == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK_FALSE(u.has_gradient());
}

TEST_CASE("escape tail bound matches frozen values in all three regimes") {
    CHECK(beurling_tail_bound(0.01, 1.0, 2.0, 0.3) == doctest::Approx(0.18839148236321851).epsilon(1e-14));
    CHECK(beurling_tail_bound(0.01, 1.0, 2.0, 0.5) == doctest::Approx(0.26491586832740183).epsilon(1e-14));
    CHECK(beurling_tail_bound(0.01, 1.0, 2.0, 0.7) == doctest::Approx(0.20102221212448113).epsilon(1e-14));
    // Hand-computed low and high regimes: (0.25/0.5)*0.01^0.25 and
    // (0.75/0.5)*1*sqrt(0.04).
    CHECK(beurling_tail_bound(0.01, 0.5, 1.0, 0.25) ==
          doctest::Approx(0.15811388300841897).epsilon(1e-13));
    CHECK(beurling_tail_bound(0.04, 0.5, 1.0, 0.75) == doctest::Approx(0.3).epsilon(1e-13));
    // At d = diam the logarithmic middle regime vanishes.
    CHECK(beurling_tail_bound(2.0, 2.0, 2.0, 0.5) == 0.0);
}

TEST_CASE("escape tail bound is increasing in the small-distance window") {
    const double diam = 2.0;
    for (double alpha : {0.3, 0.5, 0.7, 1.0}) {
        double prev = 0.0;
        for (int i = 0; i <= 40; ++i) {
            // Geometric grid over [1e-3, 1e-1] * diam.
            const double d = diam * 1e-3 * std::pow(100.0, i / 40.0);
            const double b = beurling_tail_bound(d, diam, diam, alpha);
            CHECK(b > prev);
            prev = b;
        }
    }
}

TEST_CASE("escape tail bound rejects out-of-range arguments") {
    CHECK(thrown_code([] { beurling_tail_bound(0.01, 0.5, 1.0, 0.0); }) == "DomainError");
    CHECK(thrown_code([] { beurling_tail_bound(0.01, 0.5, 1.0, 1.2); }) == "DomainError");
    CHECK(thrown_code([] { beurling_tail_bound(0.0, 0.5, 1.0, 0.5); }) == "BadOrdering");
    CHECK(thrown_code([] { beurling_tail_bound(0.6, 0.5, 1.0, 0.5); }) == "BadOrdering");
    CHECK(thrown_code([] { beurling_tail_bound(0.01, 2.0, 1.0, 0.5); }) == "BadOrdering");
    CHECK(thrown_code([] { beurling_tail_bound(0.01, 0.5, -1.0, 0.5); }) == "BadOrdering");
}

namespace {

SampledField disk_field(const HarmonicOracle& o, double sup, double lap) {
    SampledField f;
    f.h = o.value;
    f.sup_norm = sup;
    f.laplacian_bound = lap;
    f.boundary_distance = [](Vec2 p) { return 1.0 - p.norm(); };
    return f;
}

double disk_depth(Vec2 a, Vec2 b) {
    return std::min(1.0 - a.norm(), 1.0 - b.norm());
}

}  // namespace

TEST_CASE("interior difference bound holds for a harmonic sample") {
    const SampledField f = disk_field(harmonic_polynomial(3, HarmonicPart::Real), 1.0, 0.0);
    const std::vector<std::pair<Vec2, Vec2>> pairs{
        {{0.0, 0.0}, {0.3, 0.2}},
        {{0.2, 0.1}, {0.25, 0.0}},
        {{-0.5, 0.3}, {-0.45, 0.32}},
        {{0.9, 0.0}, {0.92, 0.01}},
    };
    for (const auto& [a, b] : pairs) {
        const double d = disk_depth(a, b);
        const HarnackCheck c = harnack_bound_check(f, a, b, d);
        CHECK(c.ok);
        CHECK(c.lhs <= c.rhs);
        CHECK(c.separation == doctest::Approx(dist(a, b)).epsilon(1e-15));
        CHECK(c.depth == d);
    }
}

TEST_CASE("interior difference bound reports violations honestly") {
    // Understating the sup norm makes the bound fail; the check must say so.
    const SampledField f = disk_field(harmonic_polynomial(3, HarmonicPart::Real), 1e-4, 0.0);
    const HarnackCheck c = harnack_bound_check(f, {0.5, 0.0}, {0.6, 0.0}, 0.4);
    CHECK_FALSE(c.ok);
    CHECK(c.lhs == doctest::Approx(0.091).epsilon(1e-12));
    CHECK(c.rhs == doctest::Approx(16.0 * 1e-4 * 0.1 / 0.4).epsilon(1e-12));
}

TEST_CASE("interior difference bound composes both budget terms") {
    SampledField f = disk_field(harmonic_polynomial(2, HarmonicPart::Real), 2.5, 3.0);
    const Vec2 a{0.1, 0.2};
    const Vec2 b{0.15, 0.18};
    const double d = 0.7;
    const HarnackCheck c = harnack_bound_check(f, a, b, d, 8.0);
    const double sep = dist(a, b);
    CHECK(c.rhs == doctest::Approx(8.0 * (2.5 * sep / d + 3.0 * d * sep)).epsilon(1e-15));
    CHECK(c.depth == d);
}

TEST_CASE("interior difference bound rejects ill-posed pairs") {
    const SampledField f = disk_field(harmonic_polynomial(2, HarmonicPart::Real), 1.0, 0.0);
    // A point closer to the boundary than the requested depth.
    CHECK(thrown_code([&] { harnack_bound_check(f, {0.9, 0.0}, {0.5, 0.0}, 0.2); }) ==
          "OutOfSampledRegion");
    CHECK(thrown_code([&] { harnack_bound_check(f, {0.5, 0.0}, {0.95, 0.0}, 0.2); }) ==
          "OutOfSampledRegion");
    // Base point outside the region entirely.
    CHECK(thrown_code([&] { harnack_bound_check(f, {1.2, 0.0}, {0.0, 0.0}, 0.1); }) ==
          "OutOfSampledRegion");
    CHECK(thrown_code([&] { harnack_bound_check(f, {0.1, 0.0}, {0.2, 0.0}, 0.0); }) ==
          "DomainError");
    CHECK(thrown_code([&] { harnack_bound_check(f, {0.1, 0.0}, {0.2, 0.0}, 0.5, 0.0); }) ==
          "DomainError");
    SampledField empty;
    CHECK(thrown_code([&] { harnack_bound_check(empty, {0.0, 0.0}, {0.1, 0.0}, 0.1); }) ==
          "DomainError");
}

TEST_CASE("smooth test functions expose correct derivative data") {
    const SmoothFunction q = quadratic_radial();
    CHECK(q.value({0.3, -0.4}) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(q.laplacian({0.9, 0.2}) == 4.0);
    CHECK(q.second_bound == 2.0);
    CHECK(q.third_bound == 0.0);

    const SmoothFunction h = smooth_from(harmonic_polynomial(3, HarmonicPart::Real));
    CHECK(h.laplacian({0.5, 0.5}) == 0.0);
    CHECK(h.second_bound == 6.0);
    CHECK(h.third_bound == 6.0);
    CHECK(h.value({0.5, 0.25}) == doctest::Approx(0.03125).epsilon(1e-14));
}
