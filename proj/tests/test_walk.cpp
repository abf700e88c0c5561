#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "ortholap/map.hpp"
#include "ortholap/network.hpp"
#include "ortholap/walk.hpp"

using namespace ortholap;
using ortholap::testing::thrown_code;

TEST_CASE("SplitMix64 matches reference outputs computed independently") {
    // Frozen from a separate reference implementation of the algorithm.
    SplitMix64 r0(0);
    CHECK(r0.next() == 0xe220a8397b1dcdafULL);
    CHECK(r0.next() == 0x6e789e6aa1b965f4ULL);
    CHECK(r0.next() == 0x06c45d188009454fULL);
    CHECK(r0.next() == 0xf88bb8a8724c81ecULL);

    SplitMix64 r42(42);
    CHECK(r42.next() == 0xbdd732262feb6e95ULL);
    CHECK(r42.next() == 0x28efe333b266f103ULL);
    CHECK(r42.next() == 0x47526757130f9f52ULL);

    SplitMix64 rbig(0x123456789abcdef0ULL);
    CHECK(rbig.next() == 0x161922c645ce50e8ULL);
    CHECK(rbig.next() == 0xad760cafa1697b60ULL);

    SplitMix64 u42(42);
    CHECK(u42.uniform() == 0.7415648787718233);
    CHECK(u42.uniform() == 0.1599103928769201);
    CHECK(u42.uniform() == 0.27860113025513866);
}

TEST_CASE("uniforms stay in [0,1) and per-trial seeds are distinct") {
    SplitMix64 rng(7);
    for (int k = 0; k < 1000; ++k) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    CHECK(trial_seed(5, 0) != trial_seed(5, 1));
    CHECK(trial_seed(5, 0) != trial_seed(6, 0));
    CHECK(trial_seed(5, 123) == trial_seed(5, 123));
}

TEST_CASE("step distribution is conductance over total conductance") {
    const OrthodiagonalMap m = generate_square(DomainDescriptor::disk({0, 0}, 1.0), 0.25);
    const WeightedNetwork net = build_network(m, Side::Primal);
    const WalkEngine eng(net);
    for (int x : net.interior) {
        const auto dist = eng.step_distribution(x);
        CHECK(dist.size() == 4);
        double total = 0.0;
        for (const auto& [y, p] : dist) {
            CHECK(p == doctest::Approx(0.25).epsilon(1e-12));
            total += p;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        if (x == net.interior[0]) break;  // one interior vertex is representative
    }
}

TEST_CASE("one-step absorption splits harmonic measure evenly over four neighbors") {
    // The unit-square mesh at eps=0.8 has exactly one interior primal vertex
    // whose four neighbors are all absorbing.
    const OrthodiagonalMap m =
        generate_square(DomainDescriptor::rect({0, 0}, {1, 1}), 0.8);
    const WeightedNetwork net = build_network(m, Side::Primal);
    const WalkEngine eng(net);
    const int start = net.interior[0];

    WalkConfig cfg;
    cfg.seed = 2024;
    cfg.trials = 10000;
    for (const auto& [y, p] : eng.step_distribution(start)) {
        std::vector<char> target(static_cast<size_t>(net.size()), 0);
        target[static_cast<size_t>(y)] = 1;
        const EstimateWithError est = harmonic_measure(eng, start, target, cfg);
        CHECK(est.n == cfg.trials);
        CHECK(est.caps == 0);
        CHECK(std::abs(est.mean - 0.25) <= 0.02);
        CHECK(est.std_err == doctest::Approx(std::sqrt(est.mean * (1 - est.mean) / 10000.0))
                                 .epsilon(1e-6));
    }

    // Starting on an absorbing vertex returns its payoff with no spread.
    const EstimateWithError onb = walk_estimate(
        eng, net.boundary[0], [](int) { return 3.5; }, cfg);
    CHECK(onb.mean == 3.5);
    CHECK(onb.std_err == 0.0);
}

TEST_CASE("absorbed-payoff estimates agree with the harmonic value at the start") {
    const OrthodiagonalMap m = generate_square(DomainDescriptor::disk({0, 0}, 1.0), 0.25);
    const WeightedNetwork net = build_network(m, Side::Primal);
    const WalkEngine eng(net);
    auto g = [](Vec2 p) { return p.x * p.x - p.y * p.y; };

    const int start_id = nearest_primal_vertex(m, {0.25, 0.125});
    const int start = net.net_index[static_cast<size_t>(start_id)];
    const double exact = g(m.pos(start_id));  // x^2 - y^2 is exactly discrete harmonic

    WalkConfig cfg;
    cfg.seed = 99;
    cfg.trials = 20000;
    const EstimateWithError est = walk_estimate(
        eng, start,
        [&](int v) { return g(net.positions[static_cast<size_t>(v)]); }, cfg);
    CHECK(est.caps == 0);
    CHECK(std::abs(est.mean - exact) <= 5.0 * est.std_err);

    // Determinism: the identical configuration reproduces identical numbers.
    const EstimateWithError again = walk_estimate(
        eng, start,
        [&](int v) { return g(net.positions[static_cast<size_t>(v)]); }, cfg);
    CHECK(again.mean == est.mean);
    CHECK(again.std_err == est.std_err);
}

TEST_CASE("escape-distance tail: exact nesting, positive exponent, starving radii throw") {
    const double eps = 1.0 / 16.0;
    const double a = eps / 2.0;
    OrthodiagonalMap m = generate_square(DomainDescriptor::disk({0, 0}, 1.0), eps);
    // Absorbing slit along [(0.5,0),(1,0)].
    const Vec2 tip{0.5, 0.0};
    std::vector<int> slit;
    for (const Vertex& v : m.vertices)
        if (v.kind == VertexKind::Primal &&
            dist_point_segment(v.pos, tip, {1.0, 0.0}) <= 0.5 * a)
            slit.push_back(v.id);
    CHECK(slit.size() >= 15);
    m = with_absorbing_vertices(m, slit);

    const WeightedNetwork net = build_network(m, Side::Primal);
    const WalkEngine eng(net);
    const int start_id = nearest_primal_vertex(m, {0.5 - 2.0 * a, 0.0});
    const int start = net.net_index[static_cast<size_t>(start_id)];

    WalkConfig cfg;
    cfg.seed = 31337;
    cfg.trials = 5000;
    const std::vector<double> radii{0.08, 0.11, 0.16, 0.22};
    const BeurlingResult res = beurling_probe(eng, start, tip, radii, cfg);

    // Common walks make the tail exactly monotone.
    for (size_t k = 1; k < res.all_radii.size(); ++k)
        CHECK(res.exceedances[k] <= res.exceedances[k - 1]);
    CHECK(res.fit_radii.size() >= 3);
    for (size_t k = 1; k < res.estimates.size(); ++k)
        CHECK(res.estimates[k].mean <= res.estimates[k - 1].mean);
    CHECK(res.beta_hat > 0.1);
    CHECK(res.beta_hat < 1.2);
    CHECK(res.beta_se >= 0.0);

    // No walk can get further than 1.5 from the tip inside the unit disk.
    CHECK(thrown_code([&] {
              beurling_probe(eng, start, tip, {1.6, 1.7, 1.8}, cfg);
          }) == "InsufficientExceedances");
    CHECK(thrown_code([&] {
              beurling_probe(eng, start, tip, {0.2, 0.1, 0.3}, cfg);
          }) == "SpacingNonMonotone");
}

TEST_CASE("exit quadrants from a centered ball are balanced to within noise") {
    const OrthodiagonalMap m = generate_square(DomainDescriptor::disk({0, 0}, 1.0), 0.125);
    const WeightedNetwork net = build_network(m, Side::Primal);
    const WalkEngine eng(net);
    const int center = nearest_primal_vertex(m, {0.0, 0.0});

    WalkConfig cfg;
    cfg.seed = 7;
    cfg.trials = 20000;
    const QuadrantExitResult res = property_s_probe(m, eng, center, 0.5, cfg);
    CHECK(res.counts[0] + res.counts[1] + res.counts[2] + res.counts[3] == cfg.trials);
    for (double p : res.probs) CHECK(std::abs(p - 0.25) <= 0.02);
    CHECK(res.std_err == doctest::Approx(std::sqrt(0.25 * 0.75 / 20000.0)).epsilon(1e-12));

    CHECK(thrown_code([&] {
              property_s_probe(m, eng, nearest_primal_vertex(m, {0.8, 0.0}), 0.5, cfg);
          }) == "BallNotContained");
    CHECK(thrown_code([&] { property_s_probe(m, eng, center, 0.3, cfg); }) ==
          "MeshTooCoarse");
}

TEST_CASE("annulus crossing: certain without a barrier, impossible through a closed one") {
    const OrthodiagonalMap m = generate_square(DomainDescriptor::disk({0, 0}, 1.0), 0.125);
    const WeightedNetwork net = build_network(m, Side::Primal);
    const WalkEngine eng(net);
    const int center_id = nearest_primal_vertex(m, {0.0, 0.0});
    const int start = net.net_index[static_cast<size_t>(center_id)];

    WalkConfig cfg;
    cfg.seed = 11;
    cfg.trials = 2000;

    // Every path from the center reaches radius 0.5 before the absorbing rim.
    const EstimateWithError open = annulus_crossing_probe(eng, start, {0, 0}, 0.5, cfg);
    CHECK(open.mean == 1.0);
    CHECK(open.std_err == 0.0);

    // A full absorbing ring between start and the target radius blocks all paths.
    std::vector<int> ring;
    for (const Vertex& v : m.vertices)
        if (v.kind == VertexKind::Primal && v.pos.norm() > 0.4 && v.pos.norm() < 0.5)
            ring.push_back(v.id);
    const OrthodiagonalMap blocked = with_absorbing_vertices(m, ring);
    const WeightedNetwork net2 = build_network(blocked, Side::Primal);
    const WalkEngine eng2(net2);
    const EstimateWithError shut = annulus_crossing_probe(eng2, start, {0, 0}, 0.6, cfg);
    CHECK(shut.mean == 0.0);

    // An unreachable radius with a tiny step cap reports runaway walks.
    WalkConfig tiny = cfg;
    tiny.max_steps = 5;
    CHECK(thrown_code([&] {
              annulus_crossing_probe(eng, start, {0, 0}, 0.9, tiny);
          }) == "ExcessiveCaps");
}
