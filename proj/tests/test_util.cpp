#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "ortholap/format.hpp"

using namespace ortholap;
using ortholap::testing::thrown_code;

TEST_CASE("17-digit formatting round-trips doubles exactly") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 3.141592653589793, 0.0}) {
        const std::string s = fmt_g17(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
    CHECK(fmt_g17(1.0) == "1");
    CHECK(fmt_g12(0.125) == "0.125");
}

TEST_CASE("FNV-1a hash matches the published reference values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64_hex("") == "cbf29ce484222325");
}

TEST_CASE("pairwise summation is exact on small integers and stable on long runs") {
    CHECK(pairwise_sum({1.0, 2.0, 3.0, 4.0, 5.0}) == 15.0);
    CHECK(pairwise_sum({}) == 0.0);
    CHECK(pairwise_sum({7.5}) == 7.5);

    std::vector<double> many(100000, 0.1);
    const double s = pairwise_sum(many);
    CHECK(s == doctest::Approx(10000.0).epsilon(1e-12));
}

TEST_CASE("text file helpers create parents and report missing files") {
    const std::string path = "util_test_dir/nested/file.txt";
    write_text_file(path, "hello\n");
    CHECK(read_text_file(path) == "hello\n");
    CHECK(thrown_code([] { read_text_file("no/such/file.txt"); }) == "IoError");
    std::remove(path.c_str());
}

TEST_CASE("errors carry a stable machine-readable code") {
    try {
        fail("NotAPath", "walk start equals target");
    } catch (const Error& e) {
        CHECK(e.code() == "NotAPath");
        CHECK(std::string(e.what()) == "NotAPath: walk start equals target");
    }
}
