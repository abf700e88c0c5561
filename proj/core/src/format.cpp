#include "ortholap/format.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ortholap/errors.hpp"

namespace ortholap {

namespace {
std::string fmt_g(double v, const char* spec) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}
}  // namespace

std::string fmt_g17(double v) { return fmt_g(v, "%.17g"); }
std::string fmt_g12(double v) { return fmt_g(v, "%.12g"); }

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

double pairwise_sum(std::vector<double> values) {
    if (values.empty()) return 0.0;
    size_t n = values.size();
    while (n > 1) {
        const size_t half = n / 2;
        for (size_t i = 0; i < half; ++i) values[i] = values[2 * i] + values[2 * i + 1];
        if (n % 2) {
            values[half] = values[n - 1];
            n = half + 1;
        } else {
            n = half;
        }
    }
    return values[0];
}

void write_text_file(const std::string& path, const std::string& content) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(parent, ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("IoError", "cannot open for writing: " + path);
    out << content;
    if (!out) fail("IoError", "write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("IoError", "cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace ortholap
