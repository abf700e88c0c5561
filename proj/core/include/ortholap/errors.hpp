#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ortholap {

// All library failures are thrown as Error. `code()` carries a stable
// machine-readable condition name (e.g. "FormatError", "NonConvergence");
// tests and the CLI dispatch on it, while what() adds human context.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& detail)
        : std::runtime_error(code + ": " + detail), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& detail) {
    throw Error(code, detail);
}

inline void require(bool ok, const std::string& code, const std::string& detail) {
    if (!ok) fail(code, detail);
}

}  // namespace ortholap
