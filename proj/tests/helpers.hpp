#pragma once

#include <functional>
#include <string>

#include "ortholap/errors.hpp"

namespace ortholap::testing {

// Runs fn and returns the Error code it throws ("" when nothing is thrown).
inline std::string thrown_code(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

}  // namespace ortholap::testing
