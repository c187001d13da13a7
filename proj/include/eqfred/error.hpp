#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eqfred {

/// Failure categories shared by every module.
enum class Errc {
    invalid_input,
    numeric_indeterminate,
    internal_inconsistency,
    model_inconsistency,
};

inline std::string_view to_string(Errc c) {
    switch (c) {
    case Errc::invalid_input:
        return "invalid-input";
    case Errc::numeric_indeterminate:
        return "numeric-indeterminate";
    case Errc::internal_inconsistency:
        return "internal-inconsistency";
    case Errc::model_inconsistency:
        return "model-inconsistency";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string &what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what),
          code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string &what) {
    throw Error(code, what);
}

inline void require(bool cond, const std::string &what) {
    if (!cond)
        fail(Errc::invalid_input, what);
}

} // namespace eqfred
