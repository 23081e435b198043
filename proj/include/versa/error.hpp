#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace versa {

enum class ErrorCode {
    invalid_argument,
    unknown_entity,
    unknown_relation,
    duplicate,
    not_processed,
    stale_cache,
    parse_error,
    template_error,
    io_error,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every failure raised by the engine. The code lets
/// front ends (CLI, HTTP) map failures to exit statuses and responses.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace versa
