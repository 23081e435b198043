#include "versa/error.hpp"

namespace versa {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return "invalid_argument";
        case ErrorCode::unknown_entity: return "unknown_entity";
        case ErrorCode::unknown_relation: return "unknown_relation";
        case ErrorCode::duplicate: return "duplicate";
        case ErrorCode::not_processed: return "not_processed";
        case ErrorCode::stale_cache: return "stale_cache";
        case ErrorCode::parse_error: return "parse_error";
        case ErrorCode::template_error: return "template_error";
        case ErrorCode::io_error: return "io_error";
    }
    return "unknown";
}

}  // namespace versa
