#include "versa/entity.hpp"

#include "versa/error.hpp"

#include <charconv>

namespace versa {

namespace {

bool parse_integer(std::string_view text, std::int64_t& out) {
    if (text.empty()) return false;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

}  // namespace

EntityId::EntityId(std::string name) : name_(std::move(name)) {
    numeric_ = parse_integer(name_, value_);
}

EntityId::EntityId(std::int64_t value)
    : name_(std::to_string(value)), numeric_(true), value_(value) {}

std::optional<std::int64_t> EntityId::number() const {
    if (!numeric_) return std::nullopt;
    return value_;
}

std::strong_ordering operator<=>(const EntityId& a, const EntityId& b) noexcept {
    if (a.numeric_ && b.numeric_) {
        if (auto c = a.value_ <=> b.value_; c != 0) return c;
        return a.name_ <=> b.name_;
    }
    if (a.numeric_ != b.numeric_) return a.numeric_ ? std::strong_ordering::less : std::strong_ordering::greater;
    return a.name_ <=> b.name_;
}

std::ostream& operator<<(std::ostream& os, const EntityId& id) { return os << id.str(); }

std::string_view to_string(EntityType type) {
    switch (type) {
        case EntityType::person: return "person";
        case EntityType::object: return "object";
        case EntityType::static_region: return "static";
    }
    return "object";
}

EntityType parse_entity_type(std::string_view text) {
    if (text == "person") return EntityType::person;
    if (text == "object") return EntityType::object;
    if (text == "static") return EntityType::static_region;
    throw Error(ErrorCode::invalid_argument, "unknown entity type '" + std::string(text) + "'");
}

}  // namespace versa
