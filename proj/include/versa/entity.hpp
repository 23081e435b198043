#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace versa {

/// Video frame number. Frames are discrete and non-negative in CVML input.
using FrameNum = std::int64_t;

/// Opaque entity identifier. CVML supplies numeric ids; static entities use
/// symbolic names such as "storefront". Numeric ids order by value and sort
/// before symbolic ones, which order lexicographically.
class EntityId {
public:
    EntityId() = default;
    explicit EntityId(std::string name);
    explicit EntityId(std::int64_t value);

    const std::string& str() const noexcept { return name_; }
    bool is_numeric() const noexcept { return numeric_; }
    std::optional<std::int64_t> number() const;
    bool empty() const noexcept { return name_.empty(); }

    friend bool operator==(const EntityId& a, const EntityId& b) noexcept { return a.name_ == b.name_; }
    friend std::strong_ordering operator<=>(const EntityId& a, const EntityId& b) noexcept;

private:
    std::string name_;
    bool numeric_ = false;
    std::int64_t value_ = 0;
};

std::ostream& operator<<(std::ostream& os, const EntityId& id);

enum class EntityType { person, object, static_region };

std::string_view to_string(EntityType type);
/// Accepts "person", "object" and "static". Throws versa::Error otherwise.
EntityType parse_entity_type(std::string_view text);

}  // namespace versa

template <>
struct std::hash<versa::EntityId> {
    std::size_t operator()(const versa::EntityId& id) const noexcept {
        return std::hash<std::string>{}(id.str());
    }
};
