#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace duokg {

/// Dense index with a tag so entity, relation and cluster ids cannot be mixed up.
template <class Tag>
struct Id {
    std::uint32_t value = 0;

    constexpr Id() = default;
    constexpr explicit Id(std::uint32_t v) : value(v) {}
    constexpr std::size_t index() const { return value; }
    constexpr auto operator<=>(const Id&) const = default;
};

using EntityId = Id<struct EntityTag>;
using RelationId = Id<struct RelationTag>;
using ClusterId = Id<struct ClusterTag>;

/// Malformed input file content; carries the offending line number when known.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class IoError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid configuration value or combination.
class ConfigError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// NaN/Inf produced or consumed, or a singular numeric problem.
class NumericError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class ShapeError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace duokg

template <class Tag>
struct std::hash<duokg::Id<Tag>> {
    std::size_t operator()(const duokg::Id<Tag>& id) const noexcept {
        return std::hash<std::uint32_t>{}(id.value);
    }
};
