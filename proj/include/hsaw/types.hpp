#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hsaw {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

inline constexpr NodeId kInvalidNode = ~NodeId(0);

enum class ItemKind { Edge, Node };

inline const char* to_string(ItemKind k) {
    return k == ItemKind::Edge ? "edge" : "node";
}

// Malformed or inconsistent input data (files, weights, ids).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Failures at run time that are not the caller's data (attempt budget, caps).
struct SamplingError : std::runtime_error {
    explicit SamplingError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace hsaw
