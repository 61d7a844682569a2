#include "lcq/errors.hpp"

namespace lcq {

DimensionMismatch::DimensionMismatch(const std::string& what, std::size_t expected,
                                     std::size_t got)
    : Error(what + ": expected dimension " + std::to_string(expected) + ", got " +
            std::to_string(got)) {}

}  // namespace lcq
