#include "ssrf/errors.hpp"

#include <sstream>

namespace ssrf {

namespace {

std::string pairs_message(double bandwidth, std::size_t pairs, std::size_t required) {
    std::ostringstream os;
    os << "insufficient pairs within kernel support at bandwidth h = " << bandwidth << " ("
       << pairs << " found, " << required << " required)";
    return os.str();
}

}  // namespace

InsufficientPairsError::InsufficientPairsError(double bandwidth, std::size_t pairs,
                                               std::size_t required)
    : Error(pairs_message(bandwidth, pairs, required)), bandwidth_(bandwidth), pairs_(pairs) {}

PermissibilityError::PermissibilityError(const std::string& what, double violation)
    : Error(what), violation_(violation) {}

NumericError::NumericError(const std::string& what, double achieved, long index)
    : Error(what), achieved_(achieved), index_(index) {}

}  // namespace ssrf
