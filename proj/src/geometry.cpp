#include "pcone/geometry.hpp"

#include <cmath>
#include <numbers>

#include "pcone/errors.hpp"

namespace pcone {

CapDomain::CapDomain(int d, double alpha) : sphere_dim(d), half_angle(alpha) {
    if (d < 1) throw DomainError("sphere dimension must be >= 1, got " + std::to_string(d));
    if (!(alpha > 0.0 && alpha < std::numbers::pi))
        throw DomainError("cap half-angle must lie in (0, pi), got " + std::to_string(alpha));
}

SectorDomain::SectorDomain(double A) : opening(A) {
    if (!(A > 0.0 && A < 2.0 * std::numbers::pi))
        throw DomainError("sector opening must lie in (0, 2pi), got " + std::to_string(A));
}

const char* to_string(Branch b) { return b == Branch::Singular ? "singular" : "regular"; }

Branch parse_branch(const std::string& s) {
    if (s == "singular" || s == "Singular") return Branch::Singular;
    if (s == "regular" || s == "Regular") return Branch::Regular;
    throw DomainError("unknown branch '" + s + "' (expected singular|regular)");
}

static void check_theta(const CapDomain& dom, double theta) {
    if (!(theta >= 0.0 && theta <= dom.half_angle))
        throw DomainError("theta=" + std::to_string(theta) + " outside [0, " +
                          std::to_string(dom.half_angle) + "]");
}

double boundary_distance(const CapDomain& dom, double theta) {
    check_theta(dom, theta);
    return dom.half_angle - theta;
}

double metric_weight(const CapDomain& dom, double theta) {
    check_theta(dom, theta);
    if (dom.sphere_dim == 1) return 1.0;
    return std::pow(std::sin(theta), dom.sphere_dim - 1);
}

}  // namespace pcone
