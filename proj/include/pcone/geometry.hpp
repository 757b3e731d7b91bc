#pragma once

#include <string>
#include <vector>

namespace pcone {

struct CapDomain {
    int sphere_dim = 2;
    double half_angle = 1.5707963267948966;

    CapDomain() = default;
    CapDomain(int d, double alpha);
    int ambient_dim() const { return sphere_dim + 1; }
};

struct SectorDomain {
    double opening = 3.141592653589793;

    SectorDomain() = default;
    explicit SectorDomain(double A);
};

enum class Branch { Singular, Regular };

const char* to_string(Branch b);
Branch parse_branch(const std::string& s);

double boundary_distance(const CapDomain& dom, double theta);
double metric_weight(const CapDomain& dom, double theta);

// Discrete profile with omega normalised to 1 at the centre node.
struct Profile {
    std::vector<double> theta;
    std::vector<double> omega;
    std::vector<double> domega;
    double center_value = 1.0;

    std::size_t size() const { return theta.size(); }
};

}  // namespace pcone
