#pragma once

#include <stdexcept>

#include <Eigen/Dense>

namespace vemrcp {

/// Plane-strain isotropic material given by its Lame constants.
struct LameMaterial {
    double lambda = 1.0;
    double mu = 1.0;

    bool is_valid() const { return mu > 0.0 && lambda + mu > 0.0; }
    double poisson_ratio() const { return lambda / (2.0 * (lambda + mu)); }
};

class MaterialError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Stress vectors are (sigma_x, sigma_y, tau_xy); strain vectors use the
/// engineering shear (eps_x, eps_y, gamma_xy).
using StressVector = Eigen::Vector3d;
using StrainVector = Eigen::Vector3d;

Eigen::Matrix3d elastic_matrix(const LameMaterial& material);
Eigen::Matrix3d compliance_matrix(const LameMaterial& material);

/// Equivalent stress including the out-of-plane component
/// sigma_z = nu (sigma_x + sigma_y) of plane strain.
double von_mises(const StressVector& stress, const LameMaterial& material);

}  // namespace vemrcp
