#pragma once

#include <cstddef>
#include <vector>

#include "grnbounds/bounds.hpp"
#include "grnbounds/model.hpp"
#include "grnbounds/pde.hpp"

namespace grnbounds {

/// E eta^i_t and E|eta^i_t - E eta^i_t| from the PDE route, with certified
/// bounds on the error of cutting the integrals down to Q_a.
struct MomentReport {
    std::vector<double> mean;
    std::vector<double> abs_dev;
    std::vector<double> trunc_err_mean;
    std::vector<double> trunc_err_absdev;
    double mass_deficit = 0.0;  ///< 1 - P(B_t in Q_a)
};

/// Gaussian-weighted trapezoid quadrature of the field over Q_a:
///   E eta^i_t    ~ int_{Q_a} theta^i(t, x) p_t(x) dx
///   E|eta^i_t - m_i| ~ int_{Q_a} |theta^i(t, x) - m_i| p_t(x) dx   (second pass)
/// where p_t is the N(0, t I) density, evaluated exactly at the nodes. In the
/// second pass the kink of |theta - m| at each sign change along a grid line is
/// subtracted off and integrated in closed form. The
/// result does not depend on `threads`. Error fields are left at zero; see
/// compute_moments for the certified version.
MomentReport gaussian_weight_integral(const ThetaField& field, double inner_half_width,
                                      unsigned threads = 1);

/// e^{rho_i (T-t)} J(t, a) (a c_i + c_i (n-1) sqrt(2t/pi) + b_i n + nu_i n (T-t)),
/// J(t, a) = sqrt(2t / (pi a^2)) e^{-a^2 / (2t)}.
double truncation_error_mean(const GeneNetwork& net, const GaussianFinalData& fd,
                             const TimeWindow& window, double inner_half_width, std::size_t gene);

/// Smallest a in {1, 1.5, 2, ...} with max_i truncation_error_mean <= tol.
double choose_inner_cube(const GeneNetwork& net, const GaussianFinalData& fd, const TimeWindow& window,
                         double tol);

/// 1 - (erf(a / sqrt(2t)))^n.
double gaussian_mass_deficit(double inner_half_width, double time, std::size_t dims);

/// Quadrature plus truncation certificates: trunc_err_absdev = 2 trunc_err_mean.
MomentReport compute_moments(const GeneNetwork& net, const GaussianFinalData& fd,
                             const TimeWindow& window, const ThetaField& field,
                             double inner_half_width, unsigned threads = 1);

}  // namespace grnbounds
