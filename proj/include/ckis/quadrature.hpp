#pragma once

#include <functional>

namespace ckis {

/// Adaptive Simpson quadrature to absolute tolerance `tol` on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-10, int max_depth = 48);

/// Reference integral for the direct-sampling problem:
/// I = int_{-10}^{12} 2 sin(pi/(1.5 x)) N(x; 1, 1) dx. The integrand
/// oscillates with vanishing period toward x = 0; the zeros sit at
/// x = 2/(3m), so the oscillatory part is summed bump by bump with fixed
/// Gauss-Legendre panels and the remainder near 0 is bounded analytically.
/// Relative error is below 1e-8.
double direct_reference_integral();

}  // namespace ckis
