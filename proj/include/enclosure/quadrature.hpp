#pragma once

#include <functional>
#include <vector>

namespace enclosure {

/// 1-D quadrature rule: nodes and weights on a given interval.
struct Rule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre rule with n points on [-1, 1]. Nodes via Newton iteration
/// on the Legendre recurrence; cached per n.
const Rule1D& gauss_legendre(int n);

/// Gauss-Legendre rule mapped to [a, b].
Rule1D gauss_legendre_on(int n, double a, double b);

/// Composite Gauss-Legendre over [a, b] split into `panels` equal panels.
Rule1D composite_gauss_legendre(int n_per_panel, double a, double b, int panels);

/// Integrate f over [a, b] with breakpoints inserted at the interior points of
/// `breaks` that fall inside (a, b). Each smooth piece is integrated with a
/// composite Gauss-Legendre rule whose panel count doubles until two successive
/// refinements agree to abs_tol (or max_level is hit).
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          const std::vector<double>& breaks, double abs_tol,
                          int n_per_panel = 16, int max_level = 8);

}  // namespace enclosure
