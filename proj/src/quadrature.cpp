#include "enclosure/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "enclosure/vec3.hpp"

#include <ostream>

namespace enclosure {

std::ostream& operator<<(std::ostream& os, const Vec3& v) {
    return os << "(" << v.x << ", " << v.y << ", " << v.z << ")";
}

namespace {

Rule1D make_gauss_legendre(int n) {
    Rule1D rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev-based initial guess, then Newton on P_n.
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double z_prev, pp;
        do {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            z_prev = z;
            z = z_prev - p1 / pp;
        } while (std::fabs(z - z_prev) > 1e-15);
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        rule.weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    return rule;
}

}  // namespace

const Rule1D& gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    static std::map<int, Rule1D> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre(n)).first;
    return it->second;
}

Rule1D gauss_legendre_on(int n, double a, double b) {
    const Rule1D& base = gauss_legendre(n);
    Rule1D rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = mid + half * base.nodes[i];
        rule.weights[i] = half * base.weights[i];
    }
    return rule;
}

Rule1D composite_gauss_legendre(int n_per_panel, double a, double b, int panels) {
    Rule1D rule;
    rule.nodes.reserve(static_cast<size_t>(n_per_panel) * panels);
    rule.weights.reserve(static_cast<size_t>(n_per_panel) * panels);
    const double len = (b - a) / panels;
    for (int k = 0; k < panels; ++k) {
        Rule1D piece = gauss_legendre_on(n_per_panel, a + k * len, a + (k + 1) * len);
        rule.nodes.insert(rule.nodes.end(), piece.nodes.begin(), piece.nodes.end());
        rule.weights.insert(rule.weights.end(), piece.weights.begin(), piece.weights.end());
    }
    return rule;
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          const std::vector<double>& breaks, double abs_tol, int n_per_panel,
                          int max_level) {
    if (!(b > a)) return 0.0;
    std::vector<double> pts;
    pts.push_back(a);
    for (double t : breaks) {
        if (t > a && t < b) pts.push_back(t);
    }
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());

    auto piece_integral = [&](double lo, double hi, int panels) {
        Rule1D rule = composite_gauss_legendre(n_per_panel, lo, hi, panels);
        double sum = 0.0;
        for (size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(rule.nodes[i]);
        return sum;
    };

    double total = 0.0;
    for (size_t s = 0; s + 1 < pts.size(); ++s) {
        const double lo = pts[s], hi = pts[s + 1];
        if (hi - lo < 1e-15 * (std::fabs(lo) + std::fabs(hi) + 1.0)) continue;
        int panels = 1;
        double coarse = piece_integral(lo, hi, panels);
        for (int level = 0; level < max_level; ++level) {
            panels *= 2;
            const double fine = piece_integral(lo, hi, panels);
            const double diff = std::fabs(fine - coarse);
            coarse = fine;
            if (diff <= abs_tol) break;
        }
        total += coarse;
    }
    return total;
}

}  // namespace enclosure
