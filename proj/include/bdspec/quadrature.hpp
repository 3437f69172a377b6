#pragma once
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

namespace bdspec::quad {

// Gauss-Legendre nodes and weights on [a, b].
template <unsigned N>
void gauss_rule(double a, double b, std::vector<double>& x, std::vector<double>& w)
{
    using G = boost::math::quadrature::gauss<double, N>;
    const auto& xa = G::abscissa();
    const auto& wa = G::weights();
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (std::size_t i = 0; i < xa.size(); ++i) {
        x.push_back(c + h * xa[i]);
        w.push_back(h * wa[i]);
        if (xa[i] != 0.0) {
            x.push_back(c - h * xa[i]);
            w.push_back(h * wa[i]);
        }
    }
}

// running log(sum exp(l_i))
struct LogSum {
    double m = -std::numeric_limits<double>::infinity();
    double s = 0.0;
    void add(double l)
    {
        if (!std::isfinite(l)) return;
        if (l > m) {
            s = s * std::exp(m - l) + 1.0;
            m = l;
        } else {
            s += std::exp(l - m);
        }
    }
    double log() const { return m + std::log(s); }
};

}  // namespace bdspec::quad
