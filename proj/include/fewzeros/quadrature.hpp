#pragma once

// Globally adaptive Gauss-Kronrod quadrature: the 15-point rule comes from
// Boost, the panel refinement (always split the worst panel) lives here so
// the error budget is explicit.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

namespace fewzeros {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;  // estimated absolute error
    bool converged = false;
    std::size_t panels = 0;
};

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double achieved) : std::runtime_error(what), achieved_(achieved) {}
    double achieved() const { return achieved_; }

private:
    double achieved_;
};

/// Integrates f over [a, b] split first at `breaks` (sorted, inside (a, b)),
/// refining until the summed panel error estimate is at most abs_tol.
inline QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                           double abs_tol, std::vector<double> breaks = {},
                                           std::size_t max_panels = 20000) {
    using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;
    struct Panel {
        double lo, hi, value, error;
        bool operator<(const Panel& o) const { return error < o.error; }
    };
    auto eval = [&](double lo, double hi) {
        double err = 0.0;
        const double v = Rule::integrate(f, lo, hi, 0, 0.0, &err);
        return Panel{lo, hi, v, err};
    };
    std::priority_queue<Panel> heap;
    double prev = a;
    breaks.push_back(b);
    for (double x : breaks) {
        if (!(x > prev) || x > b) continue;
        heap.push(eval(prev, x));
        prev = x;
    }
    QuadratureResult out;
    auto totals = [&] {
        auto copy = heap;
        double v = 0.0, e = 0.0;
        while (!copy.empty()) {
            v += copy.top().value;
            e += copy.top().error;
            copy.pop();
        }
        return std::pair{v, e};
    };
    double total_err = 0.0;
    {
        auto [v, e] = totals();
        out.value = v;
        total_err = e;
    }
    while (total_err > abs_tol && heap.size() < max_panels) {
        const Panel worst = heap.top();
        heap.pop();
        const double m = 0.5 * (worst.lo + worst.hi);
        if (!(m > worst.lo && m < worst.hi)) {
            heap.push(worst);
            break;
        }
        const Panel l = eval(worst.lo, m), r = eval(m, worst.hi);
        total_err += l.error + r.error - worst.error;
        out.value += l.value + r.value - worst.value;
        heap.push(l);
        heap.push(r);
        if (heap.size() % 256 == 0) {
            auto [v, e] = totals();  // resync running sums
            out.value = v;
            total_err = e;
        }
    }
    auto [v, e] = totals();
    out.value = v;
    out.error = e;
    out.panels = heap.size();
    out.converged = e <= abs_tol;
    return out;
}

}  // namespace fewzeros
