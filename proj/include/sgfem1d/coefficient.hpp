#ifndef SGFEM1D_COEFFICIENT_HPP
#define SGFEM1D_COEFFICIENT_HPP

#include <algorithm>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace sgfem {

/// Diffusion coefficient a(x) on (0,1): either piecewise constant with
/// sorted breakpoints (the value on [breaks[i-1], breaks[i]) is values[i])
/// or a smooth callable. Bounds 0 < alpha <= a <= beta are declared and
/// checked for the piecewise form.
class CoefficientFn {
public:
    static CoefficientFn constant(double v) {
        return piecewise({}, {v});
    }

    static CoefficientFn piecewise(std::vector<double> breaks, std::vector<double> values) {
        if (values.size() != breaks.size() + 1)
            throw std::invalid_argument("CoefficientFn: need breaks.size()+1 values");
        if (!std::is_sorted(breaks.begin(), breaks.end()))
            throw std::invalid_argument("CoefficientFn: breakpoints must be sorted");
        CoefficientFn a;
        a.breaks_ = std::move(breaks);
        a.values_ = std::move(values);
        a.lo_ = *std::min_element(a.values_.begin(), a.values_.end());
        a.hi_ = *std::max_element(a.values_.begin(), a.values_.end());
        if (a.lo_ <= 0.0)
            throw std::invalid_argument("CoefficientFn: coefficient must be positive");
        return a;
    }

    static CoefficientFn smooth(std::function<double(double)> fn, double lo, double hi) {
        if (!(0.0 < lo && lo <= hi))
            throw std::invalid_argument("CoefficientFn: invalid bounds");
        CoefficientFn a;
        a.smooth_ = std::move(fn);
        a.lo_ = lo;
        a.hi_ = hi;
        return a;
    }

    // a(x1) of the piece containing x (right-continuous at breakpoints)
    double operator()(double x) const {
        if (smooth_) return smooth_(x);
        auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
        return values_[static_cast<std::size_t>(it - breaks_.begin())];
    }

    bool piecewise_constant() const { return !smooth_; }
    std::span<const double> breakpoints() const { return breaks_; }
    std::span<const double> piece_values() const { return values_; }
    double lower_bound() const { return lo_; }
    double upper_bound() const { return hi_; }

    /// Piece value on a subinterval known to contain no breakpoint.
    double value_between(double a, double b) const { return (*this)(0.5 * (a + b)); }

    /// a1 of the interface example: 1/2 left of bstar, 1 right of it.
    static CoefficientFn interface_a1(double bstar) {
        return piecewise({bstar}, {0.5, 1.0});
    }
    /// a2: 1 outside (b1, b2), 1/2 inside.
    static CoefficientFn interface_a2(double b1, double b2) {
        return piecewise({b1, b2}, {1.0, 0.5, 1.0});
    }

private:
    std::vector<double> breaks_, values_;
    std::function<double(double)> smooth_;
    double lo_ = 0.0, hi_ = 0.0;
};

}  // namespace sgfem

#endif
