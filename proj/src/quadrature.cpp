#include "decolab/quadrature.hpp"

#include "decolab/error.hpp"

#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace decolab {

namespace {

// QUADPACK qk15 abscissae and weights.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gauss_kronrod(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double fc = f(c);
    double kron = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[static_cast<std::size_t>(j)];
        const double s = f(c - dx) + f(c + dx);
        kron += kWgk[static_cast<std::size_t>(j)] * s;
        if (j % 2 == 1) gauss += kWg[static_cast<std::size_t>(j / 2)] * s;
    }
    return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

} // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, std::span<const double> breakpoints,
                                    double abs_tol, double rel_tol, std::size_t max_intervals) {
    if (breakpoints.size() < 2) throw InvalidArgument("integrate_adaptive: need at least two breakpoints");
    std::priority_queue<Panel> heap;
    double value = 0.0, error = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (!(breakpoints[i + 1] > breakpoints[i]))
            throw InvalidArgument("integrate_adaptive: breakpoints must be strictly increasing");
        const Panel p = gauss_kronrod(f, breakpoints[i], breakpoints[i + 1]);
        value += p.value;
        error += p.error;
        heap.push(p);
    }
    while (error > std::max(abs_tol, rel_tol * std::abs(value)) && heap.size() < max_intervals) {
        const Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) { // cannot split further
            heap.push(worst);
            break;
        }
        const Panel left = gauss_kronrod(f, worst.a, mid), right = gauss_kronrod(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Recompute the sums to shed accumulated rounding from the running updates.
    double v = 0.0, e = 0.0;
    const std::size_t n = heap.size();
    while (!heap.empty()) {
        v += heap.top().value;
        e += heap.top().error;
        heap.pop();
    }
    return {v, e, e <= std::max(abs_tol, rel_tol * std::abs(v)), n};
}

} // namespace decolab
