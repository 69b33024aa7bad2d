#include "kamprop/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

namespace kamprop {

namespace {

// Shape-preserving three-point endpoint derivative (same rule as SciPy's pchip).
int sign(double v) { return (v > 0.0) - (v < 0.0); }

double pchip_edge(double h0, double h1, double d0, double d1) {
    double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (sign(m) != sign(d0)) {
        return 0.0;
    }
    if (sign(d0) != sign(d1) && std::abs(m) > 3.0 * std::abs(d0)) {
        m = 3.0 * d0;
    }
    return m;
}

std::vector<double> pchip_slopes(const std::vector<double>& t, const std::vector<double>& y) {
    const std::size_t n = t.size();
    std::vector<double> m(n, 0.0);
    if (n == 2) {
        const double d = (y[1] - y[0]) / (t[1] - t[0]);
        m[0] = m[1] = d;
        return m;
    }
    std::vector<double> h(n - 1), d(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        h[k] = t[k + 1] - t[k];
        d[k] = (y[k + 1] - y[k]) / h[k];
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (d[k - 1] == 0.0 || d[k] == 0.0 || std::signbit(d[k - 1]) != std::signbit(d[k])) {
            m[k] = 0.0;
            continue;
        }
        const double w1 = 2.0 * h[k] + h[k - 1];
        const double w2 = h[k] + 2.0 * h[k - 1];
        m[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
    }
    m[0] = pchip_edge(h[0], h[1], d[0], d[1]);
    m[n - 1] = pchip_edge(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
    return m;
}

double hermite(double t0, double t1, double y0, double y1, double m0, double m1, double t) {
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * m0 +
           (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * m1;
}

}  // namespace

PulseShape::PulseShape(std::variant<SineSquared, Table> rep, double t0, double t1, double total)
    : rep_(std::move(rep)), t_start_(t0), t_end_(t1), total_area_(total) {}

PulseShape PulseShape::sine_squared(double total_area) {
    if (!(total_area > 0.0) || !std::isfinite(total_area)) {
        throw std::invalid_argument("sine_squared: total area must be positive and finite");
    }
    return PulseShape(SineSquared{total_area}, 0.0, 1.0, total_area);
}

PulseShape PulseShape::null_pulse(double t_start, double t_end) {
    return tabulated({t_start, t_end}, {0.0, 0.0});
}

PulseShape PulseShape::tabulated(std::vector<double> t, std::vector<double> omega) {
    if (t.size() != omega.size()) {
        throw std::invalid_argument("tabulated pulse: t and omega sizes differ");
    }
    if (t.size() < 2) {
        throw std::invalid_argument("tabulated pulse: need at least two samples");
    }
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (!std::isfinite(t[k]) || !std::isfinite(omega[k])) {
            throw std::invalid_argument("tabulated pulse: non-finite sample");
        }
        if (k > 0 && !(t[k] > t[k - 1])) {
            throw std::invalid_argument("tabulated pulse: times must be strictly increasing");
        }
    }
    if (omega.front() != 0.0 || omega.back() != 0.0) {
        throw std::invalid_argument("tabulated pulse: omega must vanish at both endpoints");
    }

    Table tab;
    tab.slope = pchip_slopes(t, omega);
    tab.cumulative.assign(t.size(), 0.0);
    for (std::size_t k = 0; k + 1 < t.size(); ++k) {
        // exact integral of the Hermite cubic on [t_k, t_{k+1}]
        const double h = t[k + 1] - t[k];
        tab.cumulative[k + 1] = tab.cumulative[k] + 0.5 * h * (omega[k] + omega[k + 1]) +
                                h * h * (tab.slope[k] - tab.slope[k + 1]) / 12.0;
    }
    const double t0 = t.front();
    const double t1 = t.back();
    const double total = tab.cumulative.back();
    tab.t = std::move(t);
    tab.omega = std::move(omega);
    return PulseShape(std::move(tab), t0, t1, total);
}

double PulseShape::omega(double t) const {
    if (t < t_start_ || t > t_end_) {
        return 0.0;
    }
    if (const auto* s = std::get_if<SineSquared>(&rep_)) {
        const double sn = std::sin(std::numbers::pi * t);
        return 2.0 * s->area * sn * sn;
    }
    return table_omega(std::get<Table>(rep_), t);
}

double PulseShape::area(double t) const {
    if (t <= t_start_) {
        return 0.0;
    }
    if (t >= t_end_) {
        return total_area_;
    }
    if (const auto* s = std::get_if<SineSquared>(&rep_)) {
        return s->area * (t - std::sin(2.0 * std::numbers::pi * t) / (2.0 * std::numbers::pi));
    }
    return table_area(std::get<Table>(rep_), t);
}

double PulseShape::table_omega(const Table& tab, double t) const {
    auto it = std::upper_bound(tab.t.begin(), tab.t.end(), t);
    std::size_t k = static_cast<std::size_t>(std::distance(tab.t.begin(), it));
    k = std::clamp<std::size_t>(k, 1, tab.t.size() - 1) - 1;
    return hermite(tab.t[k], tab.t[k + 1], tab.omega[k], tab.omega[k + 1], tab.slope[k],
                   tab.slope[k + 1], t);
}

double PulseShape::table_area(const Table& tab, double t) const {
    auto it = std::upper_bound(tab.t.begin(), tab.t.end(), t);
    std::size_t k = static_cast<std::size_t>(std::distance(tab.t.begin(), it));
    k = std::clamp<std::size_t>(k, 1, tab.t.size() - 1) - 1;
    const double a = tab.t[k];
    if (t == a) {
        return tab.cumulative[k];
    }
    // Simpson is exact for the cubic interpolant on [t_k, t].
    const auto f = [&](double u) {
        return hermite(tab.t[k], tab.t[k + 1], tab.omega[k], tab.omega[k + 1], tab.slope[k],
                       tab.slope[k + 1], u);
    };
    return tab.cumulative[k] + (t - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + t)) + f(t));
}

PulseShape load_tabulated_pulse(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open pulse file: " + path.string());
    }
    std::vector<double> t, omega;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream fields(line);
        double tv = 0.0, ov = 0.0;
        if (!(fields >> tv)) {
            continue;  // blank
        }
        std::string extra;
        if (!(fields >> ov) || (fields >> extra)) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": expected two columns (t, omega)");
        }
        t.push_back(tv);
        omega.push_back(ov);
    }
    return PulseShape::tabulated(std::move(t), std::move(omega));
}

}  // namespace kamprop
