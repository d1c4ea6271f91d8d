#include "fractube/spectrum.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <limits>
#include <numeric>

namespace fractube {

double moran_dimension(std::span<const double> ratios) {
    if (ratios.size() < 2) throw DomainError("Moran equation needs at least two ratios");
    for (double r : ratios)
        if (!(r > 0.0 && r < 1.0)) throw DomainError("ratios must lie in (0, 1)");
    auto excess = [&](double s) {
        double acc = 0.0;
        for (double r : ratios) acc += std::pow(r, s);
        return acc - 1.0;
    };
    double lo = 0.0, hi = 1.0;
    while (excess(hi) > 0.0) hi *= 2.0;
    for (int i = 0; i < 60 && hi - lo > 1e-10; ++i) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) > 0.0 ? lo : hi) = mid;
    }
    double d = 0.5 * (lo + hi);
    for (int i = 0; i < 20; ++i) {
        double f = -1.0, df = 0.0;
        for (double r : ratios) {
            const double p = std::pow(r, d);
            f += p;
            df += p * std::log(r);
        }
        const double step = f / df;
        d -= step;
        if (std::abs(step) < 1e-16 * std::max(1.0, d)) break;
    }
    return d;
}

namespace {

// Best rational approximation with denominator <= max_den via continued fractions.
std::pair<long, long> best_rational(double x, int max_den, double tol) {
    long h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double y = x;
    for (int it = 0; it < 64; ++it) {
        const double a = std::floor(y);
        const long h2 = static_cast<long>(a) * h1 + h0;
        const long k2 = static_cast<long>(a) * k1 + k0;
        if (k2 > max_den) break;
        h0 = h1, h1 = h2, k0 = k1, k1 = k2;
        if (std::abs(x - static_cast<double>(h1) / static_cast<double>(k1)) <= tol) break;
        const double frac = y - a;
        if (frac < 1e-300) break;
        y = 1.0 / frac;
    }
    return {h1, k1};
}

}  // namespace

LatticeInfo classify_lattice(std::span<const double> ratios, int max_denominator, double tol) {
    if (ratios.size() < 2) throw DomainError("classification needs at least two ratios");
    const double l1 = std::log(ratios[0]);
    std::vector<std::pair<long, long>> q;
    LatticeInfo info;
    long den = 1;
    for (double r : ratios) {
        const double x = std::log(r) / l1;
        const auto [num, d] = best_rational(x, max_denominator, tol);
        const double err = std::abs(x - static_cast<double>(num) / static_cast<double>(d));
        if (d == 0 || err > tol * std::max(1.0, std::abs(x))) return LatticeInfo{};
        info.achieved_error = std::max(info.achieved_error, err);
        q.emplace_back(num, d);
        den = std::lcm(den, d);
        if (den > max_denominator) return LatticeInfo{};
    }
    long g = 0;
    std::vector<long> k;
    for (auto [num, d] : q) {
        k.push_back(num * (den / d));
        g = std::gcd(g, k.back());
    }
    info.lattice = true;
    for (long kj : k) info.exponents.push_back(static_cast<int>(kj / g));
    info.base = std::exp(l1 * static_cast<double>(g) / static_cast<double>(den));
    info.tolerance_certified = info.achieved_error > 0.0;
    return info;
}

cplx moran_function(std::span<const double> ratios, cplx s) {
    cplx acc = 1.0;
    for (double r : ratios) acc -= std::exp(s * std::log(r));
    return acc;
}

cplx moran_derivative(std::span<const double> ratios, cplx s) {
    cplx acc = 0.0;
    for (double r : ratios) acc -= std::log(r) * std::exp(s * std::log(r));
    return acc;
}

cplx residue_scaling_zeta(std::span<const double> ratios, cplx omega) {
    const cplx d = moran_derivative(ratios, omega);
    if (std::abs(d) < 1e-10) throw DomainError("multiple pole: formula requires simple poles");
    return 1.0 / d;
}

namespace {

struct EdgeTooClose {};

// Lipschitz constant of 1 - sum r^s on Re s >= sigma.
double lipschitz(std::span<const double> ratios, double sigma) {
    double l = 0.0;
    for (double r : ratios) l += -std::log(r) * std::pow(r, sigma);
    return l;
}

// Argument change of f along [a, b]. Each step keeps |f(x) - f(a)| <= |f(a)| / 2,
// so the image stays in a disk that excludes 0 and the increment is unambiguous.
double edge_argument(std::span<const double> ratios, cplx a, cplx b, double guard) {
    const double len = std::abs(b - a);
    const cplx dir = (b - a) / len;
    const double lip = lipschitz(ratios, std::min(a.real(), b.real()));
    double t = 0.0, total = 0.0;
    cplx fa = moran_function(ratios, a);
    while (t < len) {
        const double reach = std::abs(fa) / lip;
        if (reach < guard) throw EdgeTooClose{};
        const double h = std::min(len - t, 0.5 * reach);
        t = std::min(len, t + h);
        const cplx fb = moran_function(ratios, a + dir * t);
        total += std::arg(fb / fa);
        fa = fb;
    }
    return total;
}

int winding_raw(std::span<const double> ratios, const Box& b, double guard) {
    const cplx c00(b.re_lo, b.im_lo), c10(b.re_hi, b.im_lo), c11(b.re_hi, b.im_hi), c01(b.re_lo, b.im_hi);
    const double total = edge_argument(ratios, c00, c10, guard) + edge_argument(ratios, c10, c11, guard) +
                         edge_argument(ratios, c11, c01, guard) + edge_argument(ratios, c01, c00, guard);
    return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

std::optional<cplx> newton(std::span<const double> ratios, cplx s) {
    for (int it = 0; it < 60; ++it) {
        const cplx d = moran_derivative(ratios, s);
        if (std::abs(d) < 1e-14) return std::nullopt;
        const cplx step = moran_function(ratios, s) / d;
        s -= step;
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) return std::nullopt;
        if (std::abs(step) < 1e-15 * (1.0 + std::abs(s))) return s;
    }
    if (std::abs(moran_function(ratios, s)) < 1e-12) return s;
    return std::nullopt;
}

bool inside(const Box& b, cplx s) {
    return s.real() >= b.re_lo && s.real() <= b.re_hi && s.imag() >= b.im_lo && s.imag() <= b.im_hi;
}

class RootSearch {
public:
    RootSearch(std::span<const double> ratios, std::size_t budget) : ratios_(ratios), budget_(budget) {}

    void run(const Box& b, int count) {
        if (count == 0) return;
        if (count < 0) throw Error("negative winding count; argument tracking failed");
        const cplx centre(0.5 * (b.re_lo + b.re_hi), 0.5 * (b.im_lo + b.im_hi));
        if (count == 1) {
            if (auto s = newton(ratios_, centre); s && inside(b, *s) && std::abs(moran_function(ratios_, *s)) < 1e-10) {
                found_.push_back(*s);
                if (found_.size() > budget_) throw BudgetError("root budget exceeded");
                return;
            }
        }
        const double w = b.re_hi - b.re_lo, h = b.im_hi - b.im_lo;
        if (w < 1e-6 && h < 1e-6) throw DomainError("multiple pole: formula requires simple poles");
        static constexpr double shifts[] = {0.0, 0.0123, -0.0217, 0.0371, -0.0533, 0.0711, -0.0913, 0.113};
        for (double shift : shifts) {
            Box lo = b, hi = b;
            if (w >= h) {
                const double cut = b.re_lo + w * (0.5 + shift);
                lo.re_hi = hi.re_lo = cut;
            } else {
                const double cut = b.im_lo + h * (0.5 + shift);
                lo.im_hi = hi.im_lo = cut;
            }
            int c_lo, c_hi;
            try {
                c_lo = winding_raw(ratios_, lo, guard(lo));
                c_hi = winding_raw(ratios_, hi, guard(hi));
            } catch (const EdgeTooClose&) {
                continue;
            }
            if (c_lo + c_hi != count) throw Error("inconsistent argument-principle counts under subdivision");
            run(lo, c_lo);
            run(hi, c_hi);
            return;
        }
        throw Error("could not place a subdivision cut away from roots");
    }

    std::vector<cplx> take() { return std::move(found_); }

private:
    static double guard(const Box& b) { return 1e-4 * std::min(b.re_hi - b.re_lo, b.im_hi - b.im_lo) + 1e-13; }

    std::span<const double> ratios_;
    std::size_t budget_;
    std::vector<cplx> found_;
};

}  // namespace

int winding_number(std::span<const double> ratios, const Box& box, double guard) {
    try {
        return winding_raw(ratios, box, guard);
    } catch (const EdgeTooClose&) {
        throw DomainError("a root lies on the boundary of the counting box");
    }
}

double root_strip_lower_bound(std::span<const double> ratios) {
    const double r_min = *std::min_element(ratios.begin(), ratios.end());
    auto margin = [&](double sigma) {
        double dominant = 0.0, rest = 0.0;
        for (double r : ratios) (r <= r_min * (1.0 + 1e-15) ? dominant : rest) += std::pow(r, sigma);
        return dominant - rest - 1.0;
    };
    if (std::all_of(ratios.begin(), ratios.end(), [&](double r) { return r <= r_min * (1.0 + 1e-15); }))
        return -std::numeric_limits<double>::infinity();
    double lo = -1.0;
    while (margin(lo) <= 0.0) {
        lo *= 2.0;
        if (lo < -1e6) return -std::numeric_limits<double>::infinity();
    }
    double hi = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        (margin(mid) > 0.0 ? lo : hi) = mid;
    }
    return lo;
}

std::vector<ComplexDimension> ComplexDimensionSet::poles(long n_max) const {
    if (kind == SpectrumKind::nonlattice) return roots;
    std::vector<ComplexDimension> out;
    const double cap = (static_cast<double>(n_max) + 0.5) * period * (1.0 + 1e-12);
    for (const auto& line : lines) {
        const long reach = n_max + 2;
        for (long n = -reach; n <= reach; ++n) {
            const double im = line.im_offset - static_cast<double>(n) * period;
            if (std::abs(im) > cap) continue;
            out.push_back({cplx(line.real_part, im), line.residue});
        }
    }
    return out;
}

ComplexDimensionSet complex_dimensions(std::span<const double> ratios, const Window& window, std::size_t root_budget) {
    ComplexDimensionSet set;
    set.ratios.assign(ratios.begin(), ratios.end());
    set.dimension = moran_dimension(ratios);
    set.lattice = classify_lattice(ratios);
    set.window = window;
    if (!(window.sigma_min < set.dimension)) throw DomainError("window must satisfy sigma_min < D");

    if (set.lattice.lattice) {
        set.kind = SpectrumKind::lattice;
        const double log_r = std::log(set.lattice.base);
        set.period = 2.0 * kPi / -log_r;
        if (set.window.t_max <= 0.0) set.window.t_max = 10.0 * set.period;
        const auto& k = set.lattice.exponents;
        const int degree = *std::max_element(k.begin(), k.end());
        // 1 - sum z^{k_j} as a polynomial in z; roots via the companion matrix.
        std::vector<double> coeff(degree + 1, 0.0);
        coeff[0] = 1.0;
        for (int kj : k) coeff[kj] -= 1.0;
        Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
        for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
        for (int i = 0; i < degree; ++i) companion(i, degree - 1) = -coeff[i] / coeff[degree];
        const Eigen::VectorXcd eig = companion.eigenvalues();
        auto poly = [&](cplx z) {
            cplx acc = 1.0;
            for (int kj : k) acc -= std::pow(z, kj);
            return acc;
        };
        auto dpoly = [&](cplx z) {
            cplx acc = 0.0;
            for (int kj : k) acc -= static_cast<double>(kj) * std::pow(z, kj - 1);
            return acc;
        };
        for (int i = 0; i < degree; ++i) {
            cplx z = eig[i];
            for (int it = 0; it < 50; ++it) {
                const cplx dp = dpoly(z);
                if (std::abs(dp) < 1e-12) throw DomainError("multiple pole: formula requires simple poles");
                const cplx step = poly(z) / dp;
                z -= step;
                if (std::abs(step) < 1e-16 * std::abs(z)) break;
            }
            if (std::abs(z.imag()) < 1e-14 * std::abs(z)) z = cplx(z.real(), 0.0);
            LatticeLine line;
            line.z = z;
            line.real_part = std::log(std::abs(z)) / log_r;
            line.im_offset = std::arg(z) / log_r;
            const cplx omega(line.real_part, line.im_offset);
            if (std::abs(moran_function(ratios, omega)) > 1e-10) throw Error("lattice root failed verification");
            line.residue = residue_scaling_zeta(ratios, omega);
            set.lines.push_back(line);
        }
        std::sort(set.lines.begin(), set.lines.end(), [](const LatticeLine& a, const LatticeLine& b) {
            return a.real_part > b.real_part || (a.real_part == b.real_part && a.im_offset < b.im_offset);
        });
        for (const auto& line : set.lines) {
            if (line.real_part < set.window.sigma_min) continue;
            const long reach = static_cast<long>(std::ceil(set.window.t_max / set.period)) + 1;
            for (long n = -reach; n <= reach; ++n) {
                const double im = line.im_offset - static_cast<double>(n) * set.period;
                if (std::abs(im) <= set.window.t_max) set.roots.push_back({cplx(line.real_part, im), line.residue});
            }
        }
    } else {
        set.kind = SpectrumKind::nonlattice;
        if (set.window.t_max <= 0.0) set.window.t_max = 200.0;
        // Reposition the screen and the horizontal edges off any root.
        Box box{set.window.sigma_min, set.dimension + 1.0, -set.window.t_max, set.window.t_max};
        int count = 0;
        bool placed = false;
        for (int attempt = 0; attempt < 16 && !placed; ++attempt) {
            try {
                count = winding_raw(ratios, box, 1e-8);
                placed = true;
            } catch (const EdgeTooClose&) {
                box.re_lo -= 1e-3;
                box.im_lo -= 1e-3;
                box.im_hi += 1e-3;
            }
        }
        if (!placed) throw Error("could not place the window boundary away from roots");
        set.window.sigma_min = box.re_lo;
        set.window.t_max = box.im_hi;
        if (static_cast<std::size_t>(count) > root_budget) throw BudgetError("window too large for the root budget");
        set.census = count;
        RootSearch search(ratios, root_budget);
        search.run(box, count);
        for (cplx s : search.take()) {
            if (std::abs(s.imag()) < 1e-10) s = cplx(s.real(), 0.0);
            set.roots.push_back({s, residue_scaling_zeta(ratios, s)});
        }
    }
    std::sort(set.roots.begin(), set.roots.end(), [](const ComplexDimension& a, const ComplexDimension& b) {
        return a.omega.real() < b.omega.real() || (a.omega.real() == b.omega.real() && a.omega.imag() < b.omega.imag());
    });
    return set;
}

}  // namespace fractube
