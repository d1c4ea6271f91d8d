#include "fractube/string_core.hpp"

#include <algorithm>
#include <numeric>

namespace fractube {

namespace {

struct DistinctRatio {
    double ratio;
    u128 count;
};

std::vector<DistinctRatio> distinct_ratios(std::span<const double> ratios) {
    std::vector<double> r(ratios.begin(), ratios.end());
    std::sort(r.begin(), r.end(), std::greater<>());
    std::vector<DistinctRatio> out;
    for (double x : r) {
        if (!out.empty() && std::abs(out.back().ratio - x) <= 1e-15 * x)
            ++out.back().count;
        else
            out.push_back({x, 1});
    }
    return out;
}

bool mul_overflows(u128 a, u128 b, u128& out) {
    if (a != 0 && b > ~u128(0) / a) return true;
    out = a * b;
    return false;
}

u128 binomial(int n, int k, bool& overflow) {
    u128 c = 1;
    for (int i = 1; i <= k; ++i) {
        u128 next;
        if (mul_overflows(c, static_cast<u128>(n - k + i), next)) {
            overflow = true;
            return 0;
        }
        c = next / static_cast<u128>(i);
    }
    return c;
}

double binomial_d(int n, int k) {
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

}  // namespace

std::vector<Atom> enumerate_ratio_buckets(std::span<const double> ratios, double min_ratio, int max_level,
                                          std::size_t budget) {
    const auto dr = distinct_ratios(ratios);
    std::vector<Atom> out;
    // Depth-first over exponent vectors (a_1..a_K); multiplicity is the
    // multinomial coefficient times prod count_j^{a_j}.
    struct Frame {
        std::size_t j;
        double ratio;
        int level;
        u128 mult;
        double weight;
        bool exact;
    };
    std::vector<Frame> stack{{0, 1.0, 0, 1, 1.0, true}};
    while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        if (f.j == dr.size()) {
            out.push_back({f.ratio, f.exact ? f.mult : 0, f.weight, f.exact, f.level});
            if (out.size() > budget) throw BudgetError("depth budget: more than " + std::to_string(budget) + " ratio buckets");
            continue;
        }
        double r = f.ratio;
        double cpow_d = 1.0;
        u128 cpow = 1;
        bool cexact = true;
        for (int a = 0;; ++a) {
            if (a > 0) {
                r *= dr[f.j].ratio;
                cpow_d *= static_cast<double>(dr[f.j].count);
                u128 next;
                if (cexact && mul_overflows(cpow, dr[f.j].count, next)) cexact = false;
                else cpow = next;
            }
            if (r < min_ratio || f.level + a > max_level) break;
            const int level = f.level + a;
            bool overflow = !cexact || !f.exact;
            u128 mult = 0;
            if (!overflow) {
                const u128 b = binomial(level, a, overflow);
                u128 tmp;
                if (!overflow && !mul_overflows(f.mult, b, tmp) && !mul_overflows(tmp, cpow, mult)) {
                } else {
                    overflow = true;
                }
            }
            const double w = f.weight * binomial_d(level, a) * cpow_d;
            stack.push_back({f.j + 1, r, level, mult, w, !overflow});
        }
    }
    std::sort(out.begin(), out.end(), [](const Atom& a, const Atom& b) {
        return a.ratio > b.ratio || (a.ratio == b.ratio && a.level < b.level);
    });
    return out;
}

double word_power_sum(std::span<const double> ratios, double p) {
    double q = 0.0;
    for (double r : ratios) q += std::pow(r, p);
    if (q >= 1.0) throw DomainError("word power sum diverges");
    return 1.0 / (1.0 - q);
}

FractalString FractalString::self_similar(std::vector<double> ratios, double g) {
    if (ratios.empty()) throw DomainError("self-similar string needs ratios");
    for (double r : ratios)
        if (!(r > 0.0 && r < 1.0)) throw DomainError("string ratios must lie in (0, 1)");
    if (!(g > 0.0)) throw DomainError("largest inradius must be positive");
    FractalString s;
    s.self_similar_ = true;
    s.ratios_ = std::move(ratios);
    s.g_ = g;
    return s;
}

FractalString FractalString::explicit_list(std::vector<Atom> atoms, double g) {
    if (atoms.empty()) throw DomainError("explicit string needs at least one interval");
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.ratio > b.ratio; });
    for (const auto& a : atoms)
        if (!(a.ratio > 0.0 && a.ratio <= 1.0) || a.weight <= 0.0)
            throw DomainError("explicit atoms need ratio in (0, 1] and positive multiplicity");
    if (std::abs(atoms.front().ratio - 1.0) > 1e-15) throw DomainError("largest ratio must be 1");
    FractalString s;
    s.self_similar_ = false;
    s.atoms_ = std::move(atoms);
    s.g_ = g;
    return s;
}

bool FractalString::realizable() const {
    if (!self_similar_) return true;
    return std::accumulate(ratios_.begin(), ratios_.end(), 0.0) < 1.0;
}

double FractalString::total_length() const {
    if (!realizable()) throw DomainError("not realizable as a bounded open subset of the line");
    if (self_similar_) return 2.0 * g_ * word_power_sum(ratios_, 1.0);
    CompensatedSum acc;
    for (const auto& a : atoms_) acc.add(a.weight * a.ratio);
    return 2.0 * g_ * acc.value();
}

std::vector<Atom> FractalString::atoms(int depth) const {
    if (!self_similar_) return atoms_;
    return enumerate_ratio_buckets(ratios_, 0.0, depth);
}

cplx scaling_zeta(const FractalString& string, cplx s) {
    if (string.is_self_similar()) {
        cplx acc = 0.0;
        for (double r : string.generator_ratios()) acc += std::exp(s * std::log(r));
        const cplx den = 1.0 - acc;
        if (std::abs(den) < 1e-12) throw DomainError("pole of the scaling zeta function");
        return 1.0 / den;
    }
    ComplexCompensatedSum acc;
    for (const auto& a : string.explicit_atoms()) acc.add(a.weight * std::exp(s * std::log(a.ratio)));
    return acc.value();
}

DirichletSum dirichlet_partial_sum(const FractalString& string, cplx s, int depth) {
    ComplexCompensatedSum acc;
    for (const auto& a : string.atoms(depth)) acc.add(a.weight * std::exp(s * std::log(a.ratio)));
    double tail = 0.0;
    if (string.is_self_similar()) {
        double q = 0.0;
        for (double r : string.generator_ratios()) q += std::pow(r, s.real());
        tail = q < 1.0 ? std::pow(q, depth + 1) / (1.0 - q) : std::numeric_limits<double>::infinity();
    }
    return {acc.value(), tail};
}

cplx geometric_zeta_string(const FractalString& string, double eps, cplx s) {
    if (std::abs(s) < 1e-12 || std::abs(s - 1.0) < 1e-12) throw DomainError("structural pole at s = 0 or s = 1");
    if (!(eps > 0.0)) throw DomainError("eps must be positive");
    const double g = string.largest_inradius();
    return scaling_zeta(string, s) * std::exp(s * std::log(2.0 * g)) * std::exp((1.0 - s) * std::log(2.0 * eps)) /
           (s * (1.0 - s));
}

double string_tube_oracle(const FractalString& string, double eps) {
    if (!(eps > 0.0)) throw DomainError("eps must be positive");
    const double g = string.largest_inradius();
    const double total = string.total_length();
    const double threshold = eps / g;  // interval unsaturated iff ratio > eps / g
    CompensatedSum open_count, open_length;
    const auto atoms = string.is_self_similar()
                           ? enumerate_ratio_buckets(string.generator_ratios(), threshold)
                           : string.explicit_atoms();
    for (const auto& a : atoms) {
        if (a.ratio <= threshold) continue;
        open_count.add(a.weight);
        open_length.add(a.weight * 2.0 * g * a.ratio);
    }
    return 2.0 * eps * open_count.value() + (total - open_length.value());
}

FractalString string_from_system(const SelfSimilarSystem& system) {
    if (system.dimension() != 1) throw DomainError("strings come from one-dimensional systems");
    const Interval hull = attractor_interval(system);
    if (!(hull.length() > 0.0)) throw DomainError("attractor not full-dimensional");
    std::vector<Interval> images;
    for (const auto& m : system.maps()) {
        const double a = m.apply({hull.lo, 0.0}).x, b = m.apply({hull.hi, 0.0}).x;
        images.push_back({std::min(a, b), std::max(a, b)});
    }
    std::sort(images.begin(), images.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    const double tol = 1e-12 * hull.length();
    std::vector<double> gaps;
    for (std::size_t i = 0; i + 1 < images.size(); ++i) {
        const double gap = images[i + 1].lo - images[i].hi;
        if (gap < -tol) throw DomainError("tileset condition violated: images overlap");
        if (gap > tol) gaps.push_back(gap);
    }
    if (gaps.empty()) throw DomainError("attractor has interior; no tiling residue");
    if (gaps.size() > 1) throw DomainError("more than one gap generator; only single-gap strings are supported");
    return FractalString::self_similar(system.ratios(), 0.5 * gaps.front());
}

}  // namespace fractube
