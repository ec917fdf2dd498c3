#include "rftflow/series.hpp"

#include "rftflow/errors.hpp"

#include <algorithm>
#include <array>
#include <cfloat>
#include <cmath>
#include <deque>

namespace rftflow {

namespace {

constexpr double kEps = DBL_EPSILON;
// |rho - 1| below this counts as "on the radius".
constexpr double kUnitSlack = 1e-12;

// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double v) {
        double t = sum_ + v;
        if (std::fabs(sum_) >= std::fabs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Widen [value, value + tail] by a few ulps of accumulated rounding.
SeriesValue enclose(double value, double tail, std::size_t terms, bool ok) {
    double slack = 4.0 * kEps * std::fabs(value) * (1.0 + std::log2(1.0 + terms) / 8.0);
    return SeriesValue{std::max(0.0, value - slack), tail + 2.0 * slack, ok};
}

// B_{2j} for j = 1..12.
constexpr std::array<double, 12> kBernoulli = {
    1.0 / 6.0,           -1.0 / 30.0,          1.0 / 42.0,        -1.0 / 30.0,
    5.0 / 66.0,          -691.0 / 2730.0,      7.0 / 6.0,         -3617.0 / 510.0,
    43867.0 / 798.0,     -174611.0 / 330.0,    854513.0 / 138.0,  -236364091.0 / 2730.0,
};

} // namespace

SeriesValue hurwitz_zeta(double s, double q) {
    if (!(s > 1.0))
        throw DivergenceError("Hurwitz zeta diverges for s = " + format_number(s) + " <= 1");
    if (!(q > 0.0))
        throw NumericalError("Hurwitz zeta needs q > 0");
    // Direct terms until the shifted point a = q + N is at least 16, then
    // Euler-Maclaurin with 10 Bernoulli corrections. For the completely
    // monotone t^{-s} the remainder is bounded by the first omitted term.
    constexpr double kShift = 16.0;
    constexpr int kCorrections = 10;
    CompensatedSum sum;
    std::size_t n = 0;
    double a = q;
    while (a < kShift) {
        sum.add(std::pow(a, -s));
        a += 1.0;
        ++n;
    }
    sum.add(std::pow(a, 1.0 - s) / (s - 1.0));
    sum.add(0.5 * std::pow(a, -s));
    // term_j = B_{2j}/(2j)! * s(s+1)...(s+2j-2) * a^{-s-2j+1}
    double rising = s;            // s(s+1)...(s+2j-2)
    double factorial = 2.0;       // (2j)!
    double apow = std::pow(a, -s - 1.0);
    double next = 0.0;
    for (int j = 1; j <= kCorrections + 1; ++j) {
        double term = kBernoulli[static_cast<std::size_t>(j - 1)] / factorial * rising * apow;
        if (j == kCorrections + 1) {
            next = std::fabs(term);
            break;
        }
        sum.add(term);
        rising *= (s + 2.0 * j - 1.0) * (s + 2.0 * j);
        factorial *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
        apow /= a * a;
    }
    double v = sum.value();
    SeriesValue r = enclose(v, 0.0, n + kCorrections, true);
    r.value = std::max(0.0, r.value - next);
    r.tail_bound += 2.0 * next;
    return r;
}

FamilySeries::FamilySeries(FamilyClass family) : family_(std::move(family)) {
    if (family_.start < 1)
        return;
    auto h = family_.height.additive_form();
    auto m = family_.multiplicity.growth_form();
    if (h && m)
        shape_ = Shape{*h, *m};
}

bool FamilySeries::zeta_shape() const {
    return shape_ && shape_->height.lin == 0.0 && shape_->mult.base == 1.0
        && !shape_->mult.envelope && shape_->height.logk > 0.0;
}

double FamilySeries::envelope_term(long long k, double x) const {
    // floor(e) agrees with e to double precision once e overflows.
    const auto& g = shape_->mult;
    const auto& h = shape_->height;
    double lk = std::log(static_cast<double>(k));
    double lg = std::log(g.coef) + k * std::log(g.base) + g.power * lk;
    double hv = h.lin * k + h.logk * lk + h.constant;
    return std::exp(lg + hv * std::log(x));
}

double FamilySeries::term(long long k, double x) const {
    if (x == 0.0)
        return 0.0;
    double m;
    try {
        m = family_.multiplicity.eval(k);
    } catch (const ExprDomainError&) {
        if (!shape_)
            throw;
        return envelope_term(k, x);
    }
    if (m == 0.0)
        return 0.0;
    return m * std::exp(family_.height.eval(k) * std::log(x));
}

SeriesValue FamilySeries::sum(double x, const SeriesOptions& opts,
                              const std::set<long long>& excluded) const {
    if (x < 0.0 || std::isnan(x))
        throw NumericalError("series evaluated at negative x");
    if (x == 0.0)
        return {};
    if (zeta_shape())
        return sum_zeta(x, excluded);
    if (shape_)
        return sum_envelope(x, opts, excluded);
    return sum_ratio_test(x, opts, excluded);
}

SeriesValue FamilySeries::sum_zeta(double x, const std::set<long long>& excluded) const {
    const auto& h = shape_->height;
    const auto& m = shape_->mult;
    double lx = std::log(x);
    double sigma = m.power + h.logk * lx;
    if (!(sigma < -1.0))
        throw DivergenceError("family series diverges at x = " + format_number(x)
                              + " (terms ~ k^" + format_number(sigma) + ")");
    double scale = m.coef * std::exp(h.constant * lx);
    SeriesValue z = hurwitz_zeta(-sigma, static_cast<double>(family_.start));
    double value = scale * z.value;
    for (long long k : excluded)
        if (k >= family_.start)
            value -= term(k, x);
    return enclose(value, scale * z.tail_bound, 16 + excluded.size(), true);
}

SeriesValue FamilySeries::sum_envelope(double x, const SeriesOptions& opts,
                                       const std::set<long long>& excluded) const {
    const auto& h = shape_->height;
    const auto& m = shape_->mult;
    double lx = std::log(x);
    double rho = m.base * std::pow(x, h.lin);
    double sigma = m.power + h.logk * lx;
    double k0 = m.coef * std::exp(h.constant * lx);
    bool unit = std::fabs(rho - 1.0) <= kUnitSlack;
    if ((rho > 1.0 && !unit) || (unit && !(sigma < -1.0)))
        throw DivergenceError("family series diverges at x = " + format_number(x));

    // Bound on sum_{k > K} k0 rho^k k^sigma.
    auto tail_after = [&](double K) {
        double best = kInfinity;
        if (sigma < -1.0) {
            double r = unit ? 1.0 : std::pow(rho, K + 1.0);
            best = k0 * r * std::pow(K, sigma + 1.0) / (-sigma - 1.0);
        }
        if (!unit) {
            double first = k0 * std::pow(rho, K + 1.0) * std::pow(K + 1.0, sigma);
            double q = sigma <= 0.0 ? rho : rho * std::pow(1.0 + 1.0 / (K + 1.0), sigma);
            if (q < 1.0)
                best = std::min(best, first / (1.0 - q));
        }
        return best;
    };

    CompensatedSum sum;
    long long k = family_.start;
    std::size_t n = 0;
    double tail = kInfinity;
    bool overflowed = false;
    auto next_term = [&](long long i) {
        if (!overflowed) {
            try {
                double mi = family_.multiplicity.eval(i);
                return mi == 0.0 ? 0.0 : mi * std::exp(family_.height.eval(i) * lx);
            } catch (const ExprDomainError&) {
                overflowed = true;
            }
        }
        return envelope_term(i, x);
    };
    for (; n < opts.max_terms; ++n, ++k) {
        if (!excluded.count(k))
            sum.add(next_term(k));
        tail = tail_after(static_cast<double>(k));
        if (tail <= opts.tol)
            break;
    }
    bool ok = tail <= opts.tol;
    if (!std::isfinite(tail))
        throw NumericalError("no tail bound for family series at x = " + format_number(x));
    return enclose(sum.value(), tail, n + 1, ok);
}

SeriesValue FamilySeries::sum_ratio_test(double x, const SeriesOptions& opts,
                                         const std::set<long long>& excluded) const {
    // Eventual-ratio test checked numerically on a sliding window; the
    // largest observed ratio is inflated by a 10% margin toward 1.
    constexpr std::size_t kWindow = 64;
    CompensatedSum sum;
    std::deque<double> window;
    double prev = 0.0;
    long long k = family_.start;
    for (std::size_t n = 0; n < opts.max_terms; ++n, ++k) {
        double t = excluded.count(k) ? 0.0 : term(k, x);
        sum.add(t);
        if (t > 0.0 && prev > 0.0) {
            window.push_back(t / prev);
            if (window.size() > kWindow)
                window.pop_front();
        }
        if (t > 0.0)
            prev = t;
        if (window.size() < kWindow || n % kWindow != 0)
            continue;
        double q = *std::max_element(window.begin(), window.end());
        double lo = *std::min_element(window.begin(), window.end());
        if (q < 1.0) {
            double qm = q + 0.1 * (1.0 - q);
            double tail = prev * qm / (1.0 - qm);
            if (tail <= opts.tol)
                return enclose(sum.value(), tail, n + 1, true);
        } else if (lo > 1.0 && n > 16 * kWindow) {
            throw DivergenceError("family series terms grow at x = " + format_number(x));
        }
    }
    throw DivergenceError("ratio test inconclusive for family series at x = " + format_number(x)
                          + " within " + std::to_string(opts.max_terms) + " terms");
}

RadiusEstimate FamilySeries::probe_radius() const {
    SeriesOptions probe{1e-8, 20000};
    auto converges = [&](double x) {
        try {
            sum_ratio_test(x, probe, {});
            return true;
        } catch (const NumericalError&) {
            return false;
        }
    };
    double lo = 0.0, hi = 1.0;
    if (converges(1.0 - 1e-9))
        return RadiusEstimate{1.0, kInfinity, std::nullopt};
    for (int i = 0; i < 40; ++i) {
        double mid = 0.5 * (lo + hi);
        (converges(mid) ? lo : hi) = mid;
    }
    return RadiusEstimate{lo, hi, std::nullopt};
}

RadiusEstimate FamilySeries::radius() const {
    if (!shape_)
        return probe_radius();
    const auto& h = shape_->height;
    const auto& m = shape_->mult;
    auto exact = [](double r) { return RadiusEstimate{r, r, r}; };
    if (h.lin > 0.0)
        return exact(std::pow(m.base, -1.0 / h.lin));
    if (m.base > 1.0)
        return exact(0.0);
    if (m.base < 1.0)
        return exact(kInfinity);
    if (h.logk > 0.0)
        return exact(std::exp(-(1.0 + m.power) / h.logk));
    return exact(0.0);
}

RadiusBehavior FamilySeries::at_radius() const {
    if (!shape_)
        return RadiusBehavior::Unknown;
    double r = *radius().exact;
    if (!(r > 0.0) || !std::isfinite(r))
        return RadiusBehavior::Unknown;
    const auto& h = shape_->height;
    const auto& m = shape_->mult;
    double sigma = m.power + h.logk * std::log(r);
    if (h.lin == 0.0)
        sigma = -1.0; // exp(-(1+q)/a) puts sigma exactly on the boundary
    if (sigma < -1.0)
        return RadiusBehavior::Converges;
    // floor() only bounds from above; divergence needs the envelope to
    // grow so that floor(e) >= e/2 eventually.
    bool grows = m.base > 1.0 || (m.base == 1.0 && m.power > 0.0)
              || (m.base == 1.0 && m.power == 0.0 && m.coef >= 2.0);
    if (!m.envelope || grows)
        return RadiusBehavior::Diverges;
    return RadiusBehavior::Unknown;
}

SeriesValue alpha(const ClassDecl& decl, double x, const SeriesOptions& opts) {
    if (decl.is_finite()) {
        CompensatedSum sum;
        for (const auto& v : decl.finite().vertices)
            sum.add(std::pow(x, v.value));
        return enclose(sum.value(), 0.0, decl.finite().vertices.size(), true);
    }
    return FamilySeries(decl.family()).sum(x, opts);
}

SeriesValue vertex_series(const RftSpec& spec, double x, const SeriesOptions& opts) {
    SeriesValue total;
    for (const auto& c : spec.classes)
        total += alpha(c, x, opts);
    return total;
}

RadiusEstimate radius_F(const RftSpec& spec) {
    RadiusEstimate r;
    bool all_exact = true;
    for (const auto& c : spec.classes) {
        if (c.is_finite())
            continue;
        RadiusEstimate f = FamilySeries(c.family()).radius();
        r.lower = std::min(r.lower, f.lower);
        r.upper = std::min(r.upper, f.upper);
        if (f.exact)
            r.exact = r.exact ? std::min(*r.exact, *f.exact) : *f.exact;
        all_exact = all_exact && f.exact.has_value();
    }
    if (!all_exact)
        r.exact.reset();
    return r;
}

} // namespace rftflow
