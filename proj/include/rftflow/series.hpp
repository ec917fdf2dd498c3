#pragma once

#include "rftflow/spec.hpp"

#include <cstddef>
#include <limits>
#include <optional>
#include <set>

namespace rftflow {

/// A truncated series: the true sum lies in [value, value + tail_bound].
struct SeriesValue {
    double value = 0.0;
    double tail_bound = 0.0;
    /// False when the term budget ran out before tail_bound <= tol; the
    /// enclosure is still valid, only wider.
    bool within_tolerance = true;

    double upper() const { return value + tail_bound; }

    SeriesValue& operator+=(const SeriesValue& o) {
        value += o.value;
        tail_bound += o.tail_bound;
        within_tolerance = within_tolerance && o.within_tolerance;
        return *this;
    }
};

struct SeriesOptions {
    double tol = 1e-12;
    std::size_t max_terms = 2'000'000;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Radius of convergence; `exact` is set when a closed form is known.
/// An all-finite vertex set has radius +inf.
struct RadiusEstimate {
    double lower = kInfinity;
    double upper = kInfinity;
    std::optional<double> exact = kInfinity;
};

enum class RadiusBehavior { Converges, Diverges, Unknown };

/// Hurwitz zeta  sum_{n>=0} (n+q)^{-s}  for s > 1, q > 0, with a rigorous
/// bound on the Euler-Maclaurin remainder.
SeriesValue hurwitz_zeta(double s, double q);

/// Evaluates sum_{k >= start, k not excluded} m(k) x^{g(k)} for one family.
/// Construction analyses the expressions once; evaluation is reentrant.
class FamilySeries {
public:
    explicit FamilySeries(FamilyClass family);

    const FamilyClass& family() const { return family_; }

    /// Throws DivergenceError when x is beyond the radius (or the numeric
    /// ratio test shows the terms do not decay).
    SeriesValue sum(double x, const SeriesOptions& opts,
                    const std::set<long long>& excluded = {}) const;

    RadiusEstimate radius() const;
    /// Whether the series converges at x = radius (closed forms only).
    RadiusBehavior at_radius() const;

    /// True when the shapes of height and multiplicity were recognised.
    bool recognised() const { return shape_.has_value(); }
    /// Exact zeta closed form applies (m constant, height a ln k + c).
    bool zeta_shape() const;

    double term(long long k, double x) const;

private:
    struct Shape {
        AdditiveForm height;
        GrowthForm mult;
    };

    SeriesValue sum_zeta(double x, const std::set<long long>& excluded) const;
    SeriesValue sum_envelope(double x, const SeriesOptions& opts,
                             const std::set<long long>& excluded) const;
    SeriesValue sum_ratio_test(double x, const SeriesOptions& opts,
                               const std::set<long long>& excluded) const;
    RadiusEstimate probe_radius() const;
    /// Log-space m(k) x^{g(k)} from the growth envelope (used once m(k)
    /// overflows a double).
    double envelope_term(long long k, double x) const;

    FamilyClass family_;
    std::optional<Shape> shape_;
};

/// alpha(x) = sum over the declared class of x^{f(v)}.
SeriesValue alpha(const ClassDecl& decl, double x, const SeriesOptions& opts = {});

/// F_{f,V}(x) over every vertex of the specification.
SeriesValue vertex_series(const RftSpec& spec, double x, const SeriesOptions& opts = {});

/// r(F_{f,V}): minimum of the family radii.
RadiusEstimate radius_F(const RftSpec& spec);

} // namespace rftflow
