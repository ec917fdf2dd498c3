#include "rftflow/entropy.hpp"

#include "rftflow/errors.hpp"

#include <algorithm>
#include <cmath>

namespace rftflow {

std::string to_string(Mme v) {
    switch (v) {
    case Mme::Exists:
        return "Exists";
    case Mme::DoesNotExist:
        return "DoesNotExist";
    case Mme::Undetermined:
        return "Undetermined";
    }
    return "?";
}

std::optional<double> find_x_tilde0(const QuotientGraph& q, double cap,
                                    const EntropyOptions& opts) {
    if (!(cap > 0.0))
        return std::nullopt;
    std::size_t half = std::max<std::size_t>(opts.grid / 2, 1);
    std::vector<double> grid;
    double g0 = cap * 1e-6, g1 = cap / 2;
    for (std::size_t i = 0; i < half; ++i)
        grid.push_back(g0 * std::pow(g1 / g0, static_cast<double>(i) / half));
    for (std::size_t i = 0; i < half; ++i)
        grid.push_back(g1 + (cap - g1) * static_cast<double>(i) / half);

    double lo = 0.0;
    for (double x : grid) {
        GenFunEval e = solve_phi(q, x, opts.series);
        if (e.status == PhiStatus::BeyondSeriesRadius)
            return std::nullopt;
        if (e.status == PhiStatus::InDomain) {
            lo = x;
            continue;
        }
        double hi = x;
        while (hi - lo > opts.tol) {
            double mid = 0.5 * (lo + hi);
            (solve_phi(q, mid, opts.series).status == PhiStatus::SingularAtOrBefore ? hi : lo) = mid;
        }
        return 0.5 * (lo + hi);
    }
    return std::nullopt;
}

EntropyReport solve_entropy(const QuotientGraph& q, const EntropyOptions& opts) {
    EntropyReport r;
    r.r_F = radius_F(q.spec());
    double rf = r.r_F.exact ? *r.r_F.exact : r.r_F.lower;
    double cap = std::min(rf, 1.0);
    if (!(cap > 0.0))
        throw NumericalError("entropy is infinite: the vertex series diverges for every x > 0");

    r.x_tilde0 = find_x_tilde0(q, cap, opts);
    r.r_phi = r.x_tilde0 ? *r.x_tilde0 : cap;

    // Cor. 3 shortcuts.
    bool det_zero = r.x_tilde0.has_value();
    bool f_diverges = false;
    if (r.r_F.exact && rf <= 1.0) {
        for (const auto& c : q.spec().classes) {
            if (c.is_finite())
                continue;
            FamilySeries fs(c.family());
            auto fr = fs.radius();
            if (fr.exact && *fr.exact == rf && fs.at_radius() == RadiusBehavior::Diverges)
                f_diverges = true;
        }
    }

    double lo = 0.0, hi = r.r_phi;
    std::optional<GenFunEval> at_end;
    if (!r.x_tilde0) {
        GenFunEval e = solve_phi(q, r.r_phi, opts.series);
        if (e.in_domain() && e.phi <= 1.0)
            at_end = e;
        else if (e.in_domain())
            r.root_bracketed = true;
    }
    if (at_end) {
        lo = hi = r.r_phi;
    } else {
        while (hi - lo > opts.tol) {
            double mid = 0.5 * (lo + hi);
            GenFunEval e = solve_phi(q, mid, opts.series);
            if (e.in_domain() && e.phi <= 1.0) {
                lo = mid;
            } else {
                hi = mid;
                r.root_bracketed = r.root_bracketed || e.in_domain();
            }
        }
    }
    if (!(lo > 0.0))
        throw NumericalError("entropy is infinite: phi exceeds 1 arbitrarily close to 0");

    r.x_hat = lo;
    r.entropy = -std::log(lo);
    r.bracket_lo = lo;
    r.bracket_hi = hi;
    r.phi_at_xhat = at_end ? at_end->phi : solve_phi(q, lo, opts.series).phi;

    bool root_at_end = r.r_phi - hi <= opts.tol;
    if (det_zero) {
        r.mme = Mme::Exists;
        r.mme_reason = "det M vanishes below r(F)";
    } else if (f_diverges) {
        r.mme = Mme::Exists;
        r.mme_reason = "F diverges at r(F)";
    } else if (r.root_bracketed && !root_at_end) {
        r.mme = Mme::Exists;
        r.mme_reason = "phi crosses 1 inside the domain";
    } else if (at_end && rf > 1.0 && std::fabs(at_end->phi - 1.0) <= 1e-9) {
        // Finite graph: x = 1 is an ordinary point, phi(1) = 1 is a root.
        r.mme = Mme::Exists;
        r.mme_reason = "phi(1) = 1 on a finite graph";
    } else if (at_end && at_end->phi_upper < 1.0 - opts.tol) {
        r.mme = Mme::DoesNotExist;
        r.mme_reason = "phi(r(phi)) <= " + format_number(at_end->phi_upper) + " < 1";
    } else {
        r.mme = Mme::Undetermined;
        r.mme_reason = root_at_end ? "root within tolerance of r(phi)" : "no certificate";
    }
    return r;
}

} // namespace rftflow
