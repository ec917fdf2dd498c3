#include "rftflow/genfun.hpp"

#include "rftflow/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace rftflow {

namespace {

// Radius 1 minus this counts as singular.
constexpr double kSingularSlack = 1e-14;

double spectral_radius(const Eigen::MatrixXd& b) {
    if (b.rows() == 0)
        return 0.0;
    if (b.rows() == 1)
        return std::fabs(b(0, 0));
    Eigen::EigenSolver<Eigen::MatrixXd> es(b, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

struct Solved {
    double phi;
    Eigen::VectorXd A;
};

// Solves (B - Id) A = -alpha_{.0} on classes 1..m and combines with row 0.
Solved solve_rows(const Eigen::MatrixXd& a) {
    Eigen::Index m = a.rows() - 1;
    Eigen::MatrixXd mm = a.bottomRightCorner(m, m) - Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd rhs = -a.col(0).tail(m);
    Eigen::VectorXd A = m ? Eigen::VectorXd(mm.partialPivLu().solve(rhs)) : Eigen::VectorXd(0);
    double phi = a(0, 0) + (m ? a.row(0).tail(m).dot(A) : 0.0);
    return {phi, A};
}

} // namespace

std::string to_string(PhiStatus s) {
    switch (s) {
    case PhiStatus::InDomain:
        return "InDomain";
    case PhiStatus::SingularAtOrBefore:
        return "SingularAtOrBefore";
    case PhiStatus::BeyondSeriesRadius:
        return "BeyondSeriesRadius";
    }
    return "?";
}

Eigen::MatrixXd WeightedSystem::matrix_m() const {
    auto n = static_cast<Eigen::Index>(m);
    return a.bottomRightCorner(n, n) - Eigen::MatrixXd::Identity(n, n);
}

WeightedSystem assemble(const QuotientGraph& q, double x, const SeriesOptions& opts) {
    WeightedSystem s;
    s.x = x;
    s.m = q.m();
    s.ell = q.ell;
    s.adjacency = q.adjacency;
    auto n = static_cast<Eigen::Index>(q.classes.size());
    s.alpha.push_back(SeriesValue{std::pow(x, q.spec().height_of(q.root)), 0.0, true});
    for (std::size_t i = 1; i < q.classes.size(); ++i)
        s.alpha.push_back(q.alpha(i, x, opts));
    s.a = Eigen::MatrixXd::Zero(n, n);
    s.a_upper = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (q.adjacency[i][j]) {
                s.a(i, j) = s.alpha[i].value;
                s.a_upper(i, j) = s.alpha[i].upper();
            }
    return s;
}

GenFunEval solve_phi(const QuotientGraph& q, double x, const SeriesOptions& opts) {
    GenFunEval e;
    e.x = x;
    auto m = static_cast<Eigen::Index>(q.m());
    WeightedSystem s;
    try {
        s = assemble(q, x, opts);
    } catch (const DivergenceError&) {
        e.status = PhiStatus::BeyondSeriesRadius;
        e.phi = e.phi_upper = kInfinity;
        e.spectral_radius = kInfinity;
        return e;
    }
    for (const auto& al : s.alpha)
        e.series_within_tolerance = e.series_within_tolerance && al.within_tolerance;
    e.det_m = m ? s.matrix_m().determinant() : 1.0;
    e.spectral_radius = spectral_radius(s.a.bottomRightCorner(m, m));
    if (e.spectral_radius >= 1.0 - kSingularSlack) {
        e.status = PhiStatus::SingularAtOrBefore;
        e.phi = e.phi_upper = kInfinity;
        return e;
    }
    Solved lo = solve_rows(s.a);
    e.phi = lo.phi;
    e.A = lo.A;
    if (spectral_radius(s.a_upper.bottomRightCorner(m, m)) >= 1.0 - kSingularSlack)
        e.phi_upper = kInfinity;
    else
        e.phi_upper = std::max(e.phi, solve_rows(s.a_upper).phi);
    return e;
}

ClosedFormParts closed_form_parts(const WeightedSystem& s) {
    ClosedFormParts p;
    auto ell = static_cast<Eigen::Index>(s.ell);
    std::size_t m = s.m;
    p.ell = s.ell;
    p.x_fw = s.alpha[0].value;
    p.C = s.matrix_m().topLeftCorner(ell, ell);
    p.det_c = ell ? p.C.determinant() : 1.0;
    if (ell && std::fabs(p.det_c) < 1e-300)
        throw NumericalError("constrained block C is singular at x = " + format_number(s.x));

    for (std::size_t k = s.ell + 1; k < m; ++k)
        p.zeta += s.alpha[k].value;
    if (m > s.ell)
        p.alpha_m = s.alpha[m].value;

    p.F.assign(s.ell + 1, 0.0);
    for (std::size_t i = 0; i <= s.ell; ++i)
        for (std::size_t k = s.ell + 1; k <= m; ++k)
            if (s.adjacency[i][k])
                p.F[i] += s.alpha[k].value;

    if (ell == 0) {
        p.phi_tilde_H = s.a(0, 0);
        return p;
    }
    Eigen::VectorXd r0(ell), rf(ell);
    for (Eigen::Index i = 0; i < ell; ++i) {
        auto c = static_cast<std::size_t>(i + 1);
        r0(i) = -s.a(i + 1, 0);
        rf(i) = -s.alpha[c].value * p.F[c];
    }
    auto lu = p.C.partialPivLu();
    Eigen::VectorXd u = lu.solve(r0);
    Eigen::VectorXd g = lu.solve(rf);
    double from_w = 0.0;
    for (Eigen::Index i = 0; i < ell; ++i) {
        p.sigma_H += u(i);
        p.alpha_H_tilde += g(i);
        if (s.adjacency[0][static_cast<std::size_t>(i + 1)]) {
            p.alpha_H += g(i);
            from_w += u(i);
        }
    }
    p.phi_tilde_H = s.a(0, 0) + p.x_fw * from_w;
    return p;
}

ClosedFormParts closed_form_parts(const QuotientGraph& q, double x, const SeriesOptions& opts) {
    return closed_form_parts(assemble(q, x, opts));
}

double phi_closed_form(const QuotientGraph& q, double x, const SeriesOptions& opts) {
    ClosedFormParts p = closed_form_parts(q, x, opts);
    double d = p.denominator();
    if (!(d > 0.0))
        throw NumericalError("closed form denominator " + format_number(d)
                             + " is not positive at x = " + format_number(x));
    return p.x_fw * (p.F[0] + p.alpha_H) * (1.0 + p.sigma_H) / d + p.phi_tilde_H;
}

std::pair<double, double> determinant_identity(const QuotientGraph& q, double x,
                                               const SeriesOptions& opts) {
    WeightedSystem s = assemble(q, x, opts);
    ClosedFormParts p = closed_form_parts(s);
    double det_m = s.m ? s.matrix_m().determinant() : 1.0;
    double sign = ((s.m - s.ell) % 2 == 0) ? 1.0 : -1.0;
    return {det_m / (sign * p.det_c), p.denominator()};
}

bool is_local_perturbation(const RftSpec& spec) {
    if (spec.edges.mode == EdgeMode::CompleteMinusForbidden)
        return true;
    return spec.edges.class_pairs.size() == spec.classes.size() * spec.classes.size();
}

double phi_local_perturbation(const RftSpec& spec, const VertexRef& w, double x,
                              const SeriesOptions& opts) {
    if (!is_local_perturbation(spec))
        throw SpecError("graph is not a finite perturbation of a complete graph");
    std::set<VertexRef> constrained;
    for (const auto& [a, b] : spec.edges.forbidden)
        constrained.insert(a);
    std::set<VertexRef> U = constrained;
    U.insert(w);
    std::vector<VertexRef> inner;
    for (const auto& v : U)
        if (!(v == w))
            inner.push_back(v);

    auto xf = [&](const VertexRef& v) { return std::pow(x, spec.height_of(v)); };
    double F = vertex_series(spec, x, opts).value;
    double sum_u = 0.0;
    for (const auto& u : U)
        sum_u += xf(u);
    // x^f summed over the followers of v outside U.
    auto follow_out = [&](const VertexRef& v) {
        double s = F - sum_u;
        for (const auto& [a, b] : spec.edges.forbidden)
            if (a == v && !U.count(b))
                s -= xf(b);
        return s;
    };

    auto n = static_cast<Eigen::Index>(inner.size());
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd c(n), d(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const VertexRef& v = inner[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < n; ++j)
            if (spec.edge(v, inner[static_cast<std::size_t>(j)]))
                B(i, j) = xf(v);
        c(i) = spec.edge(v, w) ? xf(v) : 0.0;
        d(i) = xf(v) * follow_out(v);
    }
    if (spectral_radius(B) >= 1.0 - kSingularSlack)
        throw NumericalError("resolvent of the perturbed block does not exist at x = "
                             + format_number(x));
    auto lu = (Eigen::MatrixXd::Identity(n, n) - B).partialPivLu();
    Eigen::VectorXd bc = n ? Eigen::VectorXd(lu.solve(c)) : Eigen::VectorXd(0);
    Eigen::VectorXd bd = n ? Eigen::VectorXd(lu.solve(d)) : Eigen::VectorXd(0);

    double sigma = bc.sum(), alpha_all = bd.sum();
    double tilde = spec.edge(w, w) ? 1.0 : 0.0, alpha_w = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (spec.edge(w, inner[static_cast<std::size_t>(i)])) {
            tilde += bc(i);
            alpha_w += bd(i);
        }
    double den = 1.0 + sum_u - F - alpha_all;
    if (!(den > 0.0))
        throw NumericalError("local perturbation denominator " + format_number(den)
                             + " is not positive at x = " + format_number(x));
    double xw = xf(w);
    return xw * tilde + xw * (follow_out(w) + alpha_w) * (1.0 + sigma) / den;
}

} // namespace rftflow
