#pragma once

#include "rftflow/quotient.hpp"

#include <Eigen/Dense>

#include <string>
#include <utility>

namespace rftflow {

/// Quotient-level weights at one x. Index 0 is V_0 = {w}.
struct WeightedSystem {
    double x = 0.0;
    std::size_t m = 0;
    std::size_t ell = 0;
    /// alpha[i] = alpha_i(x); alpha[0] = x^{f(w)}.
    std::vector<SeriesValue> alpha;
    /// a(i, j) = alpha_i if (V_i, V_j) is an edge of H, else 0.
    Eigen::MatrixXd a;
    /// Same with the upper ends of the series enclosures.
    Eigen::MatrixXd a_upper;
    std::vector<std::vector<bool>> adjacency;

    double alpha_ij(std::size_t i, std::size_t j) const { return a(i, j); }
    /// M = B - Id on classes 1..m.
    Eigen::MatrixXd matrix_m() const;
};

enum class PhiStatus { InDomain, SingularAtOrBefore, BeyondSeriesRadius };

std::string to_string(PhiStatus s);

struct GenFunEval {
    double x = 0.0;
    PhiStatus status = PhiStatus::InDomain;
    double phi = 0.0;
    /// phi computed from the upper series enclosures (infinite if those
    /// already leave the domain).
    double phi_upper = 0.0;
    Eigen::VectorXd A;
    double det_m = 0.0;
    /// Spectral radius of B(x); InDomain iff < 1.
    double spectral_radius = 0.0;
    bool series_within_tolerance = true;

    bool in_domain() const { return status == PhiStatus::InDomain; }
};

/// Throws DivergenceError if some class series diverges at x.
WeightedSystem assemble(const QuotientGraph& q, double x, const SeriesOptions& opts = {});

/// Solves M(x) A = -(alpha_{i0}) and returns phi = alpha_00 + sum alpha_0j A_j.
/// Out-of-domain points are reported through the status, not thrown.
GenFunEval solve_phi(const QuotientGraph& q, double x, const SeriesOptions& opts = {});

struct ClosedFormParts {
    std::size_t ell = 0;
    Eigen::MatrixXd C;
    double det_c = 1.0;
    double zeta = 0.0;    // alpha_{ell+1} + ... + alpha_{m-1}
    double alpha_m = 0.0; // alpha_m when m > ell, else 0
    /// F[0] for w, F[i] for class i <= ell: sum of alpha_k over k > ell
    /// with (V_i, V_k) in H.
    std::vector<double> F;
    double alpha_H = 0.0;
    double alpha_H_tilde = 0.0;
    double sigma_H = 0.0;
    double phi_tilde_H = 0.0;
    double x_fw = 0.0; // x^{f(w)}

    double denominator() const { return 1.0 - zeta - alpha_m - alpha_H_tilde; }
};

/// Throws NumericalError when C is singular.
ClosedFormParts closed_form_parts(const QuotientGraph& q, double x, const SeriesOptions& opts = {});
ClosedFormParts closed_form_parts(const WeightedSystem& s);

/// Throws NumericalError when the denominator is not positive.
double phi_closed_form(const QuotientGraph& q, double x, const SeriesOptions& opts = {});

/// Vertex-level evaluation for a finite perturbation of a complete graph.
/// Throws SpecError when the spec is not of that kind.
double phi_local_perturbation(const RftSpec& spec, const VertexRef& w, double x,
                              const SeriesOptions& opts = {});

bool is_local_perturbation(const RftSpec& spec);

/// (det M / ((-1)^{m-ell} det C), 1 - zeta - alpha_m - alpha_H~).
std::pair<double, double> determinant_identity(const QuotientGraph& q, double x,
                                               const SeriesOptions& opts = {});

} // namespace rftflow
