#pragma once

#include "rftflow/genfun.hpp"

#include <optional>
#include <string>

namespace rftflow {

enum class Mme { Exists, DoesNotExist, Undetermined };

std::string to_string(Mme v);

struct EntropyOptions {
    /// Width of the final x bracket.
    double tol = 1e-12;
    SeriesOptions series;
    /// Points in the det-M scan (half geometric, half uniform).
    std::size_t grid = 512;
};

struct EntropyReport {
    double x_hat = 0.0;
    double entropy = 0.0;
    RadiusEstimate r_F;
    /// First x in (0, r_F) with det M(x) = 0, if any.
    std::optional<double> x_tilde0;
    /// r(phi): x_tilde0 if present, else min(r_F, 1).
    double r_phi = 0.0;
    double phi_at_xhat = 0.0;
    Mme mme = Mme::Undetermined;
    std::string mme_reason;
    /// Root case: phi(lo) <= 1 < phi(hi). Sup case: lo = hi = r(phi).
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    bool root_bracketed = false;
    std::string path = "linear-system";
};

/// Scans the spectral radius of B(x) on [0, cap) and bisects its first
/// crossing of 1 (= first zero of det M). nullopt if none below cap.
std::optional<double> find_x_tilde0(const QuotientGraph& q, double cap,
                                    const EntropyOptions& opts = {});

/// Throws NumericalError when r(phi) = 0 (infinite entropy).
EntropyReport solve_entropy(const QuotientGraph& q, const EntropyOptions& opts = {});

} // namespace rftflow
