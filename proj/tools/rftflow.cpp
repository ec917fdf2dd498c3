// rftflow: entropy of special flows over countable Markov shifts.

#include "rftflow/cycle_oracle.hpp"
#include "rftflow/entropy.hpp"
#include "rftflow/errors.hpp"
#include "rftflow/genfun.hpp"
#include "rftflow/quotient.hpp"
#include "rftflow/series.hpp"
#include "rftflow/spec.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace rftflow;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "rftflow 0.1.0";

struct RunConfig {
    std::string spec_path;
    std::string root;
    double tol = 1e-12;
    std::string format = "text";
    std::vector<double> xs;
    std::size_t max_len = 8;
    std::size_t trunc = 10;
};

json num(double v) {
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    if (std::isnan(v))
        return "nan";
    return v;
}

std::string fmt(double v) {
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    return format_number(v);
}

json radius_json(const RadiusEstimate& r) {
    return {{"lower", num(r.lower)},
            {"upper", num(r.upper)},
            {"exact", r.exact ? num(*r.exact) : json(nullptr)}};
}

std::string radius_text(const RadiusEstimate& r) {
    if (r.exact)
        return fmt(*r.exact) + " (exact)";
    return "[" + fmt(r.lower) + ", " + fmt(r.upper) + "]";
}

void row(std::ostream& out, const std::string& key, const std::string& value) {
    out << std::left << std::setw(12) << key << value << "\n";
}

int cmd_entropy(const RunConfig& cfg) {
    RftSpec spec = load_spec(cfg.spec_path);
    QuotientGraph q = build_quotient(spec, cfg.root);
    EntropyOptions opts;
    opts.tol = cfg.tol;
    opts.series.tol = cfg.tol;
    EntropyReport r = solve_entropy(q, opts);
    if (cfg.format == "json") {
        json j = {{"version", kVersion},
                  {"spec", cfg.spec_path},
                  {"root", spec.label_of(q.root)},
                  {"x_hat", num(r.x_hat)},
                  {"entropy", num(r.entropy)},
                  {"r_F", radius_json(r.r_F)},
                  {"x_tilde0", r.x_tilde0 ? num(*r.x_tilde0) : json(nullptr)},
                  {"r_phi", num(r.r_phi)},
                  {"phi_at_xhat", num(r.phi_at_xhat)},
                  {"mme", to_string(r.mme)},
                  {"mme_reason", r.mme_reason},
                  {"bracket", {{"lo", num(r.bracket_lo)}, {"hi", num(r.bracket_hi)}}},
                  {"path", r.path}};
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    std::cout << kVersion << "\n";
    row(std::cout, "spec", cfg.spec_path);
    row(std::cout, "root", spec.label_of(q.root));
    row(std::cout, "x_hat", fmt(r.x_hat));
    row(std::cout, "entropy", fmt(r.entropy));
    row(std::cout, "r_F", radius_text(r.r_F));
    row(std::cout, "x_tilde0", r.x_tilde0 ? fmt(*r.x_tilde0) : "none below r_F");
    row(std::cout, "r_phi", fmt(r.r_phi));
    row(std::cout, "phi(x_hat)", fmt(r.phi_at_xhat));
    row(std::cout, "mme", to_string(r.mme) + " (" + r.mme_reason + ")");
    row(std::cout, "bracket", "[" + fmt(r.bracket_lo) + ", " + fmt(r.bracket_hi) + "]");
    row(std::cout, "path", r.path);
    return 0;
}

int cmd_phi(const RunConfig& cfg) {
    RftSpec spec = load_spec(cfg.spec_path);
    QuotientGraph q = build_quotient(spec, cfg.root);
    SeriesOptions so{cfg.tol};
    json rows = json::array();
    for (double x : cfg.xs) {
        GenFunEval e = solve_phi(q, x, so);
        json r = {{"x", num(x)}, {"status", to_string(e.status)}, {"phi", num(e.phi)},
                  {"det_m", num(e.det_m)}};
        if (e.in_domain()) {
            json a = json::array();
            for (Eigen::Index i = 0; i < e.A.size(); ++i)
                a.push_back(num(e.A(i)));
            r["A"] = a;
        }
        rows.push_back(r);
    }
    if (cfg.format == "json") {
        std::cout << json{{"version", kVersion}, {"spec", cfg.spec_path}, {"rows", rows}}.dump(2)
                  << "\n";
        return 0;
    }
    std::cout << kVersion << "\n";
    std::cout << std::left << std::setw(24) << "x" << std::setw(20) << "status" << std::setw(24)
              << "phi" << std::setw(24) << "det_M" << "A\n";
    for (const auto& r : rows) {
        std::ostringstream a;
        if (r.contains("A"))
            for (const auto& v : r["A"])
                a << (a.tellp() ? " " : "") << format_number(v.get<double>());
        auto s = [](const json& v) {
            return v.is_string() ? v.get<std::string>() : format_number(v.get<double>());
        };
        std::cout << std::left << std::setw(24) << s(r["x"]) << std::setw(20)
                  << r["status"].get<std::string>() << std::setw(24) << s(r["phi"])
                  << std::setw(24) << s(r["det_m"]) << a.str() << "\n";
    }
    return 0;
}

int cmd_radius(const RunConfig& cfg) {
    RftSpec spec = load_spec(cfg.spec_path);
    RadiusEstimate r = radius_F(spec);
    json fams = json::array();
    for (const auto& c : spec.classes) {
        if (c.is_finite())
            continue;
        FamilySeries fs(c.family());
        auto behaviour = fs.at_radius();
        fams.push_back({{"class", c.name},
                        {"radius", radius_json(fs.radius())},
                        {"at_radius", behaviour == RadiusBehavior::Converges ? "converges"
                                      : behaviour == RadiusBehavior::Diverges ? "diverges"
                                                                              : "unknown"}});
    }
    if (cfg.format == "json") {
        std::cout << json{{"version", kVersion}, {"r_F", radius_json(r)}, {"families", fams}}
                         .dump(2)
                  << "\n";
        return 0;
    }
    std::cout << kVersion << "\n";
    row(std::cout, "r_F", radius_text(r));
    for (const auto& f : fams)
        row(std::cout, f["class"].get<std::string>(),
            "at radius: " + f["at_radius"].get<std::string>());
    return 0;
}

int cmd_oracle(const RunConfig& cfg) {
    RftSpec spec = load_spec(cfg.spec_path);
    QuotientGraph q = build_quotient(spec, cfg.root);
    TruncatedGraph g = truncate(spec, q.root, cfg.trunc);
    CyclePoly poly = enumerate_cycles(g, cfg.max_len);
    SeriesOptions so{cfg.tol};
    json out = {{"version", kVersion},
                {"spec", cfg.spec_path},
                {"vertices", g.size()},
                {"max_len", cfg.max_len},
                {"empty", poly.empty()}};
    json pts = json::array();
    for (double x : cfg.xs) {
        GenFunEval e = solve_phi(q, x, so);
        json by_len = json::array();
        for (std::size_t len = 1; len <= cfg.max_len; ++len)
            by_len.push_back({{"L", len}, {"cycles", poly.count(len)},
                              {"phi_truncated", num(phi_truncated(poly, x, len))}});
        double full = phi_truncated(poly, x);
        pts.push_back({{"x", num(x)},
                       {"phi", num(e.phi)},
                       {"phi_truncated", num(full)},
                       {"gap", num(e.phi - full)},
                       {"by_length", by_len}});
    }
    out["points"] = pts;
    if (cfg.format == "json") {
        std::cout << out.dump(2) << "\n";
        return 0;
    }
    std::cout << kVersion << "\n";
    row(std::cout, "vertices", std::to_string(g.size()));
    if (poly.empty())
        std::cout << "no w-cycles of length <= " << cfg.max_len << "\n";
    for (const auto& p : pts) {
        std::cout << "x = " << fmt(p["x"].get<double>()) << "\n";
        std::cout << "  " << std::left << std::setw(6) << "L" << std::setw(22) << "cycles"
                  << "phi_L\n";
        for (const auto& r : p["by_length"]) {
            double v = r["phi_truncated"].get<double>();
            std::cout << "  " << std::left << std::setw(6) << r["L"].get<std::size_t>()
                      << std::setw(22) << r["cycles"].get<std::uint64_t>() << fmt(v) << "\n";
        }
        auto s = [](const json& v) {
            return v.is_string() ? v.get<std::string>() : format_number(v.get<double>());
        };
        std::cout << "  phi = " << s(p["phi"]) << ", gap = " << s(p["gap"]) << "\n";
    }
    return 0;
}

int cmd_partition(const RunConfig& cfg) {
    RftSpec spec = load_spec(cfg.spec_path);
    auto parts = refine_partition(spec);
    QuotientGraph q = build_quotient(spec, cfg.root);
    LevelCheck lc = tree_level_check(q);
    json p = json::array(), w = json::array();
    for (const auto& c : parts)
        p.push_back(describe(spec, c));
    for (std::size_t i = 0; i < q.classes.size(); ++i) {
        json f = json::array();
        for (std::size_t j : q.followers(i))
            f.push_back(j);
        w.push_back({{"index", i},
                     {"class", describe(spec, q.classes[i])},
                     {"followers", f},
                     {"level", lc.level[i]}});
    }
    json out = {{"version", kVersion}, {"partition", p}, {"quotient", w},
                {"m", q.m()}, {"ell", q.ell}, {"level_bound", lc.bound},
                {"level_ok", lc.ok}};
    if (cfg.format == "json") {
        std::cout << out.dump(2) << "\n";
        return 0;
    }
    std::cout << kVersion << "\n";
    std::cout << "partition P:\n";
    for (const auto& c : p)
        std::cout << "  " << c.get<std::string>() << "\n";
    std::cout << "quotient (m = " << q.m() << ", ell = " << q.ell << "):\n";
    for (const auto& c : w) {
        std::ostringstream f;
        for (const auto& j : c["followers"])
            f << (f.tellp() ? " " : "") << j.get<std::size_t>();
        std::cout << "  V" << c["index"].get<std::size_t>() << " = "
                  << c["class"].get<std::string>() << "  -> {" << f.str() << "}  level "
                  << c["level"].get<std::size_t>() << "\n";
    }
    std::cout << "level bound " << lc.bound << (lc.ok ? " ok" : " VIOLATED") << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Entropy and generating functions of special flows over RFT Markov chains"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    RunConfig cfg;

    auto common = [&](CLI::App* sub, bool root) {
        sub->add_option("spec", cfg.spec_path, "Chain specification file")->required()
            ->check(CLI::ExistingFile);
        if (root)
            sub->add_option("--root", cfg.root, "Root vertex w (default: the spec's root)");
        sub->add_option("--tol", cfg.tol, "Tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--format", cfg.format, "Output format")
            ->check(CLI::IsMember({"text", "json"}));
    };
    auto* entropy = app.add_subcommand("entropy", "Topological entropy and MME verdict");
    common(entropy, true);
    auto* phi = app.add_subcommand("phi", "Evaluate phi, A_i and det M at given x");
    common(phi, true);
    phi->add_option("-x,--x", cfg.xs, "Points (repeatable or comma separated)")
        ->required()->delimiter(',')->check(CLI::NonNegativeNumber);
    auto* radius = app.add_subcommand("radius", "Radius of convergence of F");
    common(radius, false);
    auto* oracle = app.add_subcommand("oracle", "Brute-force cycle enumeration");
    common(oracle, true);
    oracle->add_option("-L,--max-len", cfg.max_len, "Maximum cycle length")
        ->check(CLI::PositiveNumber);
    oracle->add_option("-N,--truncate", cfg.trunc, "Indices kept per family")
        ->check(CLI::PositiveNumber);
    oracle->add_option("-x,--x", cfg.xs, "Points")->delimiter(',')->check(CLI::NonNegativeNumber);
    auto* partition = app.add_subcommand("partition", "Partition P and quotient graph H");
    common(partition, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    if (oracle->parsed() && cfg.xs.empty())
        cfg.xs = {0.2};

    try {
        if (entropy->parsed())
            return cmd_entropy(cfg);
        if (phi->parsed())
            return cmd_phi(cfg);
        if (radius->parsed())
            return cmd_radius(cfg);
        if (oracle->parsed())
            return cmd_oracle(cfg);
        return cmd_partition(cfg);
    } catch (const SpecError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return 4;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    }
}
