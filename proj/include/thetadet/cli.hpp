// Command-line front end: evaluation, scans, identity checks, determinants,
// the extremal search and proof certificates, as CSV or aligned text.
//
// Exit codes: 0 success, 1 a check or certificate failed (or a numerical
// target was missed), 2 usage error.  Needs CLI11.hpp on the include path.
#pragma once

#include "thetadet/certify.hpp"
#include "thetadet/core.hpp"
#include "thetadet/eta.hpp"
#include "thetadet/identities.hpp"
#include "thetadet/logscale.hpp"
#include "thetadet/scan.hpp"
#include "thetadet/spectral.hpp"
#include "thetadet/theta.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace thetadet::cli {

/// Shortest decimal that parses back to the same double (at most 17
/// significant digits).
inline std::string format_number(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

/// Header plus rows of preformatted cells; every row has header arity.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row)
    {
        if (row.size() != header.size()) {
            throw Error(ErrorKind::Domain, "csv row arity does not match header");
        }
        rows.push_back(std::move(row));
    }
};

enum class OutputFormat { Csv, Human };

inline void write_table(std::ostream& out, const CsvTable& t, OutputFormat fmt)
{
    if (fmt == OutputFormat::Csv) {
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                out << (i ? "," : "") << cells[i];
            }
            out << '\n';
        };
        line(t.header);
        for (const auto& r : t.rows) {
            line(r);
        }
        return;
    }
    std::vector<std::size_t> width(t.header.size());
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        width[i] = t.header[i].size();
        for (const auto& r : t.rows) {
            width[i] = std::max(width[i], r[i].size());
        }
    }
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out << (i ? "  " : "") << cells[i];
            if (i + 1 < cells.size()) {
                out << std::string(width[i] - cells[i].size(), ' ');
            }
        }
        out << '\n';
    };
    line(t.header);
    for (const auto& r : t.rows) {
        line(r);
    }
}

/// lo:hi:n[:log|lin]
struct GridSpec {
    double lo = 0.0;
    double hi = 0.0;
    int n = 0;
    GridSpacing spacing = GridSpacing::Log;

    [[nodiscard]] std::vector<double> points() const { return make_grid(lo, hi, n, spacing); }
};

inline GridSpec parse_grid(const std::string& text)
{
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t colon = text.find(':', start);
        parts.push_back(text.substr(start, colon - start));
        if (colon == std::string::npos) {
            break;
        }
        start = colon + 1;
    }
    if (parts.size() != 3 && parts.size() != 4) {
        throw Error(ErrorKind::Domain, "grid must be lo:hi:n[:log|lin], got '" + text + "'");
    }
    auto number = [&](const std::string& s) {
        double v = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
            throw Error(ErrorKind::Domain, "bad number '" + s + "' in grid");
        }
        return v;
    };
    GridSpec g;
    g.lo = number(parts[0]);
    g.hi = number(parts[1]);
    const double n = number(parts[2]);
    if (n != std::floor(n) || n < 2 || n > 1e7) {
        throw Error(ErrorKind::Domain, "grid point count must be an integer >= 2");
    }
    g.n = static_cast<int>(n);
    if (parts.size() == 4) {
        if (parts[3] == "log") {
            g.spacing = GridSpacing::Log;
        } else if (parts[3] == "lin") {
            g.spacing = GridSpacing::Linear;
        } else {
            throw Error(ErrorKind::Domain, "grid spacing must be log or lin");
        }
    }
    // Validates lo/hi/n.
    (void)g.points();
    return g;
}

using Curve = std::function<BoundedValue(double, const TruncationPolicy&)>;

inline const std::map<std::string, Curve, std::less<>>& curve_table()
{
    static const std::map<std::string, Curve, std::less<>> table = [] {
        std::map<std::string, Curve, std::less<>> t;
        const std::pair<const char*, ThetaKind> kinds[] = {
            {"theta2", ThetaKind::Theta2}, {"theta3", ThetaKind::Theta3},
            {"theta4", ThetaKind::Theta4}, {"theta1p", ThetaKind::Theta1Plus}};
        for (const auto& [name, kind] : kinds) {
            const ThetaKind k = kind;
            t[name] = [k](double x, const TruncationPolicy& p) { return theta_series(k, PositiveReal(x), p); };
            t[std::string(name) + "_product"] = [k](double x, const TruncationPolicy& p) {
                return theta_product(k, PositiveReal(x), p);
            };
            t["log_" + std::string(name)] = [k](double x, const TruncationPolicy& p) {
                return log_theta(k, PositiveReal(x), p);
            };
        }
        for (const auto& [name, kind] : kinds) {
            if (kind == ThetaKind::Theta1Plus) {
                continue;
            }
            const ThetaKind k = kind;
            const std::string digit(1, name[5]);
            t["logderiv_theta" + digit] = [k](double x, const TruncationPolicy& p) {
                return log_deriv(k, PositiveReal(x), p);
            };
            // phi_j = x theta_j'/theta_j + 1/4
            t["phi" + digit] = [k](double x, const TruncationPolicy& p) {
                const BoundedValue v = xddx_log_theta(k, DerivOrder(1), PositiveReal(x), p);
                const double s = v.value + 0.25;
                return BoundedValue{s, v.error_bound + kUnitRoundoff * std::abs(s), v.terms_used};
            };
            for (int n = 1; n <= thetadet::detail::max_log_scale_order(k); ++n) {
                t["xddx" + std::to_string(n) + "_log_theta" + digit] = [k, n](double x, const TruncationPolicy& p) {
                    return xddx_log_theta(k, DerivOrder(n), PositiveReal(x), p);
                };
            }
        }
        t["psi1"] = [](double x, const TruncationPolicy& p) { return psi1(PositiveReal(x), p); };
        t["xddx_psi1"] = [](double x, const TruncationPolicy& p) { return log_deriv_psi1(PositiveReal(x), p); };
        t["eta"] = [](double x, const TruncationPolicy& p) { return eta_imag_axis(PositiveReal(x), p); };
        t["det"] = [](double x, const TruncationPolicy& p) {
            const DeterminantResult d = determinant(TorusShape{PositiveReal(x)}, p);
            return BoundedValue{d.det_value, d.error_bound, 1};
        };
        t["height"] = [](double x, const TruncationPolicy& p) {
            const DeterminantResult d = determinant(TorusShape{PositiveReal(x)}, p);
            return BoundedValue{d.height, d.error_bound / d.det_value, 1};
        };
        return t;
    }();
    return table;
}

inline const Curve& find_curve(std::string_view name)
{
    const auto& t = curve_table();
    const auto it = t.find(name);
    if (it == t.end()) {
        throw Error(ErrorKind::UnknownCurve, "no curve named '" + std::string(name) + "'");
    }
    return it->second;
}

inline std::vector<std::string> curve_names()
{
    std::vector<std::string> out;
    for (const auto& [k, v] : curve_table()) {
        out.push_back(k);
    }
    return out;
}

/// Columns x, value, error_bound.
inline CsvTable scan_to_csv(std::string_view fn, const GridSpec& grid, const TruncationPolicy& policy = {})
{
    const Curve& f = find_curve(fn);
    CsvTable t{{"x", "value", "error_bound"}, {}};
    for (double x : grid.points()) {
        const BoundedValue v = f(x, policy);
        t.add_row({format_number(x), format_number(v.value), format_number(v.error_bound)});
    }
    return t;
}

inline constexpr double kDefaultTol = 1e-12;
inline constexpr double kDefaultZetaTol = 1e-6;
inline constexpr double kDefaultMaximizeTol = 1e-10;

namespace detail {

/// Routes a library error to an exit code: bad input is a usage error,
/// anything numerical is a failed check.
inline int exit_code_for(const Error& e)
{
    switch (e.kind()) {
    case ErrorKind::Domain:
    case ErrorKind::UnsupportedKind:
    case ErrorKind::UnsupportedOrder:
    case ErrorKind::UnknownCurve:
    case ErrorKind::BadInterval:
        return 2;
    default:
        return 1;
    }
}

inline std::string yes_no(bool b) { return b ? "pass" : "FAIL"; }

inline std::string optional_number(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

} // namespace detail

/// Parses argv (argv[0] is the program name) and dispatches.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"Theta functions, torus determinants and proof certificates"};
    app.require_subcommand(1, 1);
    // Subcommands inherit this, so global flags may follow the subcommand.
    app.fallthrough();

    std::string format = "csv";
    app.add_option("--format", format, "csv or human")->check(CLI::IsMember({"csv", "human"}))->capture_default_str();

    std::string fn;
    double x = 0.0;
    double alpha = 1.0;
    std::optional<double> tol;
    std::string grid_text;
    std::string route = "eta";
    double lo = 0.2;
    double hi = 5.0;

    auto* eval = app.add_subcommand("eval", "evaluate one curve at one point");
    eval->add_option("--fn", fn, "curve name")->required();
    eval->add_option("--x", x, "argument")->required();
    eval->add_option("--tol", tol, "absolute tolerance (default 1e-12)");

    auto* scan = app.add_subcommand("scan", "tabulate a curve over a grid");
    scan->add_option("--fn", fn, "curve name")->required();
    scan->add_option("--grid", grid_text, "lo:hi:n[:log|lin]")->required();
    scan->add_option("--tol", tol, "absolute tolerance (default 1e-12)");

    auto* idents = app.add_subcommand("identities", "residuals of every functional identity");
    idents->add_option("--grid", grid_text, "lo:hi:n[:log|lin] (default 0.05:20:200)");
    idents->add_option("--x", x, "single point instead of a grid");
    idents->add_option("--tol", tol, "absolute tolerance (default 1e-13)");

    auto* det = app.add_subcommand("det", "determinant of the Laplacian on a rectangular torus");
    det->add_option("--alpha", alpha, "torus parameter")->capture_default_str();
    det->add_option("--route", route, "eta, zeta or all")->check(CLI::IsMember({"eta", "zeta", "all"}))
        ->capture_default_str();
    det->add_option("--tol", tol, "tolerance (eta default 1e-12, zeta quadrature default 1e-6)");

    auto* maximize = app.add_subcommand("maximize", "locate the maximal determinant in [lo, hi]");
    maximize->add_option("--lo", lo, "lower end")->capture_default_str();
    maximize->add_option("--hi", hi, "upper end")->capture_default_str();
    maximize->add_option("--tol", tol, "bracket width (default 1e-10)");

    auto* certify = app.add_subcommand("certify", "certificates for the third-derivative sign proof");
    certify->add_option("--grid", grid_text, "grid for the series bounds (default 1.001:50:512)");

    auto* curves = app.add_subcommand("curves", "list curve names");

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    if (args.empty()) {
        argv.push_back("thetadet");
    }
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    const OutputFormat fmt = format == "human" ? OutputFormat::Human : OutputFormat::Csv;
    const auto& num = format_number;

    try {
        if (*eval) {
            const TruncationPolicy p = TruncationPolicy{}.with_tol(tol.value_or(kDefaultTol));
            p.validate();
            const Curve& f = find_curve(fn);
            const BoundedValue v = f(x, p);
            CsvTable t{{"fn", "x", "value", "error_bound", "terms"}, {}};
            t.add_row({fn, num(x), num(v.value), num(v.error_bound), std::to_string(v.terms_used)});
            write_table(out, t, fmt);
            return 0;
        }
        if (*scan) {
            const TruncationPolicy p = TruncationPolicy{}.with_tol(tol.value_or(kDefaultTol));
            p.validate();
            write_table(out, scan_to_csv(fn, parse_grid(grid_text), p), fmt);
            return 0;
        }
        if (*idents) {
            TruncationPolicy p;
            if (tol) {
                p = p.with_tol(*tol);
            }
            p.validate();
            std::vector<double> xs;
            if (idents->count("--x") > 0) {
                xs.push_back(PositiveReal(x).value());
            } else {
                xs = parse_grid(grid_text.empty() ? "0.05:20:200" : grid_text).points();
            }
            CsvTable t{{"identity", "x", "lhs", "rhs", "residual", "allowed", "status"}, {}};
            bool all = true;
            for (IdentityKind id : kAllIdentities) {
                for (double xi : xs) {
                    const ResidualReport r = check_identity(id, PositiveReal(xi), p);
                    all = all && r.pass();
                    t.add_row({to_string(id), num(xi), num(r.lhs), num(r.rhs), num(r.residual), num(r.allowed),
                               detail::yes_no(r.pass())});
                }
            }
            write_table(out, t, fmt);
            return all ? 0 : 1;
        }
        if (*det) {
            const TorusShape shape{PositiveReal(alpha)};
            CsvTable t{{"route", "alpha", "det", "height", "error_bound"}, {}};
            std::optional<DeterminantResult> eta_res;
            std::optional<DeterminantResult> zeta_res;
            if (route != "zeta") {
                const TruncationPolicy p = TruncationPolicy{}.with_tol(tol.value_or(kDefaultTol));
                p.validate();
                eta_res = determinant(shape, p);
            }
            if (route != "eta") {
                zeta_res = zeta_det(shape, tol.value_or(kDefaultZetaTol));
            }
            for (const auto& r : {eta_res, zeta_res}) {
                if (r) {
                    t.add_row({to_string(r->route), num(alpha), num(r->det_value), num(r->height),
                               num(r->error_bound)});
                }
            }
            write_table(out, t, fmt);
            if (eta_res && zeta_res) {
                // Both routes must agree at the zeta tolerance.
                const double gap = std::abs(eta_res->det_value - zeta_res->det_value);
                const double allowed = std::max(tol.value_or(kDefaultZetaTol), eta_res->error_bound + zeta_res->error_bound);
                if (!(gap <= allowed)) {
                    err << "routes disagree: |eta - zeta| = " << num(gap) << " > " << num(allowed) << '\n';
                    return 1;
                }
            }
            return 0;
        }
        if (*maximize) {
            const double bt = tol.value_or(kDefaultMaximizeTol);
            const auto [arg, value] = maximize_determinant({PositiveReal(lo), PositiveReal(hi)}, bt);
            CsvTable t{{"argmax", "det", "tol"}, {}};
            t.add_row({num(arg.value()), num(value), num(bt)});
            write_table(out, t, fmt);
            return 0;
        }
        if (*certify) {
            std::vector<Certificate> all = certify_constants();
            const std::vector<double> grid =
                grid_text.empty() ? default_certificate_grid() : parse_grid(grid_text).points();
            for (auto&& c : certify_series_bounds(grid)) {
                all.push_back(std::move(c));
            }
            for (auto&& c : certify_polynomials()) {
                all.push_back(std::move(c));
            }
            all.push_back(certify_conclusion(log_grid(0.05, 0.99, 256), log_grid(1.01, 20.0, 256)));
            // The sensitivity note: with 184 in place of 183 the interval
            // argument must break.  This row passes when it breaks.
            const std::vector<Certificate> alt = certify_polynomials(184.0);
            const bool breaks = std::any_of(alt.begin(), alt.end(), [](const Certificate& c) { return !c.pass; });
            Certificate sens = thetadet::detail::make_certificate(
                "sensitivity_184", "with 184 e^{-pi x} the interval argument fails", "constant");
            sens.grid_points = 1;
            sens.pass = breaks;
            sens.min_margin = breaks ? 1.0 : -1.0;
            all.push_back(sens);

            CsvTable t{{"name", "status", "min_margin", "grid_points", "worst_x", "fail_lo", "fail_hi", "domain", "claim"},
                       {}};
            bool ok = true;
            for (const Certificate& c : all) {
                ok = ok && c.pass;
                // Claims contain commas; quote them for CSV.
                const std::string claim = fmt == OutputFormat::Csv ? "\"" + c.claim + "\"" : c.claim;
                const std::string domain = fmt == OutputFormat::Csv ? "\"" + c.domain + "\"" : c.domain;
                t.add_row({c.name, detail::yes_no(c.pass), num(c.min_margin), std::to_string(c.grid_points),
                           std::isnan(c.worst_x) ? "" : num(c.worst_x), detail::optional_number(c.fail_lo),
                           detail::optional_number(c.fail_hi), domain, claim});
            }
            write_table(out, t, fmt);
            return ok ? 0 : 1;
        }
        if (*curves) {
            for (const auto& n : curve_names()) {
                out << n << '\n';
            }
            return 0;
        }
    } catch (const Error& e) {
        err << e.what() << '\n';
        return detail::exit_code_for(e);
    }
    return 2;
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    return run(std::vector<std::string>(argv, argv + argc), out, err);
}

} // namespace thetadet::cli
