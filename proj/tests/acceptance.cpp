// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include "thetadet/certify.hpp"
#include "thetadet/eta.hpp"
#include "thetadet/identities.hpp"
#include "thetadet/logscale.hpp"
#include "thetadet/scan.hpp"
#include "thetadet/spectral.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace thetadet;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream note;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            note << " [" << what << "]";
        }
    }
};

int failures = 0;

void criterion(int id, const char* title, double time_limit, const std::function<void(Outcome&)>& body)
{
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.pass = false;
        o.note << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (time_limit > 0.0 && secs >= time_limit) {
        o.pass = false;
        o.note << " [took " << secs << " s, limit " << time_limit << " s]";
    }
    std::printf("criterion %d: %s  %s (%.3f s)%s\n", id, o.pass ? "PASS" : "FAIL", title, secs, o.note.str().c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
}

TorusShape shape(double a) { return TorusShape{PositiveReal(a)}; }

} // namespace

int main()
{
    criterion(1, "det(1) = 0.34830", 0.1, [](Outcome& o) {
        const DeterminantResult r = determinant(shape(1.0));
        o.note << " det=" << r.det_value;
        o.require(std::abs(r.det_value - 0.34830) <= 5e-5, "value");
    });

    criterion(2, "eta and spectral zeta routes agree", 10.0, [](Outcome& o) {
        for (double a : {0.5, 1.0, 2.0}) {
            const double e = determinant(shape(a)).det_value;
            const double z = zeta_det(shape(a), 1e-8).det_value;
            o.note << " |diff|(" << a << ")=" << std::abs(e - z);
            o.require(std::abs(e - z) <= 1e-6, "alpha " + std::to_string(a));
        }
    });

    criterion(3, "maximum at alpha = 1", 5.0, [](Outcome& o) {
        const auto [arg, value] = maximize_determinant({PositiveReal(0.2), PositiveReal(5.0)}, 1e-10);
        o.note << " argmax-1=" << arg.value() - 1.0;
        o.require(std::abs(arg.value() - 1.0) <= 1e-10, "argmax");
        const double d1 = determinant(shape(1.0)).det_value;
        for (double a : log_grid(0.05, 20.0, 1000)) {
            if (a != 1.0 && !(d1 > determinant(shape(a)).det_value)) {
                o.require(false, "det(1) not above det(" + std::to_string(a) + ")");
            }
        }
    });

    criterion(4, "identity residuals", 5.0, [](Outcome& o) {
        double worst = 0.0;
        for (IdentityKind id : kAllIdentities) {
            for (double x : log_grid(0.05, 20.0, 200)) {
                const ResidualReport r = check_identity(id, PositiveReal(x));
                worst = std::max(worst, r.allowed);
                if (!r.pass()) {
                    o.require(false, std::string(to_string(id)) + " at x=" + std::to_string(x));
                }
            }
        }
        o.note << " max allowance=" << worst;
        o.require(worst <= 1e-10, "allowance");
    });

    criterion(5, "third-order sign and monotonicity scans", 0.0, [](Outcome& o) {
        const AnchoredCurve l3 = xddx_curve(ThetaKind::Theta3, 3);
        o.require(scan_sign("L3 below", log_grid(0.05, 0.99, 200), l3, Sign::Positive).pass, "L3 > 0 below 1");
        o.require(scan_sign("L3 above", log_grid(1.01, 20.0, 200), l3, Sign::Negative).pass, "L3 < 0 above 1");
        o.require(std::abs(l3(1.0).value()) <= 1e-10, "L3(1) = 0");
        const auto grid = log_grid(0.05, 20.0, 200);
        struct Claim {
            const char* name;
            AnchoredCurve f;
            Trend trend;
        };
        const Claim claims[] = {
            {"x t4'/t4 decreasing", x_log_deriv_curve(ThetaKind::Theta4), Trend::StrictlyDecreasing},
            {"x t2'/t2 decreasing", x_log_deriv_curve(ThetaKind::Theta2), Trend::StrictlyDecreasing},
            {"x t3'/t3 increasing", x_log_deriv_curve(ThetaKind::Theta3), Trend::StrictlyIncreasing},
            {"t4'/t4 decreasing", log_deriv_curve(ThetaKind::Theta4), Trend::StrictlyDecreasing},
            {"t2'/t2 increasing", log_deriv_curve(ThetaKind::Theta2), Trend::StrictlyIncreasing},
            {"x^2 t2'/t2 decreasing", x2_log_deriv_curve(ThetaKind::Theta2), Trend::StrictlyDecreasing},
            {"x^2 t4'/t4 decreasing", x2_log_deriv_curve(ThetaKind::Theta4), Trend::StrictlyDecreasing},
        };
        for (const Claim& c : claims) {
            o.require(scan_monotone(c.name, grid, c.f, c.trend).pass, c.name);
        }
    });

    criterion(6, "proof certificates", 10.0, [](Outcome& o) {
        std::vector<Certificate> all = certify_constants();
        for (const Certificate& c : certify_series_bounds(log_grid(1.001, 50.0, 512))) {
            all.push_back(c);
        }
        for (const Certificate& c : certify_polynomials()) {
            all.push_back(c);
        }
        all.push_back(certify_conclusion(log_grid(0.05, 0.99, 256), log_grid(1.01, 20.0, 256)));
        for (const Certificate& c : all) {
            if (!c.pass) {
                std::ostringstream s;
                s << c.name << " margin " << c.min_margin;
                if (c.fail_lo && c.fail_hi) {
                    s << " on [" << *c.fail_lo << ", " << *c.fail_hi << "]";
                }
                o.require(false, s.str());
            }
        }
        bool broken_184 = false;
        for (const Certificate& c : certify_polynomials(184.0)) {
            broken_184 = broken_184 || !c.pass;
        }
        o.require(broken_184, "184 variant should fail");
    });

    criterion(7, "finite-difference cross-validation", 0.0, [](Outcome& o) {
        std::mt19937 rng(1729);
        std::uniform_real_distribution<double> u(0.2, 5.0);
        double worst1 = 0.0;
        double worst2 = 0.0;
        for (int i = 0; i < 50; ++i) {
            const double x = u(rng);
            for (ThetaKind k : {ThetaKind::Theta2, ThetaKind::Theta3, ThetaKind::Theta4}) {
                const TruncationPolicy tight = TruncationPolicy{}.with_tol(1e-11);
                // h balances O(h^2) truncation against O(u/h^n) rounding.
                const double a1 = xddx_log_theta(k, DerivOrder(1), PositiveReal(x), tight).value;
                const double f1 = finite_difference_check(k, DerivOrder(1), PositiveReal(x), 1e-4);
                worst1 = std::max(worst1, std::abs(f1 / a1 - 1.0));
                const double a2 = xddx_log_theta(k, DerivOrder(2), PositiveReal(x), tight).value;
                const double f2 = finite_difference_check(k, DerivOrder(2), PositiveReal(x), 1e-3);
                worst2 = std::max(worst2, std::abs(f2 / a2 - 1.0));
            }
            const double a3 = xddx_log_theta(ThetaKind::Theta3, DerivOrder(3), PositiveReal(x)).value;
            const double f3 = finite_difference_check(ThetaKind::Theta3, DerivOrder(3), PositiveReal(x), 1e-3);
            o.require(std::signbit(a3) == std::signbit(f3), "n=3 sign at x=" + std::to_string(x));
        }
        o.note << " rel n=1 " << worst1 << ", rel n=2 " << worst2;
        o.require(worst1 <= 1e-6, "n=1");
        o.require(worst2 <= 1e-4, "n=2");
    });

    criterion(8, "heat trace factorization", 2.0, [](Outcome& o) {
        double worst = 0.0;
        for (double a : {0.5, 1.0, 2.0, 3.0}) {
            for (double t : {0.02, 0.1, 0.5, 2.0}) {
                const HeatTraceValue h = heat_trace_direct(shape(a), t, LatticeCutoff(60));
                const double d = std::abs(h.value - heat_trace_theta(shape(a), t).value);
                worst = std::max(worst, d);
            }
        }
        o.note << " max diff=" << worst;
        o.require(worst <= 1e-10, "diff");
    });

    criterion(9, "symmetry suite", 0.0, [](Outcome& o) {
        double worst = 0.0;
        const TruncationPolicy tight = TruncationPolicy{}.with_tol(1e-11);
        for (double x : log_grid(0.05, 1.0, 100)) {
            const PositiveReal p(x);
            const PositiveReal q(1.0 / x);
            worst = std::max(worst, std::abs(psi1(p).value - psi1(q).value));
            worst = std::max(worst, std::abs(determinant(TorusShape{p}).det_value - determinant(TorusShape{q}).det_value));
            for (int n = 2; n <= 3; ++n) {
                const double a = xddx_log_theta(ThetaKind::Theta3, DerivOrder(n), p, tight).value;
                const double b = xddx_log_theta(ThetaKind::Theta3, DerivOrder(n), q, tight).value;
                worst = std::max(worst, std::abs(a - (n % 2 == 0 ? 1.0 : -1.0) * b));
            }
        }
        o.note << " max asymmetry=" << worst;
        o.require(worst <= 1e-9, "symmetry");
    });

    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
