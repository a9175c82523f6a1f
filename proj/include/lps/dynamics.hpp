#pragma once
#include <cmath>
#include <functional>
#include <vector>

#include "lps/family.hpp"
#include "lps/levelset.hpp"

namespace lps {

enum class Direction { kForward, kBackward };
enum class StopReason { kTimeLimit, kBlowUp, kEquilibrium, kEvent };

struct IntegrateOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double t_max = 1e6;
    double blowup_radius_factor = 8.0;  // times R_hat
    double equilibrium_speed = 1e-13;
    std::size_t max_samples = 4'000'000;
};

struct TrajectorySample {
    double t = 0.0;
    Vec2 p;
    double h_value = 0.0;  // recomputed from the polynomial, never accumulated
};

struct Trajectory {
    Direction direction = Direction::kForward;
    std::vector<TrajectorySample> samples;
    StopReason stop = StopReason::kTimeLimit;
    std::size_t steps_accepted = 0;
    std::size_t steps_rejected = 0;
};

// The vector field (P, Q) at fixed lambda, plus H for diagnostics.
struct CompiledFamily {
    ScalarField H;
    CompiledXY P, Q;
    double r_hat = 0.0;
    double lambda = 0.0;

    CompiledFamily(const FamilySpec& spec, double lambda_value) : r_hat(spec.r_hat), lambda(lambda_value) {
        auto assign = spec.assignments();
        assign[kVarLambda] = lambda_value;
        H = ScalarField(spec.H, assign);
        P = CompiledXY(spec.P, assign);
        Q = CompiledXY(spec.Q, assign);
    }

    Vec2 field(const Vec2& p) const { return {P.eval(p.x, p.y), Q.eval(p.x, p.y)}; }
};

namespace detail {

// Dormand-Prince 4(5) embedded pair.
struct Rk45Step {
    Vec2 y5;       // fifth-order advance
    double error;  // embedded error estimate
    Vec2 k1_next;  // FSAL stage
};

template <class F>
inline Rk45Step rk45_step(const F& f, const Vec2& y, const Vec2& k1, double h) {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                            e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                            e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    Vec2 k2 = f(y + k1 * (a21 * h));
    Vec2 k3 = f(y + k1 * (a31 * h) + k2 * (a32 * h));
    Vec2 k4 = f(y + k1 * (a41 * h) + k2 * (a42 * h) + k3 * (a43 * h));
    Vec2 k5 = f(y + k1 * (a51 * h) + k2 * (a52 * h) + k3 * (a53 * h) + k4 * (a54 * h));
    Vec2 k6 = f(y + k1 * (a61 * h) + k2 * (a62 * h) + k3 * (a63 * h) + k4 * (a64 * h) + k5 * (a65 * h));
    Vec2 y5 = y + (k1 * b1 + k3 * b3 + k4 * b4 + k5 * b5 + k6 * b6) * h;
    Vec2 k7 = f(y5);
    Vec2 err = (k1 * e1 + k3 * e3 + k4 * e4 + k5 * e5 + k6 * e6 + k7 * e7) * h;
    return {y5, err.norm(), k7};
}

// Adaptive driver; calls `visit(t, p)` after every accepted step and stops
// when it returns true (StopReason::kEvent).
template <class F, class Visit>
inline StopReason integrate_adaptive(const F& f, Vec2 y, const IntegrateOptions& opt, double r_hat,
                                     const Visit& visit) {
    double t = 0.0;
    double h = 1e-4;
    Vec2 k1 = f(y);
    if (k1.norm() < opt.equilibrium_speed) return StopReason::kEquilibrium;
    while (t < opt.t_max) {
        h = std::min(h, opt.t_max - t);
        Rk45Step step = rk45_step(f, y, k1, h);
        double scale = opt.abs_tol + opt.rel_tol * std::max(y.norm(), step.y5.norm());
        double ratio = step.error / scale;
        if (ratio <= 1.0) {
            t += h;
            y = step.y5;
            k1 = step.k1_next;
            if (visit(t, y)) return StopReason::kEvent;
            if (y.norm() > opt.blowup_radius_factor * std::max(r_hat, 1.0)) return StopReason::kBlowUp;
            if (k1.norm() < opt.equilibrium_speed) return StopReason::kEquilibrium;
        }
        double factor = (ratio > 0.0) ? 0.9 * std::pow(ratio, -0.2) : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
        if (!(h > 1e-14 * std::max(1.0, std::abs(t))))
            throw StepSizeUnderflowError("integration step size underflow at t = " + std::to_string(t));
    }
    return StopReason::kTimeLimit;
}

}  // namespace detail

// Numerical flow of the family field at fixed lambda. Backward trajectories
// integrate the negated field; reported times decrease.
inline Trajectory integrate(const CompiledFamily& fam, const Vec2& p0, Direction direction,
                            double t_max, const IntegrateOptions& base_opt = {}) {
    if (!std::isfinite(p0.x) || !std::isfinite(p0.y)) throw Error("integrate: p0 must be finite");
    IntegrateOptions opt = base_opt;
    opt.t_max = t_max;
    double sign = (direction == Direction::kForward) ? 1.0 : -1.0;
    auto f = [&](const Vec2& p) { return fam.field(p) * sign; };

    Trajectory traj;
    traj.direction = direction;
    traj.samples.push_back({0.0, p0, static_cast<double>(fam.H.value_ld(p0))});
    traj.stop = detail::integrate_adaptive(f, p0, opt, fam.r_hat, [&](double t, const Vec2& p) {
        traj.samples.push_back({sign * t, p, static_cast<double>(fam.H.value_ld(p))});
        ++traj.steps_accepted;
        return traj.samples.size() >= opt.max_samples;
    });
    return traj;
}

// True when sign(H) is constant along the trajectory and |H| is
// non-decreasing in forward time (non-increasing along backward
// trajectories), with the stated per-step slack.
inline bool monotonicity_check(const Trajectory& traj, double per_step_slack = 1e-10) {
    if (traj.samples.size() < 2) return true;
    double sign0 = traj.samples.front().h_value < 0 ? -1.0 : 1.0;
    bool forward = traj.direction == Direction::kForward;
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
        double h_prev = traj.samples[i - 1].h_value;
        double h_cur = traj.samples[i].h_value;
        if ((h_cur < 0 ? -1.0 : 1.0) != sign0 && std::abs(h_cur) > per_step_slack) return false;
        double growth = std::abs(h_cur) - std::abs(h_prev);
        if (forward ? growth < -per_step_slack : growth > per_step_slack) return false;
    }
    return true;
}

struct CycleResult {
    Vec2 landing;                 // point on G_lambda reached in backward time
    double capture_time = 0.0;    // backward time spent reaching |H| < landing_tol
    double period = 0.0;          // first return time of the forward orbit
    double return_displacement = std::numeric_limits<double>::infinity();
    double max_h_on_cycle = 0.0;  // max |H| over one forward period
    double divergence_plus = 0.0;   // |H(T)| / |H(0)| for the +eps side seed
    double divergence_minus = 0.0;  // same for the -eps side
    std::vector<Vec2> cycle_points;
};

struct CycleOptions {
    double landing_tol = 1e-10;
    // Near a gluing point |H| < landing_tol on a whole two-dimensional
    // neighborhood once 35*lambda^3 drops under the tolerance; requiring a
    // healthy gradient keeps the landing on a well-conditioned stretch.
    double landing_grad_floor = 1e-5;
    double capture_t_max = 1e7;
    double rel_tol = 1e-11;
    double abs_tol = 1e-13;
    double section_window_factor = 0.5;   // crossings count within this * R_hat of the landing
    double depart_radius_factor = 0.02;   // must leave this * R_hat before returning
    double side_epsilon_factor = 1e-4;    // offset of the side seeds, times R_hat
};

// Exhibits the periodic orbit through the level set near `seed`. |H| shrinks
// along backward orbits on both sides of G_lambda, so backward integration
// lands on the cycle; the forward orbit is then followed for one return to a
// transversal section through the landing point.
inline CycleResult locate_cycle(const CompiledFamily& fam, const Vec2& seed,
                                const CycleOptions& copt = {}) {
    IntegrateOptions opt;
    opt.rel_tol = copt.rel_tol;
    opt.abs_tol = copt.abs_tol;

    if (fam.field(seed).norm() < opt.equilibrium_speed)
        throw NoConvergenceToCycleError("seed is an equilibrium of the field");
    if (std::abs(static_cast<double>(fam.H.value_ld(seed))) <= 0.0)
        throw NoConvergenceToCycleError("seed lies on the level set; need |H(seed)| > 0");

    CycleResult res;

    // Backward capture.
    {
        auto f = [&](const Vec2& p) { return fam.field(p) * -1.0; };
        IntegrateOptions bopt = opt;
        bopt.t_max = copt.capture_t_max;
        Vec2 landing;
        double landing_t = 0.0;
        StopReason stop = detail::integrate_adaptive(f, seed, bopt, fam.r_hat,
                                                     [&](double t, const Vec2& p) {
            if (std::abs(static_cast<double>(fam.H.value_ld(p))) < copt.landing_tol &&
                fam.H.gradient(p).norm() > copt.landing_grad_floor) {
                landing = p;
                landing_t = t;
                return true;
            }
            return false;
        });
        if (stop != StopReason::kEvent)
            throw NoConvergenceToCycleError("backward orbit did not reach the level set (reason " +
                                            std::to_string(static_cast<int>(stop)) + ")");
        res.landing = landing;
        res.capture_time = landing_t;
    }

    // Forward return to the section through the landing point.
    Vec2 u = fam.field(res.landing);
    double speed = u.norm();
    if (speed < opt.equilibrium_speed)
        throw NoConvergenceToCycleError("landing point is an equilibrium");
    u = u * (1.0 / speed);

    auto section_s = [&](const Vec2& p) { return dot(p - res.landing, u); };
    double depart = copt.depart_radius_factor * std::max(fam.r_hat, 1.0);
    double window = copt.section_window_factor * std::max(fam.r_hat, 1.0);

    bool departed = false;
    Vec2 prev = res.landing;
    double prev_t = 0.0, prev_s = 0.0;
    bool found = false;
    Vec2 bracket_p;
    double bracket_t0 = 0.0, bracket_t1 = 0.0;

    auto f = [&](const Vec2& p) { return fam.field(p); };
    IntegrateOptions fopt = opt;
    fopt.t_max = 4.0 * std::max(copt.capture_t_max, 1.0);
    detail::integrate_adaptive(f, res.landing, fopt, fam.r_hat, [&](double t, const Vec2& p) {
        if (res.cycle_points.size() >= fopt.max_samples) return true;  // found stays false
        res.cycle_points.push_back(p);
        res.max_h_on_cycle = std::max(res.max_h_on_cycle,
                                      std::abs(static_cast<double>(fam.H.value_ld(p))));
        if (!departed && dist(p, res.landing) > depart) departed = true;
        double s = section_s(p);
        if (departed && prev_s < 0.0 && s >= 0.0 && dist(p, res.landing) < window &&
            dot(fam.field(p), u) > 0.0) {
            bracket_p = prev;
            bracket_t0 = prev_t;
            bracket_t1 = t;
            found = true;
            return true;
        }
        prev = p;
        prev_t = t;
        prev_s = s;
        return false;
    });
    if (!found) throw NoConvergenceToCycleError("forward orbit did not return to the section");

    // Bisect the crossing time inside the bracketing step with single RK4
    // trial steps from the bracket start.
    auto rk4_from = [&](const Vec2& y0, double h) {
        Vec2 k1 = fam.field(y0);
        Vec2 k2 = fam.field(y0 + k1 * (h / 2));
        Vec2 k3 = fam.field(y0 + k2 * (h / 2));
        Vec2 k4 = fam.field(y0 + k3 * h);
        return y0 + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    };
    double lo = 0.0, hi = bracket_t1 - bracket_t0;
    Vec2 cross = rk4_from(bracket_p, hi);
    for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        Vec2 pm = rk4_from(bracket_p, mid);
        if (section_s(pm) >= 0.0) {
            hi = mid;
            cross = pm;
        } else {
            lo = mid;
        }
    }
    res.period = bracket_t0 + hi;
    res.return_displacement = dist(cross, res.landing);

    // One-sided divergence evidence: |H| must grow forward on both sides.
    Vec2 g = fam.H.gradient(res.landing);
    if (g.norm() > 0.0) {
        Vec2 n = g * (1.0 / g.norm());
        double eps = copt.side_epsilon_factor * std::max(fam.r_hat, 1.0);
        for (double side : {1.0, -1.0}) {
            Vec2 s0 = res.landing + n * (side * eps);
            double h0 = std::abs(static_cast<double>(fam.H.value_ld(s0)));
            if (h0 == 0.0) continue;
            IntegrateOptions sopt = opt;
            sopt.t_max = res.period;
            Vec2 end = s0;
            try {
                detail::integrate_adaptive(f, s0, sopt, fam.r_hat, [&](double, const Vec2& p) {
                    end = p;
                    return false;
                });
            } catch (const StepSizeUnderflowError&) {
                // Divergence evidence is best effort; keep the farthest state.
            }
            double hT = std::abs(static_cast<double>(fam.H.value_ld(end)));
            (side > 0 ? res.divergence_plus : res.divergence_minus) = hT / h0;
        }
    }
    return res;
}

inline double point_segment_dist2(const Vec2& p, const Vec2& a, const Vec2& b) {
    Vec2 ab = b - a;
    double len2 = ab.norm2();
    double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
    return (p - (a + ab * t)).norm2();
}

// Groups located cycles that trace the same closed orbit: cycle A matches
// cycle B when A's landing point lies within `separation` of B's orbit
// polyline (the landing sits on its own orbit to the landing tolerance).
inline int distinct_cycle_count(const std::vector<CycleResult>& cycles, double separation) {
    std::size_t n = cycles.size();
    auto near_orbit = [&](const Vec2& p, const std::vector<Vec2>& orbit) {
        double s2 = separation * separation;
        for (std::size_t i = 0; i + 1 < orbit.size(); ++i) {
            if (point_segment_dist2(p, orbit[i], orbit[i + 1]) < s2) return true;
        }
        return false;
    };
    detail::UnionFind uf(n);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            if (near_orbit(cycles[a].landing, cycles[b].cycle_points) ||
                near_orbit(cycles[b].landing, cycles[a].cycle_points))
                uf.unite(a, b);
        }
    }
    std::vector<bool> seen(n, false);
    int count = 0;
    for (std::size_t a = 0; a < n; ++a) {
        std::size_t r = uf.find(a);
        if (!seen[r]) {
            seen[r] = true;
            ++count;
        }
    }
    return count;
}

}  // namespace lps
