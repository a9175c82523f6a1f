#pragma once
#include <array>
#include <map>
#include <vector>

#include "lps/geometry.hpp"
#include "lps/polynomial.hpp"

namespace lps {

// Dense bivariate Horner form of a Polynomial with every non-(x,y) variable
// substituted numerically. The double path is the fast grid evaluator; the
// long double path is used for residual tests near cancellation, where plain
// double rounding noise can exceed the refinement tolerances.
class CompiledXY {
public:
    CompiledXY() = default;

    CompiledXY(const Polynomial& p, const std::map<int, double>& assignments) {
        nx_ = std::max(0, p.degree_in(kVarX)) + 1;
        ny_ = std::max(0, p.degree_in(kVarY)) + 1;
        cd_.assign(static_cast<std::size_t>(nx_) * ny_, 0.0);
        cl_.assign(static_cast<std::size_t>(nx_) * ny_, 0.0L);
        for (const auto& [m, c] : p.terms()) {
            long double v = to_long_double(c);
            for (int var = 0; var < kMaxVars; ++var) {
                if (var == kVarX || var == kVarY || m.exp[var] == 0) continue;
                auto it = assignments.find(var);
                if (it == assignments.end())
                    throw Error("compile: no value for variable " + var_name(var));
                for (int k = 0; k < m.exp[var]; ++k) v *= static_cast<long double>(it->second);
            }
            auto idx = static_cast<std::size_t>(m.exp[kVarX]) * ny_ + m.exp[kVarY];
            cl_[idx] += v;
        }
        for (std::size_t i = 0; i < cl_.size(); ++i) cd_[i] = static_cast<double>(cl_[i]);
    }

    double eval(double x, double y) const {
        double acc = 0.0;
        for (int a = nx_ - 1; a >= 0; --a) {
            const double* row = cd_.data() + static_cast<std::size_t>(a) * ny_;
            double inner = 0.0;
            for (int b = ny_ - 1; b >= 0; --b) inner = inner * y + row[b];
            acc = acc * x + inner;
        }
        return acc;
    }

    long double eval_ld(long double x, long double y) const {
        long double acc = 0.0L;
        for (int a = nx_ - 1; a >= 0; --a) {
            const long double* row = cl_.data() + static_cast<std::size_t>(a) * ny_;
            long double inner = 0.0L;
            for (int b = ny_ - 1; b >= 0; --b) inner = inner * y + row[b];
            acc = acc * x + inner;
        }
        return acc;
    }

    bool empty() const { return cd_.empty(); }

private:
    int nx_ = 0, ny_ = 0;
    std::vector<double> cd_;
    std::vector<long double> cl_;
};

// A scalar field given by a compiled polynomial and its gradient.
struct ScalarField {
    CompiledXY value;
    CompiledXY dx;
    CompiledXY dy;

    ScalarField() = default;
    ScalarField(const Polynomial& p, const std::map<int, double>& assignments)
        : value(p, assignments),
          dx(p.differentiate(kVarX), assignments),
          dy(p.differentiate(kVarY), assignments) {}

    double operator()(double x, double y) const { return value.eval(x, y); }
    long double value_ld(const Vec2& p) const { return value.eval_ld(p.x, p.y); }
    Vec2 gradient(const Vec2& p) const { return {dx.eval(p.x, p.y), dy.eval(p.x, p.y)}; }
};

}  // namespace lps
