#pragma once

#include <array>
#include <cassert>
#include <cstddef>
#include <span>

namespace pathdist {

/*
 * Dense polynomial of total degree <= 2 in 2 or 4 variables.
 *
 * Coefficients are stored as [1, x0..x(k-1), x_i x_j for i <= j] in
 * row-major upper-triangle order: 6 coefficients for two variables and 15
 * for four.
 */
class QuadPoly {
public:
    static constexpr int kMaxArity = 4;
    static constexpr int kMaxCoefficients = 15;

    static constexpr int coefficient_count(int arity) {
        return 1 + arity + arity * (arity + 1) / 2;
    }

    QuadPoly() = default;
    explicit QuadPoly(int arity) : arity_(arity) { assert(arity == 0 || arity == 2 || arity == 4); }

    int arity() const { return arity_; }
    int size() const { return coefficient_count(arity_); }
    std::span<const double> coefficients() const { return {coef_.data(), static_cast<std::size_t>(size())}; }

    double& constant() { return coef_[0]; }
    double constant() const { return coef_[0]; }
    double& linear(int i) { return coef_[1 + i]; }
    double linear(int i) const { return coef_[1 + i]; }
    double& quadratic(int i, int j) { return coef_[quad_index(i, j)]; }
    double quadratic(int i, int j) const { return coef_[quad_index(i, j)]; }

    double evaluate(std::span<const double> x) const {
        assert(static_cast<int>(x.size()) == arity_);
        double value = coef_[0];
        for (int i = 0; i < arity_; ++i) {
            value += coef_[1 + i] * x[i];
        }
        for (int i = 0; i < arity_; ++i) {
            for (int j = i; j < arity_; ++j) {
                value += quadratic(i, j) * x[i] * x[j];
            }
        }
        return value;
    }

    friend bool operator==(const QuadPoly& a, const QuadPoly& b) {
        if (a.arity_ != b.arity_) {
            return false;
        }
        for (int i = 0; i < a.size(); ++i) {
            if (a.coef_[i] != b.coef_[i]) {
                return false;
            }
        }
        return true;
    }

    QuadPoly& operator+=(const QuadPoly& other) {
        assert(arity_ == other.arity_);
        for (int i = 0; i < size(); ++i) {
            coef_[i] += other.coef_[i];
        }
        return *this;
    }

private:
    int quad_index(int i, int j) const {
        if (i > j) {
            const int t = i;
            i = j;
            j = t;
        }
        return 1 + arity_ + arity_ * i - i * (i - 1) / 2 + (j - i);
    }

    int arity_ = 0;
    std::array<double, kMaxCoefficients> coef_{};
};

/*
 * One variable of a substitution: a constant plus the sum of up to two
 * target variables (each with coefficient one).
 */
struct SumTerm {
    double constant = 0.0;
    int count = 0;
    std::array<int, 2> vars{};

    void add_var(int v) {
        assert(count < 2);
        vars[count++] = v;
    }
};

/*
 * Returns p(y) where each variable x_i of p is replaced by map[i], giving a
 * polynomial in `target_arity` variables. Total degree stays at most two.
 */
inline QuadPoly substitute(const QuadPoly& p, std::span<const SumTerm> map, int target_arity) {
    assert(static_cast<int>(map.size()) == p.arity());
    QuadPoly out(target_arity);
    out.constant() = p.constant();
    for (int i = 0; i < p.arity(); ++i) {
        const double a = p.linear(i);
        if (a == 0.0) {
            continue;
        }
        const SumTerm& t = map[i];
        out.constant() += a * t.constant;
        for (int k = 0; k < t.count; ++k) {
            out.linear(t.vars[k]) += a;
        }
    }
    for (int i = 0; i < p.arity(); ++i) {
        for (int j = i; j < p.arity(); ++j) {
            const double a = p.quadratic(i, j);
            if (a == 0.0) {
                continue;
            }
            const SumTerm& s = map[i];
            const SumTerm& t = map[j];
            out.constant() += a * s.constant * t.constant;
            for (int k = 0; k < t.count; ++k) {
                out.linear(t.vars[k]) += a * s.constant;
            }
            for (int k = 0; k < s.count; ++k) {
                out.linear(s.vars[k]) += a * t.constant;
            }
            for (int k = 0; k < s.count; ++k) {
                for (int l = 0; l < t.count; ++l) {
                    out.quadratic(s.vars[k], t.vars[l]) += a;
                }
            }
        }
    }
    return out;
}

}  // namespace pathdist
