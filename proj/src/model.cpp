#include "sparsebeam/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sparsebeam {

Angle Angle::degrees(double deg) {
    if (!std::isfinite(deg) || deg < 0.0 || deg > 180.0)
        throw ValidationError("angle: must lie in [0, 180] degrees, got " + std::to_string(deg));
    return Angle(deg);
}

double Angle::rad() const { return deg_ * std::numbers::pi / 180.0; }

double Angle::cosine() const { return std::cos(rad()); }

void ArrayGrid::validate() const {
    if (n < 2) throw ValidationError("grid.n: need at least 2 candidate positions, got " + std::to_string(n));
    if (!(spacing_ratio > 0.0) || !std::isfinite(spacing_ratio))
        throw ValidationError("grid.spacing_ratio: must be a positive finite number");
}

void Scenario::validate() const {
    grid.validate();
    if (targets.empty()) throw ValidationError("targets: at least one target direction is required");
    if (budget_p < 1 || budget_p > grid.n)
        throw ValidationError("budget_p: must satisfy 1 <= budget_p <= grid.n, got " + std::to_string(budget_p));
    if (!(total_power > 0.0) || !std::isfinite(total_power))
        throw ValidationError("total_power: must be a positive finite number");
    if (trace_reg.size() != targets.size())
        throw ValidationError("trace_reg: need one entry per target (" + std::to_string(targets.size()) +
                              "), got " + std::to_string(trace_reg.size()));
    for (size_t i = 0; i < targets.size(); ++i) {
        if (!(targets[i].weight >= 0.0) || !std::isfinite(targets[i].weight))
            throw ValidationError("targets[" + std::to_string(i) + "].weight: must be finite and >= 0");
        if (!(trace_reg[i] >= 0.0) || !std::isfinite(trace_reg[i]))
            throw ValidationError("trace_reg[" + std::to_string(i) + "]: must be finite and >= 0");
        for (size_t j = i + 1; j < targets.size(); ++j)
            if (targets[i].angle == targets[j].angle)
                throw ValidationError("targets: angles must be pairwise distinct (targets[" + std::to_string(i) +
                                      "] == targets[" + std::to_string(j) + "])");
    }
    for (size_t q = 0; q < undesired.size(); ++q) {
        if (!(undesired[q].weight >= 0.0) || !std::isfinite(undesired[q].weight))
            throw ValidationError("undesired[" + std::to_string(q) + "].weight: must be finite and >= 0");
        for (size_t i = 0; i < targets.size(); ++i)
            if (undesired[q].angle == targets[i].angle)
                throw ValidationError("undesired[" + std::to_string(q) + "]: coincides with targets[" +
                                      std::to_string(i) + "]; the sets must be disjoint");
    }
}

SelectionMask::SelectionMask(std::vector<bool> active) : active_(std::move(active)) {
    if (count() < 1) throw ValidationError("mask: at least one active sensor is required");
}

SelectionMask SelectionMask::from_indices(int n, std::span<const int> indices) {
    std::vector<bool> active(static_cast<size_t>(n), false);
    for (int k : indices) {
        if (k < 0 || k >= n)
            throw DimensionError("mask index " + std::to_string(k) + " outside grid of size " + std::to_string(n));
        active[static_cast<size_t>(k)] = true;
    }
    return SelectionMask(std::move(active));
}

SelectionMask SelectionMask::all_true(int n) {
    return SelectionMask(std::vector<bool>(static_cast<size_t>(n), true));
}

int SelectionMask::count() const {
    return static_cast<int>(std::count(active_.begin(), active_.end(), true));
}

std::vector<int> SelectionMask::indices() const {
    std::vector<int> out;
    for (int k = 0; k < size(); ++k)
        if (active_[static_cast<size_t>(k)]) out.push_back(k);
    return out;
}

std::string SelectionMask::bits() const {
    std::string s(active_.size(), '0');
    for (size_t k = 0; k < active_.size(); ++k)
        if (active_[k]) s[k] = '1';
    return s;
}

bool lex_before(const SelectionMask& a, const SelectionMask& b) {
    int n = std::min(a.size(), b.size());
    for (int k = 0; k < n; ++k) {
        if (a[k] != b[k]) return a[k];  // the mask holding the smaller index wins
    }
    return a.size() < b.size();
}

ComplexVector steering_vector(Angle theta, const ArrayGrid& grid) {
    grid.validate();
    const double phase_step = 2.0 * std::numbers::pi * grid.spacing_ratio * theta.cosine();
    ComplexVector a(grid.n);
    for (int k = 0; k < grid.n; ++k)
        a(k) = std::polar(1.0, phase_step * static_cast<double>(k));
    return a;
}

ComplexVector restrict_to(const ComplexVector& v, const SelectionMask& mask) {
    if (v.size() != mask.size())
        throw DimensionError("restrict_to: vector length " + std::to_string(v.size()) +
                             " != mask length " + std::to_string(mask.size()));
    ComplexVector out(mask.count());
    Eigen::Index j = 0;
    for (int k = 0; k < mask.size(); ++k)
        if (mask[k]) out(j++) = v(k);
    return out;
}

}  // namespace sparsebeam
