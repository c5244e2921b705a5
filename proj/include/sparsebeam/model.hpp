#ifndef SPARSEBEAM_MODEL_HPP
#define SPARSEBEAM_MODEL_HPP

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "sparsebeam/errors.hpp"

namespace sparsebeam {

using ComplexVector = Eigen::VectorXcd;

// Direction measured from the array axis: endfire = 0 deg, broadside = 90 deg.
class Angle {
  public:
    static Angle degrees(double deg);

    double deg() const { return deg_; }
    double rad() const;
    double cosine() const;

    friend bool operator==(const Angle& a, const Angle& b) { return a.deg_ == b.deg_; }

  private:
    explicit Angle(double deg) : deg_(deg) {}
    double deg_;
};

// Uniform grid of candidate sensor positions.
struct ArrayGrid {
    int n = 0;                   // candidate position count
    double spacing_ratio = 0.5;  // element spacing over wavelength, d/lambda

    void validate() const;
};

struct WeightedAngle {
    Angle angle;
    double weight = 1.0;
};

// Full design instance: grid, look directions, weights, sparsity budget.
struct Scenario {
    ArrayGrid grid;
    std::vector<WeightedAngle> targets;    // L >= 1
    std::vector<WeightedAngle> undesired;  // Q >= 0
    std::vector<double> trace_reg;         // rho_l, one per target
    int budget_p = 0;                      // sensors to activate
    double total_power = 1.0;

    int n() const { return grid.n; }
    int num_targets() const { return static_cast<int>(targets.size()); }
    int num_undesired() const { return static_cast<int>(undesired.size()); }

    // Throws ValidationError naming the offending field.
    void validate() const;
};

// Boolean on/off pattern over the candidate grid.
class SelectionMask {
  public:
    explicit SelectionMask(std::vector<bool> active);
    static SelectionMask from_indices(int n, std::span<const int> indices);
    static SelectionMask all_true(int n);

    int size() const { return static_cast<int>(active_.size()); }
    int count() const;
    bool operator[](int k) const { return active_[static_cast<size_t>(k)]; }
    std::vector<int> indices() const;
    std::string bits() const;  // e.g. "110100"

    friend bool operator==(const SelectionMask&, const SelectionMask&) = default;
    // Subset-lexicographic order: the mask containing the smallest
    // differing index comes first.
    friend bool lex_before(const SelectionMask& a, const SelectionMask& b);

  private:
    std::vector<bool> active_;
};

// Plane-wave phase progression across the grid, entry k = exp(j*2*pi*ratio*k*cos(theta)).
ComplexVector steering_vector(Angle theta, const ArrayGrid& grid);

// Subvector of entries where the mask is true, order preserved.
ComplexVector restrict_to(const ComplexVector& v, const SelectionMask& mask);

}  // namespace sparsebeam

#endif
