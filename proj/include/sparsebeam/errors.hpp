#ifndef SPARSEBEAM_ERRORS_HPP
#define SPARSEBEAM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sparsebeam {

// Invalid input shapes (vector/matrix sizes that cannot be combined).
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Config/scenario parsing and invariant violations; message names the field.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A real matrix claimed to carry complex-embedding structure does not.
struct StructureError : std::runtime_error {
    StructureError(const std::string& what, double deviation)
        : std::runtime_error(what), max_deviation(deviation) {}
    double max_deviation;
};

// Floating-point breakdown (NaN/Inf in iterates, eigensolver failure).
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what, long iteration = -1)
        : std::runtime_error(what), iteration(iteration) {}
    long iteration;
};

// A quantity required to be nonzero/positive degenerated to zero.
struct DegenerateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Cholesky hit a non-positive pivot (rho_l = 0 edge case).
struct SingularityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Sparsity search could not reach the requested cardinality.
struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Instance exceeds a configured cap (enumeration count).
struct SizeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Structured-array constructor could not fit the grid.
struct ConstructionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace sparsebeam

#endif
