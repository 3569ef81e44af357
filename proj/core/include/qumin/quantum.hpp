#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "qumin/error.hpp"
#include "qumin/rng.hpp"

namespace qumin {

using Complex = std::complex<double>;
using CVec = std::vector<Complex>;
using CMat = std::vector<CVec>;  // row-major nested sequences

enum class QuantumErrorKind {
    DimMismatch,
    ShapeError,
    NormalizationError,
    ConfigError,
    NotBasisColumns,
    NonPowerOfTwo,
    NegativeCount,
};

class QuantumError : public QuminError {
public:
    QuantumError(QuantumErrorKind kind, std::string message)
        : QuminError(ErrorCategory::Runtime, std::move(message)), kind_(kind) {}

    QuantumErrorKind kind() const { return kind_; }

private:
    QuantumErrorKind kind_;
};

/// Normalized amplitude vector of length 2^qubit_count.
struct QuantumState {
    CVec amplitudes;
    int qubit_count = 0;

    /// Validates that the length is a power of two >= 2 and the norm is
    /// within 1e-6 of 1.
    static QuantumState from_amplitudes(CVec amplitudes);
};

struct MeasurementReport {
    struct Group {
        int qubit_width = 0;       // local register size, for binary labels
        bool binary_labels = false;
        std::vector<double> probabilities;
    };
    std::vector<Group> groups;       // one decimal-labeled group for measure()
    std::size_t collapsed_index = 0;
    bool show_collapse = true;       // subsystem reports print marginals only
};

/// "0" for exact zeros, one decimal place for clean values ("0.5", "1.0"),
/// up to 10 significant digits otherwise.
std::string format_probability(double p);
std::vector<std::string> render_report(const MeasurementReport& report);

// -- linear algebra on nested sequences -------------------------------------

std::size_t matrix_rows(const CMat& m);
std::size_t matrix_cols(const CMat& m);  // ShapeError on ragged input
double vector_norm(const CVec& v);
bool is_unitary(const CMat& m, double tol);
bool is_power_of_two(std::size_t n);
int exact_log2(std::size_t n);

/// Matrix-by-vector product (operator application).
CVec apply_matrix(const CMat& m, const CVec& v);
/// Matrix-by-matrix product (operator composition).
CMat matrix_product(const CMat& a, const CMat& b);
/// Kronecker products; (a (x) b)[i*|b|+j] = a[i]*b[j].
CVec kron(const CVec& a, const CVec& b);
CMat kron(const CMat& a, const CMat& b);
/// m applied `times` >= 0 times.
CVec apply_n(const CMat& m, CVec v, long long times);
/// outer(u, v)[i][j] = u[i] * conj(v[j]).
CMat outer_product(const CVec& u, const CVec& v);
/// Discrete Fourier transform matrix: entries[k][j] = exp(2 pi i jk/N)/sqrt(N).
CMat qft_matrix(int n);

/// Builds an operator's matrix by applying the operator-as-function to each
/// standard basis vector; column i is f(e_i). Rectangular results are
/// allowed (the outputs fix the row count).
CMat generate_matrix(const std::function<CVec(const CVec&)>& f, int dim);

/// Lifts the function encoded by a 2^m-by-2^n one-hot column matrix into the
/// reversible oracle U|x,y> = |x, y XOR f(x)> on 2^(n+m) basis states, with
/// |x,y> at index x*2^m + y. Entries are exact 0/1.
CMat oracle_matrix(const CMat& indicator);

struct MeasureResult {
    QuantumState state;  // post-collapse basis state
    MeasurementReport report;
};

/// Computational-basis measurement: Born probabilities are reported
/// pre-collapse; the outcome is sampled by inverse CDF over prefix sums.
MeasureResult measure_state(const CVec& v, SplitMix64& rng);

/// Marginal probabilities per subsystem (see config semantics in the report),
/// then a full-state collapse identical to measure_state.
MeasureResult measure_subsystems(const CVec& v, const std::vector<int>& config,
                                 SplitMix64& rng);

}  // namespace qumin
