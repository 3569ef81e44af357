#include "qumin/quantum.hpp"

#include <cmath>
#include <cstdio>

namespace qumin {

namespace {
constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void fail(QuantumErrorKind kind, std::string message) {
    throw QuantumError(kind, std::move(message));
}
}  // namespace

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

int exact_log2(std::size_t n) {
    int k = 0;
    while ((std::size_t{1} << k) < n) ++k;
    return k;
}

std::size_t matrix_rows(const CMat& m) { return m.size(); }

std::size_t matrix_cols(const CMat& m) {
    if (m.empty()) return 0;
    std::size_t cols = m.front().size();
    for (const CVec& row : m)
        if (row.size() != cols)
            fail(QuantumErrorKind::ShapeError, "matrix rows have inconsistent lengths");
    return cols;
}

double vector_norm(const CVec& v) {
    double s = 0;
    for (const Complex& a : v) s += std::norm(a);
    return std::sqrt(s);
}

bool is_unitary(const CMat& m, double tol) {
    std::size_t n = matrix_rows(m);
    if (n == 0 || matrix_cols(m) != n) return false;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            Complex dot = 0;  // (M Mdag)[i][j]
            for (std::size_t k = 0; k < n; ++k) dot += m[i][k] * std::conj(m[j][k]);
            Complex want = (i == j) ? Complex{1, 0} : Complex{0, 0};
            if (std::abs(dot - want) > tol) return false;
        }
    }
    return true;
}

QuantumState QuantumState::from_amplitudes(CVec amplitudes) {
    std::size_t d = amplitudes.size();
    if (d < 2 || !is_power_of_two(d))
        fail(QuantumErrorKind::NonPowerOfTwo,
             "a state needs a power-of-two number of amplitudes (got " +
                 std::to_string(d) + ")");
    double norm = vector_norm(amplitudes);
    if (std::abs(norm - 1.0) > 1e-9)
        fail(QuantumErrorKind::NormalizationError,
             "state is not normalized (norm " + std::to_string(norm) + ")");
    return QuantumState{std::move(amplitudes), exact_log2(d)};
}

CVec apply_matrix(const CMat& m, const CVec& v) {
    std::size_t cols = matrix_cols(m);
    if (cols != v.size())
        fail(QuantumErrorKind::DimMismatch,
             "operator expects dimension " + std::to_string(cols) + ", state has " +
                 std::to_string(v.size()));
    CVec out(matrix_rows(m), Complex{0, 0});
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < cols; ++j) out[i] += m[i][j] * v[j];
    return out;
}

CMat matrix_product(const CMat& a, const CMat& b) {
    std::size_t inner = matrix_cols(a);
    std::size_t b_rows = matrix_rows(b);
    std::size_t b_cols = matrix_cols(b);
    if (inner != b_rows)
        fail(QuantumErrorKind::DimMismatch,
             "cannot compose a " + std::to_string(a.size()) + "x" + std::to_string(inner) +
                 " operator with a " + std::to_string(b_rows) + "x" + std::to_string(b_cols) +
                 " operator");
    CMat out(matrix_rows(a), CVec(b_cols, Complex{0, 0}));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < inner; ++k) {
            Complex aik = a[i][k];
            if (aik == Complex{0, 0}) continue;
            for (std::size_t j = 0; j < b_cols; ++j) out[i][j] += aik * b[k][j];
        }
    return out;
}

CVec kron(const CVec& a, const CVec& b) {
    CVec out;
    out.reserve(a.size() * b.size());
    for (const Complex& x : a)
        for (const Complex& y : b) out.push_back(x * y);
    return out;
}

CMat kron(const CMat& a, const CMat& b) {
    std::size_t ar = matrix_rows(a), ac = matrix_cols(a);
    std::size_t br = matrix_rows(b), bc = matrix_cols(b);
    CMat out(ar * br, CVec(ac * bc, Complex{0, 0}));
    for (std::size_t i = 0; i < ar; ++i)
        for (std::size_t j = 0; j < ac; ++j)
            for (std::size_t k = 0; k < br; ++k)
                for (std::size_t l = 0; l < bc; ++l)
                    out[i * br + k][j * bc + l] = a[i][j] * b[k][l];
    return out;
}

CVec apply_n(const CMat& m, CVec v, long long times) {
    if (times < 0)
        fail(QuantumErrorKind::NegativeCount, "applyN count must be non-negative");
    for (long long i = 0; i < times; ++i) v = apply_matrix(m, v);
    return v;
}

CMat outer_product(const CVec& u, const CVec& v) {
    if (u.size() != v.size())
        fail(QuantumErrorKind::ShapeError, "outer product needs vectors of equal length");
    CMat out(u.size(), CVec(v.size()));
    for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) out[i][j] = u[i] * std::conj(v[j]);
    return out;
}

CMat qft_matrix(int n) {
    if (n < 1) fail(QuantumErrorKind::ShapeError, "qftMatrix needs N >= 1");
    CMat out(n, CVec(n));
    double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
            double angle = 2.0 * kPi * static_cast<double>(j) * static_cast<double>(k) /
                           static_cast<double>(n);
            out[k][j] = std::polar(scale, angle);
        }
    return out;
}

CMat generate_matrix(const std::function<CVec(const CVec&)>& f, int dim) {
    if (dim < 1) fail(QuantumErrorKind::ShapeError, "generateMatrix needs dim >= 1");
    std::vector<CVec> columns;
    columns.reserve(dim);
    for (int i = 0; i < dim; ++i) {
        CVec basis(dim, Complex{0, 0});
        basis[i] = Complex{1, 0};
        columns.push_back(f(basis));
        if (columns.back().size() != columns.front().size())
            fail(QuantumErrorKind::ShapeError,
                 "operator produced outputs of inconsistent length");
    }
    std::size_t rows = columns.front().size();
    if (rows == 0)
        fail(QuantumErrorKind::ShapeError, "operator produced an empty output");
    CMat out(rows, CVec(dim));
    for (int c = 0; c < dim; ++c)
        for (std::size_t r = 0; r < rows; ++r) out[r][c] = columns[c][r];
    return out;
}

CMat oracle_matrix(const CMat& indicator) {
    std::size_t rows = matrix_rows(indicator);
    std::size_t cols = matrix_cols(indicator);
    if (rows == 0 || cols == 0 || !is_power_of_two(rows) || !is_power_of_two(cols))
        fail(QuantumErrorKind::NonPowerOfTwo, "oracle needs a 2^m by 2^n matrix");

    // Decode f: column x must be the basis vector e_{f(x)}.
    std::vector<std::size_t> f(cols);
    for (std::size_t c = 0; c < cols; ++c) {
        std::size_t ones = 0;
        for (std::size_t r = 0; r < rows; ++r) {
            const Complex& e = indicator[r][c];
            if (e == Complex{1, 0}) {
                ++ones;
                f[c] = r;
            } else if (e != Complex{0, 0}) {
                fail(QuantumErrorKind::NotBasisColumns,
                     "oracle input entries must be exactly 0 or 1");
            }
        }
        if (ones != 1)
            fail(QuantumErrorKind::NotBasisColumns,
                 "each oracle input column must be a standard basis vector");
    }

    std::size_t dim = cols * rows;  // 2^(n+m), |x,y> at x*2^m + y
    CMat u(dim, CVec(dim, Complex{0, 0}));
    for (std::size_t x = 0; x < cols; ++x)
        for (std::size_t y = 0; y < rows; ++y)
            u[x * rows + (y ^ f[x])][x * rows + y] = Complex{1, 0};
    return u;
}

std::string format_probability(double p) {
    if (std::abs(p) < 1e-10) return "0";
    double one_place = std::round(p * 10.0) / 10.0;
    char buf[48];
    if (std::abs(p - one_place) < 1e-10) {
        std::snprintf(buf, sizeof buf, "%.1f", one_place);
        return buf;
    }
    std::snprintf(buf, sizeof buf, "%.10g", p);
    return buf;
}

std::vector<std::string> render_report(const MeasurementReport& report) {
    std::vector<std::string> lines;
    for (std::size_t g = 0; g < report.groups.size(); ++g) {
        const auto& group = report.groups[g];
        for (std::size_t k = 0; k < group.probabilities.size(); ++k) {
            std::string p = format_probability(group.probabilities[k]);
            if (group.binary_labels) {
                std::string label(group.qubit_width, '0');
                for (int b = 0; b < group.qubit_width; ++b)
                    if (k & (std::size_t{1} << (group.qubit_width - 1 - b))) label[b] = '1';
                lines.push_back("Probability of Subsystem" + std::to_string(g) + " state " +
                                label + " is:  " + p);
            } else {
                lines.push_back("Probability of state " + std::to_string(k) + " is " + p);
            }
        }
    }
    if (report.show_collapse)
        lines.push_back("System collapsed to state: " +
                        std::to_string(report.collapsed_index));
    return lines;
}

namespace {

std::vector<double> born_probabilities(const CVec& v) {
    double norm = vector_norm(v);
    if (std::abs(norm - 1.0) > 1e-6)
        fail(QuantumErrorKind::NormalizationError,
             "cannot measure an unnormalized state (norm " + std::to_string(norm) + ")");
    std::vector<double> probs(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) probs[i] = std::norm(v[i]);
    return probs;
}

// Inverse-CDF sampling over prefix sums; boundary draws resolve to the
// lowest index whose prefix sum exceeds them, so zero-probability outcomes
// are never selected.
std::size_t sample_outcome(const std::vector<double>& probs, SplitMix64& rng) {
    double u = rng.next_unit();
    double acc = 0;
    std::size_t last_positive = 0;
    bool seen_positive = false;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] > 0) {
            last_positive = i;
            seen_positive = true;
        }
        acc += probs[i];
        if (u < acc) return i;
    }
    return seen_positive ? last_positive : probs.size() - 1;
}

QuantumState collapse_to(std::size_t index, std::size_t dim) {
    CVec amplitudes(dim, Complex{0, 0});
    amplitudes[index] = Complex{1, 0};
    return QuantumState{std::move(amplitudes), exact_log2(dim)};
}

}  // namespace

MeasureResult measure_state(const CVec& v, SplitMix64& rng) {
    if (v.size() < 2 || !is_power_of_two(v.size()))
        fail(QuantumErrorKind::NonPowerOfTwo,
             "measure needs a state of 2^n amplitudes, n >= 1");
    std::vector<double> probs = born_probabilities(v);
    std::size_t outcome = sample_outcome(probs, rng);

    MeasurementReport report;
    report.groups.push_back(
        MeasurementReport::Group{exact_log2(v.size()), false, std::move(probs)});
    report.collapsed_index = outcome;
    report.show_collapse = true;
    return MeasureResult{collapse_to(outcome, v.size()), std::move(report)};
}

MeasureResult measure_subsystems(const CVec& v, const std::vector<int>& config,
                                 SplitMix64& rng) {
    if (v.size() < 2 || !is_power_of_two(v.size()))
        fail(QuantumErrorKind::NonPowerOfTwo,
             "subsystems needs a state of 2^n amplitudes, n >= 1");
    int total = exact_log2(v.size());
    int sum = 0;
    for (int c : config) {
        if (c < 1)
            fail(QuantumErrorKind::ConfigError, "subsystem sizes must be at least 1");
        sum += c;
    }
    if (sum != total)
        fail(QuantumErrorKind::ConfigError,
             "configuration covers " + std::to_string(sum) + " qubits but the state has " +
                 std::to_string(total));

    std::vector<double> probs = born_probabilities(v);

    MeasurementReport report;
    int offset = 0;  // first (most significant) bit of the subsystem
    for (int width : config) {
        MeasurementReport::Group group{width, true,
                                       std::vector<double>(std::size_t{1} << width, 0.0)};
        int shift = total - offset - width;
        std::size_t mask = (std::size_t{1} << width) - 1;
        for (std::size_t j = 0; j < probs.size(); ++j)
            group.probabilities[(j >> shift) & mask] += probs[j];
        report.groups.push_back(std::move(group));
        offset += width;
    }

    std::size_t outcome = sample_outcome(probs, rng);
    report.collapsed_index = outcome;
    report.show_collapse = false;
    return MeasureResult{collapse_to(outcome, v.size()), std::move(report)};
}

}  // namespace qumin
