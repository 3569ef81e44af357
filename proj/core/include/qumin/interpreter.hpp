#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "qumin/environment.hpp"
#include "qumin/error.hpp"
#include "qumin/parser.hpp"
#include "qumin/quantum.hpp"
#include "qumin/rng.hpp"
#include "qumin/typecheck.hpp"
#include "qumin/value.hpp"

namespace qumin {

enum class EvalErrorKind {
    UnboundName,
    Arity,
    DynamicType,
    DivideByZero,
    RecursionLimit,
    Other,
};

class EvalError : public QuminError {
public:
    EvalError(EvalErrorKind kind, std::string message, Span span = {})
        : QuminError(ErrorCategory::Runtime, std::move(message), span), kind_(kind) {}

    EvalErrorKind kind() const { return kind_; }

private:
    EvalErrorKind kind_;
};

/// An argument from the classical fragment failed the shape predicate
/// derived from a routine's type signature.
class ConstraintViolation : public QuminError {
public:
    ConstraintViolation(std::size_t position, std::string expected, std::string found,
                        Span span = {})
        : QuminError(ErrorCategory::Constraint,
                     "argument " + std::to_string(position + 1) + " of quantum routine: expected " +
                         expected + ", found " + found,
                     span),
          position_(position),
          expected_(std::move(expected)),
          found_(std::move(found)) {}

    std::size_t position() const { return position_; }
    const std::string& expected() const { return expected_; }
    const std::string& found() const { return found_; }

private:
    std::size_t position_;
    std::string expected_;
    std::string found_;
};

struct InterpreterOptions {
    std::optional<std::uint64_t> seed;                      // default: OS entropy
    std::vector<std::filesystem::path> search_path;        // after the entry dir
    bool use_env_search_path = true;                       // append QUMIN_PATH dirs
    int recursion_limit = 10000;
    std::function<void(std::string_view)> output;           // line sink; default stdout
    std::function<void(const MeasurementReport&)> report_hook;
};

/// One single-threaded evaluator instance owning its rng, module cache and
/// output sink. Independent instances share nothing.
class Interpreter {
public:
    explicit Interpreter(InterpreterOptions options = {});
    ~Interpreter();
    Interpreter(const Interpreter&) = delete;
    Interpreter& operator=(const Interpreter&) = delete;

    /// Full pipeline for an entry file: typecheck+load quantum libraries,
    /// load classical libraries, then execute the remaining expressions.
    void run_file(const std::filesystem::path& path);

    /// Loads `name`.qum from the search path; quantum modules are fully
    /// typechecked before any binding installs. Repeat loads are no-ops.
    void load_module(const std::string& name, bool quantum);

    Value eval(const SyntaxNode& node, const EnvPtr& env);
    Value eval_source(std::string_view source);  // one expression, global env

    Value apply_value(const Value& callee, std::vector<Value> args, Span span);

    /// Validates the supplied argument prefix against the routine signature
    /// (positions offset..offset+args). Throws ConstraintViolation.
    void check_constraints(const RoutineSignature& signature, std::size_t offset,
                           const std::vector<Value>& args, Span span);

    const EnvPtr& globals() { return globals_; }
    SplitMix64& rng() { return rng_; }
    const SignatureTable& quantum_signatures() const { return quantum_signatures_; }

    void set_entry_dir(std::filesystem::path dir) { entry_dir_ = std::move(dir); }
    void emit_line(std::string_view line);
    void emit_report(const MeasurementReport& report);

private:
    void exec_program(const NodeList& program);
    std::filesystem::path resolve_module(const std::string& name) const;

    InterpreterOptions options_;
    SplitMix64 rng_;
    EnvPtr builtins_;
    EnvPtr globals_;
    SignatureTable quantum_signatures_;
    std::set<std::string> loaded_;
    std::set<std::string> loading_;
    std::filesystem::path entry_dir_;
    std::vector<std::filesystem::path> env_path_dirs_;
    int depth_ = 0;

    struct DepthGuard;
};

/// Environment preloaded with every builtin (arithmetic, sequence ops, the
/// quantum backend bridge, math helpers and the pi constant).
EnvPtr install_builtins();

}  // namespace qumin
