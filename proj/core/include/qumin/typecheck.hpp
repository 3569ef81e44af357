#pragma once

#include <map>
#include <string>
#include <vector>

#include "qumin/ast.hpp"
#include "qumin/error.hpp"
#include "qumin/linear_type.hpp"

namespace qumin {

/// Fully checked routine interface: every dimension literal, ready for
/// runtime constraint generation.
struct RoutineSignature {
    std::string name;
    std::vector<TypePtr> parameters;  // annotated types, bangs preserved
    TypePtr result;
};

class TypeCheckError : public QuminError {
public:
    TypeCheckError(std::string message, Span span)
        : QuminError(ErrorCategory::TypeCheck, std::move(message), span) {}

    const std::string& routine() const { return routine_; }
    void set_routine(std::string name) { routine_ = std::move(name); }

private:
    std::string routine_;
};

class LinearityViolation : public TypeCheckError {
public:
    LinearityViolation(std::string name, int used_count, Span span)
        : TypeCheckError("linear variable '" + name + "' used " +
                             std::to_string(used_count) + " time(s); must be exactly once",
                         span),
          name_(std::move(name)),
          used_count_(used_count) {}

    const std::string& name() const { return name_; }
    int used_count() const { return used_count_; }

private:
    std::string name_;
    int used_count_;
};

class TypeMismatch : public TypeCheckError {
public:
    TypeMismatch(std::string expected, std::string found, Span span)
        : TypeCheckError("type mismatch: expected " + expected + ", found " + found, span),
          expected_(std::move(expected)),
          found_(std::move(found)) {}

    const std::string& expected() const { return expected_; }
    const std::string& found() const { return found_; }

private:
    std::string expected_;
    std::string found_;
};

class UnknownName : public TypeCheckError {
public:
    UnknownName(const std::string& name, Span span)
        : TypeCheckError("unknown name '" + name + "'", span) {}
};

class DimMismatch : public TypeCheckError {
public:
    DimMismatch(int expected, int found, Span span)
        : TypeCheckError("qubit dimension mismatch: expected " + std::to_string(expected) +
                             ", found " + std::to_string(found),
                         span),
          expected_(expected),
          found_(found) {}

    int expected() const { return expected_; }
    int found() const { return found_; }

private:
    int expected_;
    int found_;
};

/// Raised when !-introduction would capture a term that consumed linear
/// variables (the rule requires an empty linear context).
class PromotionError : public TypeCheckError {
public:
    explicit PromotionError(Span span)
        : TypeCheckError("cannot promote to ! a term that consumes linear variables", span) {}
};

/// Paired unrestricted / linear contexts. Linear entries carry a use count
/// so each premise can consume a part of the context and pass the rest on.
class TypingContext {
public:
    bool bound(const std::string& name) const;

    void bind_unrestricted(const std::string& name, TypePtr type, Span span);
    void bind_linear(const std::string& name, TypePtr type, Span span);

    /// lvar / uvar: looks the name up and, for linear entries, marks one
    /// more use (a second use raises LinearityViolation at `span`).
    TypePtr use(const std::string& name, Span span);

    bool is_linear(const std::string& name) const;
    int use_count(const std::string& name) const;
    bool consumed(const std::string& name) const;

    /// Total number of linear consumptions so far; lets callers detect
    /// whether a subterm touched the linear context.
    long consumption_stamp() const { return consumptions_; }

    /// Removes `name`; linear entries must have been consumed exactly once.
    void retire(const std::string& name, Span span);

private:
    struct LinearEntry {
        TypePtr type;
        int uses = 0;
    };
    std::map<std::string, TypePtr> unrestricted_;
    std::map<std::string, LinearEntry> linear_;
    long consumptions_ = 0;
};

using GlobalTypes = std::map<std::string, TypePtr>;
using SignatureTable = std::map<std::string, RoutineSignature>;

/// Names with primitive signature schemes (apply/·, tensor, applyN, ...).
bool is_primitive_scheme(const std::string& name);

/// Closes a primitive scheme over literal dimensions, one value per scheme
/// variable in (n, m) order.
TypePtr instantiate_scheme(const std::string& prim_name, const std::vector<int>& arg_dims);

/// Checks one fully annotated lambda against the typing rules and returns
/// its signature. `globals` holds previously checked routines (unrestricted).
RoutineSignature check_routine(const SyntaxNode& lambda, const GlobalTypes& globals,
                               const std::string& routine_name = {});

/// Static phase for a quantum library: every top-level assignment must be a
/// routine that checks; the first failure aborts with the routine name
/// attached. Load directives are handled by the module loader and skipped.
SignatureTable check_quantum_library(const NodeList& nodes,
                                     const SignatureTable& already_loaded = {});

}  // namespace qumin
