#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "qumin/ast.hpp"

namespace qumin {

/// Qubit-register dimension: a literal count (>= 1) or a signature-scheme
/// variable that gets fixed by unification at each application site.
struct DimExpr {
    enum class Kind { Literal, Variable };
    Kind kind = Kind::Literal;
    int value = 1;         // when Literal
    std::string var;       // when Variable

    static DimExpr lit(int n) { return {Kind::Literal, n, {}}; }
    static DimExpr variable(std::string name) { return {Kind::Variable, 0, std::move(name)}; }
    bool is_literal() const { return kind == Kind::Literal; }
};

struct LinearType;
using TypePtr = std::shared_ptr<const LinearType>;

struct LinearType {
    struct Int {};
    struct ListT {};
    struct QubitPow {  // qubit^(dim); QubitPow(1) is the plain qubit type
        DimExpr dim;
    };
    struct Tensor {
        TypePtr lhs;
        TypePtr rhs;
    };
    struct Lolli {
        TypePtr domain;
        TypePtr codomain;
    };
    struct Bang {
        TypePtr inner;
    };

    using Data = std::variant<Int, ListT, QubitPow, Tensor, Lolli, Bang>;
    Data data;

    template <typename T>
    const T* get() const {
        return std::get_if<T>(&data);
    }
};

TypePtr make_int();
TypePtr make_list();
TypePtr make_qubits(DimExpr dim);
TypePtr make_qubits(int n);
TypePtr make_tensor(TypePtr a, TypePtr b);
TypePtr make_lolli(TypePtr domain, TypePtr codomain);
/// Bang(Bang(t)) collapses to Bang(t).
TypePtr make_bang(TypePtr inner);
/// operator[n] desugars through this: qubit^n -o qubit^n.
TypePtr make_operator(int n);

bool is_bang(const LinearType& t);
TypePtr strip_bang(TypePtr t);

/// Total qubit count of a pure qubit shape (QubitPow / Tensor of them) when
/// all dims are literal; nullopt for anything else.
std::optional<int> qubit_dim(const LinearType& t);

/// Structural equivalence with qubit flattening (qubit^(n+m) ~ qubit^n (*)
/// qubit^m) and bang normalization.
bool types_equivalent(const LinearType& a, const LinearType& b);

bool contains_scheme_variable(const LinearType& t);

std::string type_to_string(const LinearType& t);

/// Surface-to-core mapping: `operator[n]` to qubit^n -o qubit^n, `*` to
/// tensor, `>` to lolli, `!{...}` to bang.
TypePtr desugar_annotation(const TypeAnnotation& ann);

}  // namespace qumin
