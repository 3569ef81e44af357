#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qumin/span.hpp"

namespace qumin {

struct SyntaxNode;
using NodePtr = std::shared_ptr<const SyntaxNode>;
using NodeList = std::vector<NodePtr>;

// ---------------------------------------------------------------------------
// Surface type annotations (quantum-fragment signatures)
// ---------------------------------------------------------------------------

struct TypeAnnotation;
using AnnotationPtr = std::shared_ptr<const TypeAnnotation>;

struct TypeAnnotation {
    struct Qubit {};
    struct Int {};
    struct List {};
    struct Tensor {  // a * b, left-associated
        AnnotationPtr lhs;
        AnnotationPtr rhs;
    };
    struct Fn {  // a > b, right-associated
        AnnotationPtr domain;
        AnnotationPtr codomain;
    };
    struct Operator {  // operator[n], n >= 1
        int qubits;
    };
    struct Bang {  // !{t}
        AnnotationPtr inner;
    };

    using Data = std::variant<Qubit, Int, List, Tensor, Fn, Operator, Bang>;

    Data data;
    Span span;
};

bool annotations_equal(const TypeAnnotation& a, const TypeAnnotation& b);
std::string annotation_to_source(const TypeAnnotation& ann);

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

struct Param {
    std::string name;
    AnnotationPtr annotation;  // null when unannotated
    Span span;
};

struct SyntaxNode {
    struct Load {
        bool quantum = false;  // --qload vs --load
        std::string name;
    };
    struct Assignment {
        std::string name;
        NodePtr expr;
    };
    struct Lambda {
        std::vector<Param> params;
        NodeList body;
        std::optional<NodeList> immediate_args;  // lambda(...){...}(args)
    };
    struct Call {
        NodePtr callee;
        NodeList args;
    };
    struct InfixCall {
        NodePtr lhs;
        std::string op_name;
        NodePtr rhs;
    };
    struct PrefixCall {
        std::string op_name;
        NodePtr arg;
    };
    struct Composition {  // f . g (args) applies right-to-left
        std::vector<std::string> names;
        NodeList args;
    };
    struct IfElse {
        NodePtr cond;
        NodeList then_body;
        NodeList else_body;
    };
    struct ListLit {
        NodeList elems;
    };
    struct IntLit {
        std::int64_t value = 0;
    };
    struct FloatLit {
        double value = 0;
    };
    struct ComplexLit {
        double re = 0;
        double im = 0;
    };
    struct BoolLit {
        bool value = false;
    };
    struct StringLit {
        std::string value;
    };
    struct Name {
        std::string text;
    };

    using Data = std::variant<Load, Assignment, Lambda, Call, InfixCall, PrefixCall,
                              Composition, IfElse, ListLit, IntLit, FloatLit,
                              ComplexLit, BoolLit, StringLit, Name>;

    Data data;
    Span span;

    template <typename T>
    const T* get() const {
        return std::get_if<T>(&data);
    }
};

/// Structural equality; spans are ignored, numeric fields compare exactly.
bool nodes_equal(const SyntaxNode& a, const SyntaxNode& b);
bool node_lists_equal(const NodeList& a, const NodeList& b);

/// Canonical source text; parse(to_source(n)) is structurally equal to n.
std::string to_source(const SyntaxNode& node);
std::string to_source(const NodeList& program);

}  // namespace qumin
