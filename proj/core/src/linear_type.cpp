#include "qumin/linear_type.hpp"

namespace qumin {

namespace {
TypePtr make(LinearType::Data data) {
    return std::make_shared<LinearType>(LinearType{std::move(data)});
}
}  // namespace

TypePtr make_int() { return make(LinearType::Int{}); }
TypePtr make_list() { return make(LinearType::ListT{}); }
TypePtr make_qubits(DimExpr dim) { return make(LinearType::QubitPow{std::move(dim)}); }
TypePtr make_qubits(int n) { return make_qubits(DimExpr::lit(n)); }
TypePtr make_tensor(TypePtr a, TypePtr b) {
    return make(LinearType::Tensor{std::move(a), std::move(b)});
}
TypePtr make_lolli(TypePtr domain, TypePtr codomain) {
    return make(LinearType::Lolli{std::move(domain), std::move(codomain)});
}
TypePtr make_bang(TypePtr inner) {
    if (inner->get<LinearType::Bang>()) return inner;
    return make(LinearType::Bang{std::move(inner)});
}
TypePtr make_operator(int n) { return make_lolli(make_qubits(n), make_qubits(n)); }

bool is_bang(const LinearType& t) { return t.get<LinearType::Bang>() != nullptr; }

TypePtr strip_bang(TypePtr t) {
    while (const auto* b = t->get<LinearType::Bang>()) t = b->inner;
    return t;
}

std::optional<int> qubit_dim(const LinearType& t) {
    if (const auto* q = t.get<LinearType::QubitPow>()) {
        if (q->dim.is_literal()) return q->dim.value;
        return std::nullopt;
    }
    if (const auto* tp = t.get<LinearType::Tensor>()) {
        auto l = qubit_dim(*tp->lhs);
        auto r = qubit_dim(*tp->rhs);
        if (l && r) return *l + *r;
    }
    return std::nullopt;
}

bool types_equivalent(const LinearType& a, const LinearType& b) {
    // Pure qubit shapes compare by flattened register size.
    auto da = qubit_dim(a);
    auto db = qubit_dim(b);
    if (da || db) return da && db && *da == *db;

    if (a.data.index() != b.data.index()) return false;
    if (a.get<LinearType::Int>() || a.get<LinearType::ListT>()) return true;
    if (const auto* qa = a.get<LinearType::QubitPow>()) {
        // Non-literal dims: equal only when the same variable.
        const auto* qb = b.get<LinearType::QubitPow>();
        return qa->dim.kind == qb->dim.kind && qa->dim.var == qb->dim.var &&
               qa->dim.value == qb->dim.value;
    }
    if (const auto* ta = a.get<LinearType::Tensor>()) {
        const auto* tb = b.get<LinearType::Tensor>();
        return types_equivalent(*ta->lhs, *tb->lhs) && types_equivalent(*ta->rhs, *tb->rhs);
    }
    if (const auto* la = a.get<LinearType::Lolli>()) {
        const auto* lb = b.get<LinearType::Lolli>();
        return types_equivalent(*la->domain, *lb->domain) &&
               types_equivalent(*la->codomain, *lb->codomain);
    }
    const auto* ba = a.get<LinearType::Bang>();
    const auto* bb = b.get<LinearType::Bang>();
    return types_equivalent(*ba->inner, *bb->inner);
}

bool contains_scheme_variable(const LinearType& t) {
    if (const auto* q = t.get<LinearType::QubitPow>()) return !q->dim.is_literal();
    if (const auto* tp = t.get<LinearType::Tensor>())
        return contains_scheme_variable(*tp->lhs) || contains_scheme_variable(*tp->rhs);
    if (const auto* l = t.get<LinearType::Lolli>())
        return contains_scheme_variable(*l->domain) || contains_scheme_variable(*l->codomain);
    if (const auto* b = t.get<LinearType::Bang>()) return contains_scheme_variable(*b->inner);
    return false;
}

namespace {

std::string dim_to_string(const DimExpr& d) {
    return d.is_literal() ? std::to_string(d.value) : d.var;
}

std::string to_string_prec(const LinearType& t, bool parenthesize_arrow) {
    if (t.get<LinearType::Int>()) return "int";
    if (t.get<LinearType::ListT>()) return "list";
    if (const auto* q = t.get<LinearType::QubitPow>()) {
        if (q->dim.is_literal() && q->dim.value == 1) return "qubit";
        return "qubit^" + dim_to_string(q->dim);
    }
    if (const auto* tp = t.get<LinearType::Tensor>()) {
        return to_string_prec(*tp->lhs, true) + " * " + to_string_prec(*tp->rhs, true);
    }
    if (const auto* l = t.get<LinearType::Lolli>()) {
        std::string s =
            to_string_prec(*l->domain, true) + " > " + to_string_prec(*l->codomain, false);
        if (parenthesize_arrow) return "(" + s + ")";
        return s;
    }
    const auto* b = t.get<LinearType::Bang>();
    return "!{" + to_string_prec(*b->inner, false) + "}";
}

}  // namespace

std::string type_to_string(const LinearType& t) { return to_string_prec(t, false); }

TypePtr desugar_annotation(const TypeAnnotation& ann) {
    struct V {
        TypePtr operator()(const TypeAnnotation::Qubit&) const { return make_qubits(1); }
        TypePtr operator()(const TypeAnnotation::Int&) const { return make_int(); }
        TypePtr operator()(const TypeAnnotation::List&) const { return make_list(); }
        TypePtr operator()(const TypeAnnotation::Tensor& t) const {
            return make_tensor(desugar_annotation(*t.lhs), desugar_annotation(*t.rhs));
        }
        TypePtr operator()(const TypeAnnotation::Fn& f) const {
            return make_lolli(desugar_annotation(*f.domain), desugar_annotation(*f.codomain));
        }
        TypePtr operator()(const TypeAnnotation::Operator& o) const {
            return make_operator(o.qubits);
        }
        TypePtr operator()(const TypeAnnotation::Bang& b) const {
            return make_bang(desugar_annotation(*b.inner));
        }
    };
    return std::visit(V{}, ann.data);
}

}  // namespace qumin
