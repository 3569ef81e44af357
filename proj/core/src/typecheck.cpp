#include "qumin/typecheck.hpp"

#include <optional>

namespace qumin {

// ---------------------------------------------------------------------------
// TypingContext
// ---------------------------------------------------------------------------

bool TypingContext::bound(const std::string& name) const {
    return unrestricted_.count(name) || linear_.count(name);
}

void TypingContext::bind_unrestricted(const std::string& name, TypePtr type, Span span) {
    if (bound(name))
        throw TypeCheckError("name '" + name + "' is already bound", span);
    unrestricted_.emplace(name, std::move(type));
}

void TypingContext::bind_linear(const std::string& name, TypePtr type, Span span) {
    if (bound(name))
        throw TypeCheckError("name '" + name + "' is already bound", span);
    linear_.emplace(name, LinearEntry{std::move(type), 0});
}

TypePtr TypingContext::use(const std::string& name, Span span) {
    if (auto it = linear_.find(name); it != linear_.end()) {
        ++it->second.uses;
        ++consumptions_;
        if (it->second.uses > 1)
            throw LinearityViolation(name, it->second.uses, span);
        return it->second.type;
    }
    if (auto it = unrestricted_.find(name); it != unrestricted_.end()) return it->second;
    return nullptr;
}

bool TypingContext::is_linear(const std::string& name) const { return linear_.count(name); }

int TypingContext::use_count(const std::string& name) const {
    auto it = linear_.find(name);
    return it == linear_.end() ? 0 : it->second.uses;
}

bool TypingContext::consumed(const std::string& name) const { return use_count(name) == 1; }

void TypingContext::retire(const std::string& name, Span span) {
    if (auto it = linear_.find(name); it != linear_.end()) {
        if (it->second.uses != 1)
            throw LinearityViolation(name, it->second.uses, span);
        linear_.erase(it);
        return;
    }
    unrestricted_.erase(name);
}

// ---------------------------------------------------------------------------
// Primitive signature schemes
// ---------------------------------------------------------------------------

namespace {

struct Scheme {
    std::vector<std::string> vars;
    TypePtr type;
};

TypePtr qv(const std::string& var) { return make_qubits(DimExpr::variable(var)); }

const std::map<std::string, Scheme>& scheme_table() {
    static const std::map<std::string, Scheme> table = [] {
        std::map<std::string, Scheme> t;
        // apply / · : (qubit^n -o qubit^n) -o qubit^n -o qubit^n
        Scheme apply{{"n"},
                     make_lolli(make_lolli(qv("n"), qv("n")), make_lolli(qv("n"), qv("n")))};
        t.emplace("apply", apply);
        t.emplace("\xc2\xb7", apply);  // ·
        // tensor / ⊗ : qubit^n -o qubit^m -o qubit^n * qubit^m
        Scheme tensor{{"n", "m"},
                      make_lolli(qv("n"), make_lolli(qv("m"), make_tensor(qv("n"), qv("m"))))};
        t.emplace("tensor", tensor);
        t.emplace("\xe2\x8a\x97", tensor);  // ⊗
        // applyN : (qubit^n -o qubit^n) -o qubit^n -o int -o qubit^n
        t.emplace("applyN",
                  Scheme{{"n"},
                         make_lolli(make_lolli(qv("n"), qv("n")),
                                    make_lolli(qv("n"), make_lolli(make_int(), qv("n"))))});
        // measure : qubit^n -o !qubit^n
        t.emplace("measure", Scheme{{"n"}, make_lolli(qv("n"), make_bang(qv("n")))});
        // tensorOp : (qubit^n -o qubit^n) -o (qubit^m -o qubit^m)
        //            -o (qubit^n * qubit^m -o qubit^n * qubit^m)
        t.emplace("tensorOp",
                  Scheme{{"n", "m"},
                         make_lolli(make_lolli(qv("n"), qv("n")),
                                    make_lolli(make_lolli(qv("m"), qv("m")),
                                               make_lolli(make_tensor(qv("n"), qv("m")),
                                                          make_tensor(qv("n"), qv("m")))))});
        // subsystems : qubit^n -o list -o !qubit^n
        t.emplace("subsystems",
                  Scheme{{"n"}, make_lolli(qv("n"), make_lolli(make_list(), make_bang(qv("n"))))});
        return t;
    }();
    return table;
}

using DimBindings = std::map<std::string, int>;

TypePtr substitute(const TypePtr& t, const DimBindings& bindings) {
    if (const auto* q = t->get<LinearType::QubitPow>()) {
        if (!q->dim.is_literal()) {
            auto it = bindings.find(q->dim.var);
            if (it != bindings.end()) return make_qubits(it->second);
        }
        return t;
    }
    if (const auto* tp = t->get<LinearType::Tensor>())
        return make_tensor(substitute(tp->lhs, bindings), substitute(tp->rhs, bindings));
    if (const auto* l = t->get<LinearType::Lolli>())
        return make_lolli(substitute(l->domain, bindings), substitute(l->codomain, bindings));
    if (const auto* b = t->get<LinearType::Bang>())
        return make_bang(substitute(b->inner, bindings));
    return t;
}

TypePtr rename_vars(const TypePtr& t, const std::map<std::string, std::string>& names) {
    if (const auto* q = t->get<LinearType::QubitPow>()) {
        if (!q->dim.is_literal())
            return make_qubits(DimExpr::variable(names.at(q->dim.var)));
        return t;
    }
    if (const auto* tp = t->get<LinearType::Tensor>())
        return make_tensor(rename_vars(tp->lhs, names), rename_vars(tp->rhs, names));
    if (const auto* l = t->get<LinearType::Lolli>())
        return make_lolli(rename_vars(l->domain, names), rename_vars(l->codomain, names));
    if (const auto* b = t->get<LinearType::Bang>())
        return make_bang(rename_vars(b->inner, names));
    return t;
}

// Flattened view of a (possibly symbolic) qubit shape: constant part plus
// any still-unbound scheme variables.
struct QubitShape {
    int literal = 0;
    std::vector<std::string> unbound;
    bool qubit_shaped = true;
};

QubitShape flatten_shape(const TypePtr& t, const DimBindings& bindings) {
    QubitShape s;
    if (const auto* q = t->get<LinearType::QubitPow>()) {
        if (q->dim.is_literal()) {
            s.literal = q->dim.value;
        } else if (auto it = bindings.find(q->dim.var); it != bindings.end()) {
            s.literal = it->second;
        } else {
            s.unbound.push_back(q->dim.var);
        }
        return s;
    }
    if (const auto* tp = t->get<LinearType::Tensor>()) {
        QubitShape l = flatten_shape(tp->lhs, bindings);
        QubitShape r = flatten_shape(tp->rhs, bindings);
        s.qubit_shaped = l.qubit_shaped && r.qubit_shaped;
        s.literal = l.literal + r.literal;
        s.unbound = l.unbound;
        s.unbound.insert(s.unbound.end(), r.unbound.begin(), r.unbound.end());
        return s;
    }
    s.qubit_shaped = false;
    return s;
}

}  // namespace

bool is_primitive_scheme(const std::string& name) { return scheme_table().count(name) != 0; }

TypePtr instantiate_scheme(const std::string& prim_name, const std::vector<int>& arg_dims) {
    auto it = scheme_table().find(prim_name);
    if (it == scheme_table().end())
        throw TypeCheckError("no primitive scheme named '" + prim_name + "'", {});
    const Scheme& scheme = it->second;
    if (arg_dims.size() != scheme.vars.size())
        throw TypeCheckError("scheme for '" + prim_name + "' takes " +
                                 std::to_string(scheme.vars.size()) + " dimension(s)",
                             {});
    DimBindings bindings;
    for (std::size_t i = 0; i < arg_dims.size(); ++i) {
        if (arg_dims[i] < 1) throw DimMismatch(1, arg_dims[i], {});
        bindings[scheme.vars[i]] = arg_dims[i];
    }
    return substitute(scheme.type, bindings);
}

// ---------------------------------------------------------------------------
// Routine checking (bidirectional: parameters annotated, applications synth)
// ---------------------------------------------------------------------------

namespace {

class RoutineChecker {
public:
    explicit RoutineChecker(const GlobalTypes& globals) : globals_(globals) {}

    RoutineSignature check(const SyntaxNode& node, const std::string& routine_name) {
        const auto* lambda = node.get<SyntaxNode::Lambda>();
        if (!lambda)
            throw TypeCheckError("a routine must be a lambda with annotated parameters",
                                 node.span);
        if (lambda->immediate_args)
            throw TypeCheckError("a routine may not be immediately invoked", node.span);
        RoutineSignature sig;
        sig.name = routine_name;
        TypePtr result = check_lambda(*lambda, node.span, &sig.parameters);
        sig.result = result;
        return sig;
    }

private:
    TypingContext ctx_;
    const GlobalTypes& globals_;
    DimBindings bindings_;
    int fresh_ = 0;

    TypePtr resolve(const TypePtr& t) { return substitute(t, bindings_); }

    // -oI over every parameter, then the body; returns the body type and
    // appends the parameter types (bangs preserved) to `params_out`.
    TypePtr check_lambda(const SyntaxNode::Lambda& lambda, Span span,
                         std::vector<TypePtr>* params_out) {
        std::vector<std::string> introduced;
        std::vector<TypePtr> param_types;
        for (const Param& p : lambda.params) {
            if (!p.annotation)
                throw TypeCheckError("parameter '" + p.name +
                                         "' needs a type annotation in the quantum fragment",
                                     p.span);
            TypePtr t = desugar_annotation(*p.annotation);
            param_types.push_back(t);
            // ! / int / list values are freely reusable; everything else is
            // linear and must be consumed exactly once.
            if (is_bang(*t)) {
                ctx_.bind_unrestricted(p.name, strip_bang(t), p.span);
            } else if (t->get<LinearType::Int>() || t->get<LinearType::ListT>()) {
                ctx_.bind_unrestricted(p.name, t, p.span);
            } else {
                ctx_.bind_linear(p.name, t, p.span);
            }
            introduced.push_back(p.name);
        }
        TypePtr body_type = check_body(lambda.body, span);
        for (auto it = introduced.rbegin(); it != introduced.rend(); ++it)
            ctx_.retire(*it, span);
        if (params_out) {
            *params_out = param_types;
            return body_type;
        }
        TypePtr t = body_type;
        for (auto it = param_types.rbegin(); it != param_types.rend(); ++it)
            t = make_lolli(*it, t);
        return t;
    }

    TypePtr check_body(const NodeList& body, Span span) {
        if (body.empty())
            throw TypeCheckError("routine body must produce a value", span);
        std::vector<std::string> introduced;
        TypePtr result;
        for (std::size_t i = 0; i < body.size(); ++i) {
            const SyntaxNode& e = *body[i];
            if (const auto* let = e.get<SyntaxNode::Assignment>()) {
                if (i + 1 == body.size())
                    throw TypeCheckError("routine body must end with an expression", e.span);
                TypePtr t = resolve(synth(*let->expr));
                if (contains_scheme_variable(*t))
                    throw TypeCheckError(
                        "cannot bind '" + let->name + "': dimensions are not determined",
                        e.span);
                if (is_bang(*t)) {
                    ctx_.bind_unrestricted(let->name, strip_bang(t), e.span);
                } else if (t->get<LinearType::Int>() || t->get<LinearType::ListT>()) {
                    ctx_.bind_unrestricted(let->name, t, e.span);
                } else {
                    ctx_.bind_linear(let->name, t, e.span);
                }
                introduced.push_back(let->name);
                continue;
            }
            TypePtr t = resolve(synth(e));
            if (i + 1 == body.size()) {
                result = t;
            } else if (!is_bang(*t) && !t->get<LinearType::Int>() &&
                       !t->get<LinearType::ListT>()) {
                // Dropping a linear value is weakening.
                throw TypeCheckError("value of linear type is discarded", e.span);
            }
        }
        for (auto it = introduced.rbegin(); it != introduced.rend(); ++it)
            ctx_.retire(*it, span);
        return result;
    }

    TypePtr synth(const SyntaxNode& node) {
        if (const auto* name = node.get<SyntaxNode::Name>())
            return synth_name(name->text, node.span);
        if (node.get<SyntaxNode::IntLit>()) return make_int();
        if (const auto* list = node.get<SyntaxNode::ListLit>()) {
            for (const auto& elem : list->elems) {
                TypePtr t = resolve(synth(*elem));
                if (!t->get<LinearType::Int>())
                    throw TypeMismatch("int", type_to_string(*t), elem->span);
            }
            return make_list();
        }
        if (const auto* call = node.get<SyntaxNode::Call>())
            return synth_application(*call->callee, call->args, node.span);
        if (const auto* infix = node.get<SyntaxNode::InfixCall>()) {
            SyntaxNode callee{SyntaxNode::Name{infix->op_name}, node.span};
            return synth_application(callee, {infix->lhs, infix->rhs}, node.span);
        }
        if (const auto* prefix = node.get<SyntaxNode::PrefixCall>()) {
            SyntaxNode callee{SyntaxNode::Name{prefix->op_name}, node.span};
            return synth_application(callee, {prefix->arg}, node.span);
        }
        if (const auto* lambda = node.get<SyntaxNode::Lambda>()) {
            if (lambda->immediate_args) {
                // Immediate invocation is plain application of the lambda.
                TypePtr fn = check_lambda(*lambda, node.span, nullptr);
                return apply_type(fn, *lambda->immediate_args, node.span);
            }
            return check_lambda(*lambda, node.span, nullptr);
        }
        throw TypeCheckError("this form is not part of the quantum fragment", node.span);
    }

    TypePtr synth_name(const std::string& text, Span span) {
        if (TypePtr local = ctx_.use(text, span)) return local;
        if (auto it = globals_.find(text); it != globals_.end()) return it->second;
        if (is_primitive_scheme(text)) return instantiate_fresh(text);
        throw UnknownName(text, span);
    }

    TypePtr instantiate_fresh(const std::string& prim) {
        const Scheme& scheme = scheme_table().at(prim);
        std::map<std::string, std::string> renames;
        for (const auto& v : scheme.vars)
            renames[v] = v + "@" + std::to_string(fresh_++);
        return rename_vars(scheme.type, renames);
    }

    TypePtr synth_application(const SyntaxNode& callee, const NodeList& args, Span span) {
        TypePtr fn = resolve(synth(callee));
        return apply_type(fn, args, span);
    }

    TypePtr apply_type(TypePtr fn, const NodeList& args, Span span) {
        for (const auto& arg : args) {
            fn = resolve(fn);
            fn = strip_bang(fn);  // !-E on the function position
            const auto* lolli = fn->get<LinearType::Lolli>();
            if (!lolli)
                throw TypeMismatch("a function", type_to_string(*fn), span);
            check_arg(*arg, lolli->domain);
            fn = lolli->codomain;
        }
        return resolve(fn);
    }

    void check_arg(const SyntaxNode& arg, const TypePtr& expected_raw) {
        TypePtr expected = resolve(expected_raw);
        bool want_bang = is_bang(*expected);
        TypePtr expected_core = strip_bang(expected);

        long before = ctx_.consumption_stamp();
        TypePtr actual = resolve(synth(arg));

        if (want_bang && !is_bang(*actual)) {
            // !-I: promotion demands the term consumed no linear variables.
            if (ctx_.consumption_stamp() != before) throw PromotionError(arg.span);
        }
        unify(expected_core, strip_bang(actual), arg.span);
    }

    void unify(const TypePtr& scheme_side, const TypePtr& concrete, Span span) {
        TypePtr s = resolve(scheme_side);
        TypePtr c = resolve(concrete);

        QubitShape s_shape = flatten_shape(s, bindings_);
        QubitShape c_shape = flatten_shape(c, bindings_);
        if (s_shape.qubit_shaped || c_shape.qubit_shaped) {
            if (!s_shape.qubit_shaped || !c_shape.qubit_shaped)
                throw TypeMismatch(type_to_string(*s), type_to_string(*c), span);
            if (!c_shape.unbound.empty())
                throw TypeCheckError("argument dimensions are not determined", span);
            int target = c_shape.literal;
            if (s_shape.unbound.empty()) {
                if (s_shape.literal != target)
                    throw DimMismatch(s_shape.literal, target, span);
                return;
            }
            if (s_shape.unbound.size() == 1) {
                int solved = target - s_shape.literal;
                if (solved < 1) throw DimMismatch(s_shape.literal + 1, target, span);
                bindings_[s_shape.unbound.front()] = solved;
                return;
            }
            throw TypeCheckError("cannot determine scheme dimensions here", span);
        }

        if (s->get<LinearType::Int>() && c->get<LinearType::Int>()) return;
        if (s->get<LinearType::ListT>() && c->get<LinearType::ListT>()) return;
        if (const auto* sl = s->get<LinearType::Lolli>()) {
            if (const auto* cl = c->get<LinearType::Lolli>()) {
                unify(sl->domain, cl->domain, span);
                unify(sl->codomain, cl->codomain, span);
                return;
            }
        }
        if (const auto* sb = s->get<LinearType::Bang>()) {
            if (const auto* cb = c->get<LinearType::Bang>()) {
                unify(sb->inner, cb->inner, span);
                return;
            }
        }
        throw TypeMismatch(type_to_string(*s), type_to_string(*c), span);
    }
};

}  // namespace

RoutineSignature check_routine(const SyntaxNode& lambda, const GlobalTypes& globals,
                               const std::string& routine_name) {
    return RoutineChecker(globals).check(lambda, routine_name);
}

SignatureTable check_quantum_library(const NodeList& nodes,
                                     const SignatureTable& already_loaded) {
    GlobalTypes globals;
    for (const auto& [name, sig] : already_loaded) {
        TypePtr t = sig.result;
        for (auto it = sig.parameters.rbegin(); it != sig.parameters.rend(); ++it)
            t = make_lolli(*it, t);
        globals.emplace(name, t);
    }

    SignatureTable table;
    for (const NodePtr& node : nodes) {
        if (node->get<SyntaxNode::Load>()) continue;
        const auto* assign = node->get<SyntaxNode::Assignment>();
        if (!assign || !assign->expr->get<SyntaxNode::Lambda>())
            throw TypeCheckError("a quantum library may only contain routine definitions",
                                 node->span);
        try {
            RoutineSignature sig = check_routine(*assign->expr, globals, assign->name);
            TypePtr as_type = sig.result;
            for (auto it = sig.parameters.rbegin(); it != sig.parameters.rend(); ++it)
                as_type = make_lolli(*it, as_type);
            globals.emplace(assign->name, as_type);
            table.emplace(assign->name, std::move(sig));
        } catch (TypeCheckError& err) {
            err.set_routine(assign->name);
            throw;
        }
    }
    return table;
}

}  // namespace qumin
