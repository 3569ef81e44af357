#include <cmath>

#include "qumin/environment.hpp"
#include "qumin/interpreter.hpp"
#include "qumin/value.hpp"

namespace qumin {

namespace {

constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void type_error(const std::string& msg, Span span) {
    throw EvalError(EvalErrorKind::DynamicType, msg, span);
}

bool to_cvec(const Value& v, CVec* out) {
    const auto* seq = v.seq();
    if (!seq) return false;
    for (const Value& e : **seq) {
        if (!e.is_numeric()) return false;
        out->push_back(as_complex(e));
    }
    return true;
}

bool to_cmat(const Value& v, CMat* out) {
    const auto* rows = v.seq();
    if (!rows || (*rows)->empty()) return false;
    for (const Value& row : **rows) {
        CVec cells;
        if (!row.seq() || !to_cvec(row, &cells)) return false;
        out->push_back(std::move(cells));
    }
    return true;
}

bool is_matrix_value(const Value& v) {
    const auto* rows = v.seq();
    return rows && !(*rows)->empty() && (**rows)[0].seq() != nullptr;
}

// Quantum results come back as plain numbers where possible so structural
// equality against literals like [1 0] keeps working.
Value simplify_number(const Complex& c) {
    if (c.imag() != 0.0) return Value::complex(c);
    double re = c.real();
    if (std::trunc(re) == re && std::abs(re) < 9.0e15)
        return Value::integer(static_cast<std::int64_t>(re));
    return Value::real(re);
}

Value cvec_to_value(const CVec& v) {
    ValueSeq out;
    out.reserve(v.size());
    for (const Complex& c : v) out.push_back(simplify_number(c));
    return Value::sequence(std::move(out));
}

Value cmat_to_value(const CMat& m) {
    ValueSeq rows;
    rows.reserve(m.size());
    for (const CVec& row : m) rows.push_back(cvec_to_value(row));
    return Value::sequence(std::move(rows));
}

// -- numeric tower: int -> float -> complex ---------------------------------

enum class NumKind { Int, Float, Cplx };

NumKind numeric_kind(const Value& v) {
    if (v.get<std::int64_t>()) return NumKind::Int;
    if (v.get<double>()) return NumKind::Float;
    return NumKind::Cplx;
}

NumKind join(NumKind a, NumKind b) { return a > b ? a : b; }

Value numeric_binop(char op, const Value& a, const Value& b, Span span) {
    NumKind kind = join(numeric_kind(a), numeric_kind(b));
    if (op == '/') {
        Complex divisor = as_complex(b);
        if (divisor == Complex{0, 0})
            throw EvalError(EvalErrorKind::DivideByZero, "division by zero", span);
        if (kind == NumKind::Cplx) return Value::complex(as_complex(a) / divisor);
        return Value::real(as_complex(a).real() / divisor.real());
    }
    if (kind == NumKind::Int) {
        std::int64_t x = *a.get<std::int64_t>();
        std::int64_t y = *b.get<std::int64_t>();
        switch (op) {
            case '+': return Value::integer(x + y);
            case '-': return Value::integer(x - y);
            default: return Value::integer(x * y);
        }
    }
    Complex x = as_complex(a);
    Complex y = as_complex(b);
    Complex r = op == '+' ? x + y : op == '-' ? x - y : x * y;
    if (kind == NumKind::Float) return Value::real(r.real());
    return Value::complex(r);
}

Value elementwise(char op, const Value& a, const Value& b, Span span);

Value scale_sequence(char op, const Value& scalar, const Value& seq, bool scalar_left,
                     Span span) {
    ValueSeq out;
    for (const Value& e : **seq.seq()) {
        if (e.seq()) {
            out.push_back(scale_sequence(op, scalar, e, scalar_left, span));
        } else if (e.is_numeric()) {
            out.push_back(scalar_left ? numeric_binop(op, scalar, e, span)
                                      : numeric_binop(op, e, scalar, span));
        } else {
            type_error("arithmetic on a sequence containing " + value_kind_name(e), span);
        }
    }
    return Value::sequence(std::move(out));
}

Value elementwise(char op, const Value& a, const Value& b, Span span) {
    const auto& xs = **a.seq();
    const auto& ys = **b.seq();
    if (xs.size() != ys.size())
        type_error("sequences of different length in arithmetic", span);
    ValueSeq out;
    out.reserve(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const Value& x = xs[i];
        const Value& y = ys[i];
        if (x.seq() && y.seq()) {
            out.push_back(elementwise(op, x, y, span));
        } else if (x.is_numeric() && y.is_numeric()) {
            out.push_back(numeric_binop(op, x, y, span));
        } else {
            type_error("mismatched operands in sequence arithmetic", span);
        }
    }
    return Value::sequence(std::move(out));
}

Value arith(char op, const Value& a, const Value& b, Span span) {
    if (a.is_numeric() && b.is_numeric()) return numeric_binop(op, a, b, span);
    if ((op == '+' || op == '-') && a.seq() && b.seq()) return elementwise(op, a, b, span);
    if (op == '*' && a.is_numeric() && b.seq())
        return scale_sequence(op, a, b, /*scalar_left=*/true, span);
    if (op == '*' && a.seq() && b.is_numeric())
        return scale_sequence(op, b, a, /*scalar_left=*/false, span);
    if (op == '/' && a.seq() && b.is_numeric())
        return scale_sequence(op, b, a, /*scalar_left=*/false, span);
    type_error(std::string("'") + op + "' cannot combine " + value_kind_name(a) + " and " +
                   value_kind_name(b),
               span);
}

// -- argument accessors ------------------------------------------------------

const ValueSeq& want_seq(const Value& v, const char* who, Span span) {
    const auto* seq = v.seq();
    if (!seq) type_error(std::string(who) + " needs a sequence, got " + value_kind_name(v), span);
    return **seq;
}

CVec want_vector(const Value& v, const char* who, Span span) {
    CVec out;
    if (!to_cvec(v, &out))
        type_error(std::string(who) + " needs a vector of numbers, got " +
                       (is_matrix_value(v) ? "a matrix" : value_kind_name(v)),
                   span);
    return out;
}

CMat want_matrix(const Value& v, const char* who, Span span) {
    CMat out;
    if (!to_cmat(v, &out))
        type_error(std::string(who) + " needs a matrix (a sequence of rows), got " +
                       value_kind_name(v),
                   span);
    return out;
}

std::int64_t want_int(const Value& v, const char* who, Span span) {
    const auto* i = v.get<std::int64_t>();
    if (!i) type_error(std::string(who) + " needs an integer, got " + value_kind_name(v), span);
    return *i;
}

double want_real(const Value& v, const char* who, Span span) {
    if (const auto* i = v.get<std::int64_t>()) return static_cast<double>(*i);
    if (const auto* d = v.get<double>()) return *d;
    type_error(std::string(who) + " needs a real number, got " + value_kind_name(v), span);
}

}  // namespace

EnvPtr install_builtins() {
    EnvPtr env = Environment::create();

    auto def = [&env](const char* name, int arity,
                      std::function<Value(Interpreter&, std::vector<Value>&, Span)> fn) {
        env->define(name,
                    Value{std::make_shared<const BuiltinFn>(
                        BuiltinFn{name, arity, std::move(fn)})},
                    Span{});
    };

    // -- arithmetic and comparison -------------------------------------------
    for (char op : {'+', '-', '*', '/'}) {
        char name[2] = {op, 0};
        def(name, 2, [op](Interpreter&, std::vector<Value>& a, Span span) {
            return arith(op, a[0], a[1], span);
        });
    }
    def("=", 2, [](Interpreter&, std::vector<Value>& a, Span) {
        return Value::boolean(values_equal(a[0], a[1]));
    });

    // -- operator application and tensor products ----------------------------
    auto apply_impl = [](Interpreter& interp, std::vector<Value>& a, Span span) -> Value {
        if (a[0].is_callable()) {
            std::vector<Value> rest(a.begin() + 1, a.end());
            return interp.apply_value(a[0], std::move(rest), span);
        }
        CMat op = want_matrix(a[0], "apply", span);
        if (is_matrix_value(a[1])) return cmat_to_value(matrix_product(op, want_matrix(a[1], "apply", span)));
        return cvec_to_value(apply_matrix(op, want_vector(a[1], "apply", span)));
    };
    def("apply", 2, apply_impl);
    def("\xc2\xb7", 2, apply_impl);  // ·

    auto tensor_impl = [](Interpreter&, std::vector<Value>& a, Span span) -> Value {
        bool lm = is_matrix_value(a[0]);
        bool rm = is_matrix_value(a[1]);
        if (lm != rm)
            throw QuantumError(QuantumErrorKind::ShapeError,
                               "tensor needs two vectors or two matrices");
        if (lm)
            return cmat_to_value(
                kron(want_matrix(a[0], "tensor", span), want_matrix(a[1], "tensor", span)));
        return cvec_to_value(
            kron(want_vector(a[0], "tensor", span), want_vector(a[1], "tensor", span)));
    };
    def("tensor", 2, tensor_impl);
    def("\xe2\x8a\x97", 2, tensor_impl);  // ⊗

    def("tensorOp", 2, [](Interpreter&, std::vector<Value>& a, Span span) {
        return cmat_to_value(
            kron(want_matrix(a[0], "tensorOp", span), want_matrix(a[1], "tensorOp", span)));
    });

    def("applyN", 3, [](Interpreter&, std::vector<Value>& a, Span span) {
        CMat op = want_matrix(a[0], "applyN", span);
        CVec state = want_vector(a[1], "applyN", span);
        std::int64_t times = want_int(a[2], "applyN", span);
        return cvec_to_value(apply_n(op, std::move(state), times));
    });

    def("outer", 2, [](Interpreter&, std::vector<Value>& a, Span span) {
        return cmat_to_value(
            outer_product(want_vector(a[0], "outer", span), want_vector(a[1], "outer", span)));
    });

    def("oracle", 1, [](Interpreter&, std::vector<Value>& a, Span span) {
        return cmat_to_value(oracle_matrix(want_matrix(a[0], "oracle", span)));
    });

    def("generateMatrix", 2, [](Interpreter& interp, std::vector<Value>& a, Span span) {
        if (!a[0].is_callable())
            type_error("generateMatrix needs an operator written as a function", span);
        std::int64_t dim = want_int(a[1], "generateMatrix", span);
        Value fn = a[0];
        CMat m = generate_matrix(
            [&interp, &fn, span](const CVec& basis) {
                ValueSeq elems;
                elems.reserve(basis.size());
                for (const Complex& c : basis) elems.push_back(simplify_number(c));
                Value out = interp.apply_value(fn, {Value::sequence(std::move(elems))}, span);
                CVec column;
                if (!to_cvec(out, &column))
                    throw QuantumError(QuantumErrorKind::ShapeError,
                                       "operator must return a vector of numbers");
                return column;
            },
            static_cast<int>(dim));
        return cmat_to_value(m);
    });

    def("measure", 1, [](Interpreter& interp, std::vector<Value>& a, Span span) {
        CVec state = want_vector(a[0], "measure", span);
        MeasureResult result = measure_state(state, interp.rng());
        interp.emit_report(result.report);
        return cvec_to_value(result.state.amplitudes);
    });

    def("subsystems", 2, [](Interpreter& interp, std::vector<Value>& a, Span span) {
        CVec state = want_vector(a[0], "subsystems", span);
        std::vector<int> config;
        for (const Value& v : want_seq(a[1], "subsystems", span))
            config.push_back(static_cast<int>(want_int(v, "subsystems", span)));
        MeasureResult result = measure_subsystems(state, config, interp.rng());
        interp.emit_report(result.report);
        return cvec_to_value(result.state.amplitudes);
    });

    // -- sequences -------------------------------------------------------------
    def("car", 1, [](Interpreter&, std::vector<Value>& a, Span span) {
        const ValueSeq& seq = want_seq(a[0], "car", span);
        if (seq.empty()) type_error("car of an empty sequence", span);
        return seq.front();
    });
    def("cdr", 1, [](Interpreter&, std::vector<Value>& a, Span span) {
        const ValueSeq& seq = want_seq(a[0], "cdr", span);
        if (seq.empty()) type_error("cdr of an empty sequence", span);
        return Value::sequence(ValueSeq(seq.begin() + 1, seq.end()));
    });
    // append(x, xs) puts x at the head, prepend(x, xs) at the tail; both take
    // the element first, matching how the example programs build vectors.
    def("append", 2, [](Interpreter&, std::vector<Value>& a, Span span) {
        const ValueSeq& seq = want_seq(a[1], "append", span);
        ValueSeq out;
        out.reserve(seq.size() + 1);
        out.push_back(a[0]);
        out.insert(out.end(), seq.begin(), seq.end());
        return Value::sequence(std::move(out));
    });
    def("prepend", 2, [](Interpreter&, std::vector<Value>& a, Span span) {
        const ValueSeq& seq = want_seq(a[1], "prepend", span);
        ValueSeq out;
        out.reserve(seq.size() + 1);
        out.insert(out.end(), seq.begin(), seq.end());
        out.push_back(a[0]);
        return Value::sequence(std::move(out));
    });
    auto length_impl = [](Interpreter&, std::vector<Value>& a, Span span) -> Value {
        if (const auto* s = a[0].get<std::string>())
            return Value::integer(static_cast<std::int64_t>(s->size()));
        return Value::integer(static_cast<std::int64_t>(want_seq(a[0], "length", span).size()));
    };
    def("length", 1, length_impl);
    def("len", 1, length_impl);

    def("fold", 2, [](Interpreter& interp, std::vector<Value>& a, Span span) {
        if (!a[0].is_callable()) type_error("fold needs a function", span);
        const ValueSeq& seq = want_seq(a[1], "fold", span);
        if (seq.empty()) type_error("fold of an empty sequence", span);
        Value acc = seq.front();
        for (std::size_t i = 1; i < seq.size(); ++i)
            acc = interp.apply_value(a[0], {acc, seq[i]}, span);
        return acc;
    });

    // -- math -------------------------------------------------------------------
    def("exp", 1, [](Interpreter&, std::vector<Value>& a, Span span) {
        if (const auto* c = a[0].get<Complex>()) return Value::complex(std::exp(*c));
        return Value::real(std::exp(want_real(a[0], "exp", span)));
    });
    def("sqrt", 1, [](Interpreter&, std::vector<Value>& a, Span span) {
        if (const auto* c = a[0].get<Complex>()) return Value::complex(std::sqrt(*c));
        double x = want_real(a[0], "sqrt", span);
        if (x < 0) type_error("sqrt of a negative number; pass a complex value", span);
        return Value::real(std::sqrt(x));
    });
    def("logTwo", 1, [](Interpreter&, std::vector<Value>& a, Span span) {
        double x = want_real(a[0], "logTwo", span);
        if (x <= 0) type_error("logTwo needs a positive number", span);
        return Value::real(std::log2(x));
    });
    def("toInt", 1, [](Interpreter&, std::vector<Value>& a, Span span) {
        if (const auto* i = a[0].get<std::int64_t>()) return Value::integer(*i);
        double x = want_real(a[0], "toInt", span);
        return Value::integer(static_cast<std::int64_t>(std::trunc(x)));
    });

    env->define("pi", Value::real(kPi), Span{});
    return env;
}

}  // namespace qumin
