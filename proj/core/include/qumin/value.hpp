#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "qumin/ast.hpp"
#include "qumin/quantum.hpp"
#include "qumin/typecheck.hpp"

namespace qumin {

class Environment;
using EnvPtr = std::shared_ptr<Environment>;

class Interpreter;
struct Value;

using ValueSeq = std::vector<Value>;
using SeqPtr = std::shared_ptr<const ValueSeq>;

/// User function with its remaining parameters and captured environment.
/// Routines from quantum libraries also carry their checked signature;
/// signature_offset tracks how many parameters partial application already
/// consumed.
struct Closure {
    std::vector<std::string> params;
    NodeList body;
    EnvPtr env;
    std::shared_ptr<const RoutineSignature> signature;
    std::size_t signature_offset = 0;
};
using ClosurePtr = std::shared_ptr<const Closure>;

struct BuiltinFn {
    std::string name;
    int arity = 0;
    std::function<Value(Interpreter&, std::vector<Value>&, Span)> fn;
};
using BuiltinPtr = std::shared_ptr<const BuiltinFn>;

/// A builtin with some arguments already supplied.
struct PartialBuiltin {
    BuiltinPtr fn;
    ValueSeq supplied;
};
using PartialBuiltinPtr = std::shared_ptr<const PartialBuiltin>;

struct Unit {};

struct Value {
    using Data = std::variant<Unit, std::int64_t, double, Complex, bool, std::string,
                              SeqPtr, ClosurePtr, BuiltinPtr, PartialBuiltinPtr>;
    Data data;

    static Value unit() { return Value{Unit{}}; }
    static Value integer(std::int64_t v) { return Value{v}; }
    static Value real(double v) { return Value{v}; }
    static Value complex(Complex v) { return Value{v}; }
    static Value boolean(bool v) { return Value{v}; }
    static Value string(std::string v) { return Value{std::move(v)}; }
    static Value sequence(ValueSeq v) {
        return Value{std::make_shared<const ValueSeq>(std::move(v))};
    }
    static Value closure(Closure c) {
        return Value{std::make_shared<const Closure>(std::move(c))};
    }

    template <typename T>
    const T* get() const {
        return std::get_if<T>(&data);
    }
    bool is_callable() const {
        return get<ClosurePtr>() || get<BuiltinPtr>() || get<PartialBuiltinPtr>();
    }
    bool is_numeric() const {
        return get<std::int64_t>() || get<double>() || get<Complex>();
    }
    const SeqPtr* seq() const { return get<SeqPtr>(); }
};

std::string value_kind_name(const Value& v);
std::string to_display_string(const Value& v);

/// Deep structural equality: numbers compare with promotion (floats within
/// 1e-12), sequences element-wise; values of different kinds are unequal.
bool values_equal(const Value& a, const Value& b);

Complex as_complex(const Value& v);  // numeric values only

}  // namespace qumin
