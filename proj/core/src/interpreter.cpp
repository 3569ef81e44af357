#include "qumin/interpreter.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "qumin/linear_type.hpp"

namespace qumin {

namespace fs = std::filesystem;

namespace {

std::uint64_t entropy_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<fs::path> parse_env_path() {
    std::vector<fs::path> dirs;
    if (const char* var = std::getenv("QUMIN_PATH")) {
        std::string s(var);
        std::size_t start = 0;
        while (start <= s.size()) {
            std::size_t colon = s.find(':', start);
            std::string part = s.substr(start, colon == std::string::npos ? colon : colon - start);
            if (!part.empty()) dirs.emplace_back(part);
            if (colon == std::string::npos) break;
            start = colon + 1;
        }
    }
    return dirs;
}

}  // namespace

struct Interpreter::DepthGuard {
    Interpreter& interp;
    Span span;
    DepthGuard(Interpreter& i, Span s) : interp(i), span(s) {
        if (++interp.depth_ > interp.options_.recursion_limit)
            throw EvalError(EvalErrorKind::RecursionLimit,
                            "recursion limit of " +
                                std::to_string(interp.options_.recursion_limit) +
                                " frames exceeded",
                            span);
    }
    ~DepthGuard() { --interp.depth_; }
};

Interpreter::Interpreter(InterpreterOptions options)
    : options_(std::move(options)),
      rng_(options_.seed ? *options_.seed : entropy_seed()),
      builtins_(install_builtins()),
      globals_(Environment::create(builtins_)),
      entry_dir_(fs::current_path()) {
    if (options_.use_env_search_path) env_path_dirs_ = parse_env_path();
    if (!options_.output)
        options_.output = [](std::string_view line) {
            std::cout << line << '\n';
        };
}

Interpreter::~Interpreter() {
    if (globals_) globals_->clear_bindings();
}

void Interpreter::emit_line(std::string_view line) { options_.output(line); }

void Interpreter::emit_report(const MeasurementReport& report) {
    if (options_.report_hook) options_.report_hook(report);
    for (const std::string& line : render_report(report)) emit_line(line);
}

// ---------------------------------------------------------------------------
// Module loading and the run pipeline
// ---------------------------------------------------------------------------

fs::path Interpreter::resolve_module(const std::string& name) const {
    std::vector<fs::path> dirs;
    dirs.push_back(entry_dir_);
    dirs.insert(dirs.end(), options_.search_path.begin(), options_.search_path.end());
    dirs.insert(dirs.end(), env_path_dirs_.begin(), env_path_dirs_.end());
    for (const fs::path& dir : dirs) {
        fs::path candidate = dir / (name + ".qum");
        std::error_code ec;
        if (fs::exists(candidate, ec)) return candidate;
    }
    throw IoError("module '" + name + "' not found on the search path");
}

void Interpreter::load_module(const std::string& name, bool quantum) {
    fs::path path = resolve_module(name);
    std::error_code ec;
    fs::path canonical = fs::weakly_canonical(path, ec);
    std::string key = (ec ? path : canonical).string();
    if (loaded_.count(key)) return;  // at most once per run
    if (loading_.count(key)) throw IoError("cyclic load of module '" + name + "'");
    loading_.insert(key);

    std::string source = read_file(path);
    NodeList program = parse_program(source);

    // Nested loads follow the same order: quantum first, then classical.
    for (const NodePtr& node : program)
        if (const auto* load = node->get<SyntaxNode::Load>(); load && load->quantum)
            load_module(load->name, true);
    for (const NodePtr& node : program)
        if (const auto* load = node->get<SyntaxNode::Load>(); load && !load->quantum)
            load_module(load->name, false);

    if (quantum) {
        SignatureTable sigs = check_quantum_library(program, quantum_signatures_);
        for (const NodePtr& node : program) {
            const auto* assign = node->get<SyntaxNode::Assignment>();
            if (!assign) continue;
            const auto* lambda = assign->expr->get<SyntaxNode::Lambda>();
            Closure closure;
            for (const Param& p : lambda->params) closure.params.push_back(p.name);
            closure.body = lambda->body;
            closure.env = globals_;
            closure.signature =
                std::make_shared<RoutineSignature>(sigs.at(assign->name));
            globals_->define(assign->name, Value::closure(std::move(closure)), node->span);
        }
        for (auto& [rname, sig] : sigs) quantum_signatures_.emplace(rname, std::move(sig));
    } else {
        for (const NodePtr& node : program) {
            if (node->get<SyntaxNode::Load>()) continue;
            eval(*node, globals_);
        }
    }

    loading_.erase(key);
    loaded_.insert(key);
}

void Interpreter::exec_program(const NodeList& program) {
    for (const NodePtr& node : program)
        if (const auto* load = node->get<SyntaxNode::Load>(); load && load->quantum)
            load_module(load->name, true);
    for (const NodePtr& node : program)
        if (const auto* load = node->get<SyntaxNode::Load>(); load && !load->quantum)
            load_module(load->name, false);
    for (const NodePtr& node : program) {
        if (node->get<SyntaxNode::Load>()) continue;
        eval(*node, globals_);
    }
}

void Interpreter::run_file(const fs::path& path) {
    std::string source = read_file(path);
    entry_dir_ = path.has_parent_path() ? path.parent_path() : fs::current_path();
    NodeList program = parse_program(source);
    exec_program(program);
}

Value Interpreter::eval_source(std::string_view source) {
    NodePtr expr = parse_expr(source);
    return eval(*expr, globals_);
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

Value eval_body(Interpreter& interp, const NodeList& body, const EnvPtr& env) {
    Value result = Value::unit();
    for (const NodePtr& e : body) result = interp.eval(*e, env);
    return result;
}

}  // namespace

Value Interpreter::eval(const SyntaxNode& node, const EnvPtr& env) {
    if (const auto* name = node.get<SyntaxNode::Name>()) {
        if (const Value* v = env->lookup(name->text)) return *v;
        throw EvalError(EvalErrorKind::UnboundName, "unbound name '" + name->text + "'",
                        node.span);
    }
    if (const auto* lit = node.get<SyntaxNode::IntLit>()) return Value::integer(lit->value);
    if (const auto* lit = node.get<SyntaxNode::FloatLit>()) return Value::real(lit->value);
    if (const auto* lit = node.get<SyntaxNode::ComplexLit>())
        return Value::complex({lit->re, lit->im});
    if (const auto* lit = node.get<SyntaxNode::BoolLit>()) return Value::boolean(lit->value);
    if (const auto* lit = node.get<SyntaxNode::StringLit>()) return Value::string(lit->value);
    if (const auto* list = node.get<SyntaxNode::ListLit>()) {
        ValueSeq elems;
        elems.reserve(list->elems.size());
        for (const NodePtr& e : list->elems) elems.push_back(eval(*e, env));
        return Value::sequence(std::move(elems));
    }
    if (const auto* load = node.get<SyntaxNode::Load>()) {
        load_module(load->name, load->quantum);
        return Value::unit();
    }
    if (const auto* assign = node.get<SyntaxNode::Assignment>()) {
        Value v = eval(*assign->expr, env);
        env->define(assign->name, v, node.span);
        return v;
    }
    if (const auto* lambda = node.get<SyntaxNode::Lambda>()) {
        Closure closure;
        for (const Param& p : lambda->params) closure.params.push_back(p.name);
        closure.body = lambda->body;
        closure.env = env;
        Value fn = Value::closure(std::move(closure));
        if (!lambda->immediate_args) return fn;
        std::vector<Value> args;
        for (const NodePtr& a : *lambda->immediate_args) args.push_back(eval(*a, env));
        return apply_value(fn, std::move(args), node.span);
    }
    if (const auto* call = node.get<SyntaxNode::Call>()) {
        Value callee = eval(*call->callee, env);
        std::vector<Value> args;
        args.reserve(call->args.size());
        for (const NodePtr& a : call->args) args.push_back(eval(*a, env));
        return apply_value(callee, std::move(args), node.span);
    }
    if (const auto* infix = node.get<SyntaxNode::InfixCall>()) {
        const Value* op = env->lookup(infix->op_name);
        if (!op)
            throw EvalError(EvalErrorKind::UnboundName,
                            "unbound name '" + infix->op_name + "'", node.span);
        std::vector<Value> args;
        args.push_back(eval(*infix->lhs, env));
        args.push_back(eval(*infix->rhs, env));
        return apply_value(*op, std::move(args), node.span);
    }
    if (const auto* prefix = node.get<SyntaxNode::PrefixCall>()) {
        const Value* op = env->lookup(prefix->op_name);
        if (!op)
            throw EvalError(EvalErrorKind::UnboundName,
                            "unbound name '" + prefix->op_name + "'", node.span);
        std::vector<Value> args;
        args.push_back(eval(*prefix->arg, env));
        return apply_value(*op, std::move(args), node.span);
    }
    if (const auto* comp = node.get<SyntaxNode::Composition>()) {
        // f . g (x) applies right-to-left: f(g(x)).
        std::vector<Value> fns;
        for (const std::string& n : comp->names) {
            const Value* v = env->lookup(n);
            if (!v)
                throw EvalError(EvalErrorKind::UnboundName, "unbound name '" + n + "'",
                                node.span);
            fns.push_back(*v);
        }
        std::vector<Value> args;
        for (const NodePtr& a : comp->args) args.push_back(eval(*a, env));
        Value result = apply_value(fns.back(), std::move(args), node.span);
        for (std::size_t i = fns.size() - 1; i-- > 0;)
            result = apply_value(fns[i], {result}, node.span);
        return result;
    }
    const auto* branch = node.get<SyntaxNode::IfElse>();
    Value cond = eval(*branch->cond, env);
    const bool* flag = cond.get<bool>();
    if (!flag)
        throw EvalError(EvalErrorKind::DynamicType,
                        "if condition must be a boolean, found " + value_kind_name(cond),
                        branch->cond->span);
    EnvPtr arm_env = Environment::create(env);
    return eval_body(*this, *flag ? branch->then_body : branch->else_body, arm_env);
}

Value Interpreter::apply_value(const Value& callee, std::vector<Value> args, Span span) {
    if (const auto* closure_ptr = callee.get<ClosurePtr>()) {
        const Closure& closure = **closure_ptr;
        if (args.size() > closure.params.size())
            throw EvalError(EvalErrorKind::Arity,
                            "function takes " + std::to_string(closure.params.size()) +
                                " argument(s), got " + std::to_string(args.size()),
                            span);
        // Quantum boundary: validate the supplied prefix before binding
        // anything (fail fast, even under partial application).
        if (closure.signature)
            check_constraints(*closure.signature, closure.signature_offset, args, span);
        EnvPtr env = Environment::create(closure.env);
        for (std::size_t i = 0; i < args.size(); ++i)
            env->define(closure.params[i], std::move(args[i]), span);
        if (args.size() < closure.params.size()) {
            Closure rest;
            rest.params.assign(
                closure.params.begin() + static_cast<std::ptrdiff_t>(args.size()),
                closure.params.end());
            rest.body = closure.body;
            rest.env = env;
            rest.signature = closure.signature;
            rest.signature_offset = closure.signature_offset + args.size();
            return Value::closure(std::move(rest));
        }
        DepthGuard guard(*this, span);
        return eval_body(*this, closure.body, env);
    }
    if (const auto* builtin = callee.get<BuiltinPtr>()) {
        const BuiltinFn& fn = **builtin;
        if (static_cast<int>(args.size()) > fn.arity)
            throw EvalError(EvalErrorKind::Arity,
                            "'" + fn.name + "' takes " + std::to_string(fn.arity) +
                                " argument(s), got " + std::to_string(args.size()),
                            span);
        if (static_cast<int>(args.size()) < fn.arity)
            return Value{std::make_shared<const PartialBuiltin>(
                PartialBuiltin{*builtin, std::move(args)})};
        return fn.fn(*this, args, span);
    }
    if (const auto* partial = callee.get<PartialBuiltinPtr>()) {
        std::vector<Value> combined = (*partial)->supplied;
        combined.insert(combined.end(), std::make_move_iterator(args.begin()),
                        std::make_move_iterator(args.end()));
        return apply_value(Value{(*partial)->fn}, std::move(combined), span);
    }
    if (callee.seq() && args.size() == 1) {
        // A matrix is an operator; calling it applies it.
        const Value* apply_fn = builtins_->lookup("apply");
        std::vector<Value> forwarded;
        forwarded.push_back(callee);
        forwarded.push_back(std::move(args[0]));
        return apply_value(*apply_fn, std::move(forwarded), span);
    }
    throw EvalError(EvalErrorKind::DynamicType,
                    "cannot call a value of kind " + value_kind_name(callee), span);
}

// ---------------------------------------------------------------------------
// Runtime constraints at the quantum boundary
// ---------------------------------------------------------------------------

namespace {

std::string describe_value(const Value& v) {
    if (const auto* seq = v.seq()) return "a sequence of " + std::to_string((*seq)->size());
    return "a " + value_kind_name(v);
}

bool numeric_vector(const ValueSeq& seq, CVec* out) {
    for (const Value& v : seq) {
        if (!v.is_numeric()) return false;
        out->push_back(as_complex(v));
    }
    return true;
}

bool numeric_matrix(const ValueSeq& rows, CMat* out) {
    for (const Value& row : rows) {
        const auto* cells = row.seq();
        if (!cells) return false;
        CVec converted;
        if (!numeric_vector(**cells, &converted)) return false;
        out->push_back(std::move(converted));
    }
    return !out->empty();
}

}  // namespace

void Interpreter::check_constraints(const RoutineSignature& signature, std::size_t offset,
                                    const std::vector<Value>& args, Span span) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        std::size_t position = offset + i;
        const Value& arg = args[i];
        TypePtr type = strip_bang(signature.parameters[position]);

        if (auto dim = qubit_dim(*type)) {
            std::size_t want = std::size_t{1} << *dim;
            std::string expected = "a normalized state vector of " + std::to_string(want) +
                                   " amplitudes (" + std::to_string(*dim) + " qubit(s))";
            const auto* seq = arg.seq();
            CVec amplitudes;
            if (!seq || !numeric_vector(**seq, &amplitudes) || amplitudes.size() != want)
                throw ConstraintViolation(position, expected, describe_value(arg), span);
            double norm = vector_norm(amplitudes);
            if (std::abs(norm - 1.0) > 1e-6)
                throw ConstraintViolation(position, expected,
                                          "a vector with norm " + std::to_string(norm), span);
            continue;
        }
        if (const auto* lolli = type->get<LinearType::Lolli>()) {
            auto dom = qubit_dim(*lolli->domain);
            auto cod = qubit_dim(*lolli->codomain);
            if (dom && cod) {
                std::size_t want_cols = std::size_t{1} << *dom;
                std::size_t want_rows = std::size_t{1} << *cod;
                std::string expected = "a " + std::to_string(want_rows) + "x" +
                                       std::to_string(want_cols) + " unitary matrix";
                const auto* seq = arg.seq();
                CMat matrix;
                if (!seq || !numeric_matrix(**seq, &matrix))
                    throw ConstraintViolation(position, expected, describe_value(arg), span);
                if (matrix_rows(matrix) != want_rows || matrix_cols(matrix) != want_cols)
                    throw ConstraintViolation(
                        position, expected,
                        "a " + std::to_string(matrix_rows(matrix)) + "x" +
                            std::to_string(matrix_cols(matrix)) + " matrix",
                        span);
                if (want_rows == want_cols && !is_unitary(matrix, 1e-6))
                    throw ConstraintViolation(position, expected,
                                              "a matrix that is not unitary", span);
                continue;
            }
            // Higher-order parameter: any callable satisfies it.
            if (!arg.is_callable())
                throw ConstraintViolation(position, "a function", describe_value(arg), span);
            continue;
        }
        if (type->get<LinearType::Int>()) {
            if (!arg.get<std::int64_t>())
                throw ConstraintViolation(position, "an integer", describe_value(arg), span);
            continue;
        }
        if (type->get<LinearType::ListT>()) {
            const auto* seq = arg.seq();
            bool ok = seq != nullptr;
            if (ok)
                for (const Value& v : **seq) ok = ok && v.get<std::int64_t>() != nullptr;
            if (!ok)
                throw ConstraintViolation(position, "a sequence of integers",
                                          describe_value(arg), span);
            continue;
        }
        throw ConstraintViolation(position, type_to_string(*type), describe_value(arg), span);
    }
}

}  // namespace qumin
