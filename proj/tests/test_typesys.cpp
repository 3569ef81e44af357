#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>
#include <string>

#include "qumin/linear_type.hpp"
#include "qumin/parser.hpp"
#include "qumin/typecheck.hpp"

using namespace qumin;

namespace {

const SyntaxNode& routine_node(const NodeList& program) {
    REQUIRE(program.size() == 1);
    const auto* assign = program[0]->get<SyntaxNode::Assignment>();
    REQUIRE(assign);
    return *assign->expr;
}

RoutineSignature check_source(const std::string& source) {
    NodeList program = parse_program(source);
    const auto* assign = program.at(0)->get<SyntaxNode::Assignment>();
    REQUIRE(assign);
    return check_routine(*assign->expr, {}, assign->name);
}

int annotation_qubits(const TypeAnnotation& ann) {
    struct V {
        int operator()(const TypeAnnotation::Qubit&) const { return 1; }
        int operator()(const TypeAnnotation::Int&) const { return 0; }
        int operator()(const TypeAnnotation::List&) const { return 0; }
        int operator()(const TypeAnnotation::Tensor& t) const {
            return annotation_qubits(*t.lhs) + annotation_qubits(*t.rhs);
        }
        int operator()(const TypeAnnotation::Fn& f) const {
            return annotation_qubits(*f.domain) + annotation_qubits(*f.codomain);
        }
        int operator()(const TypeAnnotation::Operator& o) const { return 2 * o.qubits; }
        int operator()(const TypeAnnotation::Bang& b) const { return annotation_qubits(*b.inner); }
    };
    return std::visit(V{}, ann.data);
}

int type_qubits(const LinearType& t) {
    if (const auto* q = t.get<LinearType::QubitPow>()) return q->dim.value;
    if (const auto* tp = t.get<LinearType::Tensor>())
        return type_qubits(*tp->lhs) + type_qubits(*tp->rhs);
    if (const auto* l = t.get<LinearType::Lolli>())
        return type_qubits(*l->domain) + type_qubits(*l->codomain);
    if (const auto* b = t.get<LinearType::Bang>()) return type_qubits(*b->inner);
    return 0;
}

std::string random_annotation(std::mt19937& gen, int depth) {
    std::uniform_int_distribution<int> pick(0, depth > 0 ? 6 : 3);
    switch (pick(gen)) {
        case 0: return "qubit";
        case 1: return "int";
        case 2: return "list";
        case 3: {
            std::uniform_int_distribution<int> dim(1, 4);
            return "operator[" + std::to_string(dim(gen)) + "]";
        }
        case 4:
            return random_annotation(gen, depth - 1) + " * " + random_annotation(gen, depth - 1);
        case 5:
            return random_annotation(gen, depth - 1) + " > " + random_annotation(gen, depth - 1);
        default:
            return "!{" + random_annotation(gen, depth - 1) + "}";
    }
}

}  // namespace

TEST_CASE("annotation desugaring") {
    SUBCASE("operator[2] becomes qubit^2 -o qubit^2") {
        TypePtr t = desugar_annotation(*parse_type_annotation("operator[2]"));
        const auto* lolli = t->get<LinearType::Lolli>();
        REQUIRE(lolli);
        CHECK(qubit_dim(*lolli->domain) == 2);
        CHECK(qubit_dim(*lolli->codomain) == 2);
    }
    SUBCASE("qubit is qubit^1") {
        TypePtr t = desugar_annotation(*parse_type_annotation("qubit"));
        CHECK(qubit_dim(*t) == 1);
        CHECK(types_equivalent(*t, *make_qubits(1)));
    }
    SUBCASE("!{qubit * qubit} is a banged tensor") {
        TypePtr t = desugar_annotation(*parse_type_annotation("!{qubit * qubit}"));
        const auto* bang = t->get<LinearType::Bang>();
        REQUIRE(bang);
        CHECK(bang->inner->get<LinearType::Tensor>());
        CHECK(qubit_dim(*bang->inner) == 2);
    }
    SUBCASE("double bang normalizes") {
        TypePtr t = desugar_annotation(*parse_type_annotation("!{!{int}}"));
        const auto* bang = t->get<LinearType::Bang>();
        REQUIRE(bang);
        CHECK(bang->inner->get<LinearType::Int>());
    }
}

TEST_CASE("desugaring is deterministic and preserves qubit counts") {
    std::mt19937 gen(20240611);
    for (int i = 0; i < 200; ++i) {
        std::string source = random_annotation(gen, 3);
        CAPTURE(source);
        AnnotationPtr ann = parse_type_annotation(source);
        TypePtr once = desugar_annotation(*ann);
        TypePtr twice = desugar_annotation(*ann);
        CHECK(types_equivalent(*once, *twice));
        CHECK(annotation_qubits(*ann) == type_qubits(*once));
    }
}

TEST_CASE("qubit flattening in type equivalence") {
    TypePtr pair = make_tensor(make_qubits(1), make_qubits(1));
    CHECK(types_equivalent(*pair, *make_qubits(2)));
    TypePtr triple = make_tensor(*&pair, make_qubits(1));
    CHECK(types_equivalent(*triple, *make_qubits(3)));
    CHECK_FALSE(types_equivalent(*pair, *make_qubits(3)));
    CHECK_FALSE(types_equivalent(*pair, *make_int()));
}

TEST_CASE("scheme instantiation") {
    SUBCASE("tensorOp at n=1, m=1") {
        TypePtr t = instantiate_scheme("tensorOp", {1, 1});
        TypePtr q1 = make_qubits(1);
        TypePtr op1 = make_lolli(q1, q1);
        TypePtr pair = make_tensor(q1, q1);
        TypePtr expected = make_lolli(op1, make_lolli(op1, make_lolli(pair, pair)));
        CHECK(types_equivalent(*t, *expected));
    }
    SUBCASE("measure at n=3") {
        TypePtr t = instantiate_scheme("measure", {3});
        TypePtr expected = make_lolli(make_qubits(3), make_bang(make_qubits(3)));
        CHECK(types_equivalent(*t, *expected));
    }
    SUBCASE("tensor at n=m=1") {
        TypePtr t = instantiate_scheme("\xe2\x8a\x97", {1, 1});
        TypePtr q1 = make_qubits(1);
        TypePtr expected =
            make_lolli(q1, make_lolli(q1, make_tensor(q1, q1)));
        CHECK(types_equivalent(*t, *expected));
    }
    SUBCASE("apply and the unicode alias agree") {
        CHECK(types_equivalent(*instantiate_scheme("apply", {2}),
                               *instantiate_scheme("\xc2\xb7", {2})));
    }
}

TEST_CASE("cloning is rejected with a linearity violation") {
    NodeList program = parse_program("let cloning = lambda(q : qubit){ tensor(q,q) }");
    try {
        check_routine(routine_node(program), {});
        FAIL("expected LinearityViolation");
    } catch (const LinearityViolation& err) {
        CHECK(err.name() == "q");
        CHECK(err.used_count() == 2);
    }
}

TEST_CASE("unused linear variables are rejected (no deleting)") {
    NodeList program = parse_program("let drop = lambda(q : qubit){ 5 }");
    try {
        check_routine(routine_node(program), {});
        FAIL("expected LinearityViolation");
    } catch (const LinearityViolation& err) {
        CHECK(err.name() == "q");
        CHECK(err.used_count() == 0);
    }
}

TEST_CASE("simpleRoutine checks to qubit -o (qubit -o qubit) -o !qubit") {
    RoutineSignature sig = check_source(
        "let simpleRoutine = lambda(q : qubit, U : operator[1]){ measure(apply(U,q)) }");
    REQUIRE(sig.parameters.size() == 2);
    CHECK(types_equivalent(*sig.parameters[0], *make_qubits(1)));
    CHECK(types_equivalent(*sig.parameters[1], *make_operator(1)));
    CHECK(types_equivalent(*sig.result, *make_bang(make_qubits(1))));
}

TEST_CASE("deutschRoutine is accepted with result !qubit^2") {
    RoutineSignature sig = check_source(
        "let deutschRoutine = lambda(state : qubit * qubit, H : !{operator[1]}, "
        "I : !{operator[1]}, U : !{operator[2]}){"
        " measure(apply(tensorOp(H,I), apply(U, apply(tensorOp(H,H), state)))) }");
    REQUIRE(sig.parameters.size() == 4);
    CHECK(types_equivalent(*sig.parameters[0], *make_qubits(2)));
    CHECK(types_equivalent(*sig.parameters[3], *make_bang(make_operator(2))));
    CHECK(types_equivalent(*sig.result, *make_bang(make_qubits(2))));
}

TEST_CASE("grover routines from both programs are accepted") {
    SUBCASE("three-qubit version, measured") {
        RoutineSignature sig = check_source(
            "let groverRoutine = lambda(state : qubit * qubit * qubit, "
            "iteration : !{operator[3]}, times : int){"
            " measure(applyN(iteration,state,times)) }");
        REQUIRE(sig.parameters.size() == 3);
        CHECK(types_equivalent(*sig.parameters[0], *make_qubits(3)));
        CHECK(types_equivalent(*sig.parameters[1], *make_bang(make_operator(3))));
        CHECK(types_equivalent(*sig.parameters[2], *make_int()));
        CHECK(types_equivalent(*sig.result, *make_bang(make_qubits(3))));
    }
    SUBCASE("three-qubit version, marginals") {
        RoutineSignature sig = check_source(
            "let groverRoutine = lambda(state : qubit * qubit * qubit, "
            "iteration : !{operator[3]}, times : int){"
            " subsystems(applyN(iteration,state,times),[2 1]) }");
        CHECK(types_equivalent(*sig.result, *make_bang(make_qubits(3))));
    }
    SUBCASE("four-qubit generalisation") {
        RoutineSignature sig = check_source(
            "let groverRoutine = lambda(state : qubit * qubit * qubit * qubit, "
            "iteration : !{operator[4]}, times : int){"
            " subsystems(applyN(iteration,state,times),[3 1]) }");
        CHECK(types_equivalent(*sig.parameters[0], *make_qubits(4)));
        CHECK(types_equivalent(*sig.result, *make_bang(make_qubits(4))));
    }
}

TEST_CASE("dimension mismatches are reported") {
    NodeList program = parse_program(
        "let bad = lambda(state : qubit * qubit, U : !{operator[3]}){"
        " measure(apply(U,state)) }");
    CHECK_THROWS_AS(check_routine(routine_node(program), {}), DimMismatch);
}

TEST_CASE("classical literals and control flow are outside the fragment") {
    CHECK_THROWS_AS(
        check_source("let bad = lambda(q : qubit){ measure(apply(3.5,q)) }"),
        TypeCheckError);
    CHECK_THROWS_AS(
        check_source("let bad = lambda(q : qubit){ if((q = q)){ q } else { q } }"),
        TypeCheckError);
    CHECK_THROWS_AS(check_source("let bad = lambda(q : qubit){ \"text\" }"),
                    TypeCheckError);
}

TEST_CASE("unannotated parameters are rejected in the quantum fragment") {
    CHECK_THROWS_AS(check_source("let bad = lambda(q){ measure(q) }"), TypeCheckError);
}

TEST_CASE("unknown names are reported") {
    CHECK_THROWS_AS(check_source("let bad = lambda(q : qubit){ measure(hadamardize(q)) }"),
                    UnknownName);
}

TEST_CASE("let bindings inside routines are linear") {
    SUBCASE("consumed once is fine") {
        RoutineSignature sig = check_source(
            "let ok = lambda(q : qubit, U : operator[1]){ let r = apply(U,q) measure(r) }");
        CHECK(types_equivalent(*sig.result, *make_bang(make_qubits(1))));
    }
    SUBCASE("an unused let binding is a violation") {
        NodeList program =
            parse_program("let bad = lambda(q : qubit){ let r = q measure(r) let s = r 5 }");
        CHECK_THROWS_AS(check_routine(routine_node(program), {}), TypeCheckError);
    }
    SUBCASE("discarding a linear intermediate value is rejected") {
        CHECK_THROWS_AS(
            check_source("let bad = lambda(q : qubit, p : qubit){ tensor(q,p) measure(q) }"),
            TypeCheckError);
    }
}

TEST_CASE("promotion requires an empty linear context") {
    // routineA wants a reusable operator; passing a linear one through is the
    // !-introduction that Fig-style rules forbid.
    SignatureTable lib = check_quantum_library(parse_program(
        "let routineA = lambda(U : !{operator[1]}, q : qubit){ measure(apply(U,q)) }"));
    NodeList bad = parse_program(
        "let routineB = lambda(U : operator[1], q : qubit){ routineA(U,q) }");
    GlobalTypes globals;
    {
        const RoutineSignature& sig = lib.at("routineA");
        TypePtr t = sig.result;
        for (auto it = sig.parameters.rbegin(); it != sig.parameters.rend(); ++it)
            t = make_lolli(*it, t);
        globals.emplace("routineA", t);
    }
    CHECK_THROWS_AS(check_routine(routine_node(bad), globals), PromotionError);

    NodeList good = parse_program(
        "let routineB = lambda(U : !{operator[1]}, q : qubit){ routineA(U,q) }");
    RoutineSignature sig = check_routine(routine_node(good), globals);
    CHECK(types_equivalent(*sig.result, *make_bang(make_qubits(1))));
}

TEST_CASE("check_quantum_library") {
    SUBCASE("routine table for a grover library") {
        SignatureTable table = check_quantum_library(parse_program(
            "let groverRoutine = lambda(state : qubit * qubit * qubit, "
            "iteration : !{operator[3]}, times : int){"
            " measure(applyN(iteration,state,times)) }"));
        REQUIRE(table.size() == 1);
        CHECK(table.at("groverRoutine").parameters.size() == 3);
    }
    SUBCASE("empty library gives an empty table") {
        CHECK(check_quantum_library(parse_program("")).empty());
    }
    SUBCASE("a failing routine aborts with its name attached") {
        try {
            check_quantum_library(
                parse_program("let cloning = lambda(q : qubit){ tensor(q,q) }"));
            FAIL("expected a type error");
        } catch (const TypeCheckError& err) {
            CHECK(err.routine() == "cloning");
        }
    }
    SUBCASE("non-routine definitions are rejected") {
        CHECK_THROWS_AS(check_quantum_library(parse_program("let x = 5")), TypeCheckError);
    }
    SUBCASE("later routines can call earlier ones") {
        SignatureTable table = check_quantum_library(parse_program(
            "let first = lambda(q : qubit){ measure(q) }\n"
            "let second = lambda(p : qubit){ first(p) }"));
        CHECK(table.size() == 2);
        CHECK(types_equivalent(*table.at("second").result, *make_bang(make_qubits(1))));
    }
}

TEST_CASE("context threading marks every introduced binding consumed") {
    TypingContext ctx;
    ctx.bind_linear("q", make_qubits(1), {});
    ctx.bind_unrestricted("H", make_operator(1), {});
    CHECK(ctx.is_linear("q"));
    CHECK_FALSE(ctx.is_linear("H"));
    CHECK_FALSE(ctx.consumed("q"));

    CHECK(ctx.use("H", {}));
    CHECK(ctx.use("H", {}));  // unrestricted: any number of uses
    long stamp = ctx.consumption_stamp();
    CHECK(ctx.use("q", {}));
    CHECK(ctx.consumed("q"));
    CHECK(ctx.consumption_stamp() == stamp + 1);
    CHECK_THROWS_AS(ctx.use("q", {}), LinearityViolation);

    TypingContext fresh;
    fresh.bind_linear("p", make_qubits(1), {});
    CHECK_THROWS_AS(fresh.retire("p", {}), LinearityViolation);
    CHECK(fresh.use("p", {}));
    fresh.retire("p", {});
    CHECK_FALSE(fresh.bound("p"));

    CHECK_THROWS_AS([] {
        TypingContext dup;
        dup.bind_linear("x", make_qubits(1), {});
        dup.bind_unrestricted("x", make_int(), {});
    }(), TypeCheckError);
}

TEST_CASE("alpha-renaming does not change acceptance or signatures") {
    struct Case {
        std::string original;
        std::string renamed;
        bool accepted;
    };
    const std::vector<Case> cases = {
        {"let r = lambda(q : qubit, U : operator[1]){ measure(apply(U,q)) }",
         "let r = lambda(zz : qubit, ww : operator[1]){ measure(apply(ww,zz)) }", true},
        {"let r = lambda(q : qubit){ tensor(q,q) }",
         "let r = lambda(kk : qubit){ tensor(kk,kk) }", false},
        {"let r = lambda(q : qubit, U : operator[1]){ let out = apply(U,q) measure(out) }",
         "let r = lambda(a : qubit, b : operator[1]){ let c = apply(b,a) measure(c) }", true},
    };
    for (const auto& c : cases) {
        CAPTURE(c.original);
        auto run = [](const std::string& src) -> std::optional<RoutineSignature> {
            try {
                NodeList p = parse_program(src);
                const auto* assign = p.at(0)->get<SyntaxNode::Assignment>();
                return check_routine(*assign->expr, {});
            } catch (const TypeCheckError&) {
                return std::nullopt;
            }
        };
        auto a = run(c.original);
        auto b = run(c.renamed);
        CHECK(a.has_value() == c.accepted);
        CHECK(b.has_value() == c.accepted);
        if (a && b) {
            REQUIRE(a->parameters.size() == b->parameters.size());
            for (std::size_t i = 0; i < a->parameters.size(); ++i)
                CHECK(types_equivalent(*a->parameters[i], *b->parameters[i]));
            CHECK(types_equivalent(*a->result, *b->result));
        }
    }
}

TEST_CASE("routines may return qubits without measuring") {
    RoutineSignature sig = check_source("let pass = lambda(q : qubit){ q }");
    CHECK(types_equivalent(*sig.result, *make_qubits(1)));
}

TEST_CASE("infix tensor inside a routine uses the scheme") {
    RoutineSignature sig =
        check_source("let join = lambda(q : qubit, p : qubit){ (q \xe2\x8a\x97 p) }");
    CHECK(types_equivalent(*sig.result, *make_qubits(2)));
}
