#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "test_support.hpp"

#include "qumin/environment.hpp"
#include "qumin/interpreter.hpp"
#include "qumin/parser.hpp"

using namespace qumin;
using qumin::test::CapturedRun;
using qumin::test::corpus_dir;

namespace {

Value run_program(Interpreter& interp, const std::string& source) {
    NodeList program = parse_program(source);
    Value last = Value::unit();
    for (const NodePtr& node : program) last = interp.eval(*node, interp.globals());
    return last;
}

std::int64_t as_int(const Value& v) {
    const auto* i = v.get<std::int64_t>();
    REQUIRE(i);
    return *i;
}

}  // namespace

TEST_CASE("function application and currying") {
    CapturedRun run;
    CHECK(as_int(run->eval_source("lambda(f,x){ f(x) }(lambda(x){(x + x)},5)")) == 10);

    SUBCASE("implicit partial application") {
        run_program(*run, "let f = lambda(x,y){ (x + y) }\nlet partiallyApplied = f(10)");
        CHECK(as_int(run->eval_source("partiallyApplied(30)")) == 40);
    }
    SUBCASE("currying coherence: f(a,b) = f(a)(b)") {
        run_program(*run, "let f = lambda(x,y){ (x + (3 * y)) }\nlet g = f(5)");
        for (int b = -3; b < 4; ++b) {
            std::string arg = std::to_string(b);
            CHECK(values_equal(run->eval_source("f(5," + arg + ")"),
                               run->eval_source("g(" + arg + ")")));
        }
    }
    SUBCASE("infix calls are binary function calls") {
        run_program(*run, "let myOp = lambda(x,y){ (x + (3 * y)) }");
        CHECK(as_int(run->eval_source("(5 myOp 10)")) == 35);
    }
    SUBCASE("operators are ordinary functions") {
        CHECK(as_int(run->eval_source("+(3,5)")) == 8);
        CHECK(as_int(run->eval_source("-(10,-3)")) == 13);
    }
    SUBCASE("too many arguments") {
        run_program(*run, "let f = lambda(x){ x }");
        CHECK_THROWS_AS(run->eval_source("f(1,2)"), EvalError);
    }
}

TEST_CASE("value of a body is its last expression") {
    CapturedRun run;
    CHECK(as_int(run->eval_source("lambda(x){ (x + 1) (x + 2) }(0)")) == 2);
}

TEST_CASE("composition applies right-to-left") {
    CapturedRun run;
    run_program(*run, "let addOne = lambda(x){ (x + 1) }\nlet double = lambda(x){ (x * 2) }");
    CHECK(as_int(run->eval_source("addOne . double (5)")) == 11);   // addOne(double(5))
    CHECK(as_int(run->eval_source("double . addOne (5)")) == 12);
    CHECK(values_equal(run->eval_source("logTwo . length([9 9 9 9 9 9 9 9])"),
                       Value::real(3.0)));
}

TEST_CASE("if evaluates exactly one arm") {
    CapturedRun run;
    run_program(*run, "let trace = lambda(x){ measure(x) }");
    // The else arm would blow up if evaluated.
    CHECK(as_int(run->eval_source("if((1 = 1)){ 4 } else { car([]) }")) == 4);
    CHECK_THROWS_AS(run->eval_source("if(3){ 1 } else { 2 }"), EvalError);
}

TEST_CASE("numeric tower and arithmetic") {
    CapturedRun run;
    CHECK(as_int(run->eval_source("(2 + 3)")) == 5);
    CHECK(values_equal(run->eval_source("(2 + 3.5)"), Value::real(5.5)));
    CHECK(values_equal(run->eval_source("(1+1i * 1-1i)"), Value::complex({2, 0})));
    CHECK(values_equal(run->eval_source("(1 / 2)"), Value::real(0.5)));
    CHECK_THROWS_AS(run->eval_source("(1 / 0)"), EvalError);
    CHECK_THROWS_AS(run->eval_source("(1 / 0.0)"), EvalError);
    SUBCASE("scalar times matrix and matrix minus matrix") {
        Value v = run->eval_source("((2 * [[1 0] [0 1]]) - [[1 0] [0 1]])");
        CHECK(values_equal(v, run->eval_source("[[1 0] [0 1]]")));
    }
    SUBCASE("division by zero inside complex arithmetic") {
        CHECK_THROWS_AS(run->eval_source("(1+1i / 0+0i)"), EvalError);
    }
}

TEST_CASE("equality is numeric and structural") {
    CapturedRun run;
    CHECK(values_equal(run->eval_source("(3 = 3.0)"), Value::boolean(true)));
    CHECK(values_equal(run->eval_source("([1 0] = [1.0 0.0])"), Value::boolean(true)));
    CHECK(values_equal(run->eval_source("([1 [2 3]] = [1 [2 3]])"), Value::boolean(true)));
    CHECK(values_equal(run->eval_source("([1 0] = [0 1])"), Value::boolean(false)));
    CHECK(values_equal(run->eval_source("(\"ab\" = \"ab\")"), Value::boolean(true)));
    CHECK(values_equal(run->eval_source("(#t = #f)"), Value::boolean(false)));
}

TEST_CASE("sequence builtins") {
    CapturedRun run;
    CHECK(as_int(run->eval_source("car([1 2 3])")) == 1);
    CHECK(values_equal(run->eval_source("cdr([1 2 3])"), run->eval_source("[2 3]")));
    CHECK_THROWS_AS(run->eval_source("car([])"), EvalError);
    // append puts the element at the head, prepend at the tail.
    CHECK(values_equal(run->eval_source("append(1,[2 3])"), run->eval_source("[1 2 3]")));
    CHECK(values_equal(run->eval_source("prepend(0,[1 0 0])"), run->eval_source("[1 0 0 0]")));
    CHECK(as_int(run->eval_source("length([5 6 7])")) == 3);
    CHECK(as_int(run->eval_source("len([5 6 7])")) == 3);
    CHECK(as_int(run->eval_source("length(\"abcd\")")) == 4);
}

TEST_CASE("math builtins") {
    CapturedRun run;
    CHECK(as_int(run->eval_source("toInt(sqrt(8))")) == 2);
    CHECK(as_int(run->eval_source("toInt(-2.9)")) == -2);
    CHECK(values_equal(run->eval_source("logTwo(8)"), Value::real(3.0)));
    CHECK(values_equal(run->eval_source("sqrt(4)"), Value::real(2.0)));
    CHECK_THROWS_AS(run->eval_source("sqrt(-1)"), EvalError);
    Value e_pi_i = run->eval_source("exp((pi * 0+1i))");
    const auto* c = e_pi_i.get<Complex>();
    REQUIRE(c);
    CHECK(std::abs(*c - Complex(-1, 0)) < 1e-12);
    // the omega building block of the Fourier transform
    Value folded = run->eval_source("fold(*, [2 pi 0+1i 1 1])");
    REQUIRE(folded.get<Complex>());
    CHECK(std::abs(*folded.get<Complex>() - Complex(0, 2 * 3.14159265358979323846)) < 1e-9);
}

TEST_CASE("environments are immutable, shadowing needs a new scope") {
    CapturedRun run;
    run_program(*run, "let x = 1");
    CHECK_THROWS_AS(run_program(*run, "let x = 2"), EvalError);
    // parameters shadow globals in an inner scope
    CHECK(as_int(run->eval_source("lambda(x){ (x + 1) }(41)")) == 42);
    CHECK(as_int(run->eval_source("x")) == 1);
    // builtins can be shadowed by globals (different scope)
    run_program(*run, "let measure = lambda(v){ 7 }");
    CHECK(as_int(run->eval_source("measure([1 0])")) == 7);
}

TEST_CASE("referential transparency of pure expressions") {
    CapturedRun run;
    run_program(*run, "let f = lambda(x){ ((x * x) + 1) }");
    const char* exprs[] = {"f(12)", "[f(1) f(2) [3 4]]", "(2.5 * [1 0 1])", "fold(+, [1 2 3])"};
    for (const char* e : exprs) {
        CAPTURE(e);
        CHECK(values_equal(run->eval_source(e), run->eval_source(e)));
    }
}

TEST_CASE("functions with internal bindings can be called repeatedly") {
    CapturedRun run;
    run_program(*run, "let g = lambda(x){ let y = (x + 1) (y * y) }");
    CHECK(as_int(run->eval_source("g(2)")) == 9);
    CHECK(as_int(run->eval_source("g(3)")) == 16);
    CHECK(as_int(run->eval_source("g(2)")) == 9);
}

TEST_CASE("unbound names carry their span") {
    CapturedRun run;
    try {
        run->eval_source("missingName");
        FAIL("expected EvalError");
    } catch (const EvalError& err) {
        CHECK(err.kind() == EvalErrorKind::UnboundName);
        CHECK(err.span().end <= std::string("missingName").size());
    }
}

TEST_CASE("recursion works and respects the frame limit") {
    SUBCASE("a few hundred frames are fine in-process") {
        // The full 10k-frame default is exercised through the CLI, which
        // raises its stack limit first; keep the in-process depth modest so
        // sanitizer builds with fat frames stay inside the default stack.
        CapturedRun run;
        run_program(*run,
                    "let count = lambda(n){ if((n = 0)){ 0 } else { count((n - 1)) } }");
        CHECK(as_int(run->eval_source("count(400)")) == 0);
    }
    SUBCASE("the limit raises RecursionLimit") {
        CapturedRun run(1, /*recursion_limit=*/64);
        run_program(*run, "let loop = lambda(n){ loop((n + 1)) }");
        try {
            run->eval_source("loop(0)");
            FAIL("expected RecursionLimit");
        } catch (const EvalError& err) {
            CHECK(err.kind() == EvalErrorKind::RecursionLimit);
        }
    }
}

TEST_CASE("measure is callable from classical code and prints its report") {
    CapturedRun run(42);
    Value collapsed = run->eval_source("measure([0 1 0 0])");
    CHECK(values_equal(collapsed, run->eval_source("[0 1 0 0]")));
    REQUIRE(run.reports.size() == 1);
    CHECK(run.reports[0].collapsed_index == 1);
    REQUIRE(run.lines.size() == 5);
    CHECK(run.lines[4] == "System collapsed to state: 1");
}

TEST_CASE("apply dispatches over functions, matrices and states") {
    CapturedRun run;
    run_program(*run, "let addOne = lambda(x){ (x + 1) }");
    CHECK(as_int(run->eval_source("apply(addOne, 4)")) == 5);
    CHECK(values_equal(run->eval_source("apply([[0 1] [1 0]], [1 0])"),
                       run->eval_source("[0 1]")));
    // matrix times matrix composes operators
    CHECK(values_equal(run->eval_source("apply([[0 1] [1 0]], [[0 1] [1 0]])"),
                       run->eval_source("[[1 0] [0 1]]")));
    // a matrix value used as a callee applies itself
    run_program(*run, "let X = [[0 1] [1 0]]");
    CHECK(values_equal(run->eval_source("X([1 0])"), run->eval_source("[0 1]")));
    CHECK_THROWS_AS(run->eval_source("tensor([1 0], [[1 0] [0 1]])"), QuantumError);
    // the unicode aliases are the same functions
    CHECK(values_equal(run->eval_source("·(X,[1 0])"), run->eval_source("[0 1]")));
    CHECK(values_equal(run->eval_source("([1 0] ⊗ [0 1])"),
                       run->eval_source("[0 1 0 0]")));
}

TEST_CASE("generateMatrix drives Qumin functions over the standard basis") {
    CapturedRun run;
    run_program(*run, "let identity = lambda(vec){ vec }");
    CHECK(values_equal(run->eval_source("generateMatrix(identity,4)"),
                       run->eval_source("[[1 0 0 0] [0 1 0 0] [0 0 1 0] [0 0 0 1]]")));
    run_program(*run,
                "let f = lambda(string){ lambda(x){ if((x = string)){ [0 1] } else { [1 0] } } }");
    CHECK(values_equal(run->eval_source("generateMatrix(f([0 0 1 0]),4)"),
                       run->eval_source("[[1 1 0 1] [0 0 1 0]]")));
}

TEST_CASE("loading modules") {
    SUBCASE("quantum load installs checked routines") {
        CapturedRun run;
        run->set_entry_dir(corpus_dir());
        run->load_module("deutschTypes", /*quantum=*/true);
        CHECK(run->quantum_signatures().count("deutschRoutine") == 1);
        const Value* routine = run->globals()->lookup("deutschRoutine");
        REQUIRE(routine);
        REQUIRE(routine->get<ClosurePtr>());
        CHECK((*routine->get<ClosurePtr>())->signature != nullptr);
    }
    SUBCASE("classical load evaluates top to bottom") {
        CapturedRun run;
        run->set_entry_dir(corpus_dir());
        run->load_module("operators", false);
        CHECK(run->globals()->lookup("hadamard"));
        CHECK(run->globals()->lookup("identity"));
    }
    SUBCASE("loads are idempotent") {
        CapturedRun run;
        run->set_entry_dir(corpus_dir());
        run->load_module("operators", false);
        run->load_module("operators", false);  // would die on rebinding otherwise
        CHECK(run->globals()->lookup("hadamard"));
    }
    SUBCASE("missing modules raise IoError") {
        CapturedRun run;
        run->set_entry_dir(corpus_dir());
        CHECK_THROWS_AS(run->load_module("noSuchModule", false), IoError);
    }
    SUBCASE("cyclic loads are reported") {
        namespace fs = std::filesystem;
        fs::path dir = fs::temp_directory_path() / "qumin-cycle-test";
        fs::create_directories(dir);
        std::ofstream(dir / "ouroA.qum") << "--load ouroB\nlet a = 1\n";
        std::ofstream(dir / "ouroB.qum") << "--load ouroA\nlet b = 2\n";
        CapturedRun run;
        run->set_entry_dir(dir);
        CHECK_THROWS_AS(run->load_module("ouroA", false), IoError);
    }
    SUBCASE("a broken quantum library installs nothing") {
        CapturedRun run;
        run->set_entry_dir(corpus_dir());
        CHECK_THROWS_AS(run->load_module("cloning", true), TypeCheckError);
        CHECK(run->globals()->lookup("cloning") == nullptr);
    }
}

TEST_CASE("runtime constraints at the quantum boundary") {
    CapturedRun run;
    run->set_entry_dir(corpus_dir());
    run->load_module("simpleTypes", true);

    SUBCASE("valid state and operator pass") {
        Value out = run->eval_source("simpleRoutine([0.6 0.8], [[0 1] [1 0]])");
        CHECK(out.seq());
        REQUIRE(run.reports.size() == 1);
    }
    SUBCASE("unnormalized states are rejected") {
        CHECK_THROWS_AS(run->eval_source("simpleRoutine([1 1], [[0 1] [1 0]])"),
                        ConstraintViolation);
    }
    SUBCASE("non-unitary operators are rejected") {
        CHECK_THROWS_AS(run->eval_source("simpleRoutine([1 0], [[1 1] [0 1]])"),
                        ConstraintViolation);
    }
    SUBCASE("wrong state length is rejected with position information") {
        run->load_module("deutschTypes", true);
        try {
            run->eval_source("deutschRoutine([1 0 0], [[1 0] [0 1]], [[1 0] [0 1]], "
                             "[[1 0 0 0] [0 1 0 0] [0 0 1 0] [0 0 0 1]])");
            FAIL("expected ConstraintViolation");
        } catch (const ConstraintViolation& err) {
            CHECK(err.position() == 0);
        }
    }
    SUBCASE("int parameters demand integers") {
        run->load_module("groverTypes", true);
        CHECK_THROWS_AS(
            run->eval_source("groverRoutine([1 0 0 0 0 0 0 0], "
                             "generateMatrix(lambda(v){ v },8), 2.5)"),
            ConstraintViolation);
    }
    SUBCASE("partial application validates the supplied prefix immediately") {
        CHECK_THROWS_AS(run->eval_source("simpleRoutine([1 1])"), ConstraintViolation);
        Value curried = run->eval_source("simpleRoutine([0.6 0.8])");
        CHECK(curried.get<ClosurePtr>());
        CHECK_THROWS_AS(run->apply_value(curried, {run->eval_source("[[1 1] [0 1]]")}, {}),
                        ConstraintViolation);
    }
}

TEST_CASE("malformed arguments always fail as constraint violations") {
    CapturedRun run;
    run->set_entry_dir(corpus_dir());
    run->load_module("deutschTypes", true);
    const Value* routine = run->globals()->lookup("deutschRoutine");
    REQUIRE(routine);

    std::mt19937 gen(1357);
    auto junk = [&gen]() -> Value {
        std::uniform_int_distribution<int> pick(0, 6);
        std::uniform_int_distribution<int> len(0, 9);
        std::uniform_real_distribution<double> x(-2, 2);
        switch (pick(gen)) {
            case 0: return Value::integer(len(gen));
            case 1: return Value::real(x(gen));
            case 2: return Value::boolean(false);
            case 3: return Value::string("junk");
            case 4: {
                ValueSeq seq;
                for (int i = len(gen); i-- > 0;) seq.push_back(Value::real(x(gen)));
                return Value::sequence(std::move(seq));
            }
            case 5: {
                ValueSeq row;
                for (int i = len(gen); i-- > 0;) row.push_back(Value::real(x(gen)));
                ValueSeq rows;
                for (int i = len(gen); i-- > 0;) rows.push_back(Value::sequence(ValueSeq(row)));
                return Value::sequence(std::move(rows));
            }
            default: return Value::unit();
        }
    };

    int violations = 0;
    for (int i = 0; i < 500; ++i) {
        std::vector<Value> args = {junk(), junk(), junk(), junk()};
        try {
            run->apply_value(*routine, std::move(args), {});
        } catch (const ConstraintViolation&) {
            ++violations;
        }
        // anything else (QuantumError, crash) fails the test by escaping
    }
    CHECK(violations == 500);
}

TEST_CASE("strings and basis-encoded sequences compare structurally") {
    CapturedRun run;
    run_program(*run,
                "let f = lambda(string){ lambda(x){ if((x = string)){ [0 1] } else { [1 0] } } }\n"
                "let hit = f([0 0 1 0])");
    CHECK(values_equal(run->eval_source("hit([0 0 1 0])"), run->eval_source("[0 1]")));
    CHECK(values_equal(run->eval_source("hit([0 1 0 0])"), run->eval_source("[1 0]")));
}

TEST_CASE("load directives inside a program follow the two-phase order") {
    CapturedRun run;
    run->set_entry_dir(corpus_dir());
    run->run_file(corpus_dir() / "deutsch.qum");
    REQUIRE(run.reports.size() == 1);
    const auto& probs = run.reports[0].groups[0].probabilities;
    CHECK(probs[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(probs[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(run.reports[0].collapsed_index <= 1);
}
