#include <benchmark/benchmark.h>

#include <complex>
#include <fstream>
#include <random>
#include <sstream>

#include "qumin/interpreter.hpp"
#include "qumin/parser.hpp"
#include "qumin/quantum.hpp"
#include "qumin/typecheck.hpp"

namespace {

using namespace qumin;

std::string read_corpus(const char* name) {
    std::ifstream in(std::string(QUMIN_CORPUS_DIR) + "/" + name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void BM_ParseGroverN(benchmark::State& state) {
    std::string source = read_corpus("groverN.qum");
    for (auto _ : state) benchmark::DoNotOptimize(parse_program(source));
}
BENCHMARK(BM_ParseGroverN);

void BM_TypecheckDeutschLibrary(benchmark::State& state) {
    NodeList program = parse_program(read_corpus("deutschTypes.qum"));
    for (auto _ : state) benchmark::DoNotOptimize(check_quantum_library(program));
}
BENCHMARK(BM_TypecheckDeutschLibrary);

void BM_OracleBuild(benchmark::State& state) {
    // f: 4 bits -> 1 bit, a 32x32 oracle per build.
    CMat indicator(2, CVec(16, {0, 0}));
    for (int x = 0; x < 16; ++x) indicator[x % 2][x] = 1;
    for (auto _ : state) benchmark::DoNotOptimize(oracle_matrix(indicator));
}
BENCHMARK(BM_OracleBuild);

void BM_QftMatrixApply(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    CMat m = qft_matrix(n);
    CVec v(n, Complex{0, 0});
    v[1] = 1;
    for (auto _ : state) benchmark::DoNotOptimize(apply_matrix(m, v));
}
BENCHMARK(BM_QftMatrixApply)->Arg(64)->Arg(256);

void BM_MeasureTenQubits(benchmark::State& state) {
    std::mt19937 gen(5);
    std::normal_distribution<double> normal;
    CVec v(1 << 10);
    for (auto& a : v) a = Complex(normal(gen), normal(gen));
    double norm = vector_norm(v);
    for (auto& a : v) a /= norm;
    SplitMix64 rng(17);
    for (auto _ : state) benchmark::DoNotOptimize(measure_state(v, rng));
}
BENCHMARK(BM_MeasureTenQubits);

void BM_InterpretedQft(benchmark::State& state) {
    InterpreterOptions opts;
    opts.seed = 1;
    opts.output = [](std::string_view) {};
    Interpreter interp(std::move(opts));
    interp.set_entry_dir(QUMIN_CORPUS_DIR);
    interp.run_file(std::string(QUMIN_CORPUS_DIR) + "/qft.qum");
    const Value* qft = interp.globals()->lookup("qft");
    Value input = interp.eval_source("[1 0 0 0 0 0 0 0]");
    for (auto _ : state)
        benchmark::DoNotOptimize(interp.apply_value(*qft, {input}, {}));
}
BENCHMARK(BM_InterpretedQft);

void BM_GroverFourEndToEnd(benchmark::State& state) {
    std::string path = std::string(QUMIN_CORPUS_DIR) + "/grover4.qum";
    for (auto _ : state) {
        InterpreterOptions opts;
        opts.seed = 7;
        opts.output = [](std::string_view) {};
        Interpreter interp(std::move(opts));
        interp.run_file(path);
    }
}
BENCHMARK(BM_GroverFourEndToEnd);

}  // namespace

int main(int argc, char** argv) {
    ::benchmark::Initialize(&argc, argv);
    if (::benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    ::benchmark::RunSpecifiedBenchmarks();
    return 0;
}
