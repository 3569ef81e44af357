#include <pthread.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qumin/interpreter.hpp"
#include "qumin/linear_type.hpp"
#include "qumin/parser.hpp"
#include "qumin/span.hpp"
#include "qumin/typecheck.hpp"

namespace {

namespace fs = std::filesystem;

int exit_code_for(const qumin::QuminError& err) {
    switch (err.category()) {
        case qumin::ErrorCategory::Parse: return 1;
        case qumin::ErrorCategory::TypeCheck: return 2;
        case qumin::ErrorCategory::Constraint: return 3;
        case qumin::ErrorCategory::Runtime: return 4;
        case qumin::ErrorCategory::Io: return 5;
    }
    return 4;
}

std::string read_file_or_empty(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void report(const fs::path& file, const qumin::QuminError& err) {
    std::string source = read_file_or_empty(file);
    std::cerr << qumin::format_diagnostic(file.string(), source, err.span(), "error",
                                          err.what())
              << '\n';
}

// Deep classical recursion (the frame limit defaults to 10,000) needs more
// stack than the main thread usually gets, and raising RLIMIT_STACK after
// exec cannot move the mappings already placed below the stack. Run the
// actual work on a thread with an explicitly sized stack instead.
int run_on_big_stack(const std::function<int()>& work) {
    struct Call {
        const std::function<int()>* fn;
        int result = 1;
    } call{&work, 1};

    pthread_attr_t attr;
    if (pthread_attr_init(&attr) != 0) return work();
    pthread_attr_setstacksize(&attr, 512ull * 1024 * 1024);

    auto trampoline = [](void* raw) -> void* {
        auto* c = static_cast<Call*>(raw);
        try {
            c->result = (*c->fn)();
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            c->result = 4;
        }
        return nullptr;
    };

    pthread_t thread;
    if (pthread_create(&thread, &attr, trampoline, &call) != 0) {
        pthread_attr_destroy(&attr);
        return work();
    }
    pthread_join(thread, nullptr);
    pthread_attr_destroy(&attr);
    return call.result;
}

struct CommonFlags {
    std::optional<std::uint64_t> seed;
    std::vector<std::string> path_dirs;

    qumin::InterpreterOptions to_options() const {
        qumin::InterpreterOptions opts;
        opts.seed = seed;
        for (const auto& dir : path_dirs) opts.search_path.emplace_back(dir);
        return opts;
    }
};

int cmd_run(const fs::path& file, const CommonFlags& flags) {
    qumin::Interpreter interp(flags.to_options());
    try {
        interp.run_file(file);
    } catch (const qumin::QuminError& err) {
        report(file, err);
        return exit_code_for(err);
    }
    return 0;
}

int cmd_check(const fs::path& file, const CommonFlags& flags) {
    (void)flags;
    try {
        std::ifstream in(file, std::ios::binary);
        if (!in) throw qumin::IoError("cannot open '" + file.string() + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        qumin::NodeList program = qumin::parse_program(ss.str());
        qumin::SignatureTable table = qumin::check_quantum_library(program);
        for (const auto& [name, sig] : table) {
            std::string line = name + " :";
            for (const auto& param : sig.parameters)
                line += " " + qumin::type_to_string(*param) + " >";
            line += " " + qumin::type_to_string(*sig.result);
            std::cout << line << '\n';
        }
    } catch (const qumin::TypeCheckError& err) {
        std::string source = read_file_or_empty(file);
        std::string message = err.what();
        if (!err.routine().empty()) message = "in routine '" + err.routine() + "': " + message;
        std::cerr << qumin::format_diagnostic(file.string(), source, err.span(), "error",
                                              message)
                  << '\n';
        return 2;
    } catch (const qumin::QuminError& err) {
        report(file, err);
        return exit_code_for(err);
    }
    return 0;
}

int cmd_repl(const CommonFlags& flags) {
    qumin::Interpreter interp(flags.to_options());
    interp.set_entry_dir(fs::current_path());
    std::string line;
    while (true) {
        std::cout << "> " << std::flush;
        if (!std::getline(std::cin, line)) {
            std::cout << '\n';
            break;
        }
        if (line.empty()) continue;
        if (line == ":quit" || line == ":q") break;
        try {
            if (line.rfind(":load ", 0) == 0) {
                interp.load_module(line.substr(6), /*quantum=*/false);
                continue;
            }
            if (line.rfind(":qload ", 0) == 0) {
                interp.load_module(line.substr(7), /*quantum=*/true);
                continue;
            }
            qumin::Value v = interp.eval_source(line);
            if (!v.get<qumin::Unit>()) std::cout << qumin::to_display_string(v) << '\n';
        } catch (const qumin::QuminError& err) {
            std::cout << "error: " << err.what() << '\n';
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Qumin: a minimalist quantum programming language"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string file;

    auto add_common = [&flags](CLI::App* cmd) {
        cmd->add_option("--seed", flags.seed, "PRNG seed (fixes every measurement collapse)");
        cmd->add_option("--path", flags.path_dirs, "extra module search directory")
            ->take_all();
    };

    CLI::App* run = app.add_subcommand("run", "Run a Qumin program");
    run->add_option("file", file, "program file (.qum)")->required();
    add_common(run);

    CLI::App* check = app.add_subcommand("check", "Typecheck a quantum library");
    check->add_option("file", file, "library file (.qum)")->required();
    add_common(check);

    CLI::App* repl = app.add_subcommand("repl", "Interactive session");
    add_common(repl);

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return run_on_big_stack([&] { return cmd_run(file, flags); });
    if (check->parsed()) return run_on_big_stack([&] { return cmd_check(file, flags); });
    return run_on_big_stack([&] { return cmd_repl(flags); });
}
