#include "qumin/environment.hpp"

#include "qumin/interpreter.hpp"

namespace qumin {

void Environment::define(const std::string& name, Value value, Span span) {
    if (bindings_.count(name))
        throw EvalError(EvalErrorKind::Other,
                        "'" + name + "' is already bound in this scope; bindings are immutable",
                        span);
    bindings_.emplace(name, std::move(value));
}

const Value* Environment::lookup(const std::string& name) const {
    for (const Environment* env = this; env; env = env->parent_.get()) {
        auto it = env->bindings_.find(name);
        if (it != env->bindings_.end()) return &it->second;
    }
    return nullptr;
}

}  // namespace qumin
