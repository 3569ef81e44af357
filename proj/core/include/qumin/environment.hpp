#pragma once

#include <map>
#include <memory>
#include <string>

#include "qumin/error.hpp"
#include "qumin/value.hpp"

namespace qumin {

/// Chained lexical scopes; bindings are immutable once made, shadowing
/// happens only by introducing a child scope.
class Environment {
public:
    static EnvPtr create(EnvPtr parent = nullptr) {
        return std::make_shared<Environment>(Environment(std::move(parent)));
    }

    /// Throws (Runtime) when the name already exists in this scope.
    void define(const std::string& name, Value value, Span span);

    /// Innermost-first lookup; nullptr when unbound.
    const Value* lookup(const std::string& name) const;

    const EnvPtr& parent() const { return parent_; }

    /// Teardown hook for the owning interpreter: closures capture the scope
    /// that defines them, so a global scope holds reference cycles that must
    /// be broken explicitly when the interpreter goes away.
    void clear_bindings() { bindings_.clear(); }

private:
    explicit Environment(EnvPtr parent) : parent_(std::move(parent)) {}

    EnvPtr parent_;
    std::map<std::string, Value> bindings_;
};

}  // namespace qumin
