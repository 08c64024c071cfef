#pragma once

#include <exception>
#include <string>

namespace beckmann {

/// Base for numerical failures. Carries the name of the module that raised it
/// and a context trail that callers may extend before rethrowing.
class NumericalError : public std::exception {
public:
    NumericalError(std::string module, std::string kind, std::string message)
        : module_(std::move(module)), kind_(std::move(kind)), message_(std::move(message))
    {
        rebuild();
    }

    const char* what() const noexcept override { return full_.c_str(); }
    const std::string& module() const { return module_; }
    const std::string& kind() const { return kind_; }

    void add_context(const std::string& ctx)
    {
        context_ = context_.empty() ? ctx : ctx + ", " + context_;
        rebuild();
    }

private:
    void rebuild()
    {
        full_ = kind_ + ": " + message_;
        if (!context_.empty())
            full_ += " (" + context_ + ")";
    }

    std::string module_;
    std::string kind_;
    std::string message_;
    std::string context_;
    std::string full_;
};

class CompatibilityViolated : public NumericalError {
public:
    explicit CompatibilityViolated(std::string message)
        : NumericalError("poisson", "CompatibilityViolated", std::move(message)) {}
};

class NonConvergence : public NumericalError {
public:
    explicit NonConvergence(std::string message) : NumericalError("poisson", "NonConvergence", std::move(message)) {}
};

class PathViolation : public NumericalError {
public:
    explicit PathViolation(std::string message) : NumericalError("path", "PathViolation", std::move(message)) {}
};

class DivisionFloor : public NumericalError {
public:
    explicit DivisionFloor(std::string message) : NumericalError("vectorfield", "DivisionFloor", std::move(message)) {}
};

class SingularJacobian : public NumericalError {
public:
    explicit SingularJacobian(std::string message) : NumericalError("flow", "SingularJacobian", std::move(message)) {}
};

}  // namespace beckmann
