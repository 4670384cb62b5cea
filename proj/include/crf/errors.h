#pragma once

#include <stdexcept>
#include <string>

namespace crf {

struct StencilOutOfDomain : std::runtime_error {
    explicit StencilOutOfDomain(const std::string& what) : std::runtime_error(what) {}
};

struct NonPositiveDeterminant : std::runtime_error {
    explicit NonPositiveDeterminant(const std::string& what) : std::runtime_error(what) {}
};

struct SingularMetric : std::runtime_error {
    explicit SingularMetric(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidModelParameters : std::runtime_error {
    explicit InvalidModelParameters(const std::string& what) : std::runtime_error(what) {}
};

struct TimeOutOfRange : std::runtime_error {
    explicit TimeOutOfRange(const std::string& what) : std::runtime_error(what) {}
};

struct AnsatzNotPositive : std::runtime_error {
    explicit AnsatzNotPositive(const std::string& what) : std::runtime_error(what) {}
};

struct BudgetExceeded : std::runtime_error {
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct PositivityLost : std::runtime_error {
    explicit PositivityLost(const std::string& what) : std::runtime_error(what) {}
};

struct Instability : std::runtime_error {
    explicit Instability(const std::string& what) : std::runtime_error(what) {}
};

struct DisconnectedGraph : std::runtime_error {
    explicit DisconnectedGraph(const std::string& what) : std::runtime_error(what) {}
};

struct FamilyMismatch : std::runtime_error {
    explicit FamilyMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct NotAnIsometry : std::runtime_error {
    explicit NotAnIsometry(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace crf
