#pragma once

#include <stdexcept>
#include <string>

namespace fixprop {

enum class errc {
    not_prime,
    degree_zero,
    budget_exceeded,
    degree_budget_exceeded,
    bad_reduction,
    wild_ramification,
    wrong_degree,
    extension_bound_exceeded,
    no_certificate,
    even_characteristic,
    wrong_residue_class,
    not_a_square,
    zero_element,
    bad_letter,
    schema_error,
    validation_error,
    not_enumerated,
    iteration_bound_exceeded,
    empty_range,
    parse_error,
};

inline const char* errc_name(errc c) {
    switch (c) {
    case errc::not_prime: return "NotPrime";
    case errc::degree_zero: return "DegreeZero";
    case errc::budget_exceeded: return "BudgetExceeded";
    case errc::degree_budget_exceeded: return "DegreeBudgetExceeded";
    case errc::bad_reduction: return "BadReduction";
    case errc::wild_ramification: return "WildRamification";
    case errc::wrong_degree: return "WrongDegree";
    case errc::extension_bound_exceeded: return "ExtensionBoundExceeded";
    case errc::no_certificate: return "NoCertificate";
    case errc::even_characteristic: return "EvenCharacteristic";
    case errc::wrong_residue_class: return "WrongResidueClass";
    case errc::not_a_square: return "NotASquare";
    case errc::zero_element: return "ZeroElement";
    case errc::bad_letter: return "BadLetter";
    case errc::schema_error: return "SchemaError";
    case errc::validation_error: return "ValidationError";
    case errc::not_enumerated: return "NotEnumerated";
    case errc::iteration_bound_exceeded: return "IterationBoundExceeded";
    case errc::empty_range: return "EmptyRange";
    case errc::parse_error: return "ParseError";
    }
    return "Unknown";
}

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    errc code() const { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what) { throw error(code, what); }

} // namespace fixprop
