#pragma once

#include <stdexcept>
#include <string>

namespace charseq {

// Precondition violation: an argument is outside the operation's domain.
struct DomainError : std::invalid_argument {
    explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// A query reached past the finite horizon of an explicitly listed structure.
struct HorizonError : std::runtime_error {
    explicit HorizonError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace charseq
