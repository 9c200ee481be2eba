#pragma once

#include <stdexcept>

namespace scruple {

// Game-data problems surfaced at runtime (corrupted walkthrough, bad config).
struct EngineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// API misuse: stepping a finished episode, mismatched vector lengths, etc.
struct ContractViolation : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace scruple
