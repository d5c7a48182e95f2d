#pragma once

#include <stdexcept>

namespace lora {

// Stream too short to hold the samples an operation needs.
class InsufficientData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File content that cannot be parsed (e.g. an IQ file with a dangling float).
class MalformedFile : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace lora
