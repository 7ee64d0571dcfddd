#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rhymecheck {

// Input that violates a file schema or a domain invariant. The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A caller broke an operation's precondition (bad ratios, width mismatch, ...).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Raised when test-partition text is requested before prediction time.
class LeakageError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Malformed record in a line-oriented file; carries the 1-based record number.
class RecordError : public DataError {
public:
    RecordError(const std::string& what, std::size_t record)
        : DataError(what + " at record " + std::to_string(record)), record_(record) {}

    std::size_t record() const noexcept { return record_; }

private:
    std::size_t record_;
};

}  // namespace rhymecheck
