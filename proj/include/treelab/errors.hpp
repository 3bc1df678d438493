#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace treelab {

// Every precondition violation raised by the library throws Error with a
// short stable machine-readable code ("SumMismatch", "OutOfRange", ...) plus
// a human-readable message.  The CLI maps any Error to exit code 2 and emits
// the code in a JSON error record, so the codes are part of the interface.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

[[noreturn]] void fail(std::string code, const std::string& message);

// require(cond, ...) keeps call sites one-liners.
inline void require(bool cond, const char* code, const std::string& message) {
    if (!cond) fail(code, message);
}

}  // namespace treelab
