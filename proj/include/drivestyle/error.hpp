#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace drivestyle {

// Error categories map onto process exit codes in the CLI:
// validation -> 2, numeric -> 3, io -> 4.
enum class errc { validation, numeric, io };

class Error : public std::runtime_error {
public:
    Error(errc kind, std::string tag, const std::string& message)
        : std::runtime_error(tag + ": " + message), kind_(kind), tag_(std::move(tag)) {}

    errc kind() const noexcept { return kind_; }
    const std::string& tag() const noexcept { return tag_; }

private:
    errc kind_;
    std::string tag_;
};

inline Error validation_error(std::string tag, const std::string& message) {
    return Error(errc::validation, std::move(tag), message);
}

inline Error numeric_error(std::string tag, const std::string& message) {
    return Error(errc::numeric, std::move(tag), message);
}

inline Error io_error(std::string tag, const std::string& message) {
    return Error(errc::io, std::move(tag), message);
}

}  // namespace drivestyle
