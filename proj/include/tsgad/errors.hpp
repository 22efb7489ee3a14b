#pragma once

#include <stdexcept>
#include <string>

namespace tsgad {

// Exit codes: 1 config error, 2 data error, 3 training failure.
struct Error : std::runtime_error {
    int exit_code;
    Error(std::string msg, int code) : std::runtime_error(std::move(msg)), exit_code(code) {}
};

struct ConfigError : Error {
    explicit ConfigError(std::string msg) : Error(std::move(msg), 1) {}
};

struct DataError : Error {
    explicit DataError(std::string msg) : Error(std::move(msg), 2) {}
};

struct TrainingError : Error {
    explicit TrainingError(std::string msg) : Error(std::move(msg), 3) {}
};

}  // namespace tsgad
