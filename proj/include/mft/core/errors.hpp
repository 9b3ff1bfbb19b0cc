#pragma once

#include <stdexcept>
#include <string>

namespace mft {

// Error taxonomy shared by the library and the CLI. The CLI maps each kind
// to a process exit code (usage=2, data=3, numeric=4).
enum class ErrorKind {
    usage,
    config,
    shape,
    parse,
    schema,
    data,
    numeric,
    contract,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string msg) : std::runtime_error(std::move(msg)), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

    int exit_code() const {
        switch (kind_) {
            case ErrorKind::usage:
            case ErrorKind::config: return 2;
            case ErrorKind::parse:
            case ErrorKind::schema:
            case ErrorKind::data: return 3;
            case ErrorKind::numeric: return 4;
            case ErrorKind::shape:
            case ErrorKind::contract: return 1;
        }
        return 1;
    }

private:
    ErrorKind kind_;
};

struct ShapeError : Error {
    explicit ShapeError(std::string msg) : Error(ErrorKind::shape, std::move(msg)) {}
};
struct NumericError : Error {
    explicit NumericError(std::string msg) : Error(ErrorKind::numeric, std::move(msg)) {}
};
struct ConfigError : Error {
    explicit ConfigError(std::string msg) : Error(ErrorKind::config, std::move(msg)) {}
};
struct UsageError : Error {
    explicit UsageError(std::string msg) : Error(ErrorKind::usage, std::move(msg)) {}
};
struct ParseError : Error {
    explicit ParseError(std::string msg) : Error(ErrorKind::parse, std::move(msg)) {}
};
struct SchemaError : Error {
    explicit SchemaError(std::string msg) : Error(ErrorKind::schema, std::move(msg)) {}
};
struct DataError : Error {
    explicit DataError(std::string msg) : Error(ErrorKind::data, std::move(msg)) {}
};
struct ContractError : Error {
    explicit ContractError(std::string msg) : Error(ErrorKind::contract, std::move(msg)) {}
};

}  // namespace mft
