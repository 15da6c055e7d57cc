#pragma once

#include <stdexcept>
#include <string>

namespace pcboost {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (CSV cells, split ids, shapes).
class DataError : public Error {
public:
    using Error::Error;
};

/// Corrupt, truncated or incompatible model files.
class ModelError : public Error {
public:
    using Error::Error;
};

/// Bad hyperparameter values or config entries.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace pcboost
