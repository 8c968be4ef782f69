#pragma once

#include <stdexcept>
#include <string>

namespace biknn {

// Bad input data: unreadable files, malformed cells, datasets too small for
// the requested parameters. The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid parameters or API misuse (k out of range, mismatched dimensions).
class ParamError : public std::invalid_argument {
public:
    explicit ParamError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace biknn
