// errors.hpp -- exception types shared across the toolkit
#pragma once

#include <stdexcept>
#include <string>

namespace upsynth {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input text. line/col are 1-based; 0 means unknown.
struct ParseError : Error {
    int line = 0;
    int col = 0;
    ParseError(const std::string& msg, int line_ = 0, int col_ = 0)
        : Error(line_ > 0 ? msg + " (line " + std::to_string(line_) + ", col " + std::to_string(col_) + ")"
                          : msg),
          line(line_), col(col_) {}
};

// Alphabet width out of range or mismatched between operands.
struct WidthError : Error {
    using Error::Error;
};

// A construction exceeded its configured state budget.
struct CapacityError : Error {
    using Error::Error;
};

// A machine's behaviour contradicts the property it was claimed to satisfy.
struct InconsistencyError : Error {
    using Error::Error;
};

} // namespace upsynth
