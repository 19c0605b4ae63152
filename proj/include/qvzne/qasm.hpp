#pragma once

#include <stdexcept>
#include <string>

#include "qvzne/circuit.hpp"

namespace qvzne {

/// Parse failure with 1-based source position.
class QasmParseError : public std::runtime_error {
  public:
    QasmParseError(std::string message, int line, int column);
    int line() const { return line_; }
    int column() const { return column_; }

  private:
    int line_;
    int column_;
};

/// Emits an OpenQASM 2.0 document for a native circuit (x, sx, rz, cx,
/// barrier, measure). Byte-deterministic for a given circuit; SU4 and SWAP
/// gates must be decomposed first. Full-width barriers double as layer
/// delimiters so layer_marks survive a round trip.
std::string qasm_export(const Circuit &circuit);

/// Parses the subset emitted by qasm_export (plus line comments and free
/// integer/pi-fraction angle expressions). Explicit identity gates are
/// dropped.
Circuit qasm_import(const std::string &text);

}  // namespace qvzne
