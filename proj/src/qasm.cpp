#include "qvzne/qasm.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <numeric>
#include <sstream>

namespace qvzne {

QasmParseError::QasmParseError(std::string message, int line, int column)
    : std::runtime_error("qasm parse error at " + std::to_string(line) + ":" +
                         std::to_string(column) + ": " + std::move(message)),
      line_(line),
      column_(column) {}

namespace {

constexpr const char *kLayerDirective = "//@layer";

// Prints an RZ angle: exact multiples of pi/4 symbolically, otherwise 17
// significant digits so the decimal form round-trips bit-exactly.
std::string format_angle(double angle) {
    if (angle == 0.0) return "0";
    for (int k = -8; k <= 8; ++k) {
        if (k == 0) continue;
        if (angle == k * (M_PI / 4)) {
            const int g = std::gcd(std::abs(k), 4);
            const int num = std::abs(k) / g;
            const int den = 4 / g;
            std::string s = (k < 0) ? "-" : "";
            s += (num == 1) ? "pi" : std::to_string(num) + "*pi";
            if (den != 1) s += "/" + std::to_string(den);
            return s;
        }
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", angle);
    return buf;
}

struct Cursor {
    const std::string &text;
    size_t pos = 0;
    int line = 1;
    int col = 1;

    bool done() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }

    char advance() {
        char c = text[pos++];
        if (c == '\n') {
            line++;
            col = 1;
        } else {
            col++;
        }
        return c;
    }

    [[noreturn]] void fail(const std::string &msg) const { throw QasmParseError(msg, line, col); }
};

class Parser {
  public:
    explicit Parser(const std::string &text) : cur_{text} {}

    Circuit parse() {
        expect_keyword("OPENQASM");
        skip_until_semicolon();
        for (;;) {
            skip_space();
            if (cur_.done()) break;
            parse_statement();
        }
        if (!qreg_seen_) cur_.fail("missing qreg declaration");
        if (!circuit_.layer_marks.empty() && circuit_.layer_marks.back() != circuit_.gates.size()) {
            circuit_.layer_marks.push_back(circuit_.gates.size());
        }
        circuit_.validate();
        return circuit_;
    }

  private:
    Cursor cur_;
    Circuit circuit_;
    bool qreg_seen_ = false;
    std::string qreg_name_;
    std::string creg_name_;
    uint32_t creg_size_ = 0;

    void skip_space() {
        for (;;) {
            while (!cur_.done() && std::isspace(static_cast<unsigned char>(cur_.peek()))) {
                cur_.advance();
            }
            if (cur_.done() || cur_.peek() != '/') return;
            if (cur_.pos + 1 >= cur_.text.size() || cur_.text[cur_.pos + 1] != '/') return;
            if (cur_.text.compare(cur_.pos, std::strlen(kLayerDirective), kLayerDirective) == 0) {
                circuit_.layer_marks.push_back(circuit_.gates.size());
            }
            while (!cur_.done() && cur_.peek() != '\n') cur_.advance();
        }
    }

    std::string read_identifier() {
        skip_space();
        if (cur_.done() || !(std::isalpha(static_cast<unsigned char>(cur_.peek())) || cur_.peek() == '_')) {
            cur_.fail("expected identifier");
        }
        std::string s;
        while (!cur_.done() &&
               (std::isalnum(static_cast<unsigned char>(cur_.peek())) || cur_.peek() == '_')) {
            s += cur_.advance();
        }
        return s;
    }

    void expect_char(char c) {
        skip_space();
        if (cur_.done() || cur_.peek() != c) {
            cur_.fail(std::string("expected '") + c + "'");
        }
        cur_.advance();
    }

    void expect_keyword(const std::string &kw) {
        std::string id = read_identifier();
        if (id != kw) cur_.fail("expected '" + kw + "', got '" + id + "'");
    }

    void skip_until_semicolon() {
        while (!cur_.done() && cur_.peek() != ';') cur_.advance();
        expect_char(';');
    }

    uint32_t read_uint() {
        skip_space();
        if (cur_.done() || !std::isdigit(static_cast<unsigned char>(cur_.peek()))) {
            cur_.fail("expected integer");
        }
        uint64_t v = 0;
        while (!cur_.done() && std::isdigit(static_cast<unsigned char>(cur_.peek()))) {
            v = v * 10 + (cur_.advance() - '0');
            if (v > 1'000'000) cur_.fail("integer too large");
        }
        return static_cast<uint32_t>(v);
    }

    uint32_t read_indexed(const std::string &reg_name) {
        std::string id = read_identifier();
        if (id != reg_name) cur_.fail("unknown register '" + id + "'");
        expect_char('[');
        uint32_t idx = read_uint();
        expect_char(']');
        return idx;
    }

    uint32_t read_qubit() {
        int line = cur_.line, col = cur_.col;
        uint32_t idx = read_indexed(qreg_name_);
        if (idx >= circuit_.n_qubits) {
            throw QasmParseError("qubit index " + std::to_string(idx) + " out of range for qreg " +
                                     qreg_name_ + "[" + std::to_string(circuit_.n_qubits) + "]",
                                 line, col);
        }
        return idx;
    }

    double read_angle() {
        skip_space();
        int line = cur_.line, col = cur_.col;
        double sign = 1.0;
        if (!cur_.done() && (cur_.peek() == '-' || cur_.peek() == '+')) {
            if (cur_.advance() == '-') sign = -1.0;
            skip_space();
        }
        if (cur_.done()) cur_.fail("expected angle");

        auto read_number = [&]() -> double {
            const char *start = cur_.text.c_str() + cur_.pos;
            char *end = nullptr;
            double v = std::strtod(start, &end);
            if (end == start) cur_.fail("malformed angle");
            for (const char *p = start; p != end; ++p) cur_.advance();
            return v;
        };

        double num = 1.0;
        bool has_pi = false;
        if (std::isalpha(static_cast<unsigned char>(cur_.peek()))) {
            std::string id = read_identifier();
            if (id != "pi") throw QasmParseError("malformed angle '" + id + "'", line, col);
            has_pi = true;
        } else {
            num = read_number();
            skip_space();
            if (!cur_.done() && cur_.peek() == '*') {
                cur_.advance();
                expect_keyword("pi");
                has_pi = true;
            }
        }
        double den = 1.0;
        skip_space();
        if (!cur_.done() && cur_.peek() == '/') {
            cur_.advance();
            skip_space();
            den = read_number();
            if (den == 0.0) cur_.fail("division by zero in angle");
        }

        double value;
        // Integer multiples of pi/4 are rebuilt with the same k*(pi/4)
        // arithmetic the exporter used, so symbolic forms round-trip
        // bit-exactly.
        if (has_pi && num == std::floor(num) && (den == 1.0 || den == 2.0 || den == 4.0) &&
            std::abs(num * (4.0 / den)) <= 64.0) {
            const int k = static_cast<int>(sign * num * (4.0 / den));
            value = k * (M_PI / 4);
        } else {
            value = sign * num * (has_pi ? M_PI : 1.0) / den;
        }
        if (!std::isfinite(value)) throw QasmParseError("angle is not finite", line, col);
        return value;
    }

    void parse_statement() {
        int line = cur_.line, col = cur_.col;
        std::string id = read_identifier();
        if (id == "include") {
            skip_until_semicolon();
        } else if (id == "qreg") {
            if (qreg_seen_) cur_.fail("only one qreg is supported");
            qreg_name_ = read_identifier();
            expect_char('[');
            circuit_.n_qubits = read_uint();
            expect_char(']');
            expect_char(';');
            qreg_seen_ = true;
        } else if (id == "creg") {
            creg_name_ = read_identifier();
            expect_char('[');
            creg_size_ = read_uint();
            expect_char(']');
            expect_char(';');
        } else if (id == "x" || id == "sx" || id == "id") {
            uint32_t q = read_qubit();
            expect_char(';');
            if (id == "x") circuit_.push(Gate::x(q));
            if (id == "sx") circuit_.push(Gate::sx(q));
            // explicit identities are dropped
        } else if (id == "rz") {
            expect_char('(');
            double angle = read_angle();
            expect_char(')');
            uint32_t q = read_qubit();
            expect_char(';');
            circuit_.push(Gate::rz(angle, q));
        } else if (id == "cx") {
            uint32_t c = read_qubit();
            expect_char(',');
            uint32_t t = read_qubit();
            expect_char(';');
            circuit_.push(Gate::cx(c, t));
        } else if (id == "barrier") {
            std::vector<uint32_t> qs;
            qs.push_back(read_qubit());
            skip_space();
            while (!cur_.done() && cur_.peek() == ',') {
                cur_.advance();
                qs.push_back(read_qubit());
                skip_space();
            }
            expect_char(';');
            circuit_.push(Gate::barrier(std::move(qs)));
        } else if (id == "measure") {
            uint32_t q = read_qubit();
            skip_space();
            expect_char('-');
            expect_char('>');
            uint32_t c = read_indexed(creg_name_.empty() ? std::string("c") : creg_name_);
            if (!creg_name_.empty() && c >= creg_size_) {
                cur_.fail("classical bit index out of range");
            }
            expect_char(';');
            circuit_.push(Gate::measure(q, c));
        } else {
            throw QasmParseError("unknown gate '" + id + "'", line, col);
        }
    }
};

}  // namespace

std::string qasm_export(const Circuit &circuit) {
    circuit.validate();
    std::ostringstream out;
    out << "OPENQASM 2.0;\n";
    out << "include \"qelib1.inc\";\n";
    out << "qreg q[" << circuit.n_qubits << "];\n";
    if (circuit.has_measurements()) out << "creg c[" << circuit.n_qubits << "];\n";

    size_t next_mark = 0;
    for (size_t i = 0; i <= circuit.gates.size(); ++i) {
        while (next_mark < circuit.layer_marks.size() && circuit.layer_marks[next_mark] == i) {
            out << kLayerDirective << "\n";
            next_mark++;
        }
        if (i == circuit.gates.size()) break;
        const Gate &g = circuit.gates[i];
        switch (g.kind) {
            case GateKind::X: out << "x q[" << g.qubits[0] << "];\n"; break;
            case GateKind::SX: out << "sx q[" << g.qubits[0] << "];\n"; break;
            case GateKind::RZ:
                out << "rz(" << format_angle(g.angle) << ") q[" << g.qubits[0] << "];\n";
                break;
            case GateKind::CX:
                out << "cx q[" << g.qubits[0] << "],q[" << g.qubits[1] << "];\n";
                break;
            case GateKind::Barrier: {
                out << "barrier ";
                for (size_t k = 0; k < g.qubits.size(); ++k) {
                    if (k) out << ",";
                    out << "q[" << g.qubits[k] << "]";
                }
                out << ";\n";
                break;
            }
            case GateKind::Measure:
                out << "measure q[" << g.qubits[0] << "] -> c[" << g.cbit << "];\n";
                break;
            case GateKind::SU4:
            case GateKind::SWAP:
                throw std::invalid_argument("qasm_export: " + gate_kind_name(g.kind) +
                                            " must be decomposed to the native set first");
        }
    }
    return out.str();
}

Circuit qasm_import(const std::string &text) { return Parser(text).parse(); }

}  // namespace qvzne
