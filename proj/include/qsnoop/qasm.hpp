/**
 * Copyright 2026, the qsnoop developers.
 *
 * This source code is licensed under the Apache License, Version 2.0 found in
 * the LICENSE file in the root directory of this source tree.
 */

#ifndef QSNOOP_QASM_HPP
#define QSNOOP_QASM_HPP

#include <cctype>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsnoop/circuit.hpp"

namespace qsnoop {

struct QasmError : std::runtime_error {
  QasmError(const std::string& msg, size_t line, size_t col)
      : std::runtime_error("qasm:" + std::to_string(line) + ":" +
                          std::to_string(col) + ": " + msg),
        line(line),
        col(col) {}
  size_t line;
  size_t col;
};

namespace detail {

/// Minimal tokenizer/recursive-descent parser for the OPENQASM 2.0 subset
/// used by MQTBench-style native-gate files. No classical control, no custom
/// gate definitions, includes limited to qelib1.inc.
class QasmParser {
public:
  explicit QasmParser(std::string text) : text_(std::move(text)) {}

  Circuit parse() {
    skip_ws();
    expect_keyword("OPENQASM");
    const std::string ver = next_token();
    if (ver != "2.0") fail("unsupported OPENQASM version " + ver);
    expect(";");

    Circuit c;
    std::vector<std::pair<std::string, uint32_t>> qregs; // name -> offset
    bool saw_measure = false;

    while (true) {
      skip_ws();
      if (pos_ >= text_.size()) break;
      const size_t stmt_line = line_, stmt_col = col_;
      std::string tok = next_token();
      if (tok == "include") {
        const std::string file = next_token();
        if (file != "\"qelib1.inc\"")
          fail_at("unsupported include " + file, stmt_line, stmt_col);
        expect(";");
      } else if (tok == "qreg") {
        const std::string name = next_token();
        expect("[");
        const uint32_t size = parse_uint();
        expect("]");
        expect(";");
        qregs.emplace_back(name, c.n_qubits);
        c.n_qubits += size;
      } else if (tok == "creg") {
        next_token();
        expect("[");
        parse_uint();
        expect("]");
        expect(";");
      } else if (tok == "barrier") {
        std::vector<uint32_t> qs = parse_operands(c, qregs);
        c.add(Gate::barrier(std::move(qs)));
        expect(";");
      } else if (tok == "measure") {
        std::vector<uint32_t> qs = parse_operands(c, qregs, 1);
        expect("->");
        next_token(); // classical target, ignored
        if (peek() == "[") {
          expect("[");
          parse_uint();
          expect("]");
        }
        expect(";");
        c.add(Gate::measure(qs[0]));
        saw_measure = true;
      } else {
        if (saw_measure)
          fail_at("gate after measure", stmt_line, stmt_col);
        parse_gate(tok, c, qregs, stmt_line, stmt_col);
      }
    }
    return c;
  }

private:
  void parse_gate(const std::string& name, Circuit& c,
                  const std::vector<std::pair<std::string, uint32_t>>& qregs,
                  size_t line, size_t col) {
    std::vector<double> params;
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      expect("(");
      while (true) {
        params.push_back(parse_expr());
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == ',') {
          ++pos_;
          ++col_;
          continue;
        }
        break;
      }
      expect(")");
    }
    std::vector<uint32_t> qs = parse_operands(c, qregs);
    expect(";");

    auto need = [&](size_t nq, size_t np) {
      if (qs.size() != nq || params.size() != np)
        fail_at("wrong operand/parameter count for " + name, line, col);
    };
    const double pi = std::numbers::pi;
    if (name == "h") { need(1, 0); c.add(Gate::h(qs[0])); }
    else if (name == "x") { need(1, 0); c.add(Gate::x(qs[0])); }
    else if (name == "sx") { need(1, 0); c.add(Gate::sx(qs[0])); }
    else if (name == "id") { need(1, 0); }
    else if (name == "rz") { need(1, 1); c.add(Gate::rz(params[0], qs[0])); }
    else if (name == "u1" || name == "p") {
      need(1, 1);
      c.add(Gate::rz(params[0], qs[0]));
    } else if (name == "u2") {
      // u2(phi, lambda) = rz(phi + pi/2) sx rz(lambda - pi/2), global phase off
      need(1, 2);
      c.add(Gate::rz(params[1] - pi / 2, qs[0]));
      c.add(Gate::sx(qs[0]));
      c.add(Gate::rz(params[0] + pi / 2, qs[0]));
    } else if (name == "u3" || name == "u") {
      // u3(theta, phi, lambda) = rz(phi+pi) sx rz(theta+pi) sx rz(lambda)
      need(1, 3);
      c.add(Gate::rz(params[2], qs[0]));
      c.add(Gate::sx(qs[0]));
      c.add(Gate::rz(params[0] + pi, qs[0]));
      c.add(Gate::sx(qs[0]));
      c.add(Gate::rz(params[1] + pi, qs[0]));
    } else if (name == "cx" || name == "CX") {
      need(2, 0);
      c.add(Gate::cx(qs[0], qs[1]));
    } else if (name == "swap") { need(2, 0); c.add(Gate::swap(qs[0], qs[1])); }
    else if (name == "cp" || name == "cu1") {
      need(2, 1);
      c.add(Gate::cp(params[0], qs[0], qs[1]));
    } else if (name == "cz") {
      need(2, 0);
      c.add(Gate::h(qs[1]));
      c.add(Gate::cx(qs[0], qs[1]));
      c.add(Gate::h(qs[1]));
    } else if (name == "ccx") { need(3, 0); c.add(Gate::ccx(qs[0], qs[1], qs[2])); }
    else if (name == "delay") {
      need(1, 1);
      c.add(Gate::delay(static_cast<uint64_t>(params[0]), qs[0]));
    } else {
      fail_at("unsupported gate " + name, line, col);
    }
  }

  std::vector<uint32_t> parse_operands(
      const Circuit& c,
      const std::vector<std::pair<std::string, uint32_t>>& qregs,
      size_t limit = 0) {
    std::vector<uint32_t> out;
    while (true) {
      const size_t l = line_, co = col_;
      const std::string reg = next_token();
      uint32_t offset = UINT32_MAX, size = 0;
      for (size_t i = 0; i < qregs.size(); ++i) {
        if (qregs[i].first == reg) {
          offset = qregs[i].second;
          size = (i + 1 < qregs.size() ? qregs[i + 1].second : c.n_qubits) -
                 offset;
          break;
        }
      }
      if (offset == UINT32_MAX) fail_at("unknown register " + reg, l, co);
      expect("[");
      const uint32_t idx = parse_uint();
      expect("]");
      if (idx >= size) fail_at("operand out of range", l, co);
      out.push_back(offset + idx);
      skip_ws();
      if (limit == 0 && pos_ < text_.size() && text_[pos_] == ',') {
        ++pos_;
        ++col_;
        continue;
      }
      break;
    }
    return out;
  }

  // --- expression grammar: term (('+'|'-') term)* ; term: factor (('*'|'/') factor)*
  double parse_expr() {
    double v = parse_term();
    while (true) {
      skip_ws();
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
        const char op = text_[pos_++];
        ++col_;
        const double r = parse_term();
        v = op == '+' ? v + r : v - r;
      } else {
        return v;
      }
    }
  }

  double parse_term() {
    double v = parse_factor();
    while (true) {
      skip_ws();
      if (pos_ < text_.size() && (text_[pos_] == '*' || text_[pos_] == '/')) {
        const char op = text_[pos_++];
        ++col_;
        const double r = parse_factor();
        v = op == '*' ? v * r : v / r;
      } else {
        return v;
      }
    }
  }

  double parse_factor() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input in expression");
    const char ch = text_[pos_];
    if (ch == '-') {
      ++pos_;
      ++col_;
      return -parse_factor();
    }
    if (ch == '(') {
      ++pos_;
      ++col_;
      const double v = parse_expr();
      expect(")");
      return v;
    }
    if (std::isalpha(static_cast<unsigned char>(ch))) {
      const std::string tok = next_token();
      if (tok == "pi") return std::numbers::pi;
      fail("unknown identifier in expression: " + tok);
    }
    // number
    size_t end = pos_;
    while (end < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[end])) ||
            text_[end] == '.' || text_[end] == 'e' || text_[end] == 'E' ||
            ((text_[end] == '+' || text_[end] == '-') && end > pos_ &&
             (text_[end - 1] == 'e' || text_[end - 1] == 'E'))))
      ++end;
    if (end == pos_) fail("expected number");
    const double v = std::stod(text_.substr(pos_, end - pos_));
    col_ += end - pos_;
    pos_ = end;
    return v;
  }

  uint32_t parse_uint() {
    skip_ws();
    size_t end = pos_;
    while (end < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[end])))
      ++end;
    if (end == pos_) fail("expected integer");
    const uint32_t v = static_cast<uint32_t>(std::stoul(text_.substr(pos_, end - pos_)));
    col_ += end - pos_;
    pos_ = end;
    return v;
  }

  std::string peek() {
    const size_t p = pos_, l = line_, c = col_;
    skip_ws();
    std::string tok;
    if (pos_ < text_.size()) tok = std::string(1, text_[pos_]);
    pos_ = p;
    line_ = l;
    col_ = c;
    return tok;
  }

  std::string next_token() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char ch = text_[pos_];
    if (ch == '"') {
      size_t end = text_.find('"', pos_ + 1);
      if (end == std::string::npos) fail("unterminated string");
      std::string tok = text_.substr(pos_, end - pos_ + 1);
      col_ += end + 1 - pos_;
      pos_ = end + 1;
      return tok;
    }
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      size_t end = pos_;
      while (end < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[end])) ||
              text_[end] == '_'))
        ++end;
      std::string tok = text_.substr(pos_, end - pos_);
      col_ += end - pos_;
      pos_ = end;
      return tok;
    }
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
      size_t end = pos_;
      while (end < text_.size() &&
             (std::isdigit(static_cast<unsigned char>(text_[end])) ||
              text_[end] == '.'))
        ++end;
      std::string tok = text_.substr(pos_, end - pos_);
      col_ += end - pos_;
      pos_ = end;
      return tok;
    }
    ++pos_;
    ++col_;
    return std::string(1, ch);
  }

  void expect(const std::string& s) {
    skip_ws();
    if (text_.compare(pos_, s.size(), s) != 0)
      fail("expected '" + s + "'");
    pos_ += s.size();
    col_ += s.size();
  }

  void expect_keyword(const std::string& s) {
    const size_t l = line_, c = col_;
    if (next_token() != s) fail_at("expected " + s, l, c);
  }

  void skip_ws() {
    while (pos_ < text_.size()) {
      const char ch = text_[pos_];
      if (ch == '\n') {
        ++pos_;
        ++line_;
        col_ = 1;
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        ++pos_;
        ++col_;
      } else if (ch == '/' && pos_ + 1 < text_.size() &&
                 text_[pos_ + 1] == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw QasmError(msg, line_, col_);
  }
  [[noreturn]] static void fail_at(const std::string& msg, size_t line,
                                   size_t col) {
    throw QasmError(msg, line, col);
  }

  std::string text_;
  size_t pos_ = 0;
  size_t line_ = 1;
  size_t col_ = 1;
};

} // namespace detail

inline Circuit parse_qasm(const std::string& text) {
  return detail::QasmParser(text).parse();
}

inline std::string emit_qasm(const Circuit& c) {
  std::ostringstream os;
  os << "OPENQASM 2.0;\n";
  os << "include \"qelib1.inc\";\n";
  os << "qreg q[" << c.n_qubits << "];\n";
  bool has_measure = false;
  for (const Gate& g : c.gates)
    if (g.kind == GateKind::Measure) has_measure = true;
  if (has_measure) os << "creg c[" << c.n_qubits << "];\n";
  os.precision(17);
  for (const Gate& g : c.gates) {
    switch (g.kind) {
      case GateKind::RZ:
        os << "rz(" << g.angle << ") q[" << g.qubits[0] << "];\n";
        break;
      case GateKind::CP:
        os << "cp(" << g.angle << ") q[" << g.qubits[0] << "],q[" << g.qubits[1]
           << "];\n";
        break;
      case GateKind::Delay:
        os << "delay(" << g.duration << ") q[" << g.qubits[0] << "];\n";
        break;
      case GateKind::Measure:
        os << "measure q[" << g.qubits[0] << "] -> c[" << g.qubits[0] << "];\n";
        break;
      default: {
        os << gate_name(g.kind);
        for (size_t i = 0; i < g.qubits.size(); ++i)
          os << (i == 0 ? " " : ",") << "q[" << g.qubits[i] << "]";
        os << ";\n";
      }
    }
  }
  return os.str();
}

} // namespace qsnoop

#endif
