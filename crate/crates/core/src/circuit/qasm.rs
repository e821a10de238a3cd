//! Reader for a small OpenQASM 2 subset.
//!
//! Accepted statements:
//!
//! * `OPENQASM 2.0;` and `include "...";` (ignored)
//! * `qreg name[n];` / `creg name[n];` (quantum registers are concatenated
//!   in declaration order)
//! * gate applications `name(params) q[i];` and `name q[i], r[j];` with one
//!   or two indexed operands; parameters are skipped
//! * `measure q[i] -> c[j];`
//! * `//` line comments
//!
//! Everything else (gate definitions, `if`, `reset`, `barrier`, `opaque`,
//! whole-register broadcasts, gates on three or more qubits) is rejected
//! with [`QasmError::Unsupported`].

use std::collections::HashMap;

use thiserror::Error;

use super::{Circuit, Gate};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QasmError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported construct `{construct}` at {line}:{column}")]
    Unsupported {
        construct: String,
        line: usize,
        column: usize,
    },
}

const TWO_QUBIT: &[&str] = &[
    "cx", "cz", "cy", "ch", "swap", "rzz", "rxx", "ryy", "ms", "crx", "cry", "crz", "cu1", "cp", "cu3", "cu", "csx",
    "ecr", "iswap",
];
const ONE_QUBIT: &[&str] = &[
    "id", "x", "y", "z", "h", "s", "sdg", "t", "tdg", "sx", "sxdg", "rx", "ry", "rz", "u", "u1", "u2", "u3", "p",
];
const UNSUPPORTED: &[&str] = &["gate", "opaque", "if", "reset", "barrier", "ccx", "cswap"];

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(usize),
    Real,
    Str,
    Sym(char),
    Arrow,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, QasmError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (tline, tcol) = (line, col);
        let push = |out: &mut Vec<Token>, tok| {
            out.push(Token {
                tok,
                line: tline,
                column: tcol,
            })
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'>') {
            push(&mut out, Tok::Arrow);
            i += 2;
            col += 2;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            push(&mut out, Tok::Ident(word));
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            let mut real = false;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                real |= chars[i] == '.';
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                real = true;
                i += 1;
                if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                    i += 1;
                }
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            if real {
                push(&mut out, Tok::Real);
            } else {
                let n = word.parse().map_err(|_| QasmError::Syntax {
                    line: tline,
                    column: tcol,
                    message: format!("integer `{word}` out of range"),
                })?;
                push(&mut out, Tok::Int(n));
            }
            continue;
        }
        if c == '"' {
            i += 1;
            col += 1;
            while i < chars.len() && chars[i] != '"' {
                if chars[i] == '\n' {
                    return Err(QasmError::Syntax {
                        line: tline,
                        column: tcol,
                        message: "unterminated string".into(),
                    });
                }
                i += 1;
                col += 1;
            }
            if i == chars.len() {
                return Err(QasmError::Syntax {
                    line: tline,
                    column: tcol,
                    message: "unterminated string".into(),
                });
            }
            i += 1;
            col += 1;
            push(&mut out, Tok::Str);
            continue;
        }
        if "[](),;+-*/^{}=<>".contains(c) {
            push(&mut out, Tok::Sym(c));
            i += 1;
            col += 1;
            continue;
        }
        return Err(QasmError::Syntax {
            line,
            column: col,
            message: format!("unexpected character `{c}`"),
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    qregs: HashMap<String, (usize, usize)>,
    cregs: HashMap<String, usize>,
    qubit_count: usize,
    gates: Vec<Gate>,
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Int(n) => format!("`{n}`"),
        Tok::Real => "real literal".into(),
        Tok::Str => "string".into(),
        Tok::Sym(c) => format!("`{c}`"),
        Tok::Arrow => "`->`".into(),
        Tok::Eof => "end of input".into(),
    }
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn syntax<T>(&self, at: &Token, message: impl Into<String>) -> Result<T, QasmError> {
        Err(QasmError::Syntax {
            line: at.line,
            column: at.column,
            message: message.into(),
        })
    }

    fn expect_sym(&mut self, c: char) -> Result<(), QasmError> {
        let t = self.next();
        if t.tok == Tok::Sym(c) {
            Ok(())
        } else {
            self.syntax(&t, format!("expected `{c}`, found {}", describe(&t.tok)))
        }
    }

    fn expect_ident(&mut self) -> Result<(String, Token), QasmError> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) => Ok((s.clone(), t.clone())),
            other => self.syntax(&t, format!("expected identifier, found {}", describe(other))),
        }
    }

    fn expect_int(&mut self) -> Result<usize, QasmError> {
        let t = self.next();
        match t.tok {
            Tok::Int(n) => Ok(n),
            ref other => self.syntax(&t, format!("expected integer, found {}", describe(other))),
        }
    }

    fn skip_to_semicolon(&mut self) -> Result<(), QasmError> {
        loop {
            let t = self.next();
            match t.tok {
                Tok::Sym(';') => return Ok(()),
                Tok::Eof => return self.syntax(&t, "expected `;`, found end of input"),
                _ => {}
            }
        }
    }

    fn declaration(&mut self, quantum: bool) -> Result<(), QasmError> {
        let (name, at) = self.expect_ident()?;
        self.expect_sym('[')?;
        let size = self.expect_int()?;
        self.expect_sym(']')?;
        self.expect_sym(';')?;
        if size == 0 {
            return self.syntax(&at, format!("register `{name}` has zero size"));
        }
        let taken = self.qregs.contains_key(&name) || self.cregs.contains_key(&name);
        if taken {
            return self.syntax(&at, format!("register `{name}` redeclared"));
        }
        if quantum {
            self.qregs.insert(name, (self.qubit_count, size));
            self.qubit_count += size;
        } else {
            self.cregs.insert(name, size);
        }
        Ok(())
    }

    fn qubit_operand(&mut self) -> Result<usize, QasmError> {
        let (name, at) = self.expect_ident()?;
        let Some(&(offset, size)) = self.qregs.get(&name) else {
            return self.syntax(&at, format!("unknown quantum register `{name}`"));
        };
        if self.peek().tok != Tok::Sym('[') {
            return Err(QasmError::Unsupported {
                construct: format!("register broadcast `{name}`"),
                line: at.line,
                column: at.column,
            });
        }
        self.next();
        let index = self.expect_int()?;
        self.expect_sym(']')?;
        if index >= size {
            return self.syntax(&at, format!("index {index} out of range for `{name}[{size}]`"));
        }
        Ok(offset + index)
    }

    fn classical_operand(&mut self) -> Result<(), QasmError> {
        let (name, at) = self.expect_ident()?;
        let Some(&size) = self.cregs.get(&name) else {
            return self.syntax(&at, format!("unknown classical register `{name}`"));
        };
        self.expect_sym('[')?;
        let index = self.expect_int()?;
        self.expect_sym(']')?;
        if index >= size {
            return self.syntax(&at, format!("index {index} out of range for `{name}[{size}]`"));
        }
        Ok(())
    }

    fn skip_params(&mut self) -> Result<(), QasmError> {
        if self.peek().tok != Tok::Sym('(') {
            return Ok(());
        }
        let open = self.next();
        let mut depth = 1;
        while depth > 0 {
            let t = self.next();
            match t.tok {
                Tok::Sym('(') => depth += 1,
                Tok::Sym(')') => depth -= 1,
                Tok::Sym(';') | Tok::Eof => return self.syntax(&open, "unclosed `(`"),
                _ => {}
            }
        }
        Ok(())
    }

    fn gate(&mut self, name: String, at: Token) -> Result<(), QasmError> {
        self.skip_params()?;
        let mut operands = vec![self.qubit_operand()?];
        while self.peek().tok == Tok::Sym(',') {
            self.next();
            operands.push(self.qubit_operand()?);
        }
        self.expect_sym(';')?;

        let expected = if TWO_QUBIT.contains(&name.as_str()) {
            Some(2)
        } else if ONE_QUBIT.contains(&name.as_str()) {
            Some(1)
        } else {
            None
        };
        match (expected, operands.len()) {
            (Some(e), got) if e != got => self.syntax(&at, format!("`{name}` expects {e} operand(s), found {got}")),
            (_, 1) => {
                self.gates.push(Gate::one(name, operands[0]));
                Ok(())
            }
            (_, 2) => {
                if operands[0] == operands[1] {
                    return self.syntax(&at, format!("`{name}` applied twice to the same qubit"));
                }
                self.gates.push(Gate::two(name, operands[0], operands[1]));
                Ok(())
            }
            (_, n) => Err(QasmError::Unsupported {
                construct: format!("{n}-qubit gate `{name}`"),
                line: at.line,
                column: at.column,
            }),
        }
    }

    fn statement(&mut self) -> Result<bool, QasmError> {
        let t = self.next();
        let word = match &t.tok {
            Tok::Eof => return Ok(false),
            Tok::Ident(w) => w.clone(),
            other => return self.syntax(&t, format!("expected statement, found {}", describe(other))),
        };
        match word.as_str() {
            "OPENQASM" | "include" => self.skip_to_semicolon()?,
            "qreg" => self.declaration(true)?,
            "creg" => self.declaration(false)?,
            "measure" => {
                let q = self.qubit_operand()?;
                let arrow = self.next();
                if arrow.tok != Tok::Arrow {
                    return self.syntax(&arrow, format!("expected `->`, found {}", describe(&arrow.tok)));
                }
                self.classical_operand()?;
                self.expect_sym(';')?;
                self.gates.push(Gate::measure(q));
            }
            w if UNSUPPORTED.contains(&w) => {
                return Err(QasmError::Unsupported {
                    construct: word,
                    line: t.line,
                    column: t.column,
                })
            }
            _ => self.gate(word, t)?,
        }
        Ok(true)
    }
}

pub fn read_qasm_subset(text: &str) -> Result<Circuit, QasmError> {
    let mut parser = Parser {
        tokens: lex(text)?,
        pos: 0,
        qregs: HashMap::new(),
        cregs: HashMap::new(),
        qubit_count: 0,
        gates: Vec::new(),
    };
    while parser.statement()? {}
    if parser.qubit_count == 0 {
        let end = parser.peek().clone();
        return parser.syntax(&end, "no quantum register declared");
    }
    // Operands were range-checked against their registers above.
    Ok(Circuit::from_gates(parser.qubit_count, parser.gates).expect("operands already validated against registers"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateKind;

    #[test]
    fn minimal_program() {
        let c = read_qasm_subset("qreg q[2]; cx q[0],q[1];").unwrap();
        assert_eq!(c.qubit_count(), 2);
        assert_eq!(c.two_qubit_count(), 1);
        assert_eq!(c.gates()[0].operands(), &[0, 1]);
    }

    #[test]
    fn measurement_program() {
        let c = read_qasm_subset("qreg q[1]; creg c[1]; h q[0]; measure q[0] -> c[0];").unwrap();
        assert_eq!(c.qubit_count(), 1);
        assert_eq!(c.count_of(GateKind::OneQubit), 1);
        assert_eq!(c.count_of(GateKind::Measurement), 1);
    }

    #[test]
    fn measurement_without_creg_is_rejected() {
        let err = read_qasm_subset("qreg q[1]; h q[0]; measure q[0] -> c[0];").unwrap_err();
        assert!(matches!(err, QasmError::Syntax { line: 1, .. }), "{err}");
    }

    #[test]
    fn arity_violation_points_at_gate() {
        let err = read_qasm_subset("qreg q[2];\ncx q[0];").unwrap_err();
        assert_eq!(
            err,
            QasmError::Syntax {
                line: 2,
                column: 1,
                message: "`cx` expects 2 operand(s), found 1".into()
            }
        );
        let err = read_qasm_subset("qreg q[2]; cx q[0]").unwrap_err();
        assert!(
            matches!(
                err,
                QasmError::Syntax {
                    line: 1,
                    column: 19,
                    ..
                }
            ),
            "{err:?}"
        );
    }

    #[test]
    fn full_header_multiple_registers_and_comments() {
        let text = r#"OPENQASM 2.0;
include "qelib1.inc"; // standard gates
qreg a[2];
qreg b[3];
creg c[5];
rz(pi/2) a[1];
u3(0.1, -2.5e-3, pi) b[0];
ms a[0], b[2];
measure b[2] -> c[4];
"#;
        let c = read_qasm_subset(text).unwrap();
        assert_eq!(c.qubit_count(), 5);
        assert_eq!(c.gates()[0].operands(), &[1]);
        assert_eq!(c.gates()[1].operands(), &[2]);
        assert_eq!(c.gates()[2].operands(), &[0, 4]);
        assert_eq!(c.gates()[2].tag(), "ms");
    }

    #[test]
    fn unsupported_constructs_are_named() {
        for (src, name) in [
            ("qreg q[3]; ccx q[0],q[1],q[2];", "ccx"),
            ("qreg q[1]; barrier q[0];", "barrier"),
            ("qreg q[1]; reset q[0];", "reset"),
            ("qreg q[3]; foo q[0],q[1],q[2];", "3-qubit gate `foo`"),
            ("qreg q[2]; h q;", "register broadcast `q`"),
        ] {
            match read_qasm_subset(src) {
                Err(QasmError::Unsupported { construct, .. }) => assert_eq!(construct, name),
                other => panic!("{src}: {other:?}"),
            }
        }
    }

    #[test]
    fn range_and_name_errors() {
        assert!(read_qasm_subset("qreg q[2]; h q[2];").is_err());
        assert!(read_qasm_subset("qreg q[2]; h r[0];").is_err());
        assert!(read_qasm_subset("qreg q[2]; cx q[1], q[1];").is_err());
        assert!(read_qasm_subset("h q[0];").is_err());
        assert!(read_qasm_subset("").is_err());
        assert!(read_qasm_subset("qreg q[2]; h q[0]; $").is_err());
    }
}
