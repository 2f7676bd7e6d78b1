//! OPENQASM 2.0 subset: one quantum register, unary gates and `cx`.

use std::fmt::Write as _;

use log::warn;
use thiserror::Error;

use super::{Circuit, Operands};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QasmError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: only one quantum register is supported")]
    MultipleRegisters { line: usize, col: usize },
    #[error("{line}:{col}: unsupported gate `{name}`")]
    UnsupportedGate { line: usize, col: usize, name: String },
    #[error("{line}:{col}: gate `{name}` has arity {arity}; at most 2 is supported")]
    Arity {
        line: usize,
        col: usize,
        name: String,
        arity: usize,
    },
    #[error("{line}:{col}: unsupported statement `{keyword}`")]
    UnsupportedStatement { line: usize, col: usize, keyword: String },
    #[error("{line}:{col}: unknown register `{name}`")]
    UnknownRegister { line: usize, col: usize, name: String },
    #[error("{line}:{col}: qubit index {index} out of range for register of size {size}")]
    IndexOutOfRange {
        line: usize,
        col: usize,
        index: usize,
        size: usize,
    },
    #[error("{line}:{col}: gate applied before any qreg declaration")]
    MissingRegister { line: usize, col: usize },
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Accept `swap` as a two-qubit gate. Used when reading routed output back.
    pub allow_swap: bool,
}

#[derive(Debug, Clone)]
pub struct Parsed {
    pub circuit: Circuit,
    pub warnings: Vec<String>,
}

/// Parses an input circuit. Dropped statements are logged at `warn` level.
pub fn parse_qasm(text: &str) -> Result<Circuit, QasmError> {
    let parsed = parse_qasm_with(text, ParseOptions::default())?;
    for w in &parsed.warnings {
        warn!("{w}");
    }
    Ok(parsed.circuit)
}

pub fn parse_qasm_with(text: &str, opts: ParseOptions) -> Result<Parsed, QasmError> {
    let tokens = lex(text)?;
    Parser {
        tokens,
        pos: 0,
        opts,
        reg: None,
        circuit: None,
        warnings: Vec::new(),
    }
    .run()
}

/// Renders `c` as OPENQASM 2.0. Each line of `header_comment` becomes a
/// `//` comment at the top of the file.
pub fn emit_qasm(c: &Circuit, header_comment: &str) -> String {
    let mut out = String::new();
    for line in header_comment.lines() {
        let _ = writeln!(out, "// {line}");
    }
    out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(out, "qreg q[{}];", c.num_qubits());
    for g in c.gates() {
        let _ = writeln!(out, "{g};");
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(usize),
    Real(f64),
    Str(String),
    Sym(char),
    Arrow,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, QasmError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let bump = |i: &mut usize, col: &mut usize, n: usize| {
        *i += n;
        *col += n;
    };
    while i < chars.len() {
        let ch = chars[i];
        let (tl, tc) = (line, col);
        if ch == '\n' {
            i += 1;
            line += 1;
            col = 1;
        } else if ch.is_whitespace() {
            bump(&mut i, &mut col, 1);
        } else if ch == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                bump(&mut i, &mut col, 1);
            }
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                bump(&mut i, &mut col, 1);
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Token {
                tok: Tok::Ident(s),
                line: tl,
                col: tc,
            });
        } else if ch.is_ascii_digit() || (ch == '.' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) {
            let start = i;
            let mut real = false;
            while i < chars.len() && chars[i].is_ascii_digit() {
                bump(&mut i, &mut col, 1);
            }
            if i < chars.len() && chars[i] == '.' {
                real = true;
                bump(&mut i, &mut col, 1);
                while i < chars.len() && chars[i].is_ascii_digit() {
                    bump(&mut i, &mut col, 1);
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                real = true;
                bump(&mut i, &mut col, 1);
                if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                    bump(&mut i, &mut col, 1);
                }
                while i < chars.len() && chars[i].is_ascii_digit() {
                    bump(&mut i, &mut col, 1);
                }
            }
            let s: String = chars[start..i].iter().collect();
            let bad = || QasmError::Syntax {
                line: tl,
                col: tc,
                msg: format!("malformed number `{s}`"),
            };
            let tok = if real {
                Tok::Real(s.parse().map_err(|_| bad())?)
            } else {
                Tok::Int(s.parse().map_err(|_| bad())?)
            };
            out.push(Token { tok, line: tl, col: tc });
        } else if ch == '"' {
            bump(&mut i, &mut col, 1);
            let start = i;
            while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                bump(&mut i, &mut col, 1);
            }
            if chars.get(i) != Some(&'"') {
                return Err(QasmError::Syntax {
                    line: tl,
                    col: tc,
                    msg: "unterminated string".into(),
                });
            }
            let s: String = chars[start..i].iter().collect();
            bump(&mut i, &mut col, 1);
            out.push(Token {
                tok: Tok::Str(s),
                line: tl,
                col: tc,
            });
        } else if ch == '-' && chars.get(i + 1) == Some(&'>') {
            bump(&mut i, &mut col, 2);
            out.push(Token {
                tok: Tok::Arrow,
                line: tl,
                col: tc,
            });
        } else if ";,()[]{}+-*/^".contains(ch) {
            bump(&mut i, &mut col, 1);
            out.push(Token {
                tok: Tok::Sym(ch),
                line: tl,
                col: tc,
            });
        } else {
            return Err(QasmError::Syntax {
                line: tl,
                col: tc,
                msg: format!("unexpected character `{ch}`"),
            });
        }
    }
    Ok(out)
}

enum Arg {
    Whole,
    Index(usize),
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    opts: ParseOptions,
    reg: Option<(String, usize)>,
    circuit: Option<Circuit>,
    warnings: Vec<String>,
}

impl Parser {
    fn run(mut self) -> Result<Parsed, QasmError> {
        while self.pos < self.tokens.len() {
            self.statement()?;
        }
        let circuit = match (self.circuit, self.reg) {
            (Some(c), _) => c,
            _ => {
                let (line, col) = self.tokens.last().map_or((1, 1), |t| (t.line, t.col));
                return Err(QasmError::Syntax {
                    line,
                    col,
                    msg: "no qreg declaration".into(),
                });
            }
        };
        Ok(Parsed {
            circuit,
            warnings: self.warnings,
        })
    }

    fn here(&self) -> (usize, usize) {
        match self.tokens.get(self.pos).or(self.tokens.last()) {
            Some(t) => (t.line, t.col),
            None => (1, 1),
        }
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Result<T, QasmError> {
        let (line, col) = self.here();
        Err(QasmError::Syntax {
            line,
            col,
            msg: msg.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), QasmError> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            self.syntax(format!("expected `{c}`"))
        }
    }

    fn ident(&mut self) -> Result<String, QasmError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.syntax("expected identifier"),
        }
    }

    fn int(&mut self) -> Result<usize, QasmError> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => self.syntax("expected integer"),
        }
    }

    fn skip_to_semicolon(&mut self) -> Result<(), QasmError> {
        loop {
            match self.next() {
                Some(Tok::Sym(';')) => return Ok(()),
                Some(_) => {}
                None => return self.syntax("expected `;`"),
            }
        }
    }

    fn statement(&mut self) -> Result<(), QasmError> {
        let (line, col) = self.here();
        let kw = self.ident()?;
        match kw.as_str() {
            "OPENQASM" => {
                match self.next() {
                    Some(Tok::Real(_)) | Some(Tok::Int(_)) => {}
                    _ => return self.syntax("expected version number"),
                }
                self.expect_sym(';')
            }
            "include" => {
                match self.next() {
                    Some(Tok::Str(_)) => {}
                    _ => return self.syntax("expected file name"),
                }
                self.expect_sym(';')
            }
            "qreg" => {
                let name = self.ident()?;
                self.expect_sym('[')?;
                let n = self.int()?;
                self.expect_sym(']')?;
                self.expect_sym(';')?;
                if self.reg.is_some() {
                    return Err(QasmError::MultipleRegisters { line, col });
                }
                self.reg = Some((name, n));
                self.circuit = Some(Circuit::new(n));
                Ok(())
            }
            "creg" | "measure" | "barrier" => {
                self.warnings.push(format!("{line}:{col}: ignoring `{kw}` statement"));
                self.skip_to_semicolon()
            }
            "gate" | "opaque" | "if" | "reset" => Err(QasmError::UnsupportedStatement { line, col, keyword: kw }),
            _ => self.gate_application(kw, line, col),
        }
    }

    fn gate_application(&mut self, name: String, line: usize, col: usize) -> Result<(), QasmError> {
        let mut params = Vec::new();
        if self.eat_sym('(') && !self.eat_sym(')') {
            loop {
                params.push(self.expr()?);
                if self.eat_sym(')') {
                    break;
                }
                self.expect_sym(',')?;
            }
        }
        let mut args = Vec::new();
        loop {
            args.push(self.argument()?);
            if self.eat_sym(';') {
                break;
            }
            self.expect_sym(',')?;
        }
        let size = match &self.reg {
            Some((_, n)) => *n,
            None => return Err(QasmError::MissingRegister { line, col }),
        };
        let circuit = self.circuit.as_mut().expect("register declared");
        match args.len() {
            1 => {
                let targets: Vec<usize> = match args[0] {
                    Arg::Whole => (0..size).collect(),
                    Arg::Index(q) => vec![q],
                };
                if matches!(name.as_str(), "cx" | "CX" | "swap") {
                    return Err(QasmError::Syntax {
                        line,
                        col,
                        msg: format!("`{name}` needs two operands"),
                    });
                }
                for q in targets {
                    circuit
                        .try_push(name.clone(), Operands::Unary(q), params.clone())
                        .map_err(|_| QasmError::Syntax {
                            line,
                            col,
                            msg: "invalid operand".into(),
                        })?;
                }
                Ok(())
            }
            2 => {
                let (a, b) = match (&args[0], &args[1]) {
                    (Arg::Index(a), Arg::Index(b)) => (*a, *b),
                    _ => {
                        return Err(QasmError::Syntax {
                            line,
                            col,
                            msg: "register broadcast is not supported for two-qubit gates".into(),
                        })
                    }
                };
                let operands = match name.as_str() {
                    "cx" | "CX" => Operands::Cx { control: a, target: b },
                    "swap" if self.opts.allow_swap => Operands::Swap(a, b),
                    _ => return Err(QasmError::UnsupportedGate { line, col, name }),
                };
                let name = if name == "CX" { "cx".to_string() } else { name };
                circuit
                    .try_push(name, operands, params)
                    .map_err(|e| QasmError::Syntax {
                        line,
                        col,
                        msg: e.to_string(),
                    })?;
                Ok(())
            }
            arity => Err(QasmError::Arity { line, col, name, arity }),
        }
    }

    fn argument(&mut self) -> Result<Arg, QasmError> {
        let (line, col) = self.here();
        let name = self.ident()?;
        let size = match &self.reg {
            Some((r, n)) if *r == name => *n,
            Some(_) => return Err(QasmError::UnknownRegister { line, col, name }),
            None => return Err(QasmError::MissingRegister { line, col }),
        };
        if self.eat_sym('[') {
            let index = self.int()?;
            self.expect_sym(']')?;
            if index >= size {
                return Err(QasmError::IndexOutOfRange { line, col, index, size });
            }
            Ok(Arg::Index(index))
        } else {
            Ok(Arg::Whole)
        }
    }

    fn expr(&mut self) -> Result<f64, QasmError> {
        let mut v = self.term()?;
        loop {
            if self.eat_sym('+') {
                v += self.term()?;
            } else if self.eat_sym('-') {
                v -= self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<f64, QasmError> {
        let mut v = self.power()?;
        loop {
            if self.eat_sym('*') {
                v *= self.power()?;
            } else if self.eat_sym('/') {
                v /= self.power()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn power(&mut self) -> Result<f64, QasmError> {
        let base = self.unary()?;
        if self.eat_sym('^') {
            Ok(base.powf(self.power()?))
        } else {
            Ok(base)
        }
    }

    fn unary(&mut self) -> Result<f64, QasmError> {
        if self.eat_sym('-') {
            return Ok(-self.unary()?);
        }
        if self.eat_sym('+') {
            return self.unary();
        }
        match self.next() {
            Some(Tok::Int(n)) => Ok(n as f64),
            Some(Tok::Real(x)) => Ok(x),
            Some(Tok::Sym('(')) => {
                let v = self.expr()?;
                self.expect_sym(')')?;
                Ok(v)
            }
            Some(Tok::Ident(id)) => {
                if id == "pi" {
                    return Ok(std::f64::consts::PI);
                }
                let f: fn(f64) -> f64 = match id.as_str() {
                    "sin" => f64::sin,
                    "cos" => f64::cos,
                    "tan" => f64::tan,
                    "exp" => f64::exp,
                    "ln" => f64::ln,
                    "sqrt" => f64::sqrt,
                    _ => {
                        self.pos -= 1;
                        return self.syntax(format!("unknown identifier `{id}` in expression"));
                    }
                };
                self.expect_sym('(')?;
                let v = self.expr()?;
                self.expect_sym(')')?;
                Ok(f(v))
            }
            _ => {
                self.pos -= 1;
                self.syntax("expected expression")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateKind;

    const HEADER: &str = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";

    #[test]
    fn minimal_program() {
        let c = parse_qasm(&format!("{HEADER}qreg q[2];\nh q[0];\ncx q[0],q[1];\n")).unwrap();
        assert_eq!(c.num_qubits(), 2);
        assert_eq!(c.len(), 2);
        assert_eq!(c.gate(0).operands, Operands::Unary(0));
        assert_eq!(c.gate(1).operands, Operands::Cx { control: 0, target: 1 });
    }

    #[test]
    fn empty_body() {
        let c = parse_qasm("qreg q[3];").unwrap();
        assert_eq!((c.num_qubits(), c.len()), (3, 0));
    }

    #[test]
    fn params_and_broadcast() {
        let c = parse_qasm("qreg q[2]; rz(-pi/4) q[1]; u3(0.5, 2*pi, 1e-3) q[0]; h q;").unwrap();
        assert_eq!(c.len(), 4);
        assert!((c.gate(0).params[0] + std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert_eq!(c.gate(1).params.len(), 3);
        assert_eq!(c.gate(3).operands, Operands::Unary(1));
    }

    #[test]
    fn measure_and_barrier_dropped_with_warning() {
        let p = parse_qasm_with(
            "qreg q[2]; creg c[2]; h q[0]; barrier q; measure q[0] -> c[0]; measure q -> c;",
            ParseOptions::default(),
        )
        .unwrap();
        assert_eq!(p.circuit.len(), 1);
        assert_eq!(p.warnings.len(), 4);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_qasm("qreg q[2]; qreg r[2];"),
            Err(QasmError::MultipleRegisters { line: 1, col: 12 })
        ));
        assert!(matches!(
            parse_qasm("qreg q[3]; ccx q[0],q[1],q[2];"),
            Err(QasmError::Arity { arity: 3, .. })
        ));
        assert!(matches!(
            parse_qasm("qreg q[2]; swap q[0],q[1];"),
            Err(QasmError::UnsupportedGate { .. })
        ));
        assert!(matches!(
            parse_qasm("qreg q[2];\nh q[0]\ncx q[0],q[1];"),
            Err(QasmError::Syntax { line: 3, .. })
        ));
        assert!(matches!(
            parse_qasm("qreg q[2]; h q[5];"),
            Err(QasmError::IndexOutOfRange { index: 5, .. })
        ));
        assert!(matches!(
            parse_qasm("qreg q[2]; cx q[1],q[1];"),
            Err(QasmError::Syntax { .. })
        ));
        assert!(matches!(
            parse_qasm("h q[0];"),
            Err(QasmError::UnknownRegister { .. }) | Err(QasmError::MissingRegister { .. })
        ));
    }

    #[test]
    fn swap_allowed_on_request() {
        let p = parse_qasm_with("qreg q[2]; swap q[0],q[1];", ParseOptions { allow_swap: true }).unwrap();
        assert_eq!(p.circuit.gate(0).kind(), GateKind::Swap);
    }

    #[test]
    fn emit_forms() {
        let mut c = Circuit::new(1);
        c.unary("h", 0);
        let text = emit_qasm(&c, "mapped");
        assert!(text.starts_with("// mapped\nOPENQASM 2.0;"));
        assert!(text.ends_with("qreg q[1];\nh q[0];\n"));
        let e = emit_qasm(&Circuit::new(2), "");
        assert!(e.ends_with("qreg q[2];\n"));
    }
}
