//! The `.qc` circuit language.
//!
//! ```text
//! qubits 3            # header, required first
//! h 0                 # i x y z h s t <q>
//! cx 0 1              # cx <control> <target>
//! measure 0 -> 0      # measure <q> -> <cbit>
//! if 0 == 1 then x 2  # if <cbit> == <0|1> then <gate> <q>
//! ```
//!
//! Mnemonics are case-insensitive, `#` starts a comment, blank lines are
//! ignored, and LF or CRLF line endings are accepted. Serialization emits
//! lowercase mnemonics, single spaces and LF.

use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use crate::qcore::{GateName, MAX_QUBITS};
use crate::simulator::{Circuit, ErrorKind, Instruction, Warning, MAX_CLASSICAL_BITS};

/// First error in a program, with a 1-based line and (character) column.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ErrorKind,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: {}: {}",
            self.line, self.column, self.kind, self.message
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tok<'a> {
    Word(&'a str),
    Arrow,
    EqEq,
}

#[derive(Clone, Copy, Debug)]
struct Token<'a> {
    tok: Tok<'a>,
    column: usize,
}

impl Tok<'_> {
    fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("'{w}'"),
            Tok::Arrow => "'->'".into(),
            Tok::EqEq => "'=='".into(),
        }
    }
}

fn error(line: usize, column: usize, kind: ErrorKind, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        kind,
        message: message.into(),
    }
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn lex(text: &str, line: usize) -> Result<Vec<Token<'_>>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    let mut column = 0;
    while let Some((start, c)) = chars.next() {
        column += 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            continue;
        }
        let tok_column = column;
        if is_word_char(c) {
            let mut end = start + c.len_utf8();
            while let Some(&(i, n)) = chars.peek() {
                if !is_word_char(n) {
                    break;
                }
                chars.next();
                column += 1;
                end = i + n.len_utf8();
            }
            tokens.push(Token {
                tok: Tok::Word(&text[start..end]),
                column: tok_column,
            });
            continue;
        }
        let pair = match (c, chars.peek().map(|&(_, n)| n)) {
            ('-', Some('>')) => Some(Tok::Arrow),
            ('=', Some('=')) => Some(Tok::EqEq),
            _ => None,
        };
        match pair {
            Some(tok) => {
                chars.next();
                column += 1;
                tokens.push(Token {
                    tok,
                    column: tok_column,
                });
            }
            None => {
                return Err(error(
                    line,
                    tok_column,
                    ErrorKind::Syntax,
                    format!("unexpected character {c:?}"),
                ))
            }
        }
    }
    Ok(tokens)
}

/// Cursor over one statement's tokens.
struct Stmt<'a> {
    line: usize,
    end_column: usize,
    tokens: Vec<Token<'a>>,
    pos: usize,
}

impl<'a> Stmt<'a> {
    fn next(&mut self, expected: &str) -> Result<Token<'a>, ParseError> {
        let tok = self.tokens.get(self.pos).copied().ok_or_else(|| {
            error(
                self.line,
                self.end_column,
                ErrorKind::Syntax,
                format!("expected {expected}, found end of line"),
            )
        })?;
        self.pos += 1;
        Ok(tok)
    }

    fn expect(&mut self, want: Tok<'_>, expected: &str) -> Result<(), ParseError> {
        let tok = self.next(expected)?;
        if tok.tok != want {
            return Err(error(
                self.line,
                tok.column,
                ErrorKind::Syntax,
                format!("expected {expected}, found {}", tok.tok.describe()),
            ));
        }
        Ok(())
    }

    fn keyword(&mut self, word: &str) -> Result<(), ParseError> {
        let tok = self.next(&format!("'{word}'"))?;
        match tok.tok {
            Tok::Word(w) if w.eq_ignore_ascii_case(word) => Ok(()),
            other => Err(error(
                self.line,
                tok.column,
                ErrorKind::Syntax,
                format!("expected '{word}', found {}", other.describe()),
            )),
        }
    }

    /// An unsigned integer strictly below `limit`.
    fn index(&mut self, what: &str, limit: usize) -> Result<(usize, usize), ParseError> {
        let tok = self.next(what)?;
        let word = match tok.tok {
            Tok::Word(w) if w.bytes().all(|b| b.is_ascii_digit()) => w,
            other => {
                return Err(error(
                    self.line,
                    tok.column,
                    ErrorKind::Syntax,
                    format!("expected {what}, found {}", other.describe()),
                ))
            }
        };
        match word.parse::<usize>() {
            Ok(v) if v < limit => Ok((v, tok.column)),
            _ => Err(error(
                self.line,
                tok.column,
                ErrorKind::IndexOutOfRange,
                format!("{what} {word} out of range (must be below {limit})"),
            )),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.tokens.get(self.pos) {
            None => Ok(()),
            Some(tok) => Err(error(
                self.line,
                tok.column,
                ErrorKind::Syntax,
                format!("unexpected {} after statement", tok.tok.describe()),
            )),
        }
    }
}

/// Position of each instruction's statement in the source.
struct Located {
    circuit: Circuit,
    positions: Vec<(usize, usize)>,
}

fn parse_located(src: &str) -> Result<Located, ParseError> {
    let mut circuit: Option<Circuit> = None;
    let mut positions = Vec::new();
    let mut line_count = 0;
    for (idx, raw) in src.split('\n').enumerate() {
        let line = idx + 1;
        line_count = line;
        let text = raw.strip_suffix('\r').unwrap_or(raw);
        let tokens = lex(text, line)?;
        let Some(&first) = tokens.first() else {
            continue;
        };
        let mut stmt = Stmt {
            line,
            end_column: text.chars().count() + 1,
            tokens,
            pos: 1,
        };
        let Tok::Word(head) = first.tok else {
            return Err(error(
                line,
                first.column,
                ErrorKind::Syntax,
                format!("statement cannot start with {}", first.tok.describe()),
            ));
        };
        let head_lower = head.to_ascii_lowercase();

        let Some(c) = circuit.as_mut() else {
            if head_lower != "qubits" {
                return Err(error(
                    line,
                    first.column,
                    ErrorKind::Syntax,
                    "program must start with a 'qubits N' header",
                ));
            }
            let (n, col) = stmt.index("qubit count", MAX_QUBITS + 1)?;
            if n == 0 {
                return Err(error(
                    line,
                    col,
                    ErrorKind::IndexOutOfRange,
                    "qubit count must be at least 1",
                ));
            }
            stmt.finish()?;
            circuit = Some(Circuit::new(n));
            continue;
        };
        let n = c.n_qubits;

        let instruction = match head_lower.as_str() {
            "qubits" => {
                return Err(error(line, first.column, ErrorKind::Syntax, "duplicate 'qubits' header"))
            }
            "measure" => {
                let (qubit, _) = stmt.index("qubit index", n)?;
                stmt.expect(Tok::Arrow, "'->'")?;
                let (cbit, _) = stmt.index("classical bit", MAX_CLASSICAL_BITS)?;
                Instruction::Measure { qubit, cbit }
            }
            "if" => {
                let (cbit, _) = stmt.index("classical bit", MAX_CLASSICAL_BITS)?;
                stmt.expect(Tok::EqEq, "'=='")?;
                let (value, _) = stmt.index("condition value (0 or 1)", 2)?;
                stmt.keyword("then")?;
                let gate_tok = stmt.next("gate name")?;
                let gate = gate_name(line, gate_tok)?;
                if !gate.is_single_qubit() {
                    return Err(error(
                        line,
                        gate_tok.column,
                        ErrorKind::UnknownGate,
                        format!("conditional gate must be single-qubit, got '{}'", gate.mnemonic()),
                    ));
                }
                let (target, _) = stmt.index("qubit index", n)?;
                Instruction::Conditional {
                    gate,
                    target,
                    cbit,
                    value: value as u8,
                }
            }
            _ => match gate_name(line, first)? {
                GateName::Cnot => {
                    let (control, _) = stmt.index("control qubit", n)?;
                    let (target, col) = stmt.index("target qubit", n)?;
                    if control == target {
                        return Err(error(
                            line,
                            col,
                            ErrorKind::IndexOutOfRange,
                            format!("cx control and target are both qubit {control}"),
                        ));
                    }
                    Instruction::Cnot { control, target }
                }
                gate => {
                    let (target, _) = stmt.index("qubit index", n)?;
                    Instruction::Gate1 { gate, target }
                }
            },
        };
        stmt.finish()?;
        c.push(instruction);
        positions.push((line, first.column));
    }
    let Some(circuit) = circuit else {
        return Err(error(
            line_count.max(1),
            1,
            ErrorKind::Syntax,
            "missing 'qubits N' header",
        ));
    };
    Ok(Located {
        circuit,
        positions,
    })
}

fn gate_name(line: usize, tok: Token<'_>) -> Result<GateName, ParseError> {
    match tok.tok {
        Tok::Word(w) => w.parse::<GateName>().map_err(|_| {
            error(line, tok.column, ErrorKind::UnknownGate, format!("unknown gate '{w}'"))
        }),
        other => Err(error(
            line,
            tok.column,
            ErrorKind::Syntax,
            format!("expected gate name, found {}", other.describe()),
        )),
    }
}

/// Parses and validates a program.
pub fn parse(src: &str) -> Result<Circuit, ParseError> {
    let located = parse_located(src)?;
    located.circuit.validate().map_err(|e| {
        let (line, column) = e
            .instruction
            .and_then(|i| located.positions.get(i).copied())
            .unwrap_or((1, 1));
        error(line, column, e.kind, e.message)
    })?;
    Ok(located.circuit)
}

/// Parses raw bytes, reporting invalid UTF-8 as a positioned syntax error.
pub fn parse_bytes(bytes: &[u8]) -> Result<Circuit, ParseError> {
    match std::str::from_utf8(bytes) {
        Ok(src) => parse(src),
        Err(e) => {
            // bytes[..valid_up_to] is valid UTF-8
            let prefix = std::str::from_utf8(&bytes[..e.valid_up_to()]).unwrap_or_default();
            let line = prefix.matches('\n').count() + 1;
            let last = prefix.rsplit('\n').next().unwrap_or("");
            Err(error(
                line,
                last.chars().count() + 1,
                ErrorKind::Syntax,
                "invalid UTF-8",
            ))
        }
    }
}

/// Canonical text of a circuit. The classical register size is implied by
/// the highest bit used.
pub fn serialize(circuit: &Circuit) -> String {
    let mut out = format!("qubits {}\n", circuit.n_qubits);
    for instr in &circuit.instructions {
        let _ = match *instr {
            Instruction::Gate1 { gate, target } => writeln!(out, "{} {target}", gate.mnemonic()),
            Instruction::Cnot { control, target } => writeln!(out, "cx {control} {target}"),
            Instruction::Measure { qubit, cbit } => writeln!(out, "measure {qubit} -> {cbit}"),
            Instruction::Conditional {
                gate,
                target,
                cbit,
                value,
            } => writeln!(out, "if {cbit} == {value} then {} {target}", gate.mnemonic()),
        };
    }
    out
}

/// Validates a circuit built in code. Positions refer to its canonical
/// serialization (header on line 1, instruction `k` on line `k + 2`).
pub fn validate(circuit: &Circuit) -> Result<Vec<Warning>, ParseError> {
    circuit.validate().map_err(|e| {
        let line = e.instruction.map_or(1, |i| i + 2);
        error(line, 1, e.kind, e.message)
    })
}
