use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{Action, Channel, Process};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{kind} at byte {position}")]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("unexpected {found}, expected {expected}")]
    UnexpectedToken { found: String, expected: &'static str },
    #[error("choice branches must start with a prefix")]
    UnguardedChoice,
    #[error("recursion variable `{0}` is not guarded by a prefix")]
    UnguardedRecursion(String),
    #[error("`{0}` is a reserved word")]
    Reserved(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Zero,
    LParen,
    RParen,
    Bar,
    Plus,
    Dot,
    Backslash,
    Tilde,
    Question,
    Bang,
    Ident(String),
    Rec,
    Tau,
    Eof,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Zero => "`0`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::Bar => "`|`".into(),
            Token::Plus => "`+`".into(),
            Token::Dot => "`.`".into(),
            Token::Backslash => "`\\`".into(),
            Token::Tilde => "`~`".into(),
            Token::Question => "`?`".into(),
            Token::Bang => "`!`".into(),
            Token::Ident(s) => alloc::format!("identifier `{s}`"),
            Token::Rec => "`rec`".into(),
            Token::Tau => "`tau`".into(),
            Token::Eof => "end of input".into(),
        }
    }
}

fn tokenize(input: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let mut tokens = Vec::new();
    let bytes = input.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let token = match c {
            c if c.is_ascii_whitespace() => {
                i += 1;
                continue;
            }
            '0' => Token::Zero,
            '(' => Token::LParen,
            ')' => Token::RParen,
            '|' => Token::Bar,
            '+' => Token::Plus,
            '.' => Token::Dot,
            '\\' => Token::Backslash,
            '~' => Token::Tilde,
            '?' => Token::Question,
            '!' => Token::Bang,
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &input[start..i];
                let token = match word {
                    "rec" => Token::Rec,
                    "tau" => Token::Tau,
                    _ => Token::Ident(word.to_string()),
                };
                tokens.push((start, token));
                continue;
            }
            _ => {
                let ch = input[i..].chars().next().unwrap_or(c);
                return Err(ParseError { position: i, kind: ParseErrorKind::UnexpectedChar(ch) });
            }
        };
        tokens.push((i, token));
        i += 1;
    }
    tokens.push((input.len(), Token::Eof));
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    bound_vars: Vec<String>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].1
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].0
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].1.clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &'static str) -> ParseError {
        ParseError {
            position: self.offset(),
            kind: ParseErrorKind::UnexpectedToken { found: self.peek().describe(), expected },
        }
    }

    fn expect(&mut self, token: Token, expected: &'static str) -> Result<(), ParseError> {
        if *self.peek() == token {
            self.advance();
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn channel(&mut self) -> Result<Channel, ParseError> {
        match self.peek().clone() {
            Token::Ident(name) => {
                self.advance();
                Ok(Channel(name))
            }
            Token::Rec | Token::Tau => {
                Err(ParseError { position: self.offset(), kind: ParseErrorKind::Reserved(self.peek().describe()) })
            }
            _ => Err(self.error("a channel name")),
        }
    }

    fn par(&mut self) -> Result<Process, ParseError> {
        let mut left = self.sum()?;
        while *self.peek() == Token::Bar {
            self.advance();
            let right = self.sum()?;
            left = Process::par(left, right);
        }
        Ok(left)
    }

    fn sum(&mut self) -> Result<Process, ParseError> {
        let start = self.offset();
        let first = self.prefixed()?;
        if *self.peek() != Token::Plus {
            return Ok(first);
        }
        let mut branches = into_branches(first, start)?;
        while *self.peek() == Token::Plus {
            self.advance();
            let start = self.offset();
            let next = self.prefixed()?;
            branches.extend(into_branches(next, start)?);
        }
        Ok(Process::Sum(branches))
    }

    fn prefixed(&mut self) -> Result<Process, ParseError> {
        match self.peek().clone() {
            Token::Rec => {
                self.advance();
                let var = match self.peek().clone() {
                    Token::Ident(x) => x,
                    _ => return Err(self.error("a recursion variable")),
                };
                self.advance();
                self.expect(Token::Dot, "`.`")?;
                self.bound_vars.push(var.clone());
                let body = self.par();
                self.bound_vars.pop();
                Ok(Process::rec(&var, body?))
            }
            Token::Ident(_) | Token::Tilde | Token::Tau => {
                let (action, bare) = self.action()?;
                if *self.peek() == Token::Dot {
                    self.advance();
                    let continuation = self.prefixed()?;
                    Ok(Process::prefix(action, continuation))
                } else {
                    let atom = match action {
                        Action::Input(name) if bare && self.bound_vars.contains(&name.0) => Process::Var(name.0),
                        action => Process::prefix(action, Process::nil()),
                    };
                    self.postfix(atom)
                }
            }
            _ => {
                let atom = self.atom()?;
                self.postfix(atom)
            }
        }
    }

    /// An action, and whether it was written as a bare name.
    fn action(&mut self) -> Result<(Action, bool), ParseError> {
        match self.peek() {
            Token::Tau => {
                self.advance();
                Ok((Action::Tau, false))
            }
            Token::Tilde => {
                self.advance();
                Ok((Action::Output(self.channel()?), false))
            }
            _ => {
                let c = self.channel()?;
                match self.peek() {
                    Token::Question => {
                        self.advance();
                        Ok((Action::Input(c), false))
                    }
                    Token::Bang => {
                        self.advance();
                        Ok((Action::Output(c), false))
                    }
                    _ => Ok((Action::Input(c), true)),
                }
            }
        }
    }

    fn atom(&mut self) -> Result<Process, ParseError> {
        match self.peek() {
            Token::Zero => {
                self.advance();
                Ok(Process::nil())
            }
            Token::LParen => {
                self.advance();
                let inner = self.par()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(self.error("a process")),
        }
    }

    fn postfix(&mut self, mut p: Process) -> Result<Process, ParseError> {
        while *self.peek() == Token::Backslash {
            self.advance();
            let c = self.channel()?;
            p = Process::restrict(p, c);
        }
        Ok(p)
    }
}

fn into_branches(p: Process, position: usize) -> Result<Vec<(Action, Process)>, ParseError> {
    match p {
        Process::Sum(branches) if !branches.is_empty() => Ok(branches),
        _ => Err(ParseError { position, kind: ParseErrorKind::UnguardedChoice }),
    }
}

/// Parse a closed, guarded CCS term.
///
/// Inputs are written `a` or `a?`, outputs `~a` or `a!`. A prefix without
/// continuation stands for the prefix followed by `0`, unless it is a bare
/// name bound by an enclosing `rec`. Restriction binders that clash with other names are
/// renamed apart.
pub fn parse_process(input: &str) -> Result<Process, ParseError> {
    let tokens = tokenize(input)?;
    let mut parser = Parser { tokens, pos: 0, bound_vars: Vec::new() };
    let p = parser.par()?;
    if *parser.peek() != Token::Eof {
        return Err(parser.error("end of input"));
    }
    if let Err(super::ProcessError::UnguardedRecursion(x)) = p.validate() {
        return Err(ParseError { position: 0, kind: ParseErrorKind::UnguardedRecursion(x) });
    }
    Ok(p.freshen_binders())
}
