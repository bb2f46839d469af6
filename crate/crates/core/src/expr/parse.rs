use super::{BinOp, Expr, Func};
use crate::error::{Error, Result};
use std::ops::Neg;

/// Parse an infix expression over the given chart coordinates.
///
/// Grammar (no implicit multiplication):
/// ```text
/// expr    := term (('+' | '-') term)*
/// term    := factor (('*' | '/') factor)*
/// factor  := '-' factor | power
/// power   := primary ('^' factor)?          right-associative
/// primary := number | name '(' expr ')' | name | '(' expr ')'
/// ```
/// A name is a function only when followed by `(`; otherwise it must be one
/// of `coords`.
pub fn parse(text: &str, coords: &[impl AsRef<str>]) -> Result<Expr> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        coords: coords.iter().map(|c| c.as_ref().to_string()).collect(),
        end: text.len(),
    };
    let expr = parser.expr()?;
    match parser.peek() {
        None => Ok(expr),
        Some((_, offset)) => Err(Error::Syntax {
            offset: *offset,
            message: "unexpected trailing input".to_string(),
        }),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Name(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>> {
    if text.trim().is_empty() {
        return Err(Error::Syntax {
            offset: 0,
            message: "empty expression".to_string(),
        });
    }
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
            }
            b'+' => {
                tokens.push((Token::Plus, start));
                i += 1;
            }
            b'-' => {
                tokens.push((Token::Minus, start));
                i += 1;
            }
            b'*' => {
                tokens.push((Token::Star, start));
                i += 1;
            }
            b'/' => {
                tokens.push((Token::Slash, start));
                i += 1;
            }
            b'^' => {
                tokens.push((Token::Caret, start));
                i += 1;
            }
            b'(' => {
                tokens.push((Token::LParen, start));
                i += 1;
            }
            b')' => {
                tokens.push((Token::RParen, start));
                i += 1;
            }
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let literal = &text[start..i];
                let value: f64 = literal.parse().map_err(|_| Error::Syntax {
                    offset: start,
                    message: format!("invalid number literal `{literal}`"),
                })?;
                tokens.push((Token::Number(value), start));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                tokens.push((Token::Name(text[start..i].to_string()), start));
            }
            _ => {
                return Err(Error::Syntax {
                    offset: start,
                    message: format!("unexpected character `{}`", &text[start..start + 1]),
                });
            }
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    coords: Vec<String>,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&(Token, usize)> {
        self.tokens.get(self.pos)
    }

    fn advance(&mut self) -> Option<(Token, usize)> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, expected: Token, what: &str) -> Result<()> {
        match self.advance() {
            Some((t, _)) if t == expected => Ok(()),
            Some((_, offset)) => Err(Error::Syntax {
                offset,
                message: format!("expected {what}"),
            }),
            None => Err(Error::Syntax {
                offset: self.end,
                message: format!("expected {what}, found end of input"),
            }),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some((tok, _)) = self.peek() {
            let op = match tok {
                Token::Plus => BinOp::Add,
                Token::Minus => BinOp::Sub,
                _ => break,
            };
            self.advance();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        while let Some((tok, _)) = self.peek() {
            let op = match tok {
                Token::Star => BinOp::Mul,
                Token::Slash => BinOp::Div,
                _ => break,
            };
            self.advance();
            let rhs = self.factor()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr> {
        if matches!(self.peek(), Some((Token::Minus, _))) {
            self.advance();
            let inner = self.factor()?;
            return Ok(inner.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if matches!(self.peek(), Some((Token::Caret, _))) {
            self.advance();
            let exponent = self.factor()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.advance() {
            Some((Token::Number(value), _)) => Ok(Expr::Const(value)),
            Some((Token::Name(name), offset)) => {
                if matches!(self.peek(), Some((Token::LParen, _))) {
                    let func = Func::from_name(&name).ok_or(Error::Syntax {
                        offset,
                        message: format!("unknown function `{name}`"),
                    })?;
                    self.advance(); // (
                    let arg = self.expr()?;
                    self.eat(Token::RParen, "closing `)`")?;
                    Ok(Expr::Call(func, Box::new(arg)))
                } else if self.coords.contains(&name) {
                    Ok(Expr::Var(name))
                } else {
                    Err(Error::UnknownVariable {
                        name,
                        coords: self.coords.clone(),
                    })
                }
            }
            Some((Token::LParen, _)) => {
                let inner = self.expr()?;
                self.eat(Token::RParen, "closing `)`")?;
                Ok(inner)
            }
            Some((_, offset)) => Err(Error::Syntax {
                offset,
                message: "expected a number, name, or `(`".to_string(),
            }),
            None => Err(Error::Syntax {
                offset: self.end,
                message: "unexpected end of input".to_string(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_function_application() {
        let e = parse("cosh(t)", &["t"]).unwrap();
        assert_eq!(e, Expr::Call(Func::Cosh, Box::new(Expr::Var("t".into()))));
    }

    #[test]
    fn parses_power_and_sum() {
        let e = parse("x1^2 + x2", &["x1", "x2"]).unwrap();
        let expected = Expr::Bin(
            BinOp::Add,
            Box::new(Expr::Bin(
                BinOp::Pow,
                Box::new(Expr::Var("x1".into())),
                Box::new(Expr::Const(2.0)),
            )),
            Box::new(Expr::Var("x2".into())),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn reports_offset_of_bad_token() {
        let err = parse("1 + + 2", &["x"]).unwrap_err();
        assert_eq!(
            err,
            Error::Syntax {
                offset: 4,
                message: "expected a number, name, or `(`".to_string()
            }
        );
    }

    #[test]
    fn reports_unknown_variable() {
        let err = parse("x1 + z", &["x1", "x2"]).unwrap_err();
        match err {
            Error::UnknownVariable { name, .. } => assert_eq!(name, "z"),
            other => panic!("expected UnknownVariable, got {other:?}"),
        }
    }

    #[test]
    fn rejects_malformed_operator_sequence() {
        assert!(matches!(
            parse("x1 +* 2", &["x1"]),
            Err(Error::Syntax { offset: 4, .. })
        ));
    }

    #[test]
    fn unary_minus_binds_looser_than_pow() {
        let e = parse("-x^2", &["x"]).unwrap();
        assert_eq!(
            e,
            Expr::Neg(Box::new(Expr::Bin(
                BinOp::Pow,
                Box::new(Expr::Var("x".into())),
                Box::new(Expr::Const(2.0)),
            )))
        );
    }

    #[test]
    fn negative_literal_folds_into_constant() {
        assert_eq!(parse("-2.5", &["x"]).unwrap(), Expr::Const(-2.5));
        assert_eq!(parse("3 ^ -2", &["x"]).unwrap().to_string(), "3 ^ (-2)");
    }

    #[test]
    fn empty_input_is_a_syntax_error() {
        assert!(matches!(
            parse("   ", &["x"]),
            Err(Error::Syntax { offset: 0, .. })
        ));
    }
}
