//! Minimal s-expression reader with source positions. `;` starts a comment.

use super::PddlError;

#[derive(Debug, Clone, PartialEq)]
pub enum Sexpr {
    Atom {
        text: String,
        line: usize,
        col: usize,
    },
    List {
        items: Vec<Sexpr>,
        line: usize,
        col: usize,
    },
}

impl Sexpr {
    pub fn pos(&self) -> (usize, usize) {
        match self {
            Sexpr::Atom { line, col, .. } | Sexpr::List { line, col, .. } => (*line, *col),
        }
    }

    pub fn atom(&self) -> Option<&str> {
        match self {
            Sexpr::Atom { text, .. } => Some(text),
            Sexpr::List { .. } => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexpr]> {
        match self {
            Sexpr::List { items, .. } => Some(items),
            Sexpr::Atom { .. } => None,
        }
    }

    /// Case-insensitive comparison against a keyword.
    pub fn is(&self, keyword: &str) -> bool {
        self.atom().is_some_and(|t| t.eq_ignore_ascii_case(keyword))
    }

    /// First element's text, lowercased, if this is a list headed by an atom.
    pub fn head(&self) -> Option<String> {
        self.list()?.first()?.atom().map(str::to_ascii_lowercase)
    }

    pub fn error(&self, message: impl Into<String>) -> PddlError {
        let (line, col) = self.pos();
        PddlError::Syntax {
            line,
            col,
            message: message.into(),
        }
    }
}

#[derive(Debug, PartialEq)]
enum Token {
    Open,
    Close,
    Word(String),
}

fn tokenize(text: &str) -> Vec<(Token, usize, usize)> {
    let mut tokens = Vec::new();
    let mut word = String::new();
    let mut word_pos = (0, 0);
    let (mut line, mut col) = (1, 0);
    let mut in_comment = false;
    for ch in text.chars() {
        col += 1;
        if ch == '\n' {
            in_comment = false;
        }
        let delimiter = in_comment || ch.is_whitespace() || ch == '(' || ch == ')' || ch == ';';
        if delimiter && !word.is_empty() {
            tokens.push((
                Token::Word(std::mem::take(&mut word)),
                word_pos.0,
                word_pos.1,
            ));
        }
        if !in_comment {
            match ch {
                '(' => tokens.push((Token::Open, line, col)),
                ')' => tokens.push((Token::Close, line, col)),
                ';' => in_comment = true,
                c if c.is_whitespace() => {}
                c => {
                    if word.is_empty() {
                        word_pos = (line, col);
                    }
                    word.push(c);
                }
            }
        }
        if ch == '\n' {
            line += 1;
            col = 0;
        }
    }
    if !word.is_empty() {
        tokens.push((Token::Word(word), word_pos.0, word_pos.1));
    }
    tokens
}

/// Parses exactly one top-level expression.
pub fn parse(text: &str) -> Result<Sexpr, PddlError> {
    let tokens = tokenize(text);
    let mut stack: Vec<(Vec<Sexpr>, usize, usize)> = Vec::new();
    let mut done: Option<Sexpr> = None;
    for (token, line, col) in tokens {
        if done.is_some() {
            return Err(PddlError::Syntax {
                line,
                col,
                message: "unexpected text after the closing parenthesis".into(),
            });
        }
        match token {
            Token::Open => stack.push((Vec::new(), line, col)),
            Token::Close => {
                let (items, l, c) = stack.pop().ok_or(PddlError::Syntax {
                    line,
                    col,
                    message: "unbalanced `)`".into(),
                })?;
                let list = Sexpr::List {
                    items,
                    line: l,
                    col: c,
                };
                match stack.last_mut() {
                    Some((parent, _, _)) => parent.push(list),
                    None => done = Some(list),
                }
            }
            Token::Word(text) => match stack.last_mut() {
                Some((parent, _, _)) => parent.push(Sexpr::Atom { text, line, col }),
                None => {
                    return Err(PddlError::Syntax {
                        line,
                        col,
                        message: format!("expected `(`, found `{text}`"),
                    })
                }
            },
        }
    }
    if let Some((_, line, col)) = stack.last() {
        return Err(PddlError::Syntax {
            line: *line,
            col: *col,
            message: "unclosed `(`".into(),
        });
    }
    done.ok_or(PddlError::Syntax {
        line: 1,
        col: 1,
        message: "empty document".into(),
    })
}
