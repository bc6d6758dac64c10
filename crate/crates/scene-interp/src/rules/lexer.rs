//! Tokenizer for rule files. `//` and `%` both start line comments.

use super::RuleError;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    /// Identifier starting with an uppercase letter: a variable, or an
    /// interpretation name when used as a constraint functor.
    Upper(String),
    /// Identifier starting with a lowercase letter: keywords and
    /// property names.
    Lower(String),
    /// Single-quoted name.
    Quoted(String),
    Number(f64),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Upper(s) | Tok::Lower(s) => write!(f, "'{s}'"),
            Tok::Quoted(s) => write!(f, "quoted name '{s}'"),
            Tok::Number(n) => write!(f, "number {n}"),
            Tok::LParen => write!(f, "'('"),
            Tok::RParen => write!(f, "')'"),
            Tok::LBrace => write!(f, "'{{'"),
            Tok::RBrace => write!(f, "'}}'"),
            Tok::LBracket => write!(f, "'['"),
            Tok::RBracket => write!(f, "']'"),
            Tok::Comma => write!(f, "','"),
            Tok::Semi => write!(f, "';'"),
            Tok::Colon => write!(f, "':'"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub(crate) fn lex(text: &str) -> Result<Vec<Token>, RuleError> {
    let mut tokens = Vec::new();
    for (line_idx, raw_line) in text.lines().enumerate() {
        let line_no = line_idx + 1;
        let line = cut_comment(raw_line);
        let bytes: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            let col = i + 1;
            let mut push = |tok| {
                tokens.push(Token {
                    tok,
                    line: line_no,
                    col,
                })
            };
            match c {
                c if c.is_whitespace() => {
                    i += 1;
                }
                '(' => {
                    push(Tok::LParen);
                    i += 1;
                }
                ')' => {
                    push(Tok::RParen);
                    i += 1;
                }
                '{' => {
                    push(Tok::LBrace);
                    i += 1;
                }
                '}' => {
                    push(Tok::RBrace);
                    i += 1;
                }
                '[' => {
                    push(Tok::LBracket);
                    i += 1;
                }
                ']' => {
                    push(Tok::RBracket);
                    i += 1;
                }
                ',' => {
                    push(Tok::Comma);
                    i += 1;
                }
                ';' => {
                    push(Tok::Semi);
                    i += 1;
                }
                ':' => {
                    push(Tok::Colon);
                    i += 1;
                }
                '\'' => {
                    let start = i + 1;
                    let mut j = start;
                    while j < bytes.len() && bytes[j] != '\'' {
                        j += 1;
                    }
                    if j == bytes.len() {
                        return Err(RuleError::at(line_no, col, "unterminated quoted name"));
                    }
                    if j == start {
                        return Err(RuleError::at(line_no, col, "empty quoted name"));
                    }
                    push(Tok::Quoted(bytes[start..j].iter().collect()));
                    i = j + 1;
                }
                c if c.is_ascii_digit() => {
                    let mut j = i;
                    let mut seen_dot = false;
                    while j < bytes.len()
                        && (bytes[j].is_ascii_digit() || (bytes[j] == '.' && !seen_dot))
                    {
                        if bytes[j] == '.' {
                            // a dot not followed by a digit ends the number
                            if j + 1 >= bytes.len() || !bytes[j + 1].is_ascii_digit() {
                                break;
                            }
                            seen_dot = true;
                        }
                        j += 1;
                    }
                    let text: String = bytes[i..j].iter().collect();
                    let value: f64 = text
                        .parse()
                        .map_err(|_| RuleError::at(line_no, col, format!("bad number '{text}'")))?;
                    push(Tok::Number(value));
                    i = j;
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let mut j = i;
                    while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == '_') {
                        j += 1;
                    }
                    let word: String = bytes[i..j].iter().collect();
                    if c.is_ascii_uppercase() {
                        push(Tok::Upper(word));
                    } else {
                        push(Tok::Lower(word));
                    }
                    i = j;
                }
                other => {
                    return Err(RuleError::at(
                        line_no,
                        col,
                        format!("unexpected character '{other}'"),
                    ));
                }
            }
        }
    }
    Ok(tokens)
}

/// Trim a `//` or `%` comment; quotes protect both markers.
fn cut_comment(line: &str) -> &str {
    let chars: Vec<(usize, char)> = line.char_indices().collect();
    let mut quoted = false;
    for (k, &(i, c)) in chars.iter().enumerate() {
        match c {
            '\'' => quoted = !quoted,
            '%' if !quoted => return &line[..i],
            '/' if !quoted => {
                if let Some(&(_, '/')) = chars.get(k + 1) {
                    return &line[..i];
                }
            }
            _ => {}
        }
    }
    line
}
