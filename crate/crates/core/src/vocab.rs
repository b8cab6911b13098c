//! Token vocabulary for the synthetic task family.
//!
//! A deliberately small, fixed vocabulary: digits, arithmetic operators,
//! punctuation, the think/answer template markers, and an end-of-sequence
//! token. Question text and policy rollouts are sequences over this
//! vocabulary; rendering and tokenization are exact inverses for marker-free
//! text.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index into the vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Token(pub u16);

impl Token {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// The fixed token set plus the special-token indices used by templates.
#[derive(Debug, Clone)]
pub struct Vocab {
    tokens: Vec<&'static str>,
    think_open: Token,
    think_close: Token,
    eos: Token,
}

const TOKEN_STRINGS: &[&str] = &[
    "0", "1", "2", "3", "4", "5", "6", "7", "8", "9", // 0..=9
    "+", "-", "*", "/", "=", "?", ".", ",", ":", " ", "(", ")", // 10..=21
    "<think>", "</think>", // 22, 23
    "", // 24: end of sequence, renders empty
    "a", "b", "c", "n", "x", "y", "z", // 25..=31
];

const THINK_OPEN: u16 = 22;
const THINK_CLOSE: u16 = 23;
const EOS: u16 = 24;

impl Default for Vocab {
    fn default() -> Self {
        Vocab {
            tokens: TOKEN_STRINGS.to_vec(),
            think_open: Token(THINK_OPEN),
            think_close: Token(THINK_CLOSE),
            eos: Token(EOS),
        }
    }
}

impl Vocab {
    pub fn size(&self) -> usize {
        self.tokens.len()
    }

    pub fn think_open(&self) -> Token {
        self.think_open
    }

    pub fn think_close(&self) -> Token {
        self.think_close
    }

    pub fn eos(&self) -> Token {
        self.eos
    }

    pub fn digit(&self, d: u8) -> Token {
        debug_assert!(d < 10);
        Token(d as u16)
    }

    pub fn text(&self, tok: Token) -> &str {
        self.tokens[tok.index()]
    }

    /// Render a token sequence to text. The end-of-sequence token renders
    /// empty, so trailing EOS disappears from the text form.
    pub fn render(&self, tokens: &[Token]) -> String {
        tokens.iter().map(|t| self.text(*t)).collect()
    }

    /// Tokenize text by greedy longest match. Fails on characters outside
    /// the vocabulary; only generated question text is ever tokenized, and
    /// that is in-vocabulary by construction.
    pub fn tokenize(&self, text: &str) -> Result<Vec<Token>> {
        let mut out = Vec::new();
        let mut rest = text;
        'outer: while !rest.is_empty() {
            let mut best: Option<(usize, usize)> = None; // (token idx, byte len)
            for (i, s) in self.tokens.iter().enumerate() {
                if !s.is_empty() && rest.starts_with(s) {
                    let better = match best {
                        Some((_, len)) => s.len() > len,
                        None => true,
                    };
                    if better {
                        best = Some((i, s.len()));
                    }
                }
            }
            match best {
                Some((i, len)) => {
                    out.push(Token(i as u16));
                    rest = &rest[len..];
                    continue 'outer;
                }
                None => {
                    return Err(Error::data(format!(
                        "cannot tokenize at {:?}",
                        rest.chars().next().unwrap()
                    )))
                }
            }
        }
        Ok(out)
    }

    /// Tokenize a digit string, e.g. "17" -> [Token(1), Token(7)].
    pub fn digits_of(&self, value: u64) -> Vec<Token> {
        value
            .to_string()
            .bytes()
            .map(|b| Token((b - b'0') as u16))
            .collect()
    }

    pub fn is_digit(&self, tok: Token) -> bool {
        tok.0 < 10
    }
}
