//! Uniform substitutions over a finite alphabet.
//!
//! Letters are stored as `u8` indices into an [`Alphabet`]; the symbol names
//! only matter when reading or writing the textual rule format:
//!
//! ```text
//! # comment
//! 0 -> 01
//! 1 -> 10
//! "s1" -> "s1" "s2"
//! ```
//!
//! A symbol is either one non-whitespace character or a double-quoted string.
//! The alphabet is ordered by first appearance of the left-hand sides.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Largest supported alphabet; letters are `u8` indices.
pub const MAX_ALPHABET: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubstitutionError {
    #[error("non-uniform: image of {symbol:?} has length {len}, expected {expected}")]
    NonUniform {
        symbol: String,
        len: usize,
        expected: usize,
    },
    #[error("unknown letter {symbol:?} in image of {rule:?}")]
    UnknownLetter { symbol: String, rule: String },
    #[error("duplicate rule for {0:?}")]
    DuplicateRule(String),
    #[error("empty image for {0:?}")]
    EmptyImage(String),
    #[error("syntax error on line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("no rules")]
    Empty,
    #[error("alphabet has more than {MAX_ALPHABET} letters")]
    TooManyLetters,
}

/// A letter, as an index into its alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(pub u8);

impl Letter {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A finite word: a sequence of letter indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn new(letters: Vec<u8>) -> Self {
        Word(letters)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }
}

impl std::ops::Deref for Word {
    type Target = [u8];

    fn deref(&self) -> &[u8] {
        &self.0
    }
}

impl From<&[u8]> for Word {
    fn from(s: &[u8]) -> Self {
        Word(s.to_vec())
    }
}

/// Symbol names for letter indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new(symbols: Vec<String>) -> Result<Self, SubstitutionError> {
        if symbols.len() > MAX_ALPHABET {
            return Err(SubstitutionError::TooManyLetters);
        }
        for (i, s) in symbols.iter().enumerate() {
            if symbols[..i].contains(s) {
                return Err(SubstitutionError::DuplicateRule(s.clone()));
            }
        }
        Ok(Alphabet { symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol(&self, letter: Letter) -> &str {
        &self.symbols[letter.index()]
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn lookup(&self, symbol: &str) -> Option<Letter> {
        self.symbols
            .iter()
            .position(|s| s == symbol)
            .map(|i| Letter(i as u8))
    }

    fn all_bare(&self) -> bool {
        self.symbols.iter().all(|s| is_bare(s))
    }

    /// Renders a word with the alphabet's symbols. Single-character alphabets
    /// are concatenated; otherwise tokens are space-separated and quoted where
    /// needed.
    pub fn render(&self, word: &[u8]) -> String {
        if self.all_bare() {
            word.iter().map(|&c| self.symbols[c as usize].as_str()).collect()
        } else {
            let tokens: Vec<String> = word
                .iter()
                .map(|&c| quote_if_needed(&self.symbols[c as usize]))
                .collect();
            tokens.join(" ")
        }
    }

    /// Parses a word written in the rule-image syntax.
    pub fn parse_word(&self, text: &str) -> Result<Word, SubstitutionError> {
        let tokens = tokenize(text, 0)?;
        tokens
            .into_iter()
            .map(|t| {
                self.lookup(&t).map(|l| l.0).ok_or(SubstitutionError::UnknownLetter {
                    symbol: t,
                    rule: text.to_string(),
                })
            })
            .collect::<Result<Vec<u8>, _>>()
            .map(Word)
    }
}

fn is_bare(s: &str) -> bool {
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => !c.is_whitespace() && c != '"' && c != '#',
        _ => false,
    }
}

fn quote_if_needed(s: &str) -> String {
    if is_bare(s) {
        s.to_string()
    } else {
        format!("\"{s}\"")
    }
}

fn tokenize(text: &str, line: usize) -> Result<Vec<String>, SubstitutionError> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        if c.is_whitespace() {
            continue;
        }
        if c == '"' {
            let mut sym = String::new();
            loop {
                match chars.next() {
                    Some('"') => break,
                    Some(ch) => sym.push(ch),
                    None => {
                        return Err(SubstitutionError::Syntax {
                            line,
                            message: "unterminated quoted symbol".into(),
                        })
                    }
                }
            }
            if sym.is_empty() {
                return Err(SubstitutionError::Syntax {
                    line,
                    message: "empty quoted symbol".into(),
                });
            }
            tokens.push(sym);
        } else {
            tokens.push(c.to_string());
        }
    }
    Ok(tokens)
}

/// A uniform substitution: every letter maps to a word of length `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Substitution {
    alphabet: Alphabet,
    // row-major, r rows of length m
    images: Vec<u8>,
    m: usize,
}

impl Substitution {
    /// Builds a substitution from per-letter images, checking uniformity and
    /// that every image letter belongs to the alphabet.
    pub fn new(alphabet: Alphabet, images: Vec<Vec<u8>>) -> Result<Self, SubstitutionError> {
        if alphabet.is_empty() {
            return Err(SubstitutionError::Empty);
        }
        assert_eq!(alphabet.len(), images.len(), "one image per letter");
        let m = images[0].len();
        let mut flat = Vec::with_capacity(m * images.len());
        for (i, img) in images.iter().enumerate() {
            let symbol = alphabet.symbols[i].clone();
            if img.is_empty() {
                return Err(SubstitutionError::EmptyImage(symbol));
            }
            if img.len() != m {
                return Err(SubstitutionError::NonUniform {
                    symbol,
                    len: img.len(),
                    expected: m,
                });
            }
            if let Some(&bad) = img.iter().find(|&&c| c as usize >= alphabet.len()) {
                return Err(SubstitutionError::UnknownLetter {
                    symbol: format!("#{bad}"),
                    rule: symbol,
                });
            }
            flat.extend_from_slice(img);
        }
        Ok(Substitution {
            alphabet,
            images: flat,
            m,
        })
    }

    /// Parses the textual rule format.
    pub fn parse_spec(text: &str) -> Result<Self, SubstitutionError> {
        let mut lhs: Vec<String> = Vec::new();
        let mut rhs: Vec<(usize, String, Vec<String>)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (left, right) = line.split_once("->").ok_or_else(|| SubstitutionError::Syntax {
                line: line_no,
                message: "expected `SYMBOL -> IMAGE`".into(),
            })?;
            let left_tokens = tokenize(left, line_no)?;
            if left_tokens.len() != 1 {
                return Err(SubstitutionError::Syntax {
                    line: line_no,
                    message: "left-hand side must be a single symbol".into(),
                });
            }
            let symbol = left_tokens.into_iter().next().unwrap();
            if lhs.contains(&symbol) {
                return Err(SubstitutionError::DuplicateRule(symbol));
            }
            let image = tokenize(right, line_no)?;
            if image.is_empty() {
                return Err(SubstitutionError::EmptyImage(symbol));
            }
            lhs.push(symbol.clone());
            rhs.push((line_no, symbol, image));
        }
        if lhs.is_empty() {
            return Err(SubstitutionError::Empty);
        }
        let alphabet = Alphabet::new(lhs)?;
        let m = rhs[0].2.len();
        let mut images = Vec::with_capacity(rhs.len());
        for (_, symbol, image) in rhs {
            if image.len() != m {
                return Err(SubstitutionError::NonUniform {
                    symbol,
                    len: image.len(),
                    expected: m,
                });
            }
            let letters = image
                .into_iter()
                .map(|t| {
                    alphabet.lookup(&t).map(|l| l.0).ok_or_else(|| {
                        SubstitutionError::UnknownLetter {
                            symbol: t,
                            rule: symbol.clone(),
                        }
                    })
                })
                .collect::<Result<Vec<u8>, _>>()?;
            images.push(letters);
        }
        Substitution::new(alphabet, images)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Alphabet size.
    pub fn rank(&self) -> usize {
        self.alphabet.len()
    }

    /// Uniform image length.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn image(&self, letter: Letter) -> &[u8] {
        let start = letter.index() * self.m;
        &self.images[start..start + self.m]
    }

    /// Applies the substitution to a word.
    pub fn apply(&self, word: &[u8]) -> Vec<u8> {
        let mut out = Vec::with_capacity(word.len() * self.m);
        for &c in word {
            out.extend_from_slice(self.image(Letter(c)));
        }
        out
    }

    /// `σ^n(word)`.
    pub fn apply_n(&self, word: &[u8], n: usize) -> Vec<u8> {
        let mut w = word.to_vec();
        for _ in 0..n {
            w = self.apply(&w);
        }
        w
    }

    pub fn incidence_matrix(&self) -> IncidenceMatrix {
        let r = self.rank();
        let mut entries = vec![0u64; r * r];
        for i in 0..r {
            for &c in self.image(Letter(i as u8)) {
                entries[i * r + c as usize] += 1;
            }
        }
        IncidenceMatrix { r, entries }
    }

    /// Decides primitivity exactly with boolean matrix powers up to the
    /// Wielandt bound `r² − 2r + 2`.
    pub fn is_primitive(&self) -> Primitivity {
        let r = self.rank();
        let base = self.incidence_matrix().support();
        let bound = wielandt_bound(r);
        let mut power = base.clone();
        for n in 1..=bound {
            if power.iter().all(|&b| b) {
                return Primitivity { witness: Some(n) };
            }
            power = bool_mul(&power, &base, r);
        }
        Primitivity { witness: None }
    }

    /// Letters whose image begins with themselves.
    pub fn fixed_point_seeds(&self) -> Vec<Letter> {
        (0..self.rank())
            .map(|i| Letter(i as u8))
            .filter(|&a| self.image(a)[0] == a.0)
            .collect()
    }
}

impl FromStr for Substitution {
    type Err = SubstitutionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Substitution::parse_spec(s)
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rank() {
            let a = Letter(i as u8);
            writeln!(
                f,
                "{} -> {}",
                quote_if_needed(self.alphabet.symbol(a)),
                self.alphabet.render(self.image(a))
            )?;
        }
        Ok(())
    }
}

pub fn wielandt_bound(r: usize) -> usize {
    // r² − 2r + 2 = (r − 1)² + 1, valid also for r = 1
    (r - 1) * (r - 1) + 1
}

fn bool_mul(a: &[bool], b: &[bool], r: usize) -> Vec<bool> {
    let mut out = vec![false; r * r];
    for i in 0..r {
        for k in 0..r {
            if a[i * r + k] {
                for j in 0..r {
                    out[i * r + j] |= b[k * r + j];
                }
            }
        }
    }
    out
}

/// Outcome of the primitivity test; `witness` is the least `n` with the
/// `n`-th incidence power entrywise positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Primitivity {
    pub witness: Option<usize>,
}

impl Primitivity {
    pub fn is_primitive(&self) -> bool {
        self.witness.is_some()
    }
}

/// Entry `(i, j)` counts occurrences of letter `j` in the image of letter `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    r: usize,
    entries: Vec<u64>,
}

impl IncidenceMatrix {
    pub fn size(&self) -> usize {
        self.r
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.r + j]
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.entries.chunks(self.r).map(|row| row.iter().sum()).collect()
    }

    fn support(&self) -> Vec<bool> {
        self.entries.iter().map(|&e| e > 0).collect()
    }
}
