//! Free-group words, finite presentations, pieces and Dehn's algorithm.

use std::collections::HashMap;
use std::fmt;

use num_rational::Rational64;
use thiserror::Error;

/// A generator or its inverse. Ordered `a < A < b < B < ...`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub gen: u32,
    pub inv: bool,
}

impl Letter {
    pub fn new(gen: u32, inv: bool) -> Self {
        Letter { gen, inv }
    }

    pub fn pos(gen: u32) -> Self {
        Letter { gen, inv: false }
    }

    pub fn inverse(self) -> Self {
        Letter { gen: self.gen, inv: !self.inv }
    }

    /// Dense index `2*gen + inv`, handy for lookup tables.
    pub fn index(self) -> usize {
        2 * self.gen as usize + self.inv as usize
    }

    pub fn from_index(i: usize) -> Self {
        Letter { gen: (i / 2) as u32, inv: i % 2 == 1 }
    }

    pub fn sign(self) -> i64 {
        if self.inv {
            -1
        } else {
            1
        }
    }
}

/// A freely reduced word.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Builds a word, freely reducing the input.
    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Self {
        free_reduce(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(invert(&self.0))
    }

    pub fn concat(&self, other: &Word) -> Word {
        free_reduce(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn mul_letter(&self, l: Letter) -> Word {
        let mut v = self.0.clone();
        if v.last() == Some(&l.inverse()) {
            v.pop();
        } else {
            v.push(l);
        }
        Word(v)
    }

    /// Shortlex comparison.
    pub fn shortlex_cmp(&self, other: &Word) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }

    /// Space-separated tokens using `^-1` for inverses; empty for the identity.
    pub fn render(&self, names: &[String]) -> String {
        let mut out = String::new();
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(&names[l.gen as usize]);
            if l.inv {
                out.push_str("^-1");
            }
        }
        out
    }

    /// Parses the output of [`Word::render`] (or any relator expression).
    pub fn parse(text: &str, names: &[String]) -> Result<Word, PresentationError> {
        let table = TokenTable::new(names);
        let mut p = ExprParser { s: text.as_bytes(), pos: 0, line: 1, table: &table };
        let letters = p.expr(false)?;
        p.skip_ws();
        if p.pos < p.s.len() {
            return Err(p.syntax("unexpected character"));
        }
        Ok(free_reduce(letters))
    }
}

pub(crate) fn invert(w: &[Letter]) -> Vec<Letter> {
    w.iter().rev().map(|l| l.inverse()).collect()
}

/// Unique freely reduced form of a letter sequence.
pub fn free_reduce(letters: impl IntoIterator<Item = Letter>) -> Word {
    let mut out: Vec<Letter> = Vec::new();
    for l in letters {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    Word(out)
}

fn cyclic_reduce(w: &[Letter]) -> &[Letter] {
    let mut i = 0;
    let mut j = w.len();
    while j >= i + 2 && w[i] == w[j - 1].inverse() {
        i += 1;
        j -= 1;
    }
    &w[i..j]
}

fn min_rotation(w: &[Letter]) -> Vec<Letter> {
    let n = w.len();
    let mut best: Option<Vec<Letter>> = None;
    for k in 0..n {
        let rot: Vec<Letter> = w[k..].iter().chain(w[..k].iter()).copied().collect();
        if best.as_ref().is_none_or(|b| rot < *b) {
            best = Some(rot);
        }
    }
    best.unwrap_or_default()
}

/// All distinct rotations, sorted.
pub(crate) fn rotations(w: &[Letter]) -> Vec<Vec<Letter>> {
    let n = w.len();
    let mut out: Vec<Vec<Letter>> = (0..n)
        .map(|k| w[k..].iter().chain(w[..k].iter()).copied().collect())
        .collect();
    out.sort();
    out.dedup();
    out
}

/// A cyclically reduced word stored as its least rotation.
#[derive(Clone, Debug, Eq)]
pub struct CyclicWord {
    canonical: Word,
    original_length: usize,
}

// Identity is the cyclic word; `original_length` is bookkeeping about the input text.
impl PartialEq for CyclicWord {
    fn eq(&self, other: &Self) -> bool {
        self.canonical == other.canonical
    }
}

impl CyclicWord {
    /// Cyclically reduces and canonicalizes. Returns `None` for the trivial word.
    pub fn new(letters: &[Letter]) -> Option<Self> {
        let w = free_reduce(letters.iter().copied());
        let core = cyclic_reduce(&w.0);
        if core.is_empty() {
            return None;
        }
        Some(CyclicWord { canonical: Word(min_rotation(core)), original_length: letters.len() })
    }

    pub fn canonical(&self) -> &Word {
        &self.canonical
    }

    pub fn letters(&self) -> &[Letter] {
        &self.canonical.0
    }

    pub fn len(&self) -> usize {
        self.canonical.len()
    }

    pub fn is_empty(&self) -> bool {
        self.canonical.is_empty()
    }

    pub fn original_length(&self) -> usize {
        self.original_length
    }

    pub fn inverse(&self) -> CyclicWord {
        CyclicWord {
            canonical: Word(min_rotation(&invert(&self.canonical.0))),
            original_length: self.original_length,
        }
    }

    /// Key identifying the relator up to rotation and inversion.
    fn class_key(&self) -> Vec<Letter> {
        let inv = self.inverse();
        std::cmp::min(self.canonical.0.clone(), inv.canonical.0)
    }
}

pub fn is_proper_power(r: &CyclicWord) -> bool {
    let w = r.letters();
    let n = w.len();
    (1..n).filter(|&d| n.is_multiple_of(d)).any(|d| (d..n).all(|i| w[i] == w[i - d]))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}, column {column}: unknown generator `{name}`")]
    UnknownGenerator { line: usize, column: usize, name: String },
    #[error("line {line}: relator reduces to the empty word")]
    EmptyRelator { line: usize },
    #[error("line {line}: relator duplicates relator {previous} up to rotation and inversion")]
    DuplicateRelator { line: usize, previous: usize },
    #[error("presentation is not C'(1/6) or has a proper-power relator: {0}")]
    PreconditionViolated(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Presentation {
    pub generator_names: Vec<String>,
    pub relators: Vec<CyclicWord>,
    pub lambda_target: Rational64,
}

impl Presentation {
    pub fn new(generator_names: Vec<String>, relators: Vec<CyclicWord>) -> Self {
        Presentation { generator_names, relators, lambda_target: Rational64::new(1, 6) }
    }

    pub fn rank(&self) -> usize {
        self.generator_names.len()
    }

    /// Free group on the given generator names.
    pub fn free(names: &[&str]) -> Self {
        Presentation::new(names.iter().map(|s| s.to_string()).collect(), Vec::new())
    }

    /// `<a, b, ... | [a,b][c,d]...>` with `2*genus` generators.
    pub fn surface(genus: usize) -> Self {
        let names: Vec<String> = (0..2 * genus).map(gen_name).collect();
        let mut rel = Vec::new();
        for k in 0..genus {
            let x = Letter::pos(2 * k as u32);
            let y = Letter::pos(2 * k as u32 + 1);
            rel.extend([x, y, x.inverse(), y.inverse()]);
        }
        Presentation::new(names, vec![CyclicWord::new(&rel).expect("nonempty")])
    }

    /// Standard presentation of the free abelian group of the given rank.
    pub fn free_abelian(rank: usize) -> Self {
        let names: Vec<String> = (0..rank).map(gen_name).collect();
        let mut rels = Vec::new();
        for i in 0..rank {
            for j in i + 1..rank {
                let x = Letter::pos(i as u32);
                let y = Letter::pos(j as u32);
                rels.push(CyclicWord::new(&[x, y, x.inverse(), y.inverse()]).expect("nonempty"));
            }
        }
        Presentation::new(names, rels)
    }

    pub fn render_word(&self, w: &Word) -> String {
        w.render(&self.generator_names)
    }

    pub fn parse_word(&self, text: &str) -> Result<Word, PresentationError> {
        Word::parse(text, &self.generator_names)
    }

    pub fn serialize(&self) -> String {
        let mut out = format!("gens: {}\n", self.generator_names.join(" "));
        if self.lambda_target != Rational64::new(1, 6) {
            out.push_str(&format!("lambda: {}/{}\n", self.lambda_target.numer(), self.lambda_target.denom()));
        }
        for r in &self.relators {
            out.push_str(&format!("rel: {}\n", self.render_word(r.canonical())));
        }
        out
    }
}

fn gen_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("x{i}")
    }
}

struct TokenTable {
    // (token, letter), longest token first
    tokens: Vec<(Vec<u8>, Letter)>,
}

impl TokenTable {
    fn new(names: &[String]) -> Self {
        let mut tokens = Vec::new();
        for (i, n) in names.iter().enumerate() {
            tokens.push((n.as_bytes().to_vec(), Letter::pos(i as u32)));
            let up = n.to_uppercase();
            if &up != n {
                tokens.push((up.into_bytes(), Letter::new(i as u32, true)));
            }
        }
        tokens.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));
        TokenTable { tokens }
    }
}

fn is_ident_start(c: u8) -> bool {
    c.is_ascii_alphabetic() || c == b'_'
}

fn is_ident_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_'
}

struct ExprParser<'a> {
    s: &'a [u8],
    pos: usize,
    line: usize,
    table: &'a TokenTable,
}

const MAX_EXPANDED: usize = 1 << 20;

impl ExprParser<'_> {
    fn column(&self) -> usize {
        self.pos + 1
    }

    fn syntax(&self, msg: &str) -> PresentationError {
        PresentationError::Syntax { line: self.line, column: self.column(), message: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    // expr := term*, stopping at ')' ']' ',' or end
    fn expr(&mut self, nested: bool) -> Result<Vec<Letter>, PresentationError> {
        let mut out = Vec::new();
        loop {
            match self.peek() {
                None => return Ok(out),
                Some(b')') | Some(b']') | Some(b',') => {
                    if nested {
                        return Ok(out);
                    }
                    return Err(self.syntax("unbalanced bracket or stray comma"));
                }
                Some(_) => {
                    let t = self.term()?;
                    out.extend(t);
                    if out.len() > MAX_EXPANDED {
                        return Err(self.syntax("relator too long"));
                    }
                }
            }
        }
    }

    fn term(&mut self) -> Result<Vec<Letter>, PresentationError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let k = self.integer()?;
            let unit = if k < 0 { invert(&base) } else { base };
            let reps = k.unsigned_abs() as usize;
            if unit.len().saturating_mul(reps) > MAX_EXPANDED {
                return Err(self.syntax("power too large"));
            }
            let mut out = Vec::with_capacity(unit.len() * reps);
            for _ in 0..reps {
                out.extend_from_slice(&unit);
            }
            return Ok(out);
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<i64, PresentationError> {
        self.skip_ws();
        let start = self.pos;
        if self.s.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let txt = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
        txt.parse::<i64>().map_err(|_| {
            self.pos = start;
            self.syntax("expected integer exponent")
        })
    }

    fn atom(&mut self) -> Result<Vec<Letter>, PresentationError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr(true)?;
                if self.peek() != Some(b')') {
                    return Err(self.syntax("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'[') => {
                self.pos += 1;
                let x = self.expr(true)?;
                if self.peek() != Some(b',') {
                    return Err(self.syntax("expected `,` in commutator"));
                }
                self.pos += 1;
                let y = self.expr(true)?;
                if self.peek() != Some(b']') {
                    return Err(self.syntax("expected `]`"));
                }
                self.pos += 1;
                let mut out = x.clone();
                out.extend_from_slice(&y);
                out.extend(invert(&x));
                out.extend(invert(&y));
                Ok(out)
            }
            Some(c) if is_ident_start(c) => {
                let rest = &self.s[self.pos..];
                for (tok, l) in &self.table.tokens {
                    if rest.starts_with(tok) {
                        self.pos += tok.len();
                        return Ok(vec![*l]);
                    }
                }
                let mut end = self.pos;
                while end < self.s.len() && is_ident_char(self.s[end]) {
                    end += 1;
                }
                Err(PresentationError::UnknownGenerator {
                    line: self.line,
                    column: self.column(),
                    name: String::from_utf8_lossy(&self.s[self.pos..end]).into_owned(),
                })
            }
            Some(_) => Err(self.syntax("unexpected character")),
            None => Err(self.syntax("unexpected end of relator")),
        }
    }
}

/// Parses the line-oriented presentation format (`gens:`, `rel:`, `lambda:`, `#` comments).
pub fn parse_presentation(text: &str) -> Result<Presentation, PresentationError> {
    let mut names: Option<Vec<String>> = None;
    let mut relators: Vec<CyclicWord> = Vec::new();
    let mut keys: Vec<Vec<Letter>> = Vec::new();
    let mut rel_lines: Vec<usize> = Vec::new();
    let mut lambda = Rational64::new(1, 6);

    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let Some(colon) = line.find(':') else {
            let col = line.len() - line.trim_start().len() + 1;
            return Err(PresentationError::Syntax { line: line_no, column: col, message: "expected `key:`".into() });
        };
        let key = line[..colon].trim();
        let body = &line[colon + 1..];
        let body_col = colon + 2;
        match key {
            "gens" => {
                if names.is_some() {
                    return Err(PresentationError::Syntax { line: line_no, column: 1, message: "duplicate `gens:` line".into() });
                }
                let mut list: Vec<String> = Vec::new();
                let mut offset = 0;
                for tok in body.split_whitespace() {
                    let at = body[offset..].find(tok).unwrap_or(0) + offset;
                    offset = at + tok.len();
                    let column = body_col + at;
                    let b = tok.as_bytes();
                    if !is_ident_start(b[0]) || !b.iter().all(|&c| is_ident_char(c)) {
                        return Err(PresentationError::Syntax { line: line_no, column, message: format!("invalid generator name `{tok}`") });
                    }
                    if list.iter().any(|n| n.eq_ignore_ascii_case(tok)) {
                        return Err(PresentationError::Syntax {
                            line: line_no,
                            column,
                            message: format!("generator `{tok}` clashes with an existing name or its inverse alias"),
                        });
                    }
                    list.push(tok.to_string());
                }
                names = Some(list);
            }
            "lambda" => {
                let t = body.trim();
                let parsed = match t.split_once('/') {
                    Some((p, q)) => p.trim().parse::<i64>().ok().zip(q.trim().parse::<i64>().ok()),
                    None => t.parse::<i64>().ok().map(|p| (p, 1)),
                };
                match parsed {
                    Some((p, q)) if q > 0 && p > 0 && p <= q => lambda = Rational64::new(p, q),
                    _ => {
                        return Err(PresentationError::Syntax { line: line_no, column: body_col, message: "lambda must be p/q with 0 < p/q <= 1".into() })
                    }
                }
            }
            "rel" => {
                let Some(list) = names.as_ref() else {
                    return Err(PresentationError::Syntax { line: line_no, column: 1, message: "`rel:` before `gens:`".into() });
                };
                let table = TokenTable::new(list);
                // Parse over the full line so reported columns are absolute.
                let mut p = ExprParser { s: line.as_bytes(), pos: colon + 1, line: line_no, table: &table };
                let letters = p.expr(false)?;
                let cw = CyclicWord::new(&letters).ok_or(PresentationError::EmptyRelator { line: line_no })?;
                let key = cw.class_key();
                if let Some(prev) = keys.iter().position(|k| *k == key) {
                    return Err(PresentationError::DuplicateRelator { line: line_no, previous: rel_lines[prev] });
                }
                keys.push(key);
                rel_lines.push(line_no);
                relators.push(cw);
            }
            other => {
                return Err(PresentationError::Syntax { line: line_no, column: 1, message: format!("unknown key `{other}`") });
            }
        }
    }
    let names = names.ok_or(PresentationError::Syntax { line: 1, column: 1, message: "missing `gens:` line".into() })?;
    Ok(Presentation { generator_names: names, relators, lambda_target: lambda })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PieceReport {
    pub per_relator: Vec<usize>,
    pub witnesses: Vec<Word>,
}

impl PieceReport {
    pub fn max_piece(&self) -> usize {
        self.per_relator.iter().copied().max().unwrap_or(0)
    }
}

fn lcp(a: &[Letter], b: &[Letter]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

/// Longest piece per relator, brute force over pairs of distinct cyclic permutations.
pub fn compute_pieces(p: &Presentation) -> PieceReport {
    // (owning relator, permutation)
    let mut perms: Vec<(usize, Vec<Letter>)> = Vec::new();
    for (i, r) in p.relators.iter().enumerate() {
        let mut both = rotations(r.letters());
        both.extend(rotations(&invert(r.letters())));
        both.sort();
        both.dedup();
        perms.extend(both.into_iter().map(|w| (i, w)));
    }
    let mut per_relator = vec![0; p.relators.len()];
    let mut witnesses = vec![Word::empty(); p.relators.len()];
    for (i, s) in &perms {
        for (_, t) in &perms {
            if s == t {
                continue;
            }
            let m = lcp(s, t);
            if m == 0 {
                continue;
            }
            let piece = Word(s[..m].to_vec());
            if m > per_relator[*i] || (m == per_relator[*i] && piece < witnesses[*i]) {
                per_relator[*i] = m;
                witnesses[*i] = piece;
            }
        }
    }
    PieceReport { per_relator, witnesses }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SmallCancellation {
    Satisfied,
    Violated { relator: usize, piece: Word, piece_length: usize, relator_length: usize },
}

impl SmallCancellation {
    pub fn is_satisfied(&self) -> bool {
        matches!(self, SmallCancellation::Satisfied)
    }
}

/// C'(λ): every piece `p` of a relator `r` has `|p| < λ|r|`.
pub fn check_small_cancellation(p: &Presentation, lambda: Rational64) -> SmallCancellation {
    assert!(*lambda.numer() > 0 && lambda <= Rational64::from_integer(1), "0 < λ <= 1");
    let report = compute_pieces(p);
    for (i, r) in p.relators.iter().enumerate() {
        let m = report.per_relator[i] as i128;
        // m < (num/den) * |r|  <=>  m * den < num * |r|
        if m * (*lambda.denom() as i128) >= (*lambda.numer() as i128) * r.len() as i128 {
            return SmallCancellation::Violated {
                relator: i,
                piece: report.witnesses[i].clone(),
                piece_length: report.per_relator[i],
                relator_length: r.len(),
            };
        }
    }
    SmallCancellation::Satisfied
}

/// Dehn's algorithm over the symmetrized relator set of a C'(1/6) presentation.
#[derive(Clone, Debug)]
pub struct DehnSolver {
    rels: Vec<Vec<Letter>>,
    by_first: HashMap<Letter, Vec<usize>>,
}

struct Match {
    at: usize,
    len: usize,
    rel: usize,
}

impl DehnSolver {
    pub fn new(p: &Presentation) -> Result<Self, PresentationError> {
        if let SmallCancellation::Violated { relator, piece_length, relator_length, .. } =
            check_small_cancellation(p, Rational64::new(1, 6))
        {
            return Err(PresentationError::PreconditionViolated(format!(
                "relator {relator} has a piece of length {piece_length} against length {relator_length}"
            )));
        }
        if let Some(i) = p.relators.iter().position(is_proper_power) {
            return Err(PresentationError::PreconditionViolated(format!("relator {i} is a proper power")));
        }
        Ok(Self::symmetrized(p))
    }

    pub(crate) fn symmetrized(p: &Presentation) -> Self {
        let mut rels = Vec::new();
        for r in &p.relators {
            rels.extend(rotations(r.letters()));
            rels.extend(rotations(&invert(r.letters())));
        }
        rels.sort();
        rels.dedup();
        let mut by_first: HashMap<Letter, Vec<usize>> = HashMap::new();
        for (i, r) in rels.iter().enumerate() {
            by_first.entry(r[0]).or_default().push(i);
        }
        DehnSolver { rels, by_first }
    }

    pub fn relator_permutations(&self) -> &[Vec<Letter>] {
        &self.rels
    }

    // Leftmost-longest match of more than half a relator (or exactly half when `half`).
    fn find(&self, w: &[Letter], pred: impl Fn(usize, usize) -> bool) -> Option<Match> {
        for at in 0..w.len() {
            let mut best: Option<Match> = None;
            if let Some(cands) = self.by_first.get(&w[at]) {
                for &ri in cands {
                    let r = &self.rels[ri];
                    let m = lcp(&w[at..], r);
                    if pred(m, r.len()) && best.as_ref().is_none_or(|b| m > b.len) {
                        best = Some(Match { at, len: m, rel: ri });
                    }
                }
            }
            if best.is_some() {
                return best;
            }
        }
        None
    }

    fn replace(&self, w: &[Letter], m: &Match) -> Word {
        let r = &self.rels[m.rel];
        let rest = invert(&r[m.len..]);
        free_reduce(w[..m.at].iter().chain(rest.iter()).chain(w[m.at + m.len..].iter()).copied())
    }

    /// One element-preserving step on a linear subword.
    pub fn step_linear(&self, w: &Word) -> Option<Word> {
        self.find(&w.0, |m, n| 2 * m > n).map(|m| self.replace(&w.0, &m))
    }

    /// One step, scanning linear subwords first and then subwords of cyclic rotations.
    pub fn step(&self, w: &Word) -> Option<Word> {
        if let Some(v) = self.step_linear(w) {
            return Some(v);
        }
        let n = w.len();
        for j in 1..n {
            let rot: Vec<Letter> = w.0[j..].iter().chain(w.0[..j].iter()).copied().collect();
            if let Some(m) = self.find(&rot, |m, len| 2 * m > len) {
                return Some(self.replace(&rot, &m));
            }
        }
        None
    }

    pub fn reduce(&self, w: &Word) -> Word {
        let mut cur = w.clone();
        while let Some(next) = self.step(&cur) {
            cur = next;
        }
        cur
    }

    /// Every word visited, starting with the input.
    pub fn reduce_trace(&self, w: &Word) -> Vec<Word> {
        let mut out = vec![w.clone()];
        while let Some(next) = self.step(out.last().expect("nonempty")) {
            out.push(next);
        }
        out
    }

    /// Reduction that keeps the group element (no rotations).
    pub fn reduce_linear(&self, w: &Word) -> Word {
        let mut cur = w.clone();
        while let Some(next) = self.step_linear(&cur) {
            cur = next;
        }
        cur
    }

    pub fn has_long_subword(&self, w: &[Letter]) -> bool {
        self.find(w, |m, n| 2 * m > n).is_some()
    }

    /// All words reachable by swapping one exact half of a relator for the other half.
    pub(crate) fn half_swaps(&self, w: &[Letter], out: &mut Vec<Word>) {
        for at in 0..w.len() {
            if let Some(cands) = self.by_first.get(&w[at]) {
                for &ri in cands {
                    let r = &self.rels[ri];
                    let m = lcp(&w[at..], r);
                    if 2 * m == r.len() {
                        out.push(self.replace(w, &Match { at, len: m, rel: ri }));
                    }
                }
            }
        }
    }

    pub fn is_trivial(&self, w: &Word) -> bool {
        self.reduce(w).is_empty()
    }
}

/// A single Greendlinger replacement, or `None` if no subword exceeds half a relator.
pub fn greendlinger_step(w: &Word, p: &Presentation) -> Option<Word> {
    DehnSolver::symmetrized(p).step(w)
}

/// Dehn's algorithm to a fixed point; empty iff `w` is trivial.
pub fn dehn_reduce(w: &Word, p: &Presentation) -> Result<Word, PresentationError> {
    Ok(DehnSolver::new(p)?.reduce(w))
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}
