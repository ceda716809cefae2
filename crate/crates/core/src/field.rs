//! Prime-field arithmetic tables, point encoding for `F_q^n`, and the
//! text set-file format.
//!
//! Residues are `u16` values in `0..q`. Points of `F_q^n` are identified
//! with their little-endian base-`q` integer code, so the whole space is
//! iterable as `0..q^n`.

use std::fmt::Write as _;

use crate::{Error, Result};

/// Largest supported prime modulus.
pub const MAX_Q: u64 = 257;
/// `q^n` per set is kept below 2^48 so codes stay comfortably in a `u64`.
pub const MAX_CODE_BITS: u32 = 48;

/// A prime field `F_q` with full lookup tables for the four operations.
///
/// Construction verifies primality by trial division. All tables are closed
/// in `0..q`; the context is immutable and safe to share across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldCtx {
    q: u16,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
}

impl FieldCtx {
    pub fn new(q: u64) -> Result<Self> {
        if !(2..=MAX_Q).contains(&q) {
            return Err(Error::OutOfRange(q));
        }
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        let q = q as u16;
        let qu = q as usize;
        let mut add = vec![0u16; qu * qu];
        let mut mul = vec![0u16; qu * qu];
        let mut neg = vec![0u16; qu];
        let mut inv = vec![0u16; qu];
        for a in 0..qu {
            neg[a] = ((qu - a) % qu) as u16;
            for b in 0..qu {
                add[a * qu + b] = ((a + b) % qu) as u16;
                mul[a * qu + b] = ((a * b) % qu) as u16;
            }
        }
        // inv[0] stays 0 and must never be consulted
        for a in 1..qu {
            for b in 1..qu {
                if (a * b) % qu == 1 {
                    inv[a] = b as u16;
                    break;
                }
            }
        }
        Ok(FieldCtx { q, add, mul, neg, inv })
    }

    #[inline]
    pub fn q(&self) -> u16 {
        self.q
    }

    #[inline]
    pub fn add(&self, a: u16, b: u16) -> u16 {
        self.add[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        self.mul[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u16) -> u16 {
        self.neg[a as usize]
    }

    /// Multiplicative inverse of a nonzero residue.
    #[inline]
    pub fn inv(&self, a: u16) -> u16 {
        debug_assert!(a != 0, "inverse of zero");
        self.inv[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: u16, b: u16) -> u16 {
        self.add(a, self.neg(b))
    }

    pub fn pow(&self, mut base: u16, mut exp: u32) -> u16 {
        let mut acc = 1u16;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }
}

fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= q {
        if q % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// `q^n` as a checked u64, respecting the 2^48 code cap.
pub fn space_size(q: u16, n: usize) -> Result<u64> {
    let mut acc: u128 = 1;
    for _ in 0..n {
        acc *= q as u128;
        if acc > (1u128 << MAX_CODE_BITS) {
            return Err(Error::TooLarge(format!("q^n = {}^{} exceeds 2^{}", q, n, MAX_CODE_BITS)));
        }
    }
    Ok(acc as u64)
}

/// A vector in `F_q^n` together with its canonical little-endian code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Point {
    digits: Vec<u16>,
    code: u64,
}

impl Point {
    pub fn from_digits(digits: Vec<u16>, q: u16) -> Result<Self> {
        let code = encode(&digits, q)?;
        Ok(Point { digits, code })
    }

    pub fn from_code(code: u64, q: u16, n: usize) -> Result<Self> {
        let digits = decode(code, q, n)?;
        Ok(Point { digits, code })
    }

    #[inline]
    pub fn digits(&self) -> &[u16] {
        &self.digits
    }

    #[inline]
    pub fn code(&self) -> u64 {
        self.code
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.digits.len()
    }
}

/// Canonical code of a digit vector: `Σ digits[i]·q^i`.
pub fn encode(digits: &[u16], q: u16) -> Result<u64> {
    space_size(q, digits.len())?;
    let mut code: u64 = 0;
    let mut pow: u64 = 1;
    for &d in digits {
        if d >= q {
            return Err(Error::DigitOutOfRange { digit: d as u64, q: q as u64 });
        }
        code += d as u64 * pow;
        pow = pow.wrapping_mul(q as u64);
    }
    Ok(code)
}

/// Inverse of [`encode`]: the digit vector of `code` in base `q`, length `n`.
pub fn decode(code: u64, q: u16, n: usize) -> Result<Vec<u16>> {
    let size = space_size(q, n)?;
    if code >= size {
        return Err(Error::CodeOutOfRange { code, q: q as u64, n });
    }
    let mut digits = vec![0u16; n];
    let mut rest = code;
    for d in digits.iter_mut() {
        *d = (rest % q as u64) as u16;
        rest /= q as u64;
    }
    Ok(digits)
}

/// Coordinatewise linear combination `Σ scalars[i]·points[i]` mod q.
pub fn vec_combine(ctx: &FieldCtx, scalars: &[u16], points: &[Point]) -> Result<Point> {
    if scalars.len() != points.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} scalars vs {} points",
            scalars.len(),
            points.len()
        )));
    }
    let n = points.first().map_or(0, Point::dim);
    if points.iter().any(|p| p.dim() != n) {
        return Err(Error::DimensionMismatch("points of unequal dimension".into()));
    }
    let mut digits = vec![0u16; n];
    for (s, p) in scalars.iter().zip(points) {
        for (acc, &d) in digits.iter_mut().zip(p.digits()) {
            *acc = ctx.add(*acc, ctx.mul(*s, d));
        }
    }
    Point::from_digits(digits, ctx.q())
}

/// A deduplicated finite subset of `F_q^n`, stored as strictly sorted codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    q: u16,
    n: usize,
    codes: Vec<u64>,
}

impl PointSet {
    /// Builds a set from arbitrary codes; sorts and deduplicates.
    pub fn from_codes(q: u16, n: usize, mut codes: Vec<u64>) -> Result<Self> {
        let size = space_size(q, n)?;
        if let Some(&bad) = codes.iter().find(|&&c| c >= size) {
            return Err(Error::CodeOutOfRange { code: bad, q: q as u64, n });
        }
        codes.sort_unstable();
        codes.dedup();
        Ok(PointSet { q, n, codes })
    }

    pub fn full_space(q: u16, n: usize) -> Result<Self> {
        let size = space_size(q, n)?;
        if size > 1 << 24 {
            return Err(Error::TooLarge(format!("full space of size {} not materializable", size)));
        }
        Ok(PointSet { q, n, codes: (0..size).collect() })
    }

    #[inline]
    pub fn q(&self) -> u16 {
        self.q
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.codes.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    #[inline]
    pub fn codes(&self) -> &[u64] {
        &self.codes
    }

    #[inline]
    pub fn contains(&self, code: u64) -> bool {
        self.codes.binary_search(&code).is_ok()
    }

    /// Sorted position of a code, if present.
    #[inline]
    pub fn index_of(&self, code: u64) -> Option<usize> {
        self.codes.binary_search(&code).ok()
    }

    pub fn point(&self, idx: usize) -> Point {
        Point::from_code(self.codes[idx], self.q, self.n).expect("stored code is valid")
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.codes.iter().map(|&c| Point::from_code(c, self.q, self.n).expect("stored code is valid"))
    }

    pub fn remove(&mut self, code: u64) -> bool {
        match self.codes.binary_search(&code) {
            Ok(i) => {
                self.codes.remove(i);
                true
            }
            Err(_) => false,
        }
    }
}

/// Parses the text set-file format.
///
/// Line 1 is `<q> <n>`; each further non-empty line holds `n` comma-separated
/// digits. Lines starting with `#` are ignored. Duplicate points are rejected
/// with their line number.
pub fn parse_set(text: &str) -> Result<PointSet> {
    let mut lines = text.lines().enumerate();
    let (header_line, header) = loop {
        match lines.next() {
            Some((i, l)) if l.trim().is_empty() || l.trim_start().starts_with('#') => {
                let _ = i;
                continue;
            }
            Some((i, l)) => break (i + 1, l),
            None => return Err(Error::BadHeader { line: 1, reason: "empty input".into() }),
        }
    };
    let mut parts = header.split_whitespace();
    let q: u64 = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::BadHeader { line: header_line, reason: "expected \"<q> <n>\"".into() })?;
    let n: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::BadHeader { line: header_line, reason: "expected \"<q> <n>\"".into() })?;
    if parts.next().is_some() {
        return Err(Error::BadHeader { line: header_line, reason: "trailing tokens".into() });
    }
    let ctx = FieldCtx::new(q)?;
    let q = ctx.q();
    space_size(q, n)?;

    let mut codes = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (i, line) in lines {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut digits = Vec::with_capacity(n);
        for tok in line.split(',') {
            let d: u64 = tok
                .trim()
                .parse()
                .map_err(|_| Error::BadDigit { line: lineno, reason: format!("unparseable digit {:?}", tok.trim()) })?;
            if d >= q as u64 {
                return Err(Error::BadDigit { line: lineno, reason: format!("{} >= q={}", d, q) });
            }
            digits.push(d as u16);
        }
        if digits.len() != n {
            return Err(Error::BadDigit {
                line: lineno,
                reason: format!("expected {} digits, got {}", n, digits.len()),
            });
        }
        let code = encode(&digits, q)?;
        if !seen.insert(code) {
            return Err(Error::DuplicatePoint { line: lineno });
        }
        codes.push(code);
    }
    codes.sort_unstable();
    Ok(PointSet { q, n, codes })
}

/// Canonical serialization: header plus one line per point, sorted by code.
pub fn serialize_set(set: &PointSet) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", set.q(), set.n());
    for p in set.points() {
        let line: Vec<String> = p.digits().iter().map(|d| d.to_string()).collect();
        let _ = writeln!(out, "{}", line.join(","));
    }
    out
}
