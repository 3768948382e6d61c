//! Concrete finite rings addressed by a canonical element index.
//!
//! Every construction numbers its elements `0..order` in mixed radix over
//! its additive coordinates, so index `0` is always the additive identity.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numtheory::is_prime;

/// Largest ring order a construction may have; keeps codes within 64 bits
/// after padding.
pub const MAX_ORDER: u64 = 1 << 61;

/// Description of a concrete ring to hide behind a black box.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RingSpec {
    /// `Z_n`.
    Modular { n: u64 },
    /// Direct product of the factors.
    Product(Vec<RingSpec>),
    /// `k x k` matrices over `base`.
    Matrix { k: usize, base: Box<RingSpec> },
    /// `F_p[x] / (f)`; `f` holds coefficients low-to-high and must be monic.
    PolyQuot { p: u64, f: Vec<u64> },
}

impl RingSpec {
    pub fn modular(n: u64) -> Self {
        RingSpec::Modular { n }
    }

    pub fn product(factors: Vec<RingSpec>) -> Self {
        RingSpec::Product(factors)
    }

    pub fn matrix(k: usize, base: RingSpec) -> Self {
        RingSpec::Matrix { k, base: Box::new(base) }
    }

    pub fn polyquot(p: u64, f: Vec<u64>) -> Self {
        RingSpec::PolyQuot { p, f }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            RingSpec::Modular { n } => {
                if *n < 2 {
                    return Err(invalid("n", format!("modulus must be at least 2, got {n}")));
                }
            }
            RingSpec::Product(factors) => {
                if factors.is_empty() {
                    return Err(invalid("factors", "a product needs at least one factor".into()));
                }
                for f in factors {
                    f.validate()?;
                }
            }
            RingSpec::Matrix { k, base } => {
                if *k == 0 {
                    return Err(invalid("k", "matrix size must be at least 1".into()));
                }
                base.validate()?;
            }
            RingSpec::PolyQuot { p, f } => {
                if !is_prime(*p) {
                    return Err(invalid("p", format!("{p} is not prime")));
                }
                if f.len() < 2 {
                    return Err(invalid("f", "modulus polynomial must have degree at least 1".into()));
                }
                if f.last().copied().map(|c| c % p) != Some(1) {
                    return Err(invalid("f", "modulus polynomial must be monic".into()));
                }
            }
        }
        self.order().map(|_| ())
    }

    /// Number of elements, or an error when it exceeds [`MAX_ORDER`].
    pub fn order(&self) -> Result<u64> {
        let too_big = || invalid("order", format!("ring order exceeds {MAX_ORDER}"));
        let order = match self {
            RingSpec::Modular { n } => *n,
            RingSpec::Product(factors) => {
                let mut acc = 1u64;
                for f in factors {
                    acc = acc.checked_mul(f.order()?).ok_or_else(too_big)?;
                }
                acc
            }
            RingSpec::Matrix { k, base } => {
                let b = base.order()?;
                let mut acc = 1u64;
                for _ in 0..k * k {
                    acc = acc.checked_mul(b).ok_or_else(too_big)?;
                }
                acc
            }
            RingSpec::PolyQuot { p, f } => {
                let mut acc = 1u64;
                for _ in 0..f.len().saturating_sub(1) {
                    acc = acc.checked_mul(*p).ok_or_else(too_big)?;
                }
                acc
            }
        };
        if order > MAX_ORDER {
            return Err(too_big());
        }
        Ok(order)
    }

    /// Parses the `ring.key = value` description format.
    pub fn parse_description(text: &str) -> Result<Self> {
        let mut fields: Vec<(String, String)> = Vec::new();
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected `key = value`, got `{line}`")))?;
            fields.push((k.trim().to_string(), v.trim().to_string()));
        }
        let get = |key: &str| -> Result<&str> {
            fields
                .iter()
                .rev()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.as_str())
                .ok_or_else(|| Error::Parse(format!("missing `{key}`")))
        };
        let spec = match get("ring.kind")? {
            "modular" => RingSpec::Modular { n: parse_u64(get("ring.n")?)? },
            "product" => {
                let factors = split_top_level(get("ring.factors")?, ';')
                    .into_iter()
                    .map(|s| s.parse())
                    .collect::<Result<Vec<RingSpec>>>()?;
                RingSpec::Product(factors)
            }
            "matrix" => RingSpec::Matrix {
                k: parse_u64(get("ring.k")?)? as usize,
                base: Box::new(get("ring.base")?.parse()?),
            },
            "polyquot" => RingSpec::PolyQuot {
                p: parse_u64(get("ring.p")?)?,
                f: parse_u64_list(get("ring.f")?)?,
            },
            other => return Err(Error::Parse(format!("unknown ring.kind `{other}`"))),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Renders the spec in the `ring.key = value` description format.
    pub fn to_description(&self) -> String {
        match self {
            RingSpec::Modular { n } => format!("ring.kind = modular\nring.n = {n}\n"),
            RingSpec::Product(fs) => {
                let parts: Vec<String> = fs.iter().map(|f| f.to_string()).collect();
                format!("ring.kind = product\nring.factors = {}\n", parts.join("; "))
            }
            RingSpec::Matrix { k, base } => {
                format!("ring.kind = matrix\nring.k = {k}\nring.base = {base}\n")
            }
            RingSpec::PolyQuot { p, f } => {
                let cs: Vec<String> = f.iter().map(|c| c.to_string()).collect();
                format!("ring.kind = polyquot\nring.p = {p}\nring.f = {}\n", cs.join(","))
            }
        }
    }
}

fn invalid(field: &'static str, reason: String) -> Error {
    Error::InvalidSpec { field, reason }
}

fn parse_u64(s: &str) -> Result<u64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("expected a non-negative integer, got `{s}`")))
}

fn parse_u64_list(s: &str) -> Result<Vec<u64>> {
    let s = strip_brackets(s.trim(), '[', ']');
    s.split(',').map(parse_u64).collect()
}

fn strip_brackets(s: &str, open: char, close: char) -> &str {
    s.strip_prefix(open)
        .and_then(|t| t.strip_suffix(close))
        .unwrap_or(s)
        .trim()
}

/// Splits on `sep` where it occurs outside any bracket pair.
pub(crate) fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(s[start..i].trim());
                start = i + ch.len_utf8();
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingSpec::Modular { n } => write!(f, "modular {n}"),
            RingSpec::Product(fs) => {
                write!(f, "product(")?;
                for (i, x) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
            RingSpec::Matrix { k, base } => write!(f, "matrix {k} over {base}"),
            RingSpec::PolyQuot { p, f: coeffs } => {
                let cs: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
                write!(f, "polyquot {p} [{}]", cs.join(","))
            }
        }
    }
}

/// Inline grammar: `modular N`, `product(S; S; ...)`, `matrix K over S`,
/// `polyquot P [c0,c1,...]`.
impl FromStr for RingSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let spec = if let Some(rest) = s.strip_prefix("modular") {
            RingSpec::Modular { n: parse_u64(rest)? }
        } else if let Some(rest) = s.strip_prefix("product") {
            let inner = strip_brackets(rest.trim(), '(', ')');
            let factors = split_top_level(inner, ';')
                .into_iter()
                .map(str::parse)
                .collect::<Result<Vec<_>>>()?;
            RingSpec::Product(factors)
        } else if let Some(rest) = s.strip_prefix("matrix") {
            let (k, base) = rest
                .split_once("over")
                .ok_or_else(|| Error::Parse(format!("expected `matrix K over BASE`, got `{s}`")))?;
            RingSpec::Matrix { k: parse_u64(k)? as usize, base: Box::new(base.parse()?) }
        } else if let Some(rest) = s.strip_prefix("polyquot") {
            let rest = rest.trim();
            let (p, f) = rest
                .split_once(char::is_whitespace)
                .ok_or_else(|| Error::Parse(format!("expected `polyquot P [f]`, got `{s}`")))?;
            RingSpec::PolyQuot { p: parse_u64(p)?, f: parse_u64_list(f)? }
        } else {
            return Err(Error::Parse(format!("unrecognised ring spec `{s}`")));
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// A decoded ring element in the construction's native shape.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Int(u64),
    Tuple(Vec<Value>),
    Matrix(Vec<Vec<Value>>),
    Poly(Vec<u64>),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Tuple(xs) => {
                write!(f, "(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
            Value::Matrix(rows) => {
                write!(f, "[")?;
                for (i, row) in rows.iter().enumerate() {
                    if i > 0 {
                        write!(f, ";")?;
                    }
                    for (j, x) in row.iter().enumerate() {
                        if j > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{x}")?;
                    }
                }
                write!(f, "]")
            }
            Value::Poly(cs) => {
                write!(f, "[")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, "]")
            }
        }
    }
}

/// A compiled [`RingSpec`] operating on canonical indices.
#[derive(Debug, Clone)]
pub(crate) enum Structure {
    Modular { n: u64 },
    Product { factors: Vec<Structure>, orders: Vec<u64> },
    Matrix { k: usize, base: Box<Structure>, base_order: u64 },
    PolyQuot { p: u64, f: Vec<u64> },
}

impl Structure {
    pub fn compile(spec: &RingSpec) -> Self {
        match spec {
            RingSpec::Modular { n } => Structure::Modular { n: *n },
            RingSpec::Product(fs) => {
                let factors: Vec<Structure> = fs.iter().map(Structure::compile).collect();
                let orders = factors.iter().map(Structure::order).collect();
                Structure::Product { factors, orders }
            }
            RingSpec::Matrix { k, base } => {
                let base = Box::new(Structure::compile(base));
                let base_order = base.order();
                Structure::Matrix { k: *k, base, base_order }
            }
            RingSpec::PolyQuot { p, f } => Structure::PolyQuot {
                p: *p,
                f: f.iter().map(|c| c % p).collect(),
            },
        }
    }

    pub fn order(&self) -> u64 {
        match self {
            Structure::Modular { n } => *n,
            Structure::Product { orders, .. } => orders.iter().product(),
            Structure::Matrix { k, base_order, .. } => base_order.pow((k * k) as u32),
            Structure::PolyQuot { p, f } => p.pow((f.len() - 1) as u32),
        }
    }

    fn digits(index: u64, radices: impl Iterator<Item = u64>) -> Vec<u64> {
        let mut rest = index;
        radices
            .map(|r| {
                let d = rest % r;
                rest /= r;
                d
            })
            .collect()
    }

    fn undigits(digits: &[u64], radices: impl Iterator<Item = u64>) -> u64 {
        let mut acc = 0u64;
        let mut scale = 1u64;
        for (d, r) in digits.iter().zip(radices) {
            acc += d * scale;
            scale = scale.saturating_mul(r);
        }
        acc
    }

    fn matrix_entries(&self, index: u64) -> Vec<u64> {
        match self {
            Structure::Matrix { k, base_order, .. } => {
                Self::digits(index, std::iter::repeat_n(*base_order, k * k))
            }
            _ => unreachable!(),
        }
    }

    fn poly_coeffs(&self, index: u64) -> Vec<u64> {
        match self {
            Structure::PolyQuot { p, f } => Self::digits(index, std::iter::repeat_n(*p, f.len() - 1)),
            _ => unreachable!(),
        }
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        match self {
            Structure::Modular { n } => ((a as u128 + b as u128) % *n as u128) as u64,
            Structure::Product { factors, orders } => {
                let xa = Self::digits(a, orders.iter().copied());
                let xb = Self::digits(b, orders.iter().copied());
                let sum: Vec<u64> = factors
                    .iter()
                    .zip(xa.iter().zip(&xb))
                    .map(|(s, (x, y))| s.add(*x, *y))
                    .collect();
                Self::undigits(&sum, orders.iter().copied())
            }
            Structure::Matrix { k, base, base_order } => {
                let xa = self.matrix_entries(a);
                let xb = self.matrix_entries(b);
                let sum: Vec<u64> = xa.iter().zip(&xb).map(|(x, y)| base.add(*x, *y)).collect();
                Self::undigits(&sum, std::iter::repeat_n(*base_order, k * k))
            }
            Structure::PolyQuot { p, .. } => {
                let xa = self.poly_coeffs(a);
                let xb = self.poly_coeffs(b);
                let sum: Vec<u64> = xa.iter().zip(&xb).map(|(x, y)| (x + y) % p).collect();
                Self::undigits(&sum, std::iter::repeat(*p))
            }
        }
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        match self {
            Structure::Modular { n } => ((a as u128 * b as u128) % *n as u128) as u64,
            Structure::Product { factors, orders } => {
                let xa = Self::digits(a, orders.iter().copied());
                let xb = Self::digits(b, orders.iter().copied());
                let prod: Vec<u64> = factors
                    .iter()
                    .zip(xa.iter().zip(&xb))
                    .map(|(s, (x, y))| s.mul(*x, *y))
                    .collect();
                Self::undigits(&prod, orders.iter().copied())
            }
            Structure::Matrix { k, base, base_order } => {
                let k = *k;
                let xa = self.matrix_entries(a);
                let xb = self.matrix_entries(b);
                let mut out = vec![0u64; k * k];
                for i in 0..k {
                    for j in 0..k {
                        let mut acc = 0u64;
                        for l in 0..k {
                            acc = base.add(acc, base.mul(xa[i * k + l], xb[l * k + j]));
                        }
                        out[i * k + j] = acc;
                    }
                }
                Self::undigits(&out, std::iter::repeat_n(*base_order, k * k))
            }
            Structure::PolyQuot { p, f } => {
                let p = *p as u128;
                let deg = f.len() - 1;
                let xa = self.poly_coeffs(a);
                let xb = self.poly_coeffs(b);
                let mut prod = vec![0u128; 2 * deg];
                for (i, x) in xa.iter().enumerate() {
                    for (j, y) in xb.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + *x as u128 * *y as u128) % p;
                    }
                }
                for top in (deg..2 * deg).rev() {
                    let c = prod[top];
                    if c == 0 {
                        continue;
                    }
                    for (j, fj) in f.iter().enumerate().take(deg) {
                        let idx = top - deg + j;
                        prod[idx] = (prod[idx] + (p - c) * *fj as u128) % p;
                    }
                    prod[top] = 0;
                }
                let coeffs: Vec<u64> = prod[..deg].iter().map(|&c| c as u64).collect();
                Self::undigits(&coeffs, std::iter::repeat(p as u64))
            }
        }
    }

    pub fn one(&self) -> u64 {
        match self {
            Structure::Modular { .. } => 1,
            Structure::Product { factors, orders } => {
                let ones: Vec<u64> = factors.iter().map(Structure::one).collect();
                Self::undigits(&ones, orders.iter().copied())
            }
            Structure::Matrix { k, base, base_order } => {
                let mut e = vec![0u64; k * k];
                for i in 0..*k {
                    e[i * k + i] = base.one();
                }
                Self::undigits(&e, std::iter::repeat_n(*base_order, k * k))
            }
            Structure::PolyQuot { .. } => 1,
        }
    }

    /// Moduli of the additive coordinates: `(R,+)` is the product of the
    /// cyclic groups `Z_m` for `m` in this list.
    pub fn moduli(&self) -> Vec<u64> {
        match self {
            Structure::Modular { n } => vec![*n],
            Structure::Product { factors, .. } => factors.iter().flat_map(Structure::moduli).collect(),
            Structure::Matrix { k, base, .. } => {
                let m = base.moduli();
                (0..k * k).flat_map(|_| m.iter().copied()).collect()
            }
            Structure::PolyQuot { p, f } => vec![*p; f.len() - 1],
        }
    }

    pub fn coords(&self, index: u64) -> Vec<u64> {
        match self {
            Structure::Modular { .. } => vec![index],
            Structure::Product { factors, orders } => Self::digits(index, orders.iter().copied())
                .into_iter()
                .zip(factors)
                .flat_map(|(d, s)| s.coords(d))
                .collect(),
            Structure::Matrix { base, .. } => self
                .matrix_entries(index)
                .into_iter()
                .flat_map(|d| base.coords(d))
                .collect(),
            Structure::PolyQuot { .. } => self.poly_coeffs(index),
        }
    }

    /// Inverse of [`Self::coords`]; coordinates are reduced first.
    pub fn from_coords(&self, coords: &[u64]) -> u64 {
        let moduli = self.moduli();
        let reduced: Vec<u64> = coords.iter().zip(&moduli).map(|(c, m)| c % m).collect();
        Self::undigits(&reduced, moduli.into_iter())
    }

    pub fn generators(&self) -> Vec<u64> {
        let mut gens = match self {
            Structure::Modular { .. } => vec![1],
            Structure::Product { factors, orders } => {
                let mut out = Vec::new();
                for (i, f) in factors.iter().enumerate() {
                    for g in f.generators() {
                        let mut digits = vec![0u64; factors.len()];
                        digits[i] = g;
                        out.push(Self::undigits(&digits, orders.iter().copied()));
                    }
                }
                out.push(self.one());
                out
            }
            Structure::Matrix { k, base, base_order } => {
                let k = *k;
                let radix = || std::iter::repeat_n(*base_order, k * k);
                let mut out = Vec::new();
                // scalar multiples of E_11 by each base generator
                for g in base.generators() {
                    let mut e = vec![0u64; k * k];
                    e[0] = g;
                    out.push(Self::undigits(&e, radix()));
                }
                if k > 1 {
                    // cyclic shift: P e_j = e_{j+1}
                    let mut shift = vec![0u64; k * k];
                    for j in 0..k {
                        shift[((j + 1) % k) * k + j] = base.one();
                    }
                    out.push(Self::undigits(&shift, radix()));
                }
                out
            }
            Structure::PolyQuot { p, f } => {
                let one = 1;
                let x = if f.len() > 2 { *p } else { self.mul_x_const() };
                vec![one, x]
            }
        };
        let mut seen = std::collections::HashSet::new();
        gens.retain(|g| seen.insert(*g));
        gens
    }

    /// Index of `x` in a degree-1 quotient, where `x = -f_0`.
    fn mul_x_const(&self) -> u64 {
        match self {
            Structure::PolyQuot { p, f } => (p - f[0] % p) % p,
            _ => unreachable!(),
        }
    }

    pub fn to_value(&self, index: u64) -> Value {
        match self {
            Structure::Modular { .. } => Value::Int(index),
            Structure::Product { factors, orders } => Value::Tuple(
                Self::digits(index, orders.iter().copied())
                    .into_iter()
                    .zip(factors)
                    .map(|(d, s)| s.to_value(d))
                    .collect(),
            ),
            Structure::Matrix { k, base, .. } => {
                let entries = self.matrix_entries(index);
                Value::Matrix(
                    entries
                        .chunks(*k)
                        .map(|row| row.iter().map(|&d| base.to_value(d)).collect())
                        .collect(),
                )
            }
            Structure::PolyQuot { .. } => Value::Poly(self.poly_coeffs(index)),
        }
    }

    pub fn from_value(&self, value: &Value) -> Result<u64> {
        let bad = || Error::Parse(format!("value `{value}` does not fit this ring"));
        match (self, value) {
            (Structure::Modular { n }, Value::Int(x)) => Ok(x % n),
            (Structure::Product { factors, orders }, Value::Tuple(xs)) if xs.len() == factors.len() => {
                let digits = factors
                    .iter()
                    .zip(xs)
                    .map(|(s, x)| s.from_value(x))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Self::undigits(&digits, orders.iter().copied()))
            }
            (Structure::Matrix { k, base, base_order }, Value::Matrix(rows))
                if rows.len() == *k && rows.iter().all(|r| r.len() == *k) =>
            {
                let digits = rows
                    .iter()
                    .flatten()
                    .map(|x| base.from_value(x))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Self::undigits(&digits, std::iter::repeat_n(*base_order, k * k)))
            }
            (Structure::PolyQuot { p, f }, Value::Poly(cs)) if cs.len() < f.len() => {
                let mut digits: Vec<u64> = cs.iter().map(|c| c % p).collect();
                digits.resize(f.len() - 1, 0);
                Ok(Self::undigits(&digits, std::iter::repeat(*p)))
            }
            _ => Err(bad()),
        }
    }

    /// Parses an element literal in this construction's native syntax.
    pub fn parse_value(&self, text: &str) -> Result<Value> {
        let text = text.trim();
        let bad = || Error::Parse(format!("malformed element literal `{text}`"));
        match self {
            Structure::Modular { n } => {
                let v: i128 = text.parse().map_err(|_| bad())?;
                Ok(Value::Int(v.rem_euclid(*n as i128) as u64))
            }
            Structure::Product { factors, .. } => {
                let inner = text
                    .strip_prefix('(')
                    .and_then(|t| t.strip_suffix(')'))
                    .ok_or_else(bad)?;
                let parts = split_top_level(inner, ',');
                if parts.len() != factors.len() {
                    return Err(bad());
                }
                Ok(Value::Tuple(
                    factors
                        .iter()
                        .zip(parts)
                        .map(|(s, p)| s.parse_value(p))
                        .collect::<Result<_>>()?,
                ))
            }
            Structure::Matrix { k, base, .. } => {
                let inner = strip_brackets(text, '[', ']');
                let rows = split_top_level(inner, ';');
                if rows.len() != *k {
                    return Err(bad());
                }
                let rows = rows
                    .into_iter()
                    .map(|row| {
                        let cells = split_top_level(row, ',');
                        if cells.len() != *k {
                            return Err(bad());
                        }
                        cells.into_iter().map(|c| base.parse_value(c)).collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Value::Matrix(rows))
            }
            Structure::PolyQuot { p, f } => {
                let inner = strip_brackets(text, '[', ']');
                let cs = inner
                    .split(',')
                    .map(|c| {
                        c.trim()
                            .parse::<i128>()
                            .map(|v| v.rem_euclid(*p as i128) as u64)
                            .map_err(|_| bad())
                    })
                    .collect::<Result<Vec<_>>>()?;
                if cs.len() > f.len() - 1 {
                    return Err(bad());
                }
                Ok(Value::Poly(cs))
            }
        }
    }
}
