//! Textual map specifications and backend selection.
//!
//! Parameters may be written as decimals (`"0.3"`), fractions (`"13/5"`),
//! arithmetic over square roots (`"(1+sqrt(5))/2"`), or as the largest root
//! of a quadratic, `root(a, b, c)` for `a x^2 + b x + c`.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{MapParams, Sign};
use crate::scalar::Rational;
use crate::surd::QuadSurd;

/// Environment variable holding the default precision in bits.
pub const PRECISION_ENV: &str = "ABDYN_PRECISION_BITS";
pub const DEFAULT_PRECISION_BITS: u32 = 256;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum NumberSpec {
    Text(String),
    Number(serde_json::Number),
}

impl NumberSpec {
    pub fn text(&self) -> String {
        match self {
            NumberSpec::Text(s) => s.clone(),
            NumberSpec::Number(n) => n.to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum SignsSpec {
    Text(String),
    Ints(Vec<i8>),
}

impl SignsSpec {
    pub fn resolve(&self) -> Result<Vec<Sign>> {
        match self {
            SignsSpec::Text(s) => Sign::parse_list(s),
            SignsSpec::Ints(v) => v
                .iter()
                .map(|&e| match e {
                    1 => Ok(Sign::Plus),
                    -1 => Ok(Sign::Minus),
                    _ => Err(Error::InvalidParams(format!("sign must be +1 or -1, got {e}"))),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    #[default]
    Exact,
    Float,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MapSpec {
    pub alpha: NumberSpec,
    pub beta: NumberSpec,
    pub signs: SignsSpec,
    #[serde(default)]
    pub precision_bits: Option<u32>,
    #[serde(default)]
    pub backend: Backend,
}

/// A map in whichever exact or floating field its parameters need.
#[derive(Clone, Debug)]
pub enum AnyMap {
    Rational(MapParams<Rational>),
    Quadratic(MapParams<QuadSurd>),
    Float(MapParams<f64>),
}

/// Runs `$body` with `$m` bound to the concrete map inside an [`AnyMap`].
#[macro_export]
macro_rules! with_map {
    ($any:expr, $m:ident => $body:expr) => {
        match $any {
            $crate::mapspec::AnyMap::Rational($m) => $body,
            $crate::mapspec::AnyMap::Quadratic($m) => $body,
            $crate::mapspec::AnyMap::Float($m) => $body,
        }
    };
}

impl AnyMap {
    pub fn backend_name(&self) -> &'static str {
        match self {
            AnyMap::Rational(_) => "rational",
            AnyMap::Quadratic(_) => "quadratic",
            AnyMap::Float(_) => "f64",
        }
    }

    pub fn to_f64_map(&self) -> MapParams<f64> {
        with_map!(self, m => m.to_f64_map())
    }
}

/// Precision used when a spec leaves it open.
pub fn default_precision_bits() -> u32 {
    std::env::var(PRECISION_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&b: &u32| b > 0)
        .unwrap_or(DEFAULT_PRECISION_BITS)
}

impl MapSpec {
    pub fn build(&self) -> Result<AnyMap> {
        let alpha = parse_number(&self.alpha.text())?;
        let beta = parse_number(&self.beta.text())?;
        let signs = self.signs.resolve()?;
        let bits = self.precision_bits.unwrap_or_else(default_precision_bits);
        if self.backend == Backend::Float {
            let a = alpha.to_f64().unwrap_or(f64::NAN);
            let b = beta.to_f64().unwrap_or(f64::NAN);
            return Ok(AnyMap::Float(MapParams::new(a, b, signs, bits.min(53))?));
        }
        match (alpha.to_rational(), beta.to_rational()) {
            (Some(a), Some(b)) => Ok(AnyMap::Rational(MapParams::new(a, b, signs, bits)?)),
            _ => Ok(AnyMap::Quadratic(MapParams::new(alpha, beta, signs, bits)?)),
        }
    }
}

/// Parses a real number in `Q(sqrt(d))` from text.
pub fn parse_number(text: &str) -> Result<QuadSurd> {
    let mut p = Parser { chars: text.chars().filter(|c| !c.is_whitespace()).collect(), pos: 0 };
    let v = p.expr()?;
    if p.pos != p.chars.len() {
        return Err(p.err("trailing input"));
    }
    Ok(v)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn err(&self, what: &str) -> Error {
        let s: String = self.chars.iter().collect();
        Error::InvalidParams(format!("cannot parse number {s:?} at {}: {what}", self.pos))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected {c:?}")))
        }
    }

    fn expr(&mut self) -> Result<QuadSurd> {
        let mut v = self.term()?;
        loop {
            if self.eat('+') {
                v = v + self.term()?;
            } else if self.eat('-') {
                v = v - self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<QuadSurd> {
        let mut v = self.factor()?;
        loop {
            if self.eat('*') {
                v = v * self.factor()?;
            } else if self.eat('/') {
                let d = self.factor()?;
                if d.is_zero() {
                    return Err(self.err("division by zero"));
                }
                v = v / d;
            } else {
                return Ok(v);
            }
        }
    }

    fn factor(&mut self) -> Result<QuadSurd> {
        if self.eat('-') {
            return Ok(-self.factor()?);
        }
        if self.eat('+') {
            return self.factor();
        }
        if self.eat('(') {
            let v = self.expr()?;
            self.expect(')')?;
            return Ok(v);
        }
        if self.keyword("sqrt") {
            self.expect('(')?;
            let v = self.expr()?;
            self.expect(')')?;
            return self.sqrt_of(v);
        }
        if self.keyword("root") {
            self.expect('(')?;
            let a = self.integer()?;
            self.expect(',')?;
            let b = self.integer()?;
            self.expect(',')?;
            let c = self.integer()?;
            self.expect(')')?;
            return QuadSurd::largest_root(a, b, c).ok_or_else(|| self.err("polynomial has no real root"));
        }
        self.decimal()
    }

    fn keyword(&mut self, word: &str) -> bool {
        let w: Vec<char> = word.chars().collect();
        if self.chars[self.pos..].starts_with(&w) {
            self.pos += w.len();
            true
        } else {
            false
        }
    }

    fn integer(&mut self) -> Result<i64> {
        let neg = self.eat('-');
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        let v: i64 = s.parse().map_err(|_| self.err("expected integer"))?;
        Ok(if neg { -v } else { v })
    }

    fn sqrt_of(&self, v: QuadSurd) -> Result<QuadSurd> {
        let r = v.to_rational().ok_or_else(|| self.err("nested square roots are not supported"))?;
        if r.is_negative() {
            return Err(self.err("square root of a negative number"));
        }
        // sqrt(p/q) = sqrt(p q) / q
        let pq = (r.numer() * r.denom()).to_u64().ok_or_else(|| self.err("radicand too large"))?;
        let q = QuadSurd::from(Rational::from_integer(r.denom().clone()));
        Ok(QuadSurd::sqrt(pq) / q)
    }

    fn decimal(&mut self) -> Result<QuadSurd> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let int_part: String = self.chars[start..self.pos].iter().collect();
        let mut frac_part = String::new();
        if self.eat('.') {
            let fs = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            frac_part = self.chars[fs..self.pos].iter().collect();
        }
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(self.err("expected a number"));
        }
        let mut exp: i64 = 0;
        if self.peek() == Some('e') || self.peek() == Some('E') {
            self.pos += 1;
            let neg = self.eat('-');
            if !neg {
                self.eat('+');
            }
            let es = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            let e: String = self.chars[es..self.pos].iter().collect();
            exp = e.parse().map_err(|_| self.err("bad exponent"))?;
            if neg {
                exp = -exp;
            }
        }
        let digits = format!("{int_part}{frac_part}");
        let mantissa: BigInt = digits.parse().map_err(|_| self.err("bad digits"))?;
        let scale = exp - frac_part.len() as i64;
        let ten = BigInt::from(10);
        let value = if scale >= 0 {
            Rational::from_integer(mantissa * num_traits::pow(ten, scale as usize))
        } else {
            Rational::new(mantissa, num_traits::pow(ten, (-scale) as usize))
        };
        Ok(QuadSurd::from(value))
    }
}

impl Default for NumberSpec {
    fn default() -> Self {
        NumberSpec::Text("0".into())
    }
}

/// Exact rational from text, rejecting irrational input.
pub fn parse_rational(text: &str) -> Result<Rational> {
    parse_number(text)?
        .to_rational()
        .ok_or_else(|| Error::InvalidParams(format!("{text:?} is not rational")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;
    use num_traits::One;

    #[test]
    fn parses_decimal_fraction_and_surd_forms() {
        assert_eq!(parse_rational("0.3").unwrap(), Rational::from_ratio(3, 10));
        assert_eq!(parse_rational("13/5").unwrap(), Rational::from_ratio(13, 5));
        assert_eq!(parse_rational("1.5e1").unwrap(), Rational::from_ratio(15, 1));
        let phi = parse_number("(1+sqrt(5))/2").unwrap();
        assert_eq!(phi, parse_number("root(1,-1,-1)").unwrap());
        assert!(parse_number("sqrt(-2)").is_err());
        assert!(parse_number("1+").is_err());
        assert_eq!(parse_number("sqrt(1/4)").unwrap(), QuadSurd::from(Rational::from_ratio(1, 2)));
    }

    #[test]
    fn spec_picks_backend() {
        let spec: MapSpec = serde_json::from_str(r#"{"alpha": 0, "beta": "root(1,-1,-1)", "signs": "++"}"#).unwrap();
        assert!(matches!(spec.build().unwrap(), AnyMap::Quadratic(_)));
        let spec: MapSpec = serde_json::from_str(r#"{"alpha": 0.3, "beta": 2.6, "signs": [1,-1,1]}"#).unwrap();
        match spec.build().unwrap() {
            AnyMap::Rational(m) => assert_eq!(*m.alpha(), Rational::from_ratio(3, 10)),
            other => panic!("unexpected backend {}", other.backend_name()),
        }
        let spec: MapSpec =
            serde_json::from_str(r#"{"alpha": 0, "beta": 2, "signs": "++", "backend": "float"}"#).unwrap();
        assert!(matches!(spec.build().unwrap(), AnyMap::Float(_)));
        let _ = Rational::one();
    }
}
