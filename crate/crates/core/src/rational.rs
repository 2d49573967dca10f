use num::bigint::BigInt;
use num::{BigRational, One, Signed, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// Parses `"p/q"` or `"p"`. Decimal notation is rejected on purpose.
pub fn parse_q(s: &str) -> Result<Q> {
    let bad = || Error::Format(format!("not a rational of the form p/q: {s:?}"));
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a, b),
        None => (t, "1"),
    };
    let valid = |x: &str, signed: bool| {
        let digits = if signed { x.strip_prefix('-').unwrap_or(x) } else { x };
        !digits.is_empty() && digits.bytes().all(|c| c.is_ascii_digit())
    };
    if !valid(num, true) || !valid(den, false) {
        return Err(bad());
    }
    let n: BigInt = num.parse().map_err(|_| bad())?;
    let d: BigInt = den.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::Format(format!("zero denominator in {s:?}")));
    }
    Ok(Q::new(n, d))
}

pub fn fmt_q(x: &Q) -> String {
    x.to_string()
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

pub fn is_integer(x: &Q) -> bool {
    x.is_integer()
}

/// Integer value of an integral rational that fits in `i64`.
pub fn to_i64(x: &Q) -> Option<i64> {
    if !x.is_integer() {
        return None;
    }
    let n = x.to_integer();
    i64::try_from(n).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        assert_eq!(parse_q("1/3").unwrap(), q(1, 3));
        assert_eq!(fmt_q(&parse_q("2/6").unwrap()), "1/3");
        assert_eq!(fmt_q(&parse_q("4/2").unwrap()), "2");
        assert_eq!(parse_q("-5").unwrap(), qi(-5));
        assert!(parse_q("0.5").is_err());
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("1/-2").is_err());
        assert!(parse_q("").is_err());
    }
}
