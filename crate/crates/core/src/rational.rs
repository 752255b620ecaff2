//! Exact rationals and their text forms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Rational = num_rational::BigRational;

/// Shorthand constructor, panics on a zero denominator.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p`, `-p` or `p/q` with `q > 0`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let valid_int = |t: &str, signed: bool| {
        let digits = if signed { t.strip_prefix('-').unwrap_or(t) } else { t };
        !digits.is_empty() && digits.bytes().all(|c| c.is_ascii_digit())
    };
    if !valid_int(num, true) {
        return None;
    }
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = match den {
        Some(d) if valid_int(d, false) => d.parse().ok()?,
        Some(_) => return None,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

pub fn midpoint(x: &Rational, y: &Rational) -> Rational {
    (x + y) / int(2)
}

/// Bits needed for the denominator, the growth measure used by iteration caps.
pub fn denominator_bits(x: &Rational) -> u64 {
    x.denom().bits()
}

/// Decimal text of `x` rounded half away from zero to `places` digits.
pub fn to_decimal(x: &Rational, places: usize) -> String {
    let scale = BigInt::from(10u32).pow(places as u32);
    let scaled = x.abs() * Rational::from_integer(scale.clone());
    let (q, r) = scaled.numer().div_rem(scaled.denom());
    let twice = r * 2;
    let rounded = if &twice >= scaled.denom() { q + 1 } else { q };
    let (int_part, frac) = rounded.div_rem(&scale);
    let sign = if x.is_negative() && !(int_part.is_zero() && frac.is_zero()) {
        "-"
    } else {
        ""
    };
    if places == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{:0>width$}", frac.to_string(), width = places)
    }
}

pub fn format_set<'a>(items: impl IntoIterator<Item = &'a Rational>) -> String {
    let parts: Vec<String> = items.into_iter().map(|r| r.to_string()).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Smallest-denominator rational strictly between `lo` and `hi`.
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    assert!(lo < hi);
    let mut d = BigInt::one();
    loop {
        let dr = Rational::from_integer(d.clone());
        let n = (lo * &dr).floor() + Rational::one();
        if n < hi * &dr {
            return n / dr;
        }
        d += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_forms() {
        assert_eq!(parse_rational("3"), Some(int(3)));
        assert_eq!(parse_rational("-1/8"), Some(rat(-1, 8)));
        assert_eq!(parse_rational("2/4"), Some(rat(1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("1/-2"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(parse_rational("-"), None);
    }

    #[test]
    fn decimals_round_exactly() {
        assert_eq!(to_decimal(&rat(7, 12), 4), "0.5833");
        assert_eq!(to_decimal(&rat(-1, 8), 2), "-0.13");
        assert_eq!(to_decimal(&rat(-1, 1000), 2), "0.00");
        assert_eq!(to_decimal(&int(2), 0), "2");
    }

    #[test]
    fn simplest_rational() {
        assert_eq!(simplest_between(&rat(3, 8), &rat(5, 8)), rat(1, 2));
        assert_eq!(simplest_between(&rat(1, 2), &rat(2, 3)), rat(3, 5));
    }
}
