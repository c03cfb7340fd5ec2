//! Exact rational numbers.
//!
//! `num`'s `BigRational` keeps values reduced with a positive denominator,
//! which is the canonical form every comparison in this crate relies on.

use num::{BigInt, One, Signed, Zero};

pub type Rational = num::BigRational;

/// `num / den` as an exact rational. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"0.75"`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((whole, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let negative = whole.starts_with('-');
        let whole: BigInt = if whole.is_empty() || whole == "-" {
            BigInt::zero()
        } else {
            whole.parse().ok()?
        };
        let scale = num::pow(BigInt::from(10), frac.len());
        let frac: BigInt = frac.parse().ok()?;
        let magnitude = Rational::from_integer(whole.abs()) + Rational::new(frac, scale);
        return Some(if negative { -magnitude } else { magnitude });
    }
    let value: Rational = text.parse().ok()?;
    Some(value)
}

/// Canonical `"p/q"` (or `"p"` for integers) form.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn is_positive(r: &Rational) -> bool {
    r.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("27/2"), Some(rat(27, 2)));
        assert_eq!(parse_rational(" 9 "), Some(int(9)));
        assert_eq!(parse_rational("0.75"), Some(rat(3, 4)));
        assert_eq!(parse_rational("-1.5"), Some(rat(-3, 2)));
        assert_eq!(parse_rational("4/0"), None);
        assert_eq!(parse_rational("abc"), None);
    }

    #[test]
    fn canonical_form() {
        let r = rat(6, -4);
        assert_eq!(format_rational(&r), "-3/2");
        assert_eq!(format_rational(&rat(8, 4)), "2");
    }
}
