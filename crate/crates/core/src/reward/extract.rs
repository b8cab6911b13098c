use std::sync::LazyLock;

use num_rational::Ratio;
use regex::Regex;

/// Canonical form of an extracted answer expression.
#[derive(Debug, Clone, PartialEq)]
pub enum CanonicalAnswer {
    /// Exact rational: integers, fractions, and finite decimals.
    Rational(Ratio<i128>),
    /// Out-of-range or otherwise non-rational numerics.
    Float(f64),
    /// Non-numeric answers compare as normalized text.
    Text(String),
}

static BOXED: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\\boxed\{([^{}]*)\}").unwrap());
static NUMBER: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"[+-]?\d+(?:\.\d+)?(?:\s*/\s*[+-]?\d+(?:\.\d+)?)?").unwrap());

/// Pull the final answer expression out of free-form answer text: the last
/// \boxed{...} payload when present, otherwise the last number-like literal
/// (integer, decimal, or fraction).
pub fn extract_answer(answer_text: &str) -> Option<String> {
    if let Some(m) = BOXED.captures_iter(answer_text).last() {
        return Some(m[1].trim().to_string());
    }
    NUMBER
        .find_iter(answer_text)
        .last()
        .map(|m| m.as_str().trim().to_string())
}

fn parse_decimal(s: &str) -> Option<Ratio<i128>> {
    let s = s.trim();
    let (sign, digits) = match s.strip_prefix('-') {
        Some(rest) => (-1i128, rest),
        None => (1i128, s.strip_prefix('+').unwrap_or(s)),
    };
    if digits.is_empty() {
        return None;
    }
    match digits.split_once('.') {
        None => digits.parse::<i128>().ok().map(|v| Ratio::from_integer(sign * v)),
        Some((int, frac)) => {
            if frac.len() > 18 || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            let int: i128 = if int.is_empty() { 0 } else { int.parse().ok()? };
            let frac_val: i128 = frac.parse().ok()?;
            let denom = 10i128.checked_pow(frac.len() as u32)?;
            Some(Ratio::new(sign * (int.checked_mul(denom)? + frac_val), denom))
        }
    }
}

/// Canonicalize an expression: whitespace stripped, signs normalized,
/// parsed as an exact rational when possible.
pub fn canonical_answer(expr: &str) -> CanonicalAnswer {
    let compact: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some((num, den)) = compact.split_once('/') {
        if let (Some(n), Some(d)) = (parse_decimal(num), parse_decimal(den)) {
            if !d.numer().eq(&0) {
                return CanonicalAnswer::Rational(n / d);
            }
        }
    } else if let Some(r) = parse_decimal(&compact) {
        return CanonicalAnswer::Rational(r);
    }
    if let Ok(f) = compact.parse::<f64>() {
        if f.is_finite() {
            return CanonicalAnswer::Float(f);
        }
    }
    CanonicalAnswer::Text(compact.to_lowercase())
}

/// Compare two canonical answers: exact for rationals, within 1e-9
/// relative for decimals, normalized text equality otherwise.
pub fn answers_equal(a: &CanonicalAnswer, b: &CanonicalAnswer) -> bool {
    use CanonicalAnswer::*;
    match (a, b) {
        (Rational(x), Rational(y)) => x == y,
        (Float(x), Float(y)) => approx_eq(*x, *y),
        (Rational(x), Float(y)) | (Float(y), Rational(x)) => {
            approx_eq(ratio_to_f64(x), *y)
        }
        (Text(x), Text(y)) => x == y,
        _ => false,
    }
}

fn ratio_to_f64(r: &Ratio<i128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn approx_eq(x: f64, y: f64) -> bool {
    let scale = x.abs().max(y.abs()).max(1.0);
    (x - y).abs() <= 1e-9 * scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extracts_last_number() {
        assert_eq!(extract_answer("first 3 then = 4").as_deref(), Some("4"));
        assert_eq!(extract_answer("the result is -17.5").as_deref(), Some("-17.5"));
        assert_eq!(extract_answer("so 8/2 in total").as_deref(), Some("8/2"));
        assert_eq!(extract_answer("no numerals here"), None);
    }

    #[test]
    fn boxed_takes_precedence() {
        assert_eq!(
            extract_answer(r"steps give 9 so \boxed{4} done 5").as_deref(),
            Some("4")
        );
    }

    #[test]
    fn rational_canonicalization() {
        assert_eq!(canonical_answer("8/2"), canonical_answer("4"));
        assert_eq!(canonical_answer(" 4 "), canonical_answer("4"));
        assert_eq!(canonical_answer("+4"), canonical_answer("4"));
        assert_eq!(canonical_answer("0.5"), canonical_answer("1/2"));
        assert_eq!(canonical_answer("-0"), canonical_answer("0"));
        assert_ne!(canonical_answer("5"), canonical_answer("4"));
    }

    #[test]
    fn text_fallback() {
        assert_eq!(canonical_answer("Yes"), CanonicalAnswer::Text("yes".into()));
        assert!(answers_equal(&canonical_answer("YES"), &canonical_answer("yes")));
        assert!(!answers_equal(&canonical_answer("yes"), &canonical_answer("4")));
    }

    #[test]
    fn decimal_tolerance() {
        let a = CanonicalAnswer::Float(1.0);
        let b = CanonicalAnswer::Float(1.0 + 5e-10);
        assert!(answers_equal(&a, &b));
        let c = CanonicalAnswer::Float(1.0 + 5e-8);
        assert!(!answers_equal(&a, &c));
    }
}
