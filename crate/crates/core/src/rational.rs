//! Exact rational helpers shared by the reporting layers.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::Value;

/// `num / den` as an exact rational.
pub fn ratio(num: i128, den: i128) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `["num","den"]` with the denominator positive and the fraction reduced.
pub fn to_json_pair(r: &BigRational) -> Value {
    Value::Array(vec![
        Value::String(r.numer().to_string()),
        Value::String(r.denom().to_string()),
    ])
}

/// `p/q`, or just `p` for integers.
pub fn display(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_are_reduced() {
        assert_eq!(to_json_pair(&ratio(2, -8)).to_string(), r#"["-1","4"]"#);
        assert_eq!(display(&ratio(6, 3)), "2");
        assert_eq!(display(&ratio(-1, 6)), "-1/6");
    }
}
