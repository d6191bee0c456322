//! Reproducible experiment reports: exact rationals as `num/den` strings
//! with advisory decimal renderings, deterministic field order, and the
//! resolved run configuration embedded. Identical configurations produce
//! byte-identical reports; wall-clock timing is opt-in for that reason.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::directed::Evaluation;
use crate::error::{Error, Result};
use crate::rational::{render_rational, Rational};

pub const DECIMAL_SIG_DIGITS: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalField {
    /// exact value, `numerator/denominator` in lowest terms
    pub rational: String,
    /// advisory decimal: exact when terminating within 12 significant
    /// digits, otherwise correctly rounded (half-even) to 12
    pub decimal: String,
}

impl RationalField {
    pub fn new(r: &Rational) -> Self {
        RationalField {
            rational: render_rational(r),
            decimal: decimal_string(r, DECIMAL_SIG_DIGITS),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub x: String,
    pub y: RationalField,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub parameters: BTreeMap<String, String>,
    pub seed: u64,
    /// rounding-direction metadata per result field (exact / lower / upper /
    /// directed), present only for fields that are not exact
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub rounding: BTreeMap<String, String>,
    pub results: BTreeMap<String, RationalField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<Vec<SeriesPoint>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<u64>,
}

impl ExperimentReport {
    pub fn new(experiment: impl Into<String>, seed: u64) -> Self {
        ExperimentReport {
            experiment: experiment.into(),
            parameters: BTreeMap::new(),
            seed,
            rounding: BTreeMap::new(),
            results: BTreeMap::new(),
            series: None,
            wall_clock_ms: None,
        }
    }

    pub fn param(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.parameters.insert(key.into(), value.to_string());
        self
    }

    pub fn result(&mut self, key: impl Into<String>, value: &Rational) -> &mut Self {
        self.results.insert(key.into(), RationalField::new(value));
        self
    }

    /// Records an evaluation together with its rounding direction; directed
    /// values store the lower endpoint and both bounds.
    pub fn result_eval(&mut self, key: &str, value: &Evaluation) -> &mut Self {
        match value {
            Evaluation::Exact(v) => {
                self.results.insert(key.to_string(), RationalField::new(v));
            }
            Evaluation::Directed(e) => {
                self.results.insert(key.to_string(), RationalField::new(&e.lo));
                self.results
                    .insert(format!("{key}_upper"), RationalField::new(&e.hi));
                self.rounding.insert(key.to_string(), "lower".to_string());
                self.rounding
                    .insert(format!("{key}_upper"), "upper".to_string());
            }
        }
        self
    }

    pub fn rounding_note(&mut self, key: impl Into<String>, direction: impl Into<String>) -> &mut Self {
        self.rounding.insert(key.into(), direction.into());
        self
    }

    pub fn series(&mut self, points: Vec<(Rational, Rational)>) -> &mut Self {
        self.series = Some(
            points
                .into_iter()
                .map(|(x, y)| SeriesPoint {
                    x: decimal_string(&x, DECIMAL_SIG_DIGITS),
                    y: RationalField::new(&y),
                })
                .collect(),
        );
        self
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::invalid(format!("malformed report JSON: {e}")))
    }

    /// CSV: `x,y_rational,y_decimal` rows when a series is present, else
    /// `field,rational,decimal` rows over the sorted result fields.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match &self.series {
            Some(points) => {
                out.push_str("x,y_rational,y_decimal\r\n");
                for p in points {
                    out.push_str(&format!(
                        "{},{},{}\r\n",
                        csv_quote(&p.x),
                        csv_quote(&p.y.rational),
                        csv_quote(&p.y.decimal)
                    ));
                }
            }
            None => {
                out.push_str("field,rational,decimal\r\n");
                for (k, v) in &self.results {
                    out.push_str(&format!(
                        "{},{},{}\r\n",
                        csv_quote(k),
                        csv_quote(&v.rational),
                        csv_quote(&v.decimal)
                    ));
                }
            }
        }
        out
    }

    /// Two-column numeric text with a `#` header carrying the resolved
    /// configuration; only reports with a ladder series have one.
    pub fn to_plotdata(&self) -> Result<String> {
        let points = self
            .series
            .as_ref()
            .filter(|p| !p.is_empty())
            .ok_or_else(|| Error::invalid("report has no series data to plot"))?;
        let mut out = format!("# diophlab {} seed={}\n", self.experiment, self.seed);
        for (k, v) in &self.parameters {
            out.push_str(&format!("# {k}={v}\n"));
        }
        for p in points {
            out.push_str(&format!("{} {}\n", p.x, p.y.decimal));
        }
        Ok(out)
    }
}

fn csv_quote(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Decimal rendering: exact when the denominator is of the form `2^a 5^b`
/// and the digits fit the significance budget, otherwise correctly rounded
/// (ties to even) to `sig` significant digits. Values far from 1 switch to
/// scientific notation.
pub fn decimal_string(r: &Rational, sig: usize) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    if let Some(s) = exact_terminating_decimal(r, sig) {
        return s;
    }
    let neg = r.is_negative();
    let abs = r.abs();
    let e = decimal_exponent(&abs);
    // mantissa = round(|r| * 10^(sig-1-e)) with half-even ties
    let shift = sig as i64 - 1 - e;
    let (num, den) = scale_pow10(&abs, shift);
    let (mut mant, rem) = num.div_rem(&den);
    let twice = &rem * BigInt::from(2);
    let go_up = match twice.cmp(&den) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => mant.is_odd(),
    };
    if go_up {
        mant += BigInt::from(1);
    }
    let mut digits = mant.to_string();
    let mut e = e;
    if digits.len() > sig {
        // rounding carried into a new leading digit
        digits.truncate(sig);
        e += 1;
    }
    format_digits(&digits, e, neg, false)
}

/// Exponent `e` with `10^e <= |r| < 10^{e+1}`.
fn decimal_exponent(abs: &Rational) -> i64 {
    let num_digits = abs.numer().to_string().len() as i64;
    let den_digits = abs.denom().to_string().len() as i64;
    let mut e = num_digits - den_digits; // within 1 of the truth
    let (n, d) = scale_pow10(abs, -e);
    if n < d {
        e -= 1;
    } else if n >= &d * BigInt::from(10) {
        e += 1;
    }
    e
}

/// `(num, den)` of `|r| * 10^shift`.
fn scale_pow10(abs: &Rational, shift: i64) -> (BigInt, BigInt) {
    let p = BigInt::from(10).pow(shift.unsigned_abs() as u32);
    if shift >= 0 {
        (abs.numer() * p, abs.denom().clone())
    } else {
        (abs.numer().clone(), abs.denom() * p)
    }
}

fn exact_terminating_decimal(r: &Rational, sig: usize) -> Option<String> {
    let mut den = r.denom().magnitude().clone();
    let mut twos = 0u32;
    let mut fives = 0u32;
    let two = num_bigint::BigUint::from(2u32);
    let five = num_bigint::BigUint::from(5u32);
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if den != num_bigint::BigUint::from(1u32) {
        return None;
    }
    let frac_digits = twos.max(fives);
    let scaled = (r.numer().magnitude() * five.pow(twos.saturating_sub(fives))
        * two.pow(fives.saturating_sub(twos)))
    .to_string();
    let significant = scaled.trim_end_matches('0').trim_start_matches('0').len();
    if significant > sig || frac_digits > 40 {
        return None;
    }
    let e = scaled.len() as i64 - 1 - frac_digits as i64;
    Some(format_digits(&scaled, e, r.is_negative(), true))
}

/// Renders a digit string `d1 d2 ...` as `±d1.d2... * 10^e`, plain when the
/// exponent is moderate, scientific otherwise. `trim` drops trailing
/// fractional zeros (exact values only).
fn format_digits(digits: &str, e: i64, neg: bool, trim: bool) -> String {
    let sign = if neg { "-" } else { "" };
    let body = if (-5..=17).contains(&e) {
        let mut s = String::new();
        if e < 0 {
            s.push_str("0.");
            for _ in 0..(-e - 1) {
                s.push('0');
            }
            s.push_str(digits);
        } else {
            let int_len = (e + 1) as usize;
            if int_len >= digits.len() {
                s.push_str(digits);
                for _ in 0..(int_len - digits.len()) {
                    s.push('0');
                }
            } else {
                s.push_str(&digits[..int_len]);
                s.push('.');
                s.push_str(&digits[int_len..]);
            }
        }
        s
    } else {
        let mut s = String::new();
        s.push_str(&digits[..1]);
        if digits.len() > 1 {
            s.push('.');
            s.push_str(&digits[1..]);
        }
        format!("{s}e{e}")
    };
    let body = if trim && body.contains('.') {
        let b = body.trim_end_matches('0');
        b.trim_end_matches('.').to_string()
    } else {
        body
    };
    format!("{sign}{body}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::directed::Enclosure;
    use crate::rational::{parse_rational, rat, rat_int};

    #[test]
    fn decimal_rendering() {
        assert_eq!(decimal_string(&rat(1, 2), 12), "0.5");
        assert_eq!(decimal_string(&rat(5, 8), 12), "0.625");
        assert_eq!(decimal_string(&rat(1, 25), 12), "0.04");
        assert_eq!(decimal_string(&rat_int(0), 12), "0");
        assert_eq!(decimal_string(&rat_int(2), 12), "2");
        assert_eq!(decimal_string(&rat(-7, 4), 12), "-1.75");
        // non-terminating: 12 significant digits, half-even
        assert_eq!(decimal_string(&rat(1, 3), 12), "0.333333333333");
        assert_eq!(decimal_string(&rat(2, 3), 12), "0.666666666667");
        assert_eq!(decimal_string(&rat(1, 7), 12), "0.142857142857");
        assert_eq!(decimal_string(&rat(100, 7), 12), "14.2857142857");
        // large and tiny magnitudes go scientific
        assert_eq!(decimal_string(&rat(1, 3000000), 12), "3.33333333333e-7");
        let big = parse_rational("1000000000000000000000/3").unwrap();
        assert_eq!(decimal_string(&big, 12), "3.33333333333e20");
        // exact value needing too many digits falls back to rounding
        assert_eq!(decimal_string(&rat(1, 8388608), 12), "1.19209289551e-7");
    }

    #[test]
    fn report_json_round_trip_is_byte_identical() {
        let mut r = ExperimentReport::new("intersect-2d", 42);
        r.param("q", "1,-2").param("qprime", "2,5").param("rho", "1/10");
        r.result("area", &rat(1, 25));
        r.result_eval(
            "bound",
            &Evaluation::Directed(Enclosure::new(rat(1, 3), rat(2, 3))),
        );
        r.series(vec![(rat_int(1), rat(1, 2)), (rat_int(2), rat(5, 8))]);
        let json = r.to_json_string();
        let back = ExperimentReport::from_json_str(&json).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json_string(), json);
        // every exact rational field re-parses to the in-memory value
        assert_eq!(parse_rational(&back.results["area"].rational).unwrap(), rat(1, 25));
    }

    #[test]
    fn plotdata_output() {
        let mut r = ExperimentReport::new("union-growth", 7);
        r.param("psi", "recip:1/4");
        r.series(vec![(rat_int(1), rat(1, 2)), (rat_int(2), rat(5, 8))]);
        let p = r.to_plotdata().unwrap();
        let lines: Vec<&str> = p.lines().collect();
        assert!(lines[0].starts_with("# diophlab union-growth"));
        assert_eq!(lines[2], "1 0.5");
        assert_eq!(lines[3], "2 0.625");
        // a report without a series cannot be plotted
        let bare = ExperimentReport::new("formulas", 7);
        assert!(bare.to_plotdata().is_err());
    }

    #[test]
    fn csv_output() {
        let mut r = ExperimentReport::new("formulas", 1);
        r.result("jb_dimension", &rat(7, 4));
        r.result("gamma", &rat(3, 4));
        let csv = r.to_csv();
        assert!(csv.starts_with("field,rational,decimal\r\n"));
        assert!(csv.contains("gamma,3/4,0.75\r\n"));
        assert!(csv.contains("jb_dimension,7/4,1.75\r\n"));
        assert_eq!(csv_quote("a,b"), "\"a,b\"");
    }
}
