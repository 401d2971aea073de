//! Coefficient splitting for round-off control in long integrations.
//!
//! A weight known to high precision is stored as a machine part plus a
//! correction part, so that state updates can add both contributions
//! separately and recover accuracy beyond a single f64 coefficient.
//! Internally this uses double-double arithmetic built on exact
//! error-free transformations.

use crate::error::{Error, Result};

/// A coefficient split into its working-precision value and the
/// round-off correction `exact - value`, itself rounded to f64.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCoefficient {
    pub value: f64,
    pub correction: f64,
}

impl SplitCoefficient {
    /// A coefficient known only to working precision; correction is zero.
    pub fn exact_f64(value: f64) -> Self {
        SplitCoefficient {
            value,
            correction: 0.0,
        }
    }
}

/// Split a coefficient given as a decimal string with >= 30 significant
/// digits into machine and correction parts.
pub fn split_coefficients(decimal: &str) -> Result<SplitCoefficient> {
    let exact = Dd::parse_decimal(decimal)
        .map_err(|e| Error::Tableau(format!("malformed decimal string `{decimal}`: {e}")))?;
    Ok(exact.split())
}

// ---------------------------------------------------------------------------
// Double-double arithmetic.
// ---------------------------------------------------------------------------

/// Unevaluated sum of two f64 with |lo| <= ulp(hi)/2.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Powers of ten exactly representable in f64.
const POW10: [f64; 23] = [
    1e0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8, 1e9, 1e10, 1e11, 1e12, 1e13, 1e14, 1e15, 1e16,
    1e17, 1e18, 1e19, 1e20, 1e21, 1e22,
];

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let e = e + self.lo + o.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r1 = self.sub(o.mul(Dd::from_f64(q1)));
        let q2 = r1.hi / o.hi;
        let r2 = r1.sub(o.mul(Dd::from_f64(q2)));
        let q3 = r2.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::from_f64(q3))
    }

    pub fn mul_f64(self, x: f64) -> Dd {
        self.mul(Dd::from_f64(x))
    }

    /// 10^n for n >= 0, exact as a double-double for n <= 44.
    fn pow10(n: u32) -> Dd {
        let mut n = n;
        let mut acc = Dd::ONE;
        let mut first = true;
        while n > 0 {
            let k = n.min(22);
            if first && n <= 44 && n > 22 {
                // product of two exact f64 powers is an exact double-double
                let (hi, lo) = two_prod(POW10[22], POW10[(n - 22) as usize]);
                return Dd { hi, lo };
            }
            acc = acc.mul_f64(POW10[k as usize]);
            n -= k;
            first = false;
        }
        acc
    }

    /// Parse a plain decimal string (sign, digits, optional fraction and
    /// exponent) into a double-double.
    pub fn parse_decimal(s: &str) -> std::result::Result<Dd, String> {
        let s = s.trim();
        if s.is_empty() {
            return Err("empty string".into());
        }
        let mut chars = s.chars().peekable();
        let mut neg = false;
        if let Some(&c) = chars.peek() {
            if c == '+' || c == '-' {
                neg = c == '-';
                chars.next();
            }
        }
        let mut mant = Dd::ZERO;
        let mut ndigits = 0usize;
        let mut frac_digits = 0i64;
        let mut seen_dot = false;
        let mut exp10 = 0i64;
        while let Some(&c) = chars.peek() {
            match c {
                '0'..='9' => {
                    mant = mant.mul_f64(10.0).add(Dd::from_f64((c as u8 - b'0') as f64));
                    ndigits += 1;
                    if seen_dot {
                        frac_digits += 1;
                    }
                    chars.next();
                }
                '.' => {
                    if seen_dot {
                        return Err("repeated decimal point".into());
                    }
                    seen_dot = true;
                    chars.next();
                }
                'e' | 'E' => {
                    chars.next();
                    let rest: String = chars.collect();
                    exp10 = rest
                        .parse::<i64>()
                        .map_err(|_| format!("bad exponent `{rest}`"))?;
                    chars = "".chars().peekable();
                }
                _ => return Err(format!("unexpected character `{c}`")),
            }
        }
        if ndigits == 0 {
            return Err("no digits".into());
        }
        let net = exp10 - frac_digits;
        let mut v = if net >= 0 {
            mant.mul(Dd::pow10(net as u32))
        } else {
            mant.div(Dd::pow10((-net) as u32))
        };
        if neg {
            v = v.neg();
        }
        Ok(v)
    }

    /// Round to a machine value plus f64 correction.
    pub fn split(self) -> SplitCoefficient {
        let value = self.hi;
        let correction = self.sub(Dd::from_f64(value)).hi;
        SplitCoefficient { value, correction }
    }
}

// ---------------------------------------------------------------------------
// Double-double Legendre evaluation for Gauss weight refinement.
// ---------------------------------------------------------------------------

/// Value and derivative of the Legendre polynomial P_s on [-1, 1].
fn legendre_pair(s: usize, x: Dd) -> (Dd, Dd) {
    let mut p_prev = Dd::ONE;
    let mut p = x;
    let mut dp_prev = Dd::ZERO;
    let mut dp = Dd::ONE;
    if s == 0 {
        return (Dd::ONE, Dd::ZERO);
    }
    for k in 1..s {
        let kf = k as f64;
        let p_next = x
            .mul(p)
            .mul_f64(2.0 * kf + 1.0)
            .sub(p_prev.mul_f64(kf))
            .div(Dd::from_f64(kf + 1.0));
        let dp_next = dp_prev.add(p.mul_f64(2.0 * kf + 1.0));
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
    }
    (p, dp)
}

/// Refine an f64 Gauss node (on [0,1]) in double-double precision and
/// return the split node and weight, using the classical closed form
/// b_i = 1 / ((1 - x^2) P_s'(x)^2) with x = 2c - 1.
pub(crate) fn gauss_node_weight(s: usize, c_seed: f64) -> (SplitCoefficient, SplitCoefficient) {
    let mut x = Dd::from_f64(2.0 * c_seed - 1.0);
    for _ in 0..6 {
        let (p, dp) = legendre_pair(s, x);
        x = x.sub(p.div(dp));
    }
    let (_, dp) = legendre_pair(s, x);
    let one_m_x2 = Dd::ONE.sub(x.mul(x));
    let w = Dd::ONE.div(one_m_x2.mul(dp).mul(dp));
    let c = x.add(Dd::ONE).mul_f64(0.5);
    (c.split(), w.split())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exactly_representable_value_has_zero_correction() {
        let sc = split_coefficients("0.750000000000000000000000000000000000").unwrap();
        assert_eq!(sc.value, 0.75);
        assert_eq!(sc.correction, 0.0);
    }

    #[test]
    fn five_eighteenths_machine_and_correction() {
        // extended-precision subtraction oracle computed independently:
        // f64 nearest to 5/18 is 0.2777777777777778, remainder -1.2335811384723961e-17
        let sc = split_coefficients("0.277777777777777777777777777777777778").unwrap();
        assert_eq!(sc.value, 5.0_f64 / 18.0);
        assert!((sc.correction - (-1.2335811384723961e-17)).abs() < 1e-32);
    }

    #[test]
    fn reconstruction_matches_exact_to_double_working_precision() {
        for s in [
            "0.277777777777777777777777777777777778",
            "0.512485826188421613838813446519608094",
            "0.0833333333333333333333333333333333333",
            "-0.444444444444444444444444444444444444",
            "1.25e-3",
        ] {
            let exact = Dd::parse_decimal(s).unwrap();
            let sc = exact.split();
            let resid = exact
                .sub(Dd::from_f64(sc.value))
                .sub(Dd::from_f64(sc.correction));
            assert!(
                resid.hi.abs() <= 1e-30 * exact.hi.abs().max(1e-300),
                "residual {} too large for {s}",
                resid.hi
            );
        }
    }

    #[test]
    fn malformed_strings_rejected() {
        for bad in ["", "abc", "1.2.3", "1e", "--4", ". "] {
            assert!(split_coefficients(bad).is_err(), "accepted `{bad}`");
        }
    }

    #[test]
    fn parser_handles_exponents_and_signs() {
        let v = Dd::parse_decimal("-2.5e-2").unwrap();
        assert_eq!(v.hi, -0.025);
        let v = Dd::parse_decimal("+125e-3").unwrap();
        assert_eq!(v.hi, 0.125);
    }

    #[test]
    fn gauss_midpoint_node_weight() {
        let (c, w) = gauss_node_weight(1, 0.5);
        assert_eq!(c.value, 0.5);
        assert_eq!(w.value, 1.0);
        assert_eq!(w.correction, 0.0);
    }

    #[test]
    fn gauss_three_stage_weights_match_high_precision_strings() {
        // roots of the shifted Legendre polynomial of degree 3
        let mid = gauss_node_weight(3, 0.5).1;
        let edge = gauss_node_weight(3, 0.112).1;
        let four_ninths = split_coefficients("0.444444444444444444444444444444444444").unwrap();
        let five_18 = split_coefficients("0.277777777777777777777777777777777778").unwrap();
        assert_eq!(mid.value, four_ninths.value);
        assert!((mid.correction - four_ninths.correction).abs() < 1e-31);
        assert_eq!(edge.value, five_18.value);
        assert!((edge.correction - five_18.correction).abs() < 1e-31);
    }
}
