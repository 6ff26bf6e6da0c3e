//! Exact rational verification of the square-quotient condition,
//! p-adic valuations, and entrywise reduction into `F_p`.
//!
//! Everything here is exact integer arithmetic; perfect squares are
//! decided by integer square roots, never floating point, so the verifier
//! can serve as the trusted oracle for larger searches.

use crate::ffield::{mod_inv, OddPrime};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RationalError {
    #[error("denominator of entry {index} is divisible by {p}")]
    DenominatorDivisible { index: usize, p: u64 },
    #[error("sequence of length {len} too long for p={p}")]
    TooLong { len: usize, p: u64 },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// True iff r is the square of a rational: r >= 0 and both numerator and
/// denominator (in lowest terms) are perfect squares.
pub fn is_square_rat(r: &BigRational) -> bool {
    if r.is_negative() {
        return false;
    }
    is_square_int(r.numer()) && is_square_int(r.denom())
}

fn is_square_int(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let root = n.sqrt();
    &root * &root == *n
}

/// Check every pairwise difference quotient `(f(i)-f(j))/(i-j)`.
pub fn verify_sequence(seq: &[BigRational]) -> bool {
    for j in 1..seq.len() {
        for i in 0..j {
            let quot = (&seq[j] - &seq[i]) / BigRational::from(BigInt::from((j - i) as i64));
            if !is_square_rat(&quot) {
                return false;
            }
        }
    }
    true
}

/// A p-adic valuation; zero gets +infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn is_negative(self) -> bool {
        matches!(self, Valuation::Finite(v) if v < 0)
    }
}

/// Val_p of a rational; `p` may be 2 or any odd prime.
pub fn val_p(r: &BigRational, p: u64) -> Valuation {
    debug_assert!(crate::ffield::is_prime(p));
    if r.is_zero() {
        return Valuation::Infinity;
    }
    Valuation::Finite(int_val(r.numer(), p) - int_val(r.denom(), p))
}

fn int_val(n: &BigInt, p: u64) -> i64 {
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    while (&n % &p).is_zero() {
        n /= &p;
        v += 1;
    }
    v
}

/// j_p: the first index whose entry has a negative p-adic valuation.
pub fn first_denominator_index(seq: &[BigRational], p: u64) -> Option<usize> {
    seq.iter().position(|r| val_p(r, p).is_negative())
}

/// Entrywise reduction into `F_p` (numerator times inverse denominator);
/// requires every entry p-integral and the sequence no longer than p.
pub fn reduce_mod_p(seq: &[BigRational], p: OddPrime) -> Result<Vec<u64>, RationalError> {
    let pv = p.value();
    if seq.len() as u64 > pv {
        return Err(RationalError::TooLong {
            len: seq.len(),
            p: pv,
        });
    }
    let pb = BigInt::from(pv);
    let mut out = Vec::with_capacity(seq.len());
    for (index, r) in seq.iter().enumerate() {
        let den = ((r.denom() % &pb) + &pb) % &pb;
        let den = u64::try_from(&den).expect("reduced residue fits");
        if den == 0 {
            return Err(RationalError::DenominatorDivisible { index, p: pv });
        }
        let num = ((r.numer() % &pb) + &pb) % &pb;
        let num = u64::try_from(&num).expect("reduced residue fits");
        out.push(num * mod_inv(den, p) % pv);
    }
    Ok(out)
}

/// Parse the sequence file format: one `num/den` or integer per line,
/// `#` starts a comment, blank lines ignored.
pub fn parse_sequence(text: &str) -> Result<Vec<BigRational>, RationalError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_int = |s: &str| -> Result<BigInt, RationalError> {
            s.trim().parse().map_err(|_| RationalError::Parse {
                line: i + 1,
                msg: format!("bad integer {s:?}"),
            })
        };
        let r = match line.split_once('/') {
            Some((num, den)) => {
                let den = parse_int(den)?;
                if den.is_zero() {
                    return Err(RationalError::Parse {
                        line: i + 1,
                        msg: "zero denominator".into(),
                    });
                }
                BigRational::new(parse_int(num)?, den)
            }
            None => BigRational::from(parse_int(line)?),
        };
        out.push(r);
    }
    Ok(out)
}

/// The two published finite sequences of lengths 4 and 5.
pub fn example_sequences() -> [Vec<BigRational>; 2] {
    let rat = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
    [
        vec![rat(0, 1), rat(1, 1), rat(15842, 1681), rat(23763, 1)],
        vec![
            rat(0, 1),
            rat(1, 1),
            rat(2738, 2209),
            rat(3267, 2209),
            rat(5476, 2209),
        ],
    ]
}
