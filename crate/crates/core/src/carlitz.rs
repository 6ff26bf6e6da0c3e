//! Self-maps of `F_q` with all difference quotients square, their
//! classification as constant or affine-composed-with-Frobenius, and
//! Paley-graph simplicity via congruence closure.
//!
//! Everything here works on a precomputed [`FieldOps`] table: elements are
//! indices in `[0, q)` (for extensions, the low-degree-first base-p
//! encoding), so prime fields and small prime powers share one code path.

use crate::ffield::{
    chi_q, chi_table, ExtFieldCtx, FieldError, OddPrime, DEFAULT_Q_BOUND,
};
use rayon::prelude::*;
use thiserror::Error;

/// Default cap on q for the map enumeration (81 works as a stretch).
pub const DEFAULT_ENUM_BOUND: u64 = 49;

/// Default cap on q for Paley-graph operations.
pub const DEFAULT_PALEY_BOUND: u64 = 101;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CarlitzError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("field size {q} exceeds the bound {bound}")]
    SizeBoundExceeded { q: u64, bound: u64 },
    #[error("{0} is not an odd prime power")]
    NotOddPrimePower(u64),
    #[error("Paley graphs need q = 1 mod 4, got q = {0}")]
    NotPaleyOrder(u64),
    #[error("map on F_{q} violates the square-quotient condition at ({x},{y})")]
    NotConditionMap { q: u64, x: u64, y: u64 },
    #[error("map on F_{q} is neither constant nor affine-Frobenius")]
    NotCarlitz { q: u64 },
    #[error("need two distinct elements")]
    NotDistinct,
}

/// Dense operation tables for a field of odd order q = p^k.
#[derive(Debug, Clone)]
pub struct FieldOps {
    q: u64,
    p: u64,
    k: u32,
    sub: Vec<u64>,
    mul: Vec<u64>,
    inv: Vec<u64>,
    chi: Vec<i8>,
    /// frob[j*q + x] = x^(p^j) for j in [0, k).
    frob: Vec<u64>,
}

impl FieldOps {
    pub fn prime(p: OddPrime) -> Self {
        let pv = p.value();
        let q = pv as usize;
        let mut sub = vec![0u64; q * q];
        let mut mul = vec![0u64; q * q];
        for a in 0..pv {
            for b in 0..pv {
                sub[(a * pv + b) as usize] = (a + pv - b) % pv;
                mul[(a * pv + b) as usize] = a * b % pv;
            }
        }
        let mut inv = vec![0u64; q];
        for a in 1..pv {
            inv[a as usize] = crate::ffield::mod_inv(a, p);
        }
        FieldOps {
            q: pv,
            p: pv,
            k: 1,
            sub,
            mul,
            inv,
            chi: chi_table(p),
            frob: (0..pv).collect(),
        }
    }

    pub fn extension(ctx: &ExtFieldCtx) -> Self {
        let q = ctx.order();
        let qs = q as usize;
        let elems: Vec<_> = (0..q).map(|i| ctx.decode(i)).collect();
        let mut sub = vec![0u64; qs * qs];
        let mut mul = vec![0u64; qs * qs];
        for a in 0..qs {
            for b in 0..qs {
                sub[a * qs + b] = ctx.encode(&ctx.sub(&elems[a], &elems[b]));
                mul[a * qs + b] = ctx.encode(&ctx.mul(&elems[a], &elems[b]));
            }
        }
        let mut inv = vec![0u64; qs];
        for a in 1..qs {
            inv[a] = ctx.encode(&ctx.inv(&elems[a]));
        }
        let chi = elems
            .iter()
            .map(|e| chi_q(e, ctx).to_int() as i8)
            .collect();
        let mut frob = Vec::with_capacity(ctx.degree() as usize * qs);
        frob.extend(0..q);
        for j in 1..ctx.degree() {
            let prev = &frob[(j as usize - 1) * qs..j as usize * qs];
            let next: Vec<u64> = prev
                .iter()
                .map(|&x| ctx.encode(&ctx.pow(&elems[x as usize], ctx.prime().value())))
                .collect();
            frob.extend(next);
        }
        FieldOps {
            q,
            p: ctx.prime().value(),
            k: ctx.degree(),
            sub,
            mul,
            inv,
            chi,
            frob,
        }
    }

    /// Tables for `F_q` with q any odd prime power up to the extension
    /// bound; the modulus polynomial is the deterministic one from
    /// [`ExtFieldCtx`].
    pub fn for_order(q: u64) -> Result<Self, CarlitzError> {
        let (p, k) = split_prime_power(q).ok_or(CarlitzError::NotOddPrimePower(q))?;
        let p = OddPrime::new(p)?;
        if k == 1 {
            Ok(FieldOps::prime(p))
        } else {
            let ctx = ExtFieldCtx::with_bound(p, k, DEFAULT_Q_BOUND.max(q))?;
            Ok(FieldOps::extension(&ctx))
        }
    }

    #[inline]
    pub fn order(&self) -> u64 {
        self.q
    }

    #[inline]
    pub fn characteristic(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.k
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.sub[(a * self.q + b) as usize]
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        // a + b = a - (0 - b)
        self.sub(a, self.sub(0, b))
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.mul[(a * self.q + b) as usize]
    }

    #[inline]
    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(a != 0);
        self.inv[a as usize]
    }

    #[inline]
    pub fn chi(&self, a: u64) -> i8 {
        self.chi[a as usize]
    }

    #[inline]
    pub fn is_square(&self, a: u64) -> bool {
        self.chi[a as usize] != -1
    }

    #[inline]
    pub fn frobenius(&self, j: u32, x: u64) -> u64 {
        self.frob[(j as u64 * self.q + x) as usize]
    }

    /// The image of the prime subfield element n (n reduced mod p).
    pub fn from_int(&self, n: u64) -> u64 {
        n % self.p
    }
}

fn split_prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 3 || q % 2 == 0 {
        return None;
    }
    let mut d = 3;
    while d * d <= q {
        if q % d == 0 {
            let mut k = 0;
            let mut rest = q;
            while rest % d == 0 {
                rest /= d;
                k += 1;
            }
            return (rest == 1).then_some((d, k));
        }
        d += 2;
    }
    Some((q, 1)) // q prime
}

/// A full value table of a self-map of `F_q` satisfying the
/// square-quotient condition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ConditionMap {
    q: u64,
    table: Vec<u64>,
}

impl ConditionMap {
    pub fn new(ops: &FieldOps, table: Vec<u64>) -> Result<Self, CarlitzError> {
        assert_eq!(table.len() as u64, ops.order());
        for x in 0..ops.order() {
            for y in 0..x {
                let num = ops.sub(table[x as usize], table[y as usize]);
                let quot = ops.mul(num, ops.inv(ops.sub(x, y)));
                if !ops.is_square(quot) {
                    return Err(CarlitzError::NotConditionMap { q: ops.order(), x, y });
                }
            }
        }
        Ok(ConditionMap {
            q: ops.order(),
            table,
        })
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }
}

/// The classified shape of a condition map: constant, or
/// `x -> a^2 * x^(p^j) + b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CarlitzForm {
    Constant(u64),
    Affine {
        a_sq: u64,
        b: u64,
        frob_power: u32,
    },
}

/// Every condition map on `F_q`, each exactly once, in lexicographic order
/// of value tables. Uses the same sieve-pruned backtracking as the
/// sequence search, with the first two values left free.
pub fn enumerate_condition_maps(ops: &FieldOps) -> Result<Vec<ConditionMap>, CarlitzError> {
    enumerate_condition_maps_bounded(ops, DEFAULT_ENUM_BOUND)
}

pub fn enumerate_condition_maps_bounded(
    ops: &FieldOps,
    bound: u64,
) -> Result<Vec<ConditionMap>, CarlitzError> {
    let q = ops.order();
    if q > bound {
        return Err(CarlitzError::SizeBoundExceeded { q, bound });
    }
    // parallel over the first value; branches are concatenated in order,
    // so the output stays lexicographic
    let per_first: Vec<Vec<ConditionMap>> = (0..q)
        .into_par_iter()
        .map(|first| {
            let mut out = Vec::new();
            let mut table = vec![first];
            extend_tables(ops, &mut table, &mut out);
            out
        })
        .collect();
    Ok(per_first.into_iter().flatten().collect())
}

fn extend_tables(ops: &FieldOps, table: &mut Vec<u64>, out: &mut Vec<ConditionMap>) {
    let m = table.len() as u64;
    if m == ops.order() {
        out.push(ConditionMap {
            q: ops.order(),
            table: table.clone(),
        });
        return;
    }
    'cand: for c in 0..ops.order() {
        for (j, &fj) in table.iter().enumerate() {
            let num = ops.sub(c, fj);
            let quot = ops.mul(num, ops.inv(ops.sub(m, j as u64)));
            if !ops.is_square(quot) {
                continue 'cand;
            }
        }
        table.push(c);
        extend_tables(ops, table, out);
        table.pop();
    }
}

/// Identify the unique constant or affine-Frobenius form with the same
/// value table. A failure on an enumerated map is a hard error.
pub fn classify(ops: &FieldOps, map: &ConditionMap) -> Result<CarlitzForm, CarlitzError> {
    let t = map.table();
    if t.iter().all(|&v| v == t[0]) {
        return Ok(CarlitzForm::Constant(t[0]));
    }
    let b = t[0];
    for j in 0..ops.degree() {
        // f(1) = a * 1 + b fixes a for this Frobenius power
        let a = ops.sub(t[1], b);
        if a == 0 || !ops.is_square(a) {
            continue;
        }
        let matches = (0..ops.order())
            .all(|x| ops.add(ops.mul(a, ops.frobenius(j, x)), b) == t[x as usize]);
        if matches {
            return Ok(CarlitzForm::Affine {
                a_sq: a,
                b,
                frob_power: j,
            });
        }
    }
    Err(CarlitzError::NotCarlitz { q: ops.order() })
}

/// `{ y : chi(u-y) != chi(v-y) }`.
pub fn distinguisher_set(ops: &FieldOps, u: u64, v: u64) -> Result<Vec<u64>, CarlitzError> {
    if u == v {
        return Err(CarlitzError::NotDistinct);
    }
    Ok((0..ops.order())
        .filter(|&y| ops.chi(ops.sub(u, y)) != ops.chi(ops.sub(v, y)))
        .collect())
}

/// The Paley graph on `F_q`, q = 1 mod 4: vertices are field elements,
/// x ~ y iff chi(x-y) = +1.
#[derive(Debug, Clone)]
pub struct PaleyGraph {
    ops: FieldOps,
}

impl PaleyGraph {
    pub fn new(ops: FieldOps) -> Result<Self, CarlitzError> {
        Self::with_bound(ops, DEFAULT_PALEY_BOUND)
    }

    pub fn with_bound(ops: FieldOps, bound: u64) -> Result<Self, CarlitzError> {
        if ops.order() > bound {
            return Err(CarlitzError::SizeBoundExceeded {
                q: ops.order(),
                bound,
            });
        }
        if ops.order() % 4 != 1 {
            return Err(CarlitzError::NotPaleyOrder(ops.order()));
        }
        Ok(PaleyGraph { ops })
    }

    pub fn order(&self) -> u64 {
        self.ops.order()
    }

    pub fn ops(&self) -> &FieldOps {
        &self.ops
    }

    pub fn adjacent(&self, x: u64, y: u64) -> bool {
        x != y && self.ops.chi(self.ops.sub(x, y)) == 1
    }

    pub fn degree_of(&self, x: u64) -> u64 {
        (0..self.order()).filter(|&y| self.adjacent(x, y)).count() as u64
    }
}

/// Smallest set containing `{u, v}` and closed under absorbing every
/// vertex that distinguishes two of its members; a non-trivial congruence
/// class containing u and v would have to avoid every such vertex.
pub fn congruence_closure(g: &PaleyGraph, u: u64, v: u64) -> Result<Vec<u64>, CarlitzError> {
    if u == v {
        return Err(CarlitzError::NotDistinct);
    }
    let ops = g.ops();
    let q = ops.order();
    let mut member = vec![false; q as usize];
    let mut members = vec![u, v];
    member[u as usize] = true;
    member[v as usize] = true;
    // pairs (members[i], members[j]) with i < j, processed once each
    let mut next_pair = (0usize, 1usize);
    while (members.len() as u64) < q {
        let (i, j) = next_pair;
        if j >= members.len() {
            break; // fixpoint short of the full vertex set
        }
        let (a, b) = (members[i], members[j]);
        for y in 0..q {
            if !member[y as usize] && ops.chi(ops.sub(a, y)) != ops.chi(ops.sub(b, y)) {
                member[y as usize] = true;
                members.push(y);
            }
        }
        next_pair = if i + 1 < j { (i + 1, j) } else { (0, j + 1) };
    }
    members.sort_unstable();
    Ok(members)
}

/// True iff every pair's congruence closure is the whole vertex set.
pub fn is_simple(g: &PaleyGraph) -> bool {
    let q = g.order();
    for u in 0..q {
        for v in 0..u {
            let closure = congruence_closure(g, u, v).expect("u != v");
            if closure.len() as u64 != q {
                return false;
            }
        }
    }
    true
}
