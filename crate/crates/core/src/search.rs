//! Sieve-pruned enumeration of admissible sequences over `F_p`.
//!
//! A node of the search tree is a prefix `f(0..m)` with `f(0)=0`, `f(1)=1`
//! and every difference quotient a square. The engine walks the tree depth
//! first; `W(p,x)` is the number of nodes at depth `x`, so one traversal
//! yields the whole profile. Work is split at a fixed depth: each surviving
//! prefix of that depth is an independent unit and the per-depth counts are
//! combined by addition, which makes results independent of worker count
//! and scheduling.

use crate::ffield::{mod_inv, FieldError, OddPrime, SquareTable};
use std::collections::HashSet;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("length {l} out of range for p={p} (need 2 <= L < p)")]
    LengthOutOfRange { p: u64, l: u64 },
    #[error("split depth {0} out of range (need >= 2)")]
    BadSplitDepth(u32),
    #[error("workers must be >= 1")]
    NoWorkers,
    #[error("degenerate witness: n({p}) = {n} <= 2")]
    DegenerateWitness { p: u64, n: u64 },
    #[error("checkpoint error: {0}")]
    Checkpoint(String),
}

/// A partial sequence `f(0..m)` in `F_p` satisfying the square-quotient
/// condition, with `f(0)=0` and `f(1)=1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SolutionPrefix {
    p: OddPrime,
    values: Vec<u64>,
}

impl SolutionPrefix {
    /// Validates all invariants: pinned first values, residue range, and
    /// every pairwise quotient a square.
    pub fn new(p: OddPrime, values: Vec<u64>) -> Result<Self, SearchError> {
        let pv = p.value();
        if values.is_empty() || values.len() as u64 > pv {
            return Err(SearchError::LengthOutOfRange {
                p: pv,
                l: values.len() as u64,
            });
        }
        if values[0] != 0 || (values.len() > 1 && values[1] != 1) {
            return Err(SearchError::Checkpoint(format!(
                "prefix must start 0,1: got {:?}",
                &values[..values.len().min(2)]
            )));
        }
        let table = SquareTable::new(p);
        for j in 1..values.len() {
            if values[j] >= pv {
                return Err(SearchError::Checkpoint(format!(
                    "residue {} out of range mod {}",
                    values[j], pv
                )));
            }
            for i in 0..j {
                let diff = (values[j] + pv - values[i]) % pv;
                let q = diff * mod_inv((j - i) as u64, p) % pv;
                if !table.is_square(q) {
                    return Err(SearchError::Checkpoint(format!(
                        "quotient (f({j})-f({i}))/{} is not a square mod {}",
                        j - i,
                        pv
                    )));
                }
            }
        }
        Ok(SolutionPrefix { p, values })
    }

    pub fn prime(&self) -> OddPrime {
        self.p
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    /// Largest index of the sequence, i.e. `m` for `f(0..m)`.
    pub fn last_index(&self) -> u32 {
        (self.values.len() - 1) as u32
    }

    pub fn is_identity(&self) -> bool {
        self.values.iter().enumerate().all(|(j, &v)| v == j as u64)
    }
}

/// The row of counts `W(p,x)` for `x = 2..=x_end`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WProfile {
    p: OddPrime,
    /// Raw counts for x = 2..=limit (index 0 holds x=2).
    counts: Vec<u64>,
    /// Last column of the stabilized profile (first 1 of the first 1,1 run,
    /// or the traversal limit when no such run exists).
    x_end: u32,
    stabilized: bool,
}

impl WProfile {
    pub fn prime(&self) -> OddPrime {
        self.p
    }

    /// `W(p,x)` for any computed column, including ones past `x_end`.
    pub fn count(&self, x: u32) -> Option<u64> {
        if x < 2 {
            return None;
        }
        self.counts.get((x - 2) as usize).copied()
    }

    pub fn x_end(&self) -> u32 {
        self.x_end
    }

    pub fn stabilized(&self) -> bool {
        self.stabilized
    }

    /// Columns `2..=x_end` of the stabilized profile.
    pub fn columns(&self) -> impl Iterator<Item = (u32, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .map(|(i, &c)| (i as u32 + 2, c))
            .take((self.x_end - 1) as usize)
    }

    /// Largest computed column (the traversal limit).
    pub fn count_limit(&self) -> u32 {
        self.counts.len() as u32 + 1
    }

    /// `L(p)`: the smallest x with `W(p,x) = 1`.
    pub fn minimal_length(&self) -> Option<u32> {
        self.counts
            .iter()
            .position(|&c| c == 1)
            .map(|i| i as u32 + 2)
    }

    fn from_raw(p: OddPrime, counts: Vec<u64>, limit: u32) -> Self {
        debug_assert_eq!(counts.len(), (limit - 1) as usize);
        let mut x_end = limit;
        let mut stabilized = counts[(limit - 2) as usize] == 1;
        for i in 0..counts.len().saturating_sub(1) {
            if counts[i] == 1 && counts[i + 1] == 1 {
                x_end = i as u32 + 2;
                stabilized = true;
                break;
            }
        }
        WProfile {
            p,
            counts,
            x_end,
            stabilized,
        }
    }
}

/// Visited-node and square-test counters for the complexity accounting.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub visited_nodes: u64,
    pub char_tests: u64,
}

impl SearchStats {
    fn add(&mut self, other: SearchStats) {
        self.visited_nodes += other.visited_nodes;
        self.char_tests += other.char_tests;
    }
}

/// Worker-pool and traversal options.
#[derive(Debug, Clone)]
pub struct SearchOpts {
    pub workers: usize,
    pub split_depth: u32,
    pub x_max: Option<u32>,
}

impl Default for SearchOpts {
    fn default() -> Self {
        SearchOpts {
            workers: 1,
            split_depth: 3,
            x_max: None,
        }
    }
}

struct Ctx {
    p: u64,
    table: SquareTable,
    /// Inverses of 1..p, indexed by the difference of positions.
    inv: Vec<u64>,
}

impl Ctx {
    fn new(p: OddPrime) -> Self {
        let pv = p.value();
        let mut inv = vec![0u64; pv as usize];
        for d in 1..pv {
            inv[d as usize] = mod_inv(d, p);
        }
        Ctx {
            p: pv,
            table: SquareTable::new(p),
            inv,
        }
    }

    /// Scan all residues, keeping those whose quotient against every
    /// earlier position is a square. Early exit on the first failure.
    fn extend_into(&self, values: &[u64], out: &mut Vec<u64>, stats: &mut SearchStats) {
        let m1 = values.len() as u64; // position being filled
        out.clear();
        'cand: for c in 0..self.p {
            for (j, &fj) in values.iter().enumerate().rev() {
                let diff = (c + self.p - fj) % self.p;
                let q = diff * self.inv[(m1 - j as u64) as usize] % self.p;
                stats.char_tests += 1;
                if !self.table.is_square(q) {
                    continue 'cand;
                }
            }
            out.push(c);
        }
    }

    /// Depth-first count of nodes per depth below (and including) the
    /// current prefix, up to `limit`.
    fn dfs(&self, values: &mut Vec<u64>, limit: u32, counts: &mut [u64], stats: &mut SearchStats) {
        let depth = (values.len() - 1) as u32;
        counts[depth as usize] += 1;
        stats.visited_nodes += 1;
        if depth == limit {
            return;
        }
        let mut cands = Vec::new();
        self.extend_into(values, &mut cands, stats);
        for c in cands {
            values.push(c);
            self.dfs(values, limit, counts, stats);
            values.pop();
        }
    }

    /// All valid prefixes of length `split+1`, in lexicographic order,
    /// counting shallow nodes (depth <= split) along the way.
    fn collect_prefixes(
        &self,
        split: u32,
        counts: &mut [u64],
        stats: &mut SearchStats,
    ) -> Vec<Vec<u64>> {
        let mut out = Vec::new();
        let mut values = vec![0u64, 1];
        self.collect_rec(&mut values, split, counts, stats, &mut out);
        out
    }

    fn collect_rec(
        &self,
        values: &mut Vec<u64>,
        split: u32,
        counts: &mut [u64],
        stats: &mut SearchStats,
        out: &mut Vec<Vec<u64>>,
    ) {
        let depth = (values.len() - 1) as u32;
        counts[depth as usize] += 1;
        stats.visited_nodes += 1;
        if depth == split {
            out.push(values.clone());
            return;
        }
        let mut cands = Vec::new();
        self.extend_into(values, &mut cands, stats);
        for c in cands {
            values.push(c);
            self.collect_rec(values, split, counts, stats, out);
            values.pop();
        }
    }
}

/// All one-step extensions of a valid prefix.
pub fn extend_candidates(prefix: &SolutionPrefix) -> Vec<u64> {
    let ctx = Ctx::new(prefix.prime());
    let mut out = Vec::new();
    let mut stats = SearchStats::default();
    ctx.extend_into(prefix.values(), &mut out, &mut stats);
    out
}

fn check_opts(p: OddPrime, opts: &SearchOpts) -> Result<u32, SearchError> {
    if opts.workers == 0 {
        return Err(SearchError::NoWorkers);
    }
    if opts.split_depth < 2 {
        return Err(SearchError::BadSplitDepth(opts.split_depth));
    }
    let limit = opts.x_max.unwrap_or(p.value() as u32 - 1);
    if limit < 2 || limit as u64 >= p.value() {
        return Err(SearchError::LengthOutOfRange {
            p: p.value(),
            l: limit as u64,
        });
    }
    Ok(limit)
}

/// Compute the full `W(p,x)` profile with default options.
pub fn w_profile(p: OddPrime, x_max: Option<u32>) -> Result<WProfile, SearchError> {
    let opts = SearchOpts {
        x_max,
        ..SearchOpts::default()
    };
    w_profile_opts(p, &opts).map(|(prof, _)| prof)
}

/// Compute the profile with explicit worker-pool options.
pub fn w_profile_opts(
    p: OddPrime,
    opts: &SearchOpts,
) -> Result<(WProfile, SearchStats), SearchError> {
    run_profile(p, opts, None, &mut |_, _| {})
}

/// `W(p,L)`: the number of admissible sequences `f(0..L)`.
pub fn count_solutions(
    p: OddPrime,
    l: u32,
    workers: usize,
    split_depth: u32,
) -> Result<u64, SearchError> {
    let opts = SearchOpts {
        workers,
        split_depth,
        x_max: Some(l),
    };
    let (profile, _) = w_profile_opts(p, &opts)?;
    Ok(profile.count(l).expect("column within traversal limit"))
}

/// `L(p)`: the smallest L with `W(p,L) = 1`.
pub fn minimal_length(p: OddPrime) -> Result<u32, SearchError> {
    let profile = w_profile(p, None)?;
    Ok(profile
        .minimal_length()
        .expect("the identity column is always reached"))
}

/// Enumerate the full solutions `f(0..L)` (small counts only).
pub fn solutions(p: OddPrime, l: u32) -> Result<Vec<SolutionPrefix>, SearchError> {
    let limit = check_opts(
        p,
        &SearchOpts {
            x_max: Some(l),
            ..SearchOpts::default()
        },
    )?;
    let ctx = Ctx::new(p);
    let mut out = Vec::new();
    let mut stats = SearchStats::default();
    let mut counts = vec![0u64; limit as usize + 1];
    let prefixes = ctx.collect_prefixes(limit, &mut counts, &mut stats);
    for v in prefixes {
        out.push(SolutionPrefix { p, values: v });
    }
    Ok(out)
}

/// The non-residue witness: `f(0)=0`, `f(u)=1` for `u < n(p)`,
/// a valid non-identity prefix certifying `W(p, n(p)-1) >= 2`.
pub fn lower_bound_witness(p: OddPrime) -> Result<SolutionPrefix, SearchError> {
    let n = crate::ffield::first_nonresidue(p);
    if n <= 2 {
        return Err(SearchError::DegenerateWitness { p: p.value(), n });
    }
    let mut values = vec![1u64; n as usize];
    values[0] = 0;
    let prefix = SolutionPrefix::new(p, values)?;
    debug_assert!(!prefix.is_identity());
    Ok(prefix)
}

/// Resumable state of a split search: the prefixes whose subtrees are
/// already counted, with per-depth counts for depths
/// `split_depth+1 ..= target_x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchCheckpoint {
    pub p: OddPrime,
    pub target_x: u32,
    pub split_depth: u32,
    pub completed: Vec<(Vec<u64>, Vec<u64>)>,
}

impl SearchCheckpoint {
    pub fn empty(p: OddPrime, target_x: u32, split_depth: u32) -> Self {
        SearchCheckpoint {
            p,
            target_x,
            split_depth,
            completed: Vec::new(),
        }
    }

    /// Sum of the completed subtree counts at the target depth.
    pub fn partial_total(&self) -> u64 {
        self.completed
            .iter()
            .map(|(_, c)| c.last().copied().unwrap_or(0))
            .sum()
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if self.split_depth < 2 || self.split_depth >= self.target_x {
            return Err(SearchError::Checkpoint(format!(
                "split depth {} incompatible with target {}",
                self.split_depth, self.target_x
            )));
        }
        let want_len = (self.target_x - self.split_depth) as usize;
        let mut seen = HashSet::new();
        for (prefix, counts) in &self.completed {
            if prefix.len() != self.split_depth as usize + 1 {
                return Err(SearchError::Checkpoint(format!(
                    "prefix {prefix:?} has wrong length for split depth {}",
                    self.split_depth
                )));
            }
            if counts.len() != want_len {
                return Err(SearchError::Checkpoint(format!(
                    "counts for {prefix:?} have length {} (want {want_len})",
                    counts.len()
                )));
            }
            SolutionPrefix::new(self.p, prefix.clone())?;
            if !seen.insert(prefix.clone()) {
                return Err(SearchError::Checkpoint(format!(
                    "duplicate prefix {prefix:?}"
                )));
            }
        }
        Ok(())
    }

    /// Line format: a header `p=<p> x=<target> depth=<d> version=1`
    /// followed by one `prefix=... counts=...` record per completed unit.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "p={} x={} depth={} version=1",
            self.p.value(),
            self.target_x,
            self.split_depth
        );
        for (prefix, counts) in &self.completed {
            let _ = writeln!(s, "{}", Self::record_line(prefix, counts));
        }
        s
    }

    pub fn record_line(prefix: &[u64], counts: &[u64]) -> String {
        format!(
            "prefix={} counts={}",
            join_u64(prefix),
            join_u64(counts)
        )
    }

    pub fn parse(text: &str) -> Result<Self, SearchError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| SearchError::Checkpoint("empty checkpoint".into()))?;
        let mut p = None;
        let mut x = None;
        let mut depth = None;
        let mut version = None;
        for field in header.split_whitespace() {
            let (key, val) = field
                .split_once('=')
                .ok_or_else(|| SearchError::Checkpoint(format!("bad header field {field:?}")))?;
            let n: u64 = val
                .parse()
                .map_err(|_| SearchError::Checkpoint(format!("bad header value {field:?}")))?;
            match key {
                "p" => p = Some(n),
                "x" => x = Some(n as u32),
                "depth" => depth = Some(n as u32),
                "version" => version = Some(n),
                _ => return Err(SearchError::Checkpoint(format!("unknown header key {key}"))),
            }
        }
        if version != Some(1) {
            return Err(SearchError::Checkpoint("unsupported version".into()));
        }
        let p = OddPrime::new(p.ok_or_else(|| SearchError::Checkpoint("missing p".into()))?)?;
        let target_x = x.ok_or_else(|| SearchError::Checkpoint("missing x".into()))?;
        let split_depth = depth.ok_or_else(|| SearchError::Checkpoint("missing depth".into()))?;
        let mut completed = Vec::new();
        for line in lines {
            let line = line.trim();
            let rest = line
                .strip_prefix("prefix=")
                .ok_or_else(|| SearchError::Checkpoint(format!("bad record {line:?}")))?;
            let (prefix_part, counts_part) = rest
                .split_once(" counts=")
                .ok_or_else(|| SearchError::Checkpoint(format!("bad record {line:?}")))?;
            completed.push((parse_u64_list(prefix_part)?, parse_u64_list(counts_part)?));
        }
        let ck = SearchCheckpoint {
            p,
            target_x,
            split_depth,
            completed,
        };
        ck.validate()?;
        Ok(ck)
    }
}

fn join_u64(xs: &[u64]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_u64_list(s: &str) -> Result<Vec<u64>, SearchError> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            t.parse()
                .map_err(|_| SearchError::Checkpoint(format!("bad integer {t:?}")))
        })
        .collect()
}

/// Complete the remaining work units of a checkpoint and return the total
/// `W(p, target_x)`; equal to a fresh `count_solutions` call.
pub fn resume_count(checkpoint: &SearchCheckpoint, workers: usize) -> Result<u64, SearchError> {
    checkpoint.validate()?;
    let opts = SearchOpts {
        workers,
        split_depth: checkpoint.split_depth,
        x_max: Some(checkpoint.target_x),
    };
    let (profile, _) = run_profile(checkpoint.p, &opts, Some(checkpoint), &mut |_, _| {})?;
    Ok(profile
        .count(checkpoint.target_x)
        .expect("column within traversal limit"))
}

/// The driver behind all profile computations. `resume` supplies already
/// completed work units; `on_unit_done` is invoked serially, in a fixed
/// order, for every newly completed unit (prefix, per-depth counts).
pub fn run_profile(
    p: OddPrime,
    opts: &SearchOpts,
    resume: Option<&SearchCheckpoint>,
    on_unit_done: &mut dyn FnMut(&[u64], &[u64]),
) -> Result<(WProfile, SearchStats), SearchError> {
    let limit = check_opts(p, opts)?;
    if let Some(ck) = resume {
        if ck.p != p || ck.target_x != limit || ck.split_depth != opts.split_depth {
            return Err(SearchError::Checkpoint(format!(
                "checkpoint is for p={} x={} depth={}, run wants p={} x={} depth={}",
                ck.p.value(),
                ck.target_x,
                ck.split_depth,
                p.value(),
                limit,
                opts.split_depth
            )));
        }
        ck.validate()?;
    }

    let ctx = Ctx::new(p);
    let mut totals = vec![0u64; limit as usize + 1];
    totals[0] = 1; // f(0..0) = (0)
    let mut stats = SearchStats { visited_nodes: 1, char_tests: 0 };

    if opts.split_depth >= limit {
        // No parallel split possible; one sequential traversal.
        let mut values = vec![0u64, 1];
        ctx.dfs(&mut values, limit, &mut totals[..], &mut stats);
    } else {
        let split = opts.split_depth;
        // The shallow pass fills totals[1..=split] and yields the work units.
        let prefixes =
            ctx.collect_prefixes(split, &mut totals[..=split as usize], &mut stats);

        let done: HashSet<&Vec<u64>> = resume
            .map(|ck| ck.completed.iter().map(|(pr, _)| pr).collect())
            .unwrap_or_default();
        let mut todo = Vec::new();
        for prefix in &prefixes {
            if !done.contains(prefix) {
                todo.push(prefix.clone());
            }
        }
        if let Some(ck) = resume {
            let known: HashSet<&Vec<u64>> = prefixes.iter().collect();
            for (prefix, counts) in &ck.completed {
                if !known.contains(prefix) {
                    return Err(SearchError::Checkpoint(format!(
                        "checkpoint prefix {prefix:?} is not a node of this search"
                    )));
                }
                for (d, &c) in counts.iter().enumerate() {
                    totals[split as usize + 1 + d] += c;
                }
            }
        }

        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers)
            .build()
            .map_err(|e| SearchError::Checkpoint(format!("worker pool: {e}")))?;
        let sub_len = (limit - split) as usize;
        // Batched so that unit-completion callbacks run on this thread,
        // in prefix order, between parallel bursts.
        let batch = (opts.workers * 8).max(16);
        for chunk in todo.chunks(batch) {
            let results: Vec<(Vec<u64>, SearchStats)> = pool.install(|| {
                use rayon::prelude::*;
                chunk
                    .par_iter()
                    .map(|prefix| {
                        let mut counts = vec![0u64; limit as usize + 1];
                        let mut st = SearchStats::default();
                        let mut values = prefix.clone();
                        let mut cands = Vec::new();
                        ctx.extend_into(&values, &mut cands, &mut st);
                        for c in cands {
                            values.push(c);
                            ctx.dfs(&mut values, limit, &mut counts[..], &mut st);
                            values.pop();
                        }
                        (counts[split as usize + 1..].to_vec(), st)
                    })
                    .collect()
            });
            for (prefix, (sub, st)) in chunk.iter().zip(results) {
                debug_assert_eq!(sub.len(), sub_len);
                for (d, &c) in sub.iter().enumerate() {
                    totals[split as usize + 1 + d] += c;
                }
                stats.add(st);
                on_unit_done(prefix, &sub);
            }
        }
    }

    let counts: Vec<u64> = totals[2..].to_vec();
    Ok((WProfile::from_raw(p, counts, limit), stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::odd_primes_in;

    fn p(v: u64) -> OddPrime {
        OddPrime::new(v).unwrap()
    }

    #[test]
    fn extend_candidates_small() {
        let prefix = SolutionPrefix::new(p(5), vec![0, 1]).unwrap();
        assert_eq!(extend_candidates(&prefix), vec![0, 2]);
        let prefix = SolutionPrefix::new(p(7), vec![0, 1]).unwrap();
        assert_eq!(extend_candidates(&prefix).len(), 2);
    }

    #[test]
    fn prefix_validation() {
        assert!(SolutionPrefix::new(p(5), vec![0, 1, 2]).is_ok());
        assert!(SolutionPrefix::new(p(5), vec![1, 1]).is_err());
        assert!(SolutionPrefix::new(p(5), vec![0, 2]).is_err());
        // (3-0)/2 = 4 is a square mod 5 but (3-1)/1 = 2 is not
        assert!(SolutionPrefix::new(p(5), vec![0, 1, 3]).is_err());
    }

    #[test]
    fn count_solutions_table_rows() {
        assert_eq!(count_solutions(p(5), 2, 1, 2).unwrap(), 2);
        assert_eq!(count_solutions(p(11), 4, 1, 3).unwrap(), 10);
        assert_eq!(count_solutions(p(13), 5, 1, 3).unwrap(), 1);
    }

    #[test]
    fn profiles_match_table_rows() {
        let prof = w_profile(p(7), None).unwrap();
        assert_eq!(
            prof.columns().collect::<Vec<_>>(),
            vec![(2, 2), (3, 3), (4, 1)]
        );
        assert!(prof.stabilized());

        let prof = w_profile(p(11), None).unwrap();
        assert_eq!(
            prof.columns().collect::<Vec<_>>(),
            vec![(2, 3), (3, 6), (4, 10), (5, 3), (6, 1)]
        );

        let prof = w_profile(p(5), None).unwrap();
        assert_eq!(prof.columns().collect::<Vec<_>>(), vec![(2, 2), (3, 1)]);
    }

    #[test]
    fn minimal_length_examples() {
        assert_eq!(minimal_length(p(5)).unwrap(), 3);
        assert_eq!(minimal_length(p(7)).unwrap(), 4);
        assert_eq!(minimal_length(p(11)).unwrap(), 6);
        assert_eq!(minimal_length(p(13)).unwrap(), 5);
    }

    #[test]
    fn w2_closed_form() {
        for pr in odd_primes_in(3, 499) {
            let w2 = count_solutions(pr, 2, 1, 2).unwrap();
            assert_eq!(w2, pr.value() / 4 + 1, "p={}", pr.value());
        }
    }

    #[test]
    fn brute_force_oracle() {
        // enumerate all p^(L-1) assignments directly
        for &pv in &[5u64, 7, 11, 13] {
            let pr = p(pv);
            let table = SquareTable::new(pr);
            let inv: Vec<u64> = (0..pv).map(|d| if d == 0 { 0 } else { mod_inv(d, pr) }).collect();
            for l in 2..pv.min(6) as u32 {
                let free = (l - 1) as u32;
                let mut brute = 0u64;
                let total = pv.pow(free);
                'assign: for mut m in 0..total {
                    let mut vals = vec![0u64, 1];
                    for _ in 0..free {
                        vals.push(m % pv);
                        m /= pv;
                    }
                    for j in 1..vals.len() {
                        for i in 0..j {
                            let diff = (vals[j] + pv - vals[i]) % pv;
                            if !table.is_square(diff * inv[j - i] % pv) {
                                continue 'assign;
                            }
                        }
                    }
                    brute += 1;
                }
                assert_eq!(
                    count_solutions(pr, l, 1, 2).unwrap(),
                    brute,
                    "p={pv} L={l}"
                );
            }
        }
    }

    #[test]
    fn determinism_over_workers_and_split() {
        for pr in odd_primes_in(5, 53) {
            let reference = w_profile(pr, None).unwrap();
            for workers in [1usize, 2, 4, 8] {
                for split in [2u32, 3, 4] {
                    let opts = SearchOpts {
                        workers,
                        split_depth: split,
                        x_max: None,
                    };
                    let (prof, _) = w_profile_opts(pr, &opts).unwrap();
                    assert_eq!(prof, reference, "p={} w={workers} d={split}", pr.value());
                }
            }
        }
    }

    #[test]
    fn unique_solution_is_identity() {
        for &pv in &[5u64, 7, 11, 13, 17, 19, 23] {
            let pr = p(pv);
            let l = minimal_length(pr).unwrap();
            let sols = solutions(pr, l).unwrap();
            assert_eq!(sols.len(), 1);
            assert!(sols[0].is_identity());
        }
    }

    #[test]
    fn witness_examples() {
        let w = lower_bound_witness(p(7)).unwrap();
        assert_eq!(w.values(), &[0, 1, 1]);
        assert!(!w.is_identity());
        let w = lower_bound_witness(p(17)).unwrap();
        assert_eq!(w.values(), &[0, 1, 1]);
        assert!(matches!(
            lower_bound_witness(p(5)),
            Err(SearchError::DegenerateWitness { .. })
        ));
    }

    #[test]
    fn witness_certifies_lower_bound() {
        // n(p) <= L(p) for computed L
        for pr in odd_primes_in(5, 150) {
            let n = crate::ffield::first_nonresidue(pr);
            if n <= 2 {
                continue;
            }
            let witness = lower_bound_witness(pr).unwrap();
            assert_eq!(witness.last_index() as u64, n - 1);
            let l = minimal_length(pr).unwrap();
            assert!(n <= l as u64, "p={} n={} L={}", pr.value(), n, l);
        }
    }

    #[test]
    fn checkpoint_round_trip() {
        let pr = p(11);
        let mut ck = SearchCheckpoint::empty(pr, 4, 3);
        run_profile(
            pr,
            &SearchOpts {
                workers: 1,
                split_depth: 3,
                x_max: Some(4),
            },
            None,
            &mut |prefix, counts| ck.completed.push((prefix.to_vec(), counts.to_vec())),
        )
        .unwrap();
        let text = ck.serialize();
        let back = SearchCheckpoint::parse(&text).unwrap();
        assert_eq!(back, ck);
        assert_eq!(back.serialize(), text);
    }

    #[test]
    fn resume_from_empty_and_full() {
        let pr = p(11);
        let empty = SearchCheckpoint::empty(pr, 4, 3);
        assert_eq!(resume_count(&empty, 2).unwrap(), 10);

        let mut full = SearchCheckpoint::empty(pr, 4, 3);
        run_profile(
            pr,
            &SearchOpts {
                workers: 1,
                split_depth: 3,
                x_max: Some(4),
            },
            None,
            &mut |prefix, counts| full.completed.push((prefix.to_vec(), counts.to_vec())),
        )
        .unwrap();
        // stored subtree counts alone already sum to W(11,4)
        assert_eq!(full.partial_total(), 10);
        assert_eq!(resume_count(&full, 2).unwrap(), 10);
    }

    #[test]
    fn resume_after_interrupt_matches_fresh() {
        let pr = p(31);
        let target = 6;
        let mut all = SearchCheckpoint::empty(pr, target, 3);
        run_profile(
            pr,
            &SearchOpts {
                workers: 2,
                split_depth: 3,
                x_max: Some(target),
            },
            None,
            &mut |prefix, counts| all.completed.push((prefix.to_vec(), counts.to_vec())),
        )
        .unwrap();
        // pretend the run died halfway
        let mut half = all.clone();
        half.completed.truncate(half.completed.len() / 2);
        let fresh = count_solutions(pr, target, 1, 3).unwrap();
        assert_eq!(resume_count(&half, 4).unwrap(), fresh);
    }

    #[test]
    fn checkpoint_rejects_corruption() {
        assert!(SearchCheckpoint::parse("").is_err());
        assert!(SearchCheckpoint::parse("p=11 x=4 depth=3 version=2\n").is_err());
        // invalid prefix (not starting 0,1)
        let bad = "p=11 x=4 depth=3 version=1\nprefix=1,1,2,3 counts=5\n";
        assert!(SearchCheckpoint::parse(bad).is_err());
        // prefix that is no node of the search
        let pr = p(11);
        let alien = SearchCheckpoint {
            p: pr,
            target_x: 4,
            split_depth: 3,
            completed: vec![(vec![0, 1, 2, 3], vec![99])],
        };
        // (0,1,2,3) is the identity prefix and a real node, so counts must
        // simply be wrong-length-checked; use a fake valid-but-absent one
        assert!(alien.validate().is_ok());
        let wrong_target = SearchCheckpoint {
            target_x: 10,
            ..alien.clone()
        };
        assert!(wrong_target.validate().is_err());
    }

    #[test]
    fn visited_node_accounting() {
        // char-test counter stays within 4x of sum over x of p*x*W(p,x)
        for &pv in &[11u64, 23, 31, 53] {
            let pr = p(pv);
            let (prof, stats) = w_profile_opts(pr, &SearchOpts::default()).unwrap();
            let bound: u64 = (2..=prof.count_limit())
                .map(|x| pv * x as u64 * prof.count(x).unwrap())
                .sum();
            assert!(
                stats.char_tests <= 4 * bound,
                "p={pv}: {} > 4*{bound}",
                stats.char_tests
            );
        }
    }
}
