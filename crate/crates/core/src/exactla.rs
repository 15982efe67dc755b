//! Exact scalars and sparse linear algebra over ℚ, with a multi-prime
//! modular shortcut for large ranks.
//!
//! Matrices are stored column-major because every caller builds them as a
//! list of image vectors. Ranks are computed by inserting columns one at a
//! time into an echelon whose pivot is the lowest remaining row index of
//! each reduced column; the tie-break is therefore lowest (row, col) and the
//! result does not depend on thread scheduling.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational scalar, always in lowest terms with positive denominator.
pub type Scalar = BigRational;

/// Sparse column: (row, value) pairs sorted by row, no explicit zeros.
pub type SparseVec = Vec<(usize, Scalar)>;

/// Hard cap on stored entries before elimination refuses to start.
pub const WORKSPACE_LIMIT: usize = 1 << 31;

pub fn int(v: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(v))
}

pub fn frac(n: i64, d: i64) -> Scalar {
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    cols: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrix {
            nrows,
            ncols,
            cols: vec![Vec::new(); ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let cols = (0..n).map(|i| vec![(i, Scalar::one())]).collect();
        SparseMatrix {
            nrows: n,
            ncols: n,
            cols,
        }
    }

    /// Builds a matrix from coordinate triplets. Repeated coordinates are
    /// rejected; zero values are dropped.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        entries: impl IntoIterator<Item = (usize, usize, Scalar)>,
    ) -> Result<Self> {
        let mut cols: Vec<SparseVec> = vec![Vec::new(); ncols];
        for (r, c, v) in entries {
            if r >= nrows || c >= ncols {
                return Err(Error::contract(format!(
                    "entry ({r}, {c}) outside a {nrows}x{ncols} matrix"
                )));
            }
            if !v.is_zero() {
                cols[c].push((r, v));
            }
        }
        for (c, col) in cols.iter_mut().enumerate() {
            col.sort_by_key(|(r, _)| *r);
            if col.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::contract(format!(
                    "duplicate coordinate in column {c}"
                )));
            }
        }
        Ok(SparseMatrix { nrows, ncols, cols })
    }

    /// Builds a matrix from sparse columns; entries of a column are summed
    /// per row and zeros removed.
    pub fn from_columns(nrows: usize, columns: Vec<SparseVec>) -> Result<Self> {
        let ncols = columns.len();
        let mut cols = Vec::with_capacity(ncols);
        for col in columns {
            cols.push(normalize_vec(nrows, col)?);
        }
        Ok(SparseMatrix { nrows, ncols, cols })
    }

    pub fn from_dense_i64(rows: &[Vec<i64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut cols = vec![Vec::new(); ncols];
        for (r, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                if v != 0 {
                    cols[c].push((r, int(v)));
                }
            }
        }
        SparseMatrix { nrows, ncols, cols }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn column(&self, c: usize) -> &[(usize, Scalar)] {
        &self.cols[c]
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.cols
    }

    pub fn push_column(&mut self, col: SparseVec) -> Result<()> {
        let col = normalize_vec(self.nrows, col)?;
        self.cols.push(col);
        self.ncols += 1;
        Ok(())
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        self.cols[c]
            .binary_search_by_key(&r, |(row, _)| *row)
            .map(|i| self.cols[c][i].1.clone())
            .unwrap_or_else(|_| Scalar::zero())
    }

    /// Iterates over (row, col, value) in column-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.cols
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |(r, v)| (*r, c, v)))
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut cols = vec![Vec::new(); self.nrows];
        for (r, c, v) in self.triplets() {
            cols[r].push((c, v.clone()));
        }
        SparseMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            cols,
        }
    }

    pub fn mul_vec(&self, x: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(x.len(), self.ncols, "vector length must match column count");
        let mut out = vec![Scalar::zero(); self.nrows];
        for (c, col) in self.cols.iter().enumerate() {
            if x[c].is_zero() {
                continue;
            }
            for (r, v) in col {
                out[*r] += v * &x[c];
            }
        }
        out
    }

    fn check_workspace(&self) -> Result<()> {
        let nnz = self.nnz();
        if nnz > WORKSPACE_LIMIT || self.nrows > WORKSPACE_LIMIT || self.ncols > WORKSPACE_LIMIT {
            return Err(Error::Resource(format!(
                "elimination workspace too large: {}x{} with {nnz} entries",
                self.nrows, self.ncols
            )));
        }
        Ok(())
    }
}

fn normalize_vec(nrows: usize, mut col: SparseVec) -> Result<SparseVec> {
    col.sort_by_key(|(r, _)| *r);
    let mut out: SparseVec = Vec::with_capacity(col.len());
    for (r, v) in col {
        if r >= nrows {
            return Err(Error::contract(format!("row {r} outside {nrows} rows")));
        }
        match out.last_mut() {
            Some((lr, lv)) if *lr == r => *lv += v,
            _ => out.push((r, v)),
        }
    }
    out.retain(|(_, v)| !v.is_zero());
    Ok(out)
}

/// Converts a dense vector to sparse form.
pub fn sparse_from_dense(v: &[Scalar]) -> SparseVec {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModularConfig {
    primes: Vec<u64>,
    agreement_count: usize,
}

impl ModularConfig {
    pub fn new(primes: Vec<u64>, agreement_count: usize) -> Result<Self> {
        if agreement_count < 2 {
            return Err(Error::contract("agreement_count must be at least 2"));
        }
        if primes.len() < agreement_count {
            return Err(Error::contract("fewer primes than agreement_count"));
        }
        let mut seen = primes.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != primes.len() {
            return Err(Error::contract("primes must be distinct"));
        }
        for &p in &primes {
            if p <= 1 << 20 || p >= 1 << 31 || !is_prime(p) {
                return Err(Error::contract(format!(
                    "{p} is not a prime in (2^20, 2^31)"
                )));
            }
        }
        Ok(ModularConfig {
            primes,
            agreement_count,
        })
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn agreement_count(&self) -> usize {
        self.agreement_count
    }
}

impl Default for ModularConfig {
    fn default() -> Self {
        ModularConfig {
            primes: vec![2_147_483_647, 2_147_483_629, 2_147_483_587],
            agreement_count: 2,
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// How ranks are computed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum RankMode {
    Exact,
    Modular(ModularConfig),
    /// Exact up to `threshold` rows/columns, modular above.
    Auto {
        threshold: usize,
        config: ModularConfig,
    },
}

impl Default for RankMode {
    fn default() -> Self {
        RankMode::Auto {
            threshold: 2000,
            config: ModularConfig::default(),
        }
    }
}

impl RankMode {
    fn resolve(&self, nrows: usize, ncols: usize) -> Option<&ModularConfig> {
        match self {
            RankMode::Exact => None,
            RankMode::Modular(c) => Some(c),
            RankMode::Auto { threshold, config } => {
                if nrows.max(ncols) > *threshold {
                    Some(config)
                } else {
                    None
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankOutcome {
    pub rank: usize,
    /// True when computed over ℚ.
    pub exact: bool,
    /// True for modular results without enough agreeing primes.
    pub probabilistic: bool,
    pub per_prime: Vec<(u64, usize)>,
}

/// Ranks of the column prefixes `[0, checkpoint)` for each checkpoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrefixRanks {
    pub ranks: Vec<usize>,
    pub exact: bool,
    pub probabilistic: bool,
    /// Per prime, the rank at each checkpoint.
    pub per_prime: Vec<(u64, Vec<usize>)>,
}

pub fn rank(m: &SparseMatrix, mode: &RankMode) -> Result<RankOutcome> {
    let pr = prefix_ranks(m, &[m.ncols()], mode)?;
    Ok(RankOutcome {
        rank: pr.ranks[0],
        exact: pr.exact,
        probabilistic: pr.probabilistic,
        per_prime: pr.per_prime.into_iter().map(|(p, r)| (p, r[0])).collect(),
    })
}

/// Computes the rank of every column prefix named in `checkpoints`
/// (non-decreasing column counts) with a single elimination pass.
pub fn prefix_ranks(
    m: &SparseMatrix,
    checkpoints: &[usize],
    mode: &RankMode,
) -> Result<PrefixRanks> {
    m.check_workspace()?;
    if checkpoints.windows(2).any(|w| w[0] > w[1]) || checkpoints.iter().any(|&c| c > m.ncols()) {
        return Err(Error::contract(
            "checkpoints must be non-decreasing column counts",
        ));
    }
    match mode.resolve(m.nrows(), m.ncols()) {
        None => {
            let mut ech = IntegerEchelon::new(m.nrows());
            let ranks = run_checkpoints(m, checkpoints, &mut ech);
            Ok(PrefixRanks {
                ranks,
                exact: true,
                probabilistic: false,
                per_prime: Vec::new(),
            })
        }
        Some(cfg) => {
            let per_prime: Vec<(u64, Vec<usize>)> = cfg
                .primes()
                .par_iter()
                .map(|&p| {
                    let mut ech = ModEchelon::new(m.nrows(), p);
                    let ranks = run_checkpoints(m, checkpoints, &mut ech);
                    (p, ranks)
                })
                .collect();
            // rank mod p never exceeds the rank over ℚ, so the maximum is the best estimate
            let best = per_prime
                .iter()
                .map(|(_, r)| r.clone())
                .max()
                .unwrap_or_default();
            let agreeing = per_prime.iter().filter(|(_, r)| *r == best).count();
            Ok(PrefixRanks {
                ranks: best,
                exact: false,
                probabilistic: agreeing < cfg.agreement_count(),
                per_prime,
            })
        }
    }
}

/// Column-at-a-time rank accumulator.
pub trait Echelon {
    fn insert_rational(&mut self, v: &[(usize, Scalar)]) -> bool;
    fn rank(&self) -> usize;
}

impl Echelon for IntegerEchelon {
    fn insert_rational(&mut self, v: &[(usize, Scalar)]) -> bool {
        IntegerEchelon::insert_rational(self, v)
    }
    fn rank(&self) -> usize {
        IntegerEchelon::rank(self)
    }
}

impl Echelon for ModEchelon {
    fn insert_rational(&mut self, v: &[(usize, Scalar)]) -> bool {
        ModEchelon::insert_rational(self, v)
    }
    fn rank(&self) -> usize {
        ModEchelon::rank(self)
    }
}

fn run_checkpoints(m: &SparseMatrix, checkpoints: &[usize], ech: &mut impl Echelon) -> Vec<usize> {
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next = 0;
    for &cp in checkpoints {
        while next < cp {
            ech.insert_rational(m.column(next));
            next += 1;
        }
        out.push(ech.rank());
    }
    out
}

pub fn rank_exact(m: &SparseMatrix) -> Result<usize> {
    Ok(rank(m, &RankMode::Exact)?.rank)
}

pub fn rank_mod_p(m: &SparseMatrix, p: u64) -> usize {
    let mut ech = ModEchelon::new(m.nrows(), p);
    for col in m.columns() {
        ech.insert_rational(col);
    }
    ech.rank()
}

/// Row indices whose standard basis vectors complete the column span of `m`
/// to the whole row space. The count equals `nrows - rank`.
pub fn cokernel_basis(m: &SparseMatrix) -> Result<Vec<usize>> {
    m.check_workspace()?;
    let mut ech = RationalEchelon::new(m.nrows());
    for col in m.columns() {
        ech.insert(col.clone());
    }
    Ok(ech.non_pivots())
}

/// Solves `m · c = v`; `None` when `v` is outside the column span.
pub fn in_span(m: &SparseMatrix, v: &[Scalar]) -> Result<Option<Vec<Scalar>>> {
    if v.len() != m.nrows() {
        return Err(Error::contract(format!(
            "vector of length {} against a matrix with {} rows",
            v.len(),
            m.nrows()
        )));
    }
    m.check_workspace()?;
    let mut ech = RationalEchelon::with_tracking(m.nrows());
    for col in m.columns() {
        ech.insert(col.clone());
    }
    Ok(ech.solve(&sparse_from_dense(v)).map(|combo| {
        let mut c = vec![Scalar::zero(); m.ncols()];
        for (j, x) in combo {
            c[j] = x;
        }
        c
    }))
}

/// Echelon over ℚ with pivots normalized to one. Optionally records, for each
/// stored vector, its expression in terms of the inserted vectors.
#[derive(Debug, Clone)]
pub struct RationalEchelon {
    dim: usize,
    pivot_of_row: Vec<Option<usize>>,
    rows: Vec<SparseVec>,
    combos: Option<Vec<SparseVec>>,
    inserted: usize,
}

impl RationalEchelon {
    pub fn new(dim: usize) -> Self {
        RationalEchelon {
            dim,
            pivot_of_row: vec![None; dim],
            rows: Vec::new(),
            combos: None,
            inserted: 0,
        }
    }

    pub fn with_tracking(dim: usize) -> Self {
        RationalEchelon {
            combos: Some(Vec::new()),
            ..RationalEchelon::new(dim)
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, row: usize) -> bool {
        self.pivot_of_row[row].is_some()
    }

    pub fn non_pivots(&self) -> Vec<usize> {
        (0..self.dim)
            .filter(|&r| self.pivot_of_row[r].is_none())
            .collect()
    }

    /// Inserts a vector; returns true when it enlarged the span.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let idx = self.inserted;
        self.inserted += 1;
        let mut combo: SparseVec = vec![(idx, Scalar::one())];
        let tracking = self.combos.is_some();
        let mut v = v;
        loop {
            let Some((r, a)) = v.first().cloned() else {
                return false;
            };
            match self.pivot_of_row[r] {
                Some(b) => {
                    v = axpy(&v, &(-&a), &self.rows[b]);
                    if tracking {
                        let bc = &self.combos.as_ref().unwrap()[b];
                        combo = axpy(&combo, &(-&a), bc);
                    }
                }
                None => {
                    let inv = a.recip();
                    let v: SparseVec = v.into_iter().map(|(i, x)| (i, x * &inv)).collect();
                    if let Some(combos) = self.combos.as_mut() {
                        combos.push(combo.into_iter().map(|(i, x)| (i, x * &inv)).collect());
                    }
                    self.pivot_of_row[r] = Some(self.rows.len());
                    self.rows.push(v);
                    return true;
                }
            }
        }
    }

    /// Reduces `v` until no pivot coordinate remains; the result is the
    /// normal form of `v` modulo the span, supported on non-pivot rows.
    pub fn reduce(&self, v: &[(usize, Scalar)]) -> SparseVec {
        self.reduce_tracked(v, false).0
    }

    fn reduce_tracked(&self, v: &[(usize, Scalar)], track: bool) -> (SparseVec, SparseVec) {
        let mut v: SparseVec = v.to_vec();
        let mut used: SparseVec = Vec::new();
        let mut cursor = 0;
        loop {
            let hit = v
                .iter()
                .skip(cursor)
                .position(|(r, _)| self.pivot_of_row[*r].is_some())
                .map(|p| p + cursor);
            let Some(pos) = hit else { break };
            let (r, a) = v[pos].clone();
            let b = self.pivot_of_row[r].unwrap();
            v = axpy(&v, &(-&a), &self.rows[b]);
            if track {
                let bc = &self.combos.as_ref().expect("tracking enabled")[b];
                used = axpy(&used, &a, bc);
            }
            cursor = pos;
        }
        (v, used)
    }

    /// Expresses `v` in terms of the inserted vectors, when possible.
    pub fn solve(&self, v: &[(usize, Scalar)]) -> Option<SparseVec> {
        assert!(self.combos.is_some(), "solve needs a tracking echelon");
        let (rest, used) = self.reduce_tracked(v, true);
        rest.is_empty().then_some(used)
    }

    pub fn contains(&self, v: &[(usize, Scalar)]) -> bool {
        self.reduce(v).is_empty()
    }
}

/// `x + a·y` on sorted sparse vectors.
pub fn axpy(x: &[(usize, Scalar)], a: &Scalar, y: &[(usize, Scalar)]) -> SparseVec {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take_x = j >= y.len() || (i < x.len() && x[i].0 < y[j].0);
        let take_y = i >= x.len() || (j < y.len() && y[j].0 < x[i].0);
        if take_x {
            out.push(x[i].clone());
            i += 1;
        } else if take_y {
            out.push((y[j].0, a * &y[j].1));
            j += 1;
        } else {
            let s = &x[i].1 + a * &y[j].1;
            if !s.is_zero() {
                out.push((x[i].0, s));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Fraction-free echelon over ℤ: every stored vector is primitive (content
/// one) and reductions cross-multiply by the pivot instead of dividing.
#[derive(Debug, Clone)]
pub struct IntegerEchelon {
    pivot_of_row: Vec<Option<usize>>,
    rows: Vec<Vec<(usize, BigInt)>>,
}

impl IntegerEchelon {
    pub fn new(dim: usize) -> Self {
        IntegerEchelon {
            pivot_of_row: vec![None; dim],
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn insert_rational(&mut self, v: &[(usize, Scalar)]) -> bool {
        let lcm = v
            .iter()
            .fold(BigInt::one(), |acc, (_, x)| acc.lcm(x.denom()));
        let iv: Vec<(usize, BigInt)> = v
            .iter()
            .map(|(r, x)| (*r, x.numer() * (&lcm / x.denom())))
            .collect();
        self.insert(iv)
    }

    pub fn insert(&mut self, v: Vec<(usize, BigInt)>) -> bool {
        let mut v = make_primitive(v);
        loop {
            let Some((r, a)) = v.first().cloned() else {
                return false;
            };
            match self.pivot_of_row[r] {
                Some(b) => {
                    let row = &self.rows[b];
                    let p = &row[0].1;
                    let g = a.gcd(p);
                    let sv = p / &g;
                    let sr = &a / &g;
                    v = make_primitive(int_combine(&v, &sv, row, &sr));
                }
                None => {
                    if a.is_negative() {
                        for (_, x) in v.iter_mut() {
                            *x = -&*x;
                        }
                    }
                    self.pivot_of_row[r] = Some(self.rows.len());
                    self.rows.push(v);
                    return true;
                }
            }
        }
    }
}

/// `sx·x − sy·y`.
fn int_combine(
    x: &[(usize, BigInt)],
    sx: &BigInt,
    y: &[(usize, BigInt)],
    sy: &BigInt,
) -> Vec<(usize, BigInt)> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let take_x = j >= y.len() || (i < x.len() && x[i].0 < y[j].0);
        let take_y = i >= x.len() || (j < y.len() && y[j].0 < x[i].0);
        if take_x {
            out.push((x[i].0, sx * &x[i].1));
            i += 1;
        } else if take_y {
            out.push((y[j].0, -(sy * &y[j].1)));
            j += 1;
        } else {
            let s = sx * &x[i].1 - sy * &y[j].1;
            if !s.is_zero() {
                out.push((x[i].0, s));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn make_primitive(mut v: Vec<(usize, BigInt)>) -> Vec<(usize, BigInt)> {
    let mut g = BigInt::zero();
    for (_, x) in &v {
        g = g.gcd(x);
        if g.is_one() {
            return v;
        }
    }
    if !g.is_zero() {
        for (_, x) in v.iter_mut() {
            *x = &*x / &g;
        }
    }
    v
}

/// Echelon over 𝔽_p with pivots normalized to one.
#[derive(Debug, Clone)]
pub struct ModEchelon {
    p: u64,
    pivot_of_row: Vec<Option<usize>>,
    rows: Vec<Vec<(usize, u64)>>,
}

impl ModEchelon {
    pub fn new(dim: usize, p: u64) -> Self {
        ModEchelon {
            p,
            pivot_of_row: vec![None; dim],
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn insert_rational(&mut self, v: &[(usize, Scalar)]) -> bool {
        let p = self.p;
        let mv: Vec<(usize, u64)> = v
            .iter()
            .filter_map(|(r, x)| {
                let m = scalar_mod(x, p)?;
                (m != 0).then_some((*r, m))
            })
            .collect();
        self.insert(mv)
    }

    pub fn insert(&mut self, mut v: Vec<(usize, u64)>) -> bool {
        let p = self.p;
        loop {
            let Some(&(r, a)) = v.first() else {
                return false;
            };
            match self.pivot_of_row[r] {
                Some(b) => {
                    // v ← v − a·row, row has pivot 1
                    let neg = p - a;
                    v = mod_axpy(&v, neg, &self.rows[b], p);
                }
                None => {
                    let inv = mod_pow(a, p - 2, p);
                    for (_, x) in v.iter_mut() {
                        *x = *x * inv % p;
                    }
                    self.pivot_of_row[r] = Some(self.rows.len());
                    self.rows.push(v);
                    return true;
                }
            }
        }
    }
}

fn mod_axpy(x: &[(usize, u64)], a: u64, y: &[(usize, u64)], p: u64) -> Vec<(usize, u64)> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        if j >= y.len() || (i < x.len() && x[i].0 < y[j].0) {
            out.push(x[i]);
            i += 1;
        } else if i >= x.len() || y[j].0 < x[i].0 {
            out.push((y[j].0, a * y[j].1 % p));
            j += 1;
        } else {
            let s = (x[i].1 + a * y[j].1) % p;
            if s != 0 {
                out.push((x[i].0, s));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Reduces a rational modulo `p`; `None` when the denominator vanishes mod p.
pub fn scalar_mod(x: &Scalar, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let n = x.numer().mod_floor(&pb).to_u64()?;
    let d = x.denom().mod_floor(&pb).to_u64()?;
    if d == 0 {
        return None;
    }
    Some(n * mod_pow(d, p - 2, p) % p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn random_pm1(n: usize, density: f64, seed: u64) -> SparseMatrix {
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let mut rows = vec![vec![0i64; n]; n];
        for row in rows.iter_mut() {
            for x in row.iter_mut() {
                if rng.gen_bool(density) {
                    *x = if rng.gen_bool(0.5) { 1 } else { -1 };
                }
            }
        }
        SparseMatrix::from_dense_i64(&rows)
    }

    /// Dense Gaussian elimination over ℚ, kept independent of the echelon code.
    fn dense_rank(m: &SparseMatrix) -> usize {
        let mut a: Vec<Vec<Scalar>> = (0..m.nrows())
            .map(|r| (0..m.ncols()).map(|c| m.get(r, c)).collect())
            .collect();
        let mut rank = 0;
        for c in 0..m.ncols() {
            let Some(p) = (rank..a.len()).find(|&r| !a[r][c].is_zero()) else {
                continue;
            };
            a.swap(rank, p);
            for r in 0..a.len() {
                if r != rank && !a[r][c].is_zero() {
                    let f = &a[r][c] / &a[rank][c];
                    let pivot = a[rank].clone();
                    for (x, y) in a[r].iter_mut().zip(&pivot).skip(c) {
                        *x -= &f * y;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn identity_has_full_rank() {
        assert_eq!(rank_exact(&SparseMatrix::identity(2)).unwrap(), 2);
    }

    #[test]
    fn proportional_rows_have_rank_one() {
        let m = SparseMatrix::from_dense_i64(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(rank_exact(&m).unwrap(), 1);
    }

    #[test]
    fn random_50x50_exact_matches_three_primes() {
        let m = random_pm1(50, 0.08, 7);
        let exact = rank_exact(&m).unwrap();
        assert_eq!(exact, dense_rank(&m));
        let out = rank(&m, &RankMode::Modular(ModularConfig::default())).unwrap();
        assert_eq!(out.rank, exact);
        assert!(!out.probabilistic);
        assert!(out.per_prime.iter().all(|(_, r)| *r == exact));
    }

    #[test]
    fn auto_mode_switches_on_size() {
        let m = SparseMatrix::identity(3);
        let out = rank(
            &m,
            &RankMode::Auto {
                threshold: 2,
                config: ModularConfig::default(),
            },
        )
        .unwrap();
        assert!(!out.exact);
        let out = rank(&m, &RankMode::default()).unwrap();
        assert!(out.exact);
    }

    #[test]
    fn modular_config_validation() {
        assert!(ModularConfig::new(vec![2_147_483_647, 2_147_483_629], 1).is_err());
        assert!(ModularConfig::new(vec![2_147_483_647, 2_147_483_647], 2).is_err());
        assert!(ModularConfig::new(vec![1009, 2_147_483_647], 2).is_err());
        assert!(ModularConfig::new(vec![2_147_483_647, 2_147_483_629], 2).is_ok());
    }

    #[test]
    fn cokernel_examples() {
        let z = SparseMatrix::zeros(3, 3);
        assert_eq!(cokernel_basis(&z).unwrap(), vec![0, 1, 2]);
        assert!(cokernel_basis(&SparseMatrix::identity(3))
            .unwrap()
            .is_empty());
        let m = SparseMatrix::from_dense_i64(&[vec![1], vec![1], vec![0]]);
        let cb = cokernel_basis(&m).unwrap();
        assert_eq!(cb.len(), 2);
        // the complement together with (1,1,0) must span ℚ³
        let mut cols: Vec<SparseVec> = vec![vec![(0, int(1)), (1, int(1))]];
        cols.extend(cb.iter().map(|&i| vec![(i, int(1))]));
        let full = SparseMatrix::from_columns(3, cols).unwrap();
        assert_eq!(rank_exact(&full).unwrap(), 3);
    }

    #[test]
    fn in_span_examples() {
        let m = SparseMatrix::from_dense_i64(&[vec![1, 1], vec![1, -1]]);
        assert_eq!(
            in_span(&m, &[int(2), int(0)]).unwrap(),
            Some(vec![int(1), int(1)])
        );
        assert_eq!(
            in_span(&m, &[int(0), int(0)]).unwrap(),
            Some(vec![int(0), int(0)])
        );
        let id = SparseMatrix::identity(3);
        let v = vec![frac(1, 3), int(-4), int(7)];
        assert_eq!(in_span(&id, &v).unwrap(), Some(v.clone()));
        let m = SparseMatrix::from_dense_i64(&[vec![1], vec![1]]);
        assert_eq!(in_span(&m, &[int(1), int(0)]).unwrap(), None);
        assert!(matches!(in_span(&m, &[int(1)]), Err(Error::Contract(_))));
    }

    #[test]
    fn triplet_errors() {
        assert!(SparseMatrix::from_triplets(2, 2, vec![(2, 0, int(1))]).is_err());
        assert!(SparseMatrix::from_triplets(2, 2, vec![(0, 0, int(1)), (0, 0, int(2))]).is_err());
    }

    #[test]
    fn prefix_ranks_are_monotone() {
        let m = random_pm1(30, 0.1, 3);
        let cps: Vec<usize> = (0..=30).step_by(5).collect();
        let pr = prefix_ranks(&m, &cps, &RankMode::Exact).unwrap();
        assert!(pr.ranks.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(*pr.ranks.last().unwrap(), rank_exact(&m).unwrap());
    }

    #[test]
    fn scalar_mod_inverts_denominators() {
        let p = 2_147_483_647;
        let x = scalar_mod(&frac(1, 3), p).unwrap();
        assert_eq!(x * 3 % p, 1);
        assert_eq!(scalar_mod(&int(-1), p), Some(p - 1));
    }

    fn small_matrix() -> impl Strategy<Value = SparseMatrix> {
        (1usize..8, 1usize..8).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(-3i64..=3, c), r)
                .prop_map(|rows| SparseMatrix::from_dense_i64(&rows))
        })
    }

    proptest! {
        #[test]
        fn rank_equals_transpose_rank(m in small_matrix()) {
            prop_assert_eq!(rank_exact(&m).unwrap(), rank_exact(&m.transpose()).unwrap());
            prop_assert_eq!(rank_exact(&m).unwrap(), dense_rank(&m));
        }

        #[test]
        fn modular_rank_never_exceeds_exact(m in small_matrix()) {
            let exact = rank_exact(&m).unwrap();
            for &p in ModularConfig::default().primes() {
                prop_assert!(rank_mod_p(&m, p) <= exact);
            }
        }

        #[test]
        fn cokernel_plus_rank_is_target_dim(m in small_matrix()) {
            prop_assert_eq!(cokernel_basis(&m).unwrap().len() + rank_exact(&m).unwrap(), m.nrows());
        }

        #[test]
        fn in_span_reproduces_vector(m in small_matrix(), seed in 0u64..1000) {
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            let x: Vec<Scalar> = (0..m.ncols()).map(|_| int(rng.gen_range(-3..=3))).collect();
            let v = m.mul_vec(&x);
            let c = in_span(&m, &v).unwrap().expect("image vector must be in span");
            prop_assert_eq!(m.mul_vec(&c), v);
        }
    }
}
