//! Truncated dimensions of the coinvariant space R·e^f / ĝ(R·e^f).
//!
//! Q_D = R_{≤D} / span{ (Z*(x) + Z*(x)f − β(x))φ : φ ∈ R_r, r ≤ D−1 }.
//! When f has torus weight zero the image splits by weight and only the
//! weight-zero block can carry coinvariants.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::{
    prefix_ranks, rank, RankMode, RationalEchelon, Scalar, SparseMatrix, SparseVec,
};
use crate::graphcalc::{straighten, Rank1Outcome, ReductionTrace, StepRule};
use crate::models::{
    action_on, generator_on_section, graph_sum_to_polynomial, is_weight_zero, lie_basis,
    torus_weight, BlockIndex, GeneratorKind, Model, ModelKind, Reducer, Section,
};
use crate::ring::{quotient_piece, GradedPiece, Monomial, Polynomial};

type WeightSplit = BTreeMap<Vec<i64>, Vec<(usize, Monomial, Scalar)>>;

pub const DEFAULT_STAB_WINDOW: usize = 2;

/// Default truncation: 4 for P^3 and beyond, 6 otherwise.
pub fn default_dmax(m: &Model) -> usize {
    match m.kind() {
        ModelKind::Pn(n) if n >= 3 => 4,
        _ => 6,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoinvariantReport {
    pub model: String,
    pub section: String,
    /// Truncation degrees D for which dim Q_D was computed.
    pub truncations: Vec<usize>,
    pub dims: Vec<usize>,
    /// dim R_D modulo the top-degree part of the image from R_{D−1}.
    pub top_defects: Vec<usize>,
    /// dims[D] − top_defects[D]: the image of R_{≤D−1} in Q_D.
    pub settled_dims: Vec<usize>,
    pub stabilized: bool,
    /// Present only when the last `stab_window` settled dims, D ≥ 1, agree.
    pub rank: Option<usize>,
    pub stab_window: usize,
    pub mode: String,
    pub weight_zero: bool,
    /// Some rank came from primes that did not reach the agreement count.
    pub probabilistic: bool,
    /// Set once a second route has been compared.
    pub confirmed: Option<bool>,
    pub confirmed_by: Option<String>,
    /// Scale of the center generator: Z*(1) = −(1/scale)·Σ x_i∂_i.
    pub center_scale: String,
    pub matrix_rows: usize,
    pub matrix_cols: usize,
    pub message: Option<String>,
}

fn mode_name(mode: &RankMode) -> String {
    match mode {
        RankMode::Exact => "exact".into(),
        RankMode::Modular(_) => "modular".into(),
        RankMode::Auto { threshold, .. } => format!("auto({threshold})"),
    }
}

fn center_scale(m: &Model) -> String {
    match m.kind() {
        ModelKind::Pn(n) => format!("{}", n + 1),
        ModelKind::G2N(n) => format!("{}", 2 * n),
    }
}

/// Monomials of R_r grouped by torus weight.
struct WeightedPiece {
    by_weight: HashMap<Vec<i64>, Vec<Monomial>>,
}

impl WeightedPiece {
    fn new(m: &Model, piece: &GradedPiece) -> Self {
        let mut by_weight: HashMap<Vec<i64>, Vec<Monomial>> = HashMap::new();
        for mono in piece.basis() {
            by_weight
                .entry(torus_weight(m, mono))
                .or_default()
                .push(mono.clone());
        }
        WeightedPiece { by_weight }
    }

    fn get(&self, w: &[i64]) -> &[Monomial] {
        self.by_weight.get(w).map_or(&[], |v| v.as_slice())
    }
}

/// Rows and columns of the truncated image, restricted to one torus weight
/// when `weight` is given.
pub struct Assembly {
    pub index: BlockIndex,
    pub columns: Vec<SparseVec>,
    /// checkpoints[D] = number of columns whose source degree is < D.
    pub checkpoints: Vec<usize>,
}

pub fn assemble(m: &Model, f: &Section, dmax: usize, weight: Option<&[i64]>) -> Result<Assembly> {
    if f.model != m.id() {
        return Err(Error::contract(format!(
            "section belongs to {}, not {}",
            f.model, m
        )));
    }
    let gens = lie_basis(m);
    let full: Vec<GradedPiece> = (0..=dmax).map(|r| m.piece(r)).collect();
    let weighted: Option<Vec<WeightedPiece>> =
        weight.map(|_| full.iter().map(|p| WeightedPiece::new(m, p)).collect());
    let rows: Vec<GradedPiece> = match (&weighted, weight) {
        (Some(wp), Some(w)) => full
            .iter()
            .zip(wp)
            .map(|(p, x)| {
                GradedPiece::from_monomials(m.ambient_vars(), p.degree(), x.get(w).to_vec())
            })
            .collect(),
        _ => full.clone(),
    };
    let index = BlockIndex::new(&rows);

    let mut red = Reducer::new(m);
    let zf: Vec<Polynomial> = gens
        .iter()
        .map(|x| generator_on_section(&mut red, x, f))
        .collect::<Result<_>>()?;

    let mut columns = Vec::new();
    let mut checkpoints = vec![0];
    for r in 0..dmax {
        let mut sources: Vec<(usize, Monomial)> = Vec::new();
        for (gi, x) in gens.iter().enumerate() {
            match (&weighted, weight) {
                (Some(wp), Some(w)) => {
                    if x.kind == GeneratorKind::Cartan
                        && w.iter().all(|&v| v == 0)
                        && zf[gi].is_zero()
                    {
                        // acts by the weight, which is zero here
                        continue;
                    }
                    let src: Vec<i64> = w.iter().zip(&x.shift).map(|(a, s)| a - s).collect();
                    sources.extend(wp[r].get(&src).iter().map(|mono| (gi, mono.clone())));
                }
                _ => sources.extend(full[r].basis().iter().map(|mono| (gi, mono.clone()))),
            }
        }
        let cols: Vec<Result<SparseVec>> = sources
            .par_iter()
            .map_init(
                || Reducer::new(m),
                |red, (gi, mono)| {
                    let phi = Polynomial::term(mono.clone(), Scalar::one());
                    let (low, high) = action_on(red, &gens[*gi], &zf[*gi], &phi)?;
                    let mut col = Vec::new();
                    index.push(&mut col, r, &low)?;
                    index.push(&mut col, r + 1, &high)?;
                    Ok(col)
                },
            )
            .collect();
        for c in cols {
            columns.push(c?);
        }
        checkpoints.push(columns.len());
    }
    Ok(Assembly {
        index,
        columns,
        checkpoints,
    })
}

fn run(
    m: &Model,
    f: &Section,
    dmax: usize,
    stab_window: usize,
    mode: &RankMode,
    weight_zero: bool,
) -> Result<CoinvariantReport> {
    if stab_window < 2 {
        return Err(Error::contract("stab_window must be at least 2"));
    }
    let zero = vec![0i64; m.weight_len()];
    let asm = assemble(m, f, dmax, weight_zero.then_some(zero.as_slice()))?;
    let mut report = CoinvariantReport {
        model: m.id(),
        section: f.text(m),
        truncations: Vec::new(),
        dims: Vec::new(),
        top_defects: Vec::new(),
        settled_dims: Vec::new(),
        stabilized: false,
        rank: None,
        stab_window,
        mode: mode_name(mode),
        weight_zero,
        probabilistic: false,
        confirmed: None,
        confirmed_by: None,
        center_scale: center_scale(m),
        matrix_rows: asm.index.total(),
        matrix_cols: asm.columns.len(),
        message: None,
    };
    let matrix = SparseMatrix::from_columns(asm.index.total(), asm.columns)?;
    let ranks = match prefix_ranks(&matrix, &asm.checkpoints, mode) {
        Ok(r) => r,
        Err(e @ Error::Resource(_)) => {
            report.message = Some(e.to_string());
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    report.probabilistic = ranks.probabilistic;
    for (d, rk) in ranks.ranks.iter().enumerate() {
        let rows = if d + 1 < asm.checkpoints.len() {
            asm.index.offset(d + 1)
        } else {
            asm.index.total()
        };
        report.truncations.push(d);
        report.dims.push(rows - rk);
    }
    for d in 0..=dmax {
        let defect = if d == 0 {
            0
        } else {
            let lo = asm.index.offset(d);
            let hi = if d < dmax {
                asm.index.offset(d + 1)
            } else {
                asm.index.total()
            };
            let cols: Vec<SparseVec> = (asm.checkpoints[d - 1]..asm.checkpoints[d])
                .map(|c| {
                    matrix
                        .column(c)
                        .iter()
                        .filter(|(r, _)| *r >= lo)
                        .map(|(r, v)| (r - lo, v.clone()))
                        .collect()
                })
                .collect();
            let top = SparseMatrix::from_columns(hi - lo, cols)?;
            let out = rank(&top, mode)?;
            report.probabilistic |= out.probabilistic;
            hi - lo - out.rank
        };
        report.top_defects.push(defect);
        report.settled_dims.push(report.dims[d] - defect);
    }
    let k = report.settled_dims.len();
    if k > stab_window {
        let tail = &report.settled_dims[k - stab_window..];
        if tail.iter().all(|&x| x == tail[0]) {
            report.stabilized = true;
            report.rank = Some(tail[0]);
        }
    }
    Ok(report)
}

/// dim Q_D for D = 0..=dmax over the full graded pieces.
pub fn coinvariant_rank(
    m: &Model,
    f: &Section,
    dmax: usize,
    stab_window: usize,
    mode: &RankMode,
) -> Result<CoinvariantReport> {
    run(m, f, dmax, stab_window, mode, false)
}

/// Same as [`coinvariant_rank`] on the weight-zero subspaces; f must have
/// torus weight zero.
pub fn weight_zero_rank(
    m: &Model,
    f: &Section,
    dmax: usize,
    stab_window: usize,
    mode: &RankMode,
) -> Result<CoinvariantReport> {
    if !is_weight_zero(m, &f.poly) {
        return Err(Error::contract(
            "section is not a torus weight vector of weight zero",
        ));
    }
    run(m, f, dmax, stab_window, mode, true)
}

/// Σ_{(n+1) | d, d ≤ n(n+1)} dim (ℚ[x]/J(f))_d.
pub fn jacobian_oracle(n: usize, f: &Section) -> Result<usize> {
    let nv = n + 1;
    if f.model != format!("pn:{n}") {
        return Err(Error::OracleInapplicable(format!(
            "section of {} is not on pn:{n}",
            f.model
        )));
    }
    let partials: Vec<Polynomial> = (0..nv).map(|i| f.poly.derive(i)).collect();
    // the Jacobian ring of a smooth degree-(n+1) form vanishes above degree (n+1)(n-1)
    let top = ((n + 1) * (n - 1) + 1) as u32;
    if quotient_piece(nv, &partials, top)?.dim() != 0 {
        return Err(Error::OracleInapplicable(
            "Jacobian ideal is not zero-dimensional (singular section)".into(),
        ));
    }
    let mut total = 0;
    for d in (0..=n * (n + 1)).step_by(n + 1) {
        total += quotient_piece(nv, &partials, d as u32)?.dim();
    }
    Ok(total)
}

struct WeightBlock {
    index: BlockIndex,
    echelon: RationalEchelon,
}

/// The truncated image span at one D, built lazily per torus weight.
pub struct ImageSpace<'a> {
    model: &'a Model,
    section: &'a Section,
    d: usize,
    by_weight: bool,
    blocks: BTreeMap<Vec<i64>, WeightBlock>,
}

impl<'a> ImageSpace<'a> {
    pub fn new(model: &'a Model, section: &'a Section, d: usize) -> Self {
        ImageSpace {
            model,
            section,
            d,
            by_weight: is_weight_zero(model, &section.poly),
            blocks: BTreeMap::new(),
        }
    }

    fn block(&mut self, w: &[i64]) -> Result<&WeightBlock> {
        let key = if self.by_weight {
            w.to_vec()
        } else {
            Vec::new()
        };
        if !self.blocks.contains_key(&key) {
            let asm = assemble(
                self.model,
                self.section,
                self.d,
                self.by_weight.then_some(w),
            )?;
            let mut echelon = RationalEchelon::new(asm.index.total());
            for c in asm.columns {
                echelon.insert(c);
            }
            self.blocks.insert(
                key.clone(),
                WeightBlock {
                    index: asm.index,
                    echelon,
                },
            );
        }
        Ok(&self.blocks[&key])
    }

    fn split(&self, p: &Polynomial) -> Result<WeightSplit> {
        let mut out: WeightSplit = BTreeMap::new();
        for (mono, c) in p.terms() {
            let deg = mono.degree();
            if deg % self.model.ac_degree() != 0 {
                return Err(Error::contract("element is not in the graded ring R"));
            }
            let r = (deg / self.model.ac_degree()) as usize;
            if r > self.d {
                return Err(Error::contract(format!(
                    "element of level {r} beyond truncation {}",
                    self.d
                )));
            }
            let key = if self.by_weight {
                torus_weight(self.model, mono)
            } else {
                Vec::new()
            };
            out.entry(key)
                .or_default()
                .push((r, mono.clone(), c.clone()));
        }
        Ok(out)
    }

    /// Residues of `p`, per weight block, modulo the image span; `p` must be
    /// in normal form.
    fn residues(&mut self, p: &Polynomial) -> Result<BTreeMap<Vec<i64>, SparseVec>> {
        let parts = self.split(p)?;
        let mut out = BTreeMap::new();
        for (w, terms) in parts {
            let block = self.block(&w)?;
            let mut v: SparseVec = Vec::new();
            for (r, mono, c) in terms {
                let row = block.index.row(r, &mono).ok_or_else(|| {
                    Error::contract(format!(
                        "monomial {mono} is not a normal-form basis element"
                    ))
                })?;
                v.push((row, c));
            }
            v.sort_by_key(|(i, _)| *i);
            out.insert(w, block.echelon.reduce(&v));
        }
        Ok(out)
    }

    /// Whether `p` (any element of R_{≤D}) is ≡ 0.
    pub fn contains(&mut self, p: &Polynomial) -> Result<bool> {
        let p = self.model.normal_form(p)?;
        Ok(self.residues(&p)?.values().all(Vec::is_empty))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Membership {
    pub holds: bool,
    /// The unique c with class1 ≡ c·class2, when class2 is not ≡ 0.
    pub c: Option<String>,
}

/// Decides class1·e^f ≡ c·class2·e^f within truncation D.
pub fn membership(
    m: &Model,
    f: &Section,
    class1: &Polynomial,
    class2: &Polynomial,
    d: usize,
) -> Result<(bool, Option<Scalar>)> {
    for p in [class1, class2] {
        if let Some(r) = p.degree() {
            let level = (r / m.ac_degree()) as usize;
            if level + 1 > d {
                return Err(Error::contract(format!(
                    "truncation {d} must exceed the level {level} of each class"
                )));
            }
        }
    }
    let mut space = ImageSpace::new(m, f, d);
    let a = space.residues(&m.normal_form(class1)?)?;
    let b = space.residues(&m.normal_form(class2)?)?;
    let b_zero = b.values().all(Vec::is_empty);
    if b_zero {
        let holds = a.values().all(Vec::is_empty);
        return Ok((holds, None));
    }
    // c from the first nonzero residue of class2
    let (w, v) = b
        .iter()
        .find(|(_, v)| !v.is_empty())
        .expect("nonzero residue");
    let (row, bv) = &v[0];
    let av = a
        .get(w)
        .and_then(|x| x.iter().find(|(r, _)| r == row).map(|(_, c)| c.clone()))
        .unwrap_or_else(Scalar::zero);
    let c = av / bv;
    let keys: std::collections::BTreeSet<&Vec<i64>> = a.keys().chain(b.keys()).collect();
    let empty = Vec::new();
    for k in keys {
        let x = a.get(k).unwrap_or(&empty);
        let y = b.get(k).unwrap_or(&empty);
        let mut diff: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (r, v) in x {
            *diff.entry(*r).or_insert_with(Scalar::zero) += v;
        }
        for (r, v) in y {
            *diff.entry(*r).or_insert_with(Scalar::zero) -= v * &c;
        }
        if diff.values().any(|v| !v.is_zero()) {
            return Ok((false, None));
        }
    }
    Ok((true, Some(c)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceCheck {
    pub relations: usize,
    pub failures: Vec<usize>,
    /// The reported constant matches a direct linear solve.
    pub constant_confirmed: Option<bool>,
}

impl TraceCheck {
    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.constant_confirmed != Some(false)
    }
}

/// Confirms every relation of a rank-1 trace against the coinvariant image
/// (G(2,N) with the cyclic section) and cross-checks the constant.
pub fn verify_trace(m: &Model, f: &Section, outcome: &Rank1Outcome) -> Result<TraceCheck> {
    let ModelKind::G2N(n) = m.kind() else {
        return Err(Error::Capability("rank-1 traces exist for g2n only".into()));
    };
    let trace: &ReductionTrace = &outcome.trace;
    if trace.n != n {
        return Err(Error::contract("trace was built for a different N"));
    }
    let mut spaces: BTreeMap<usize, ImageSpace<'_>> = BTreeMap::new();
    let mut failures = Vec::new();
    for (k, step) in trace.steps.iter().enumerate() {
        let ok = match step.rule {
            StepRule::Plucker => straighten(&step.relation).is_zero(),
            _ => {
                let d = step.level + 1;
                let space = spaces.entry(d).or_insert_with(|| ImageSpace::new(m, f, d));
                space.contains(&graph_sum_to_polynomial(&step.relation, n))?
            }
        };
        if !ok {
            failures.push(k);
        }
    }
    let constant_confirmed = match (&outcome.constant, &trace.input) {
        (Some(c), Some(g)) => {
            let d = g.edge_count() / n + 1;
            let class1 = graph_sum_to_polynomial(&crate::graphcalc::GraphSum::single(g.clone()), n);
            let one = Polynomial::constant(m.ambient_vars(), Scalar::one());
            let (holds, solved) = membership(m, f, &class1, &one, d)?;
            Some(holds && solved.as_ref() == Some(c))
        }
        _ => None,
    };
    Ok(TraceCheck {
        relations: trace.steps.len(),
        failures,
        constant_confirmed,
    })
}
