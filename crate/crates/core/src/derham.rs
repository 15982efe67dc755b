//! Polynomial differential forms on the affine cone, the Euler contraction Δ,
//! and the twisted complex B*₀ with differential D_f = d − t·df∧ whose
//! cohomology computes H^n_dR(X − Y_f).
//!
//! B^k is ⊕_{t≥1} of (k+1)-forms of internal degree N_X·t (x_i and dx_i
//! both have degree 1) on the punctured cone. For G(2,4) the cone is the
//! Plücker quadric and forms are residues of logarithmic forms along it,
//! restricted to torus weight zero; that model is experimental and N ≥ 5 is
//! not supported.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::{axpy, int, rank, RankMode, RationalEchelon, Scalar, SparseMatrix, SparseVec};
use crate::models::{
    is_weight_zero, lie_basis, torus_weight, LieGenerator, Model, ModelKind, Section,
};
use crate::ring::{monomials_of_degree, Monomial, Polynomial};

/// Set of differentials dx_i as a bitmask; bit i is dx_i.
pub type Dx = u64;

fn dx_list(s: Dx) -> Vec<usize> {
    (0..64).filter(|i| s >> i & 1 == 1).collect()
}

/// Number of elements of `s` below `i`.
fn below(s: Dx, i: usize) -> u32 {
    (s & ((1u64 << i) - 1)).count_ones()
}

fn sign(odd: bool) -> Scalar {
    if odd {
        int(-1)
    } else {
        int(1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FormElement {
    nvars: usize,
    terms: BTreeMap<(Dx, Monomial), Scalar>,
}

impl FormElement {
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars <= 64, "at most 64 variables");
        FormElement {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn function(p: &Polynomial) -> Self {
        let mut out = FormElement::zero(p.nvars());
        for (m, c) in p.terms() {
            out.add_term(0, m.clone(), c.clone());
        }
        out
    }

    /// dx_{i₁}∧…∧dx_{i_k} for increasing indices.
    pub fn dx(nvars: usize, idx: &[usize]) -> Result<Self> {
        let mut s: Dx = 0;
        for w in idx.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::contract("differential indices must increase"));
            }
        }
        for &i in idx {
            if i >= nvars {
                return Err(Error::contract(format!("dx{i} outside {nvars} variables")));
            }
            s |= 1 << i;
        }
        let mut out = FormElement::zero(nvars);
        out.add_term(s, Monomial::one(nvars), Scalar::one());
        Ok(out)
    }

    pub fn term(nvars: usize, s: Dx, m: Monomial, c: Scalar) -> Self {
        let mut out = FormElement::zero(nvars);
        out.add_term(s, m, c);
        out
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Dx, Monomial), &Scalar)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, s: Dx, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let key = (s, m);
        let e = self.terms.entry(key.clone()).or_insert_with(Scalar::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add_scaled(&mut self, other: &FormElement, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for ((s, m), v) in &other.terms {
            self.add_term(*s, m.clone(), v * c);
        }
    }

    pub fn add(&self, other: &FormElement) -> FormElement {
        let mut out = self.clone();
        out.add_scaled(other, &Scalar::one());
        out
    }

    pub fn sub(&self, other: &FormElement) -> FormElement {
        let mut out = self.clone();
        out.add_scaled(other, &-Scalar::one());
        out
    }

    pub fn scale(&self, c: &Scalar) -> FormElement {
        let mut out = FormElement::zero(self.nvars);
        out.add_scaled(self, c);
        out
    }

    /// Form degree when all terms agree.
    pub fn form_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|(s, _)| s.count_ones());
        let d = it.next()?;
        it.all(|x| x == d).then_some(d)
    }

    /// Internal degree (x_i and dx_i of degree 1) when all terms agree.
    pub fn internal_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|(s, m)| s.count_ones() + m.degree());
        let d = it.next()?;
        it.all(|x| x == d).then_some(d)
    }

    pub fn wedge(&self, other: &FormElement) -> FormElement {
        let mut out = FormElement::zero(self.nvars);
        for ((s, a), x) in &self.terms {
            for ((t, b), y) in &other.terms {
                if s & t != 0 {
                    continue;
                }
                // inversions: pairs (i in s, j in t) with i > j
                let inv: u32 = dx_list(*t)
                    .iter()
                    .map(|&j| (s >> (j + 1)).count_ones())
                    .sum();
                out.add_term(s | t, a.mul(b), sign(inv % 2 == 1) * x * y);
            }
        }
        out
    }

    pub fn mul_poly(&self, p: &Polynomial) -> FormElement {
        FormElement::function(p).wedge(self)
    }
}

/// Exterior derivative.
pub fn d(w: &FormElement) -> FormElement {
    let mut out = FormElement::zero(w.nvars);
    for ((s, m), c) in &w.terms {
        for i in 0..w.nvars {
            let e = m.exponents()[i];
            if e == 0 || s >> i & 1 == 1 {
                continue;
            }
            let sg = sign(below(*s, i) % 2 == 1);
            out.add_term(s | 1 << i, m.lower(i).unwrap(), sg * c * int(e as i64));
        }
    }
    out
}

pub fn df(p: &Polynomial) -> FormElement {
    d(&FormElement::function(p))
}

/// Contraction with the linear vector field ξ = Σ_j images[j] ∂/∂x_j.
pub fn contract(images: &[Polynomial], w: &FormElement) -> FormElement {
    let mut out = FormElement::zero(w.nvars);
    for ((s, m), c) in &w.terms {
        for (pos, i) in dx_list(*s).into_iter().enumerate() {
            if images[i].is_zero() {
                continue;
            }
            let rest = s & !(1 << i);
            let sg = sign(pos % 2 == 1);
            for (a, v) in images[i].terms() {
                out.add_term(rest, m.mul(a), &sg * c * v);
            }
        }
    }
    out
}

/// Δ: contraction with the Euler field Σ x_i ∂/∂x_i.
pub fn euler_contract(w: &FormElement) -> FormElement {
    let images: Vec<Polynomial> = (0..w.nvars).map(|i| Polynomial::var(w.nvars, i)).collect();
    contract(&images, w)
}

/// Basis key of a form: differentials and monomial.
pub type FormKey = (Dx, Monomial);

/// All (Dx, Monomial) with |Dx| = p and internal degree e.
fn ambient_forms(nvars: usize, p: u32, e: u32) -> Vec<FormKey> {
    if p > e || p as usize > nvars {
        return Vec::new();
    }
    let monos = monomials_of_degree(nvars, e - p);
    let mut out = Vec::new();
    for s in subsets(nvars, p as usize) {
        for m in &monos {
            out.push((s, m.clone()));
        }
    }
    out
}

fn subsets(n: usize, k: usize) -> Vec<Dx> {
    fn rec(start: usize, n: usize, k: usize, cur: Dx, out: &mut Vec<Dx>) {
        if k == 0 {
            out.push(cur);
            return;
        }
        for i in start..n {
            if n - i < k {
                break;
            }
            rec(i + 1, n, k - 1, cur | 1 << i, out);
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, 0, &mut out);
    out
}

fn form_weight(m: &Model, key: &FormKey) -> Vec<i64> {
    let mut e = key.1.exponents().to_vec();
    for i in dx_list(key.0) {
        e[i] += 1;
    }
    torus_weight(m, &Monomial::new(e))
}

/// Forms of one form degree and internal degree on the punctured cone.
///
/// On affine space these are plain polynomial forms. On a hypersurface cone
/// {q = 0} a form is the residue of a logarithmic form α/q, so the space is
/// {α : dq∧α ∈ q·Ω} modulo q·Ω, with α of one higher form degree and
/// internal degree raised by deg q.
#[derive(Debug, Clone)]
pub struct FormSpace {
    pub form_degree: u32,
    pub internal_degree: u32,
    ambient_index: HashMap<FormKey, usize>,
    residue: Option<Residue>,
    basis: Vec<FormElement>,
}

#[derive(Debug, Clone)]
struct Residue {
    q: Polynomial,
    echelon: RationalEchelon,
    pos_of_insert: HashMap<usize, usize>,
}

impl FormSpace {
    pub fn new(m: &Model, p: u32, e: u32, weight_zero: bool) -> Result<FormSpace> {
        let nv = m.ambient_vars();
        let keep = |k: &FormKey| !weight_zero || form_weight(m, k).iter().all(|&w| w == 0);
        let forms = |p: u32, e: u32| -> Vec<FormKey> {
            ambient_forms(nv, p, e)
                .into_iter()
                .filter(|k| keep(k))
                .collect()
        };
        let index_of = |keys: &[FormKey]| -> HashMap<FormKey, usize> {
            keys.iter()
                .cloned()
                .enumerate()
                .map(|(i, k)| (k, i))
                .collect()
        };
        let as_form = |k: &FormKey| FormElement::term(nv, k.0, k.1.clone(), Scalar::one());
        match m.ideal_gens() {
            [] => {
                let ambient = forms(p, e);
                let basis = ambient.iter().map(as_form).collect();
                Ok(FormSpace {
                    form_degree: p,
                    internal_degree: e,
                    ambient_index: index_of(&ambient),
                    residue: None,
                    basis,
                })
            }
            [q] => {
                let qd = q
                    .homogeneous_degree()
                    .ok_or_else(|| Error::contract("inhomogeneous relation"))?;
                if !is_weight_zero(m, q) {
                    return Err(Error::Capability(
                        "residue forms need a weight-zero hypersurface".into(),
                    ));
                }
                let q0 = FormElement::function(q);
                let dq = df(q);
                let ambient = forms(p + 1, e + qd);
                let ambient_index = index_of(&ambient);
                // log condition: dq∧α ≡ 0 modulo q·Ω^{p+2}
                let upper = forms(p + 2, e + 2 * qd);
                let upper_index = index_of(&upper);
                let mut multiples = RationalEchelon::new(upper.len());
                for k in forms(p + 2, e + qd) {
                    multiples.insert(coords_in(&upper_index, &q0.wedge(&as_form(&k)))?);
                }
                let mut images = RationalEchelon::with_tracking(upper.len());
                let mut kernel = Vec::new();
                for (i, k) in ambient.iter().enumerate() {
                    let v = multiples.reduce(&coords_in(&upper_index, &dq.wedge(&as_form(k)))?);
                    if let Some(combo) = images.solve(&v) {
                        let mut kv = axpy(&[(i, Scalar::one())], &-Scalar::one(), &combo);
                        kv.sort_by_key(|(r, _)| *r);
                        kernel.push(kv);
                    }
                    images.insert(v);
                }
                let mut echelon = RationalEchelon::with_tracking(ambient.len());
                let mut inserted = 0;
                for k in forms(p + 1, e) {
                    echelon.insert(coords_in(&ambient_index, &q0.wedge(&as_form(&k)))?);
                    inserted += 1;
                }
                let mut basis = Vec::new();
                let mut pos_of_insert = HashMap::new();
                for kv in kernel {
                    let w = vector_form(nv, &ambient, &kv);
                    if echelon.insert(kv) {
                        pos_of_insert.insert(inserted, basis.len());
                        basis.push(w);
                    }
                    inserted += 1;
                }
                Ok(FormSpace {
                    form_degree: p,
                    internal_degree: e,
                    ambient_index,
                    residue: Some(Residue {
                        q: q.clone(),
                        echelon,
                        pos_of_insert,
                    }),
                    basis,
                })
            }
            _ => Err(Error::Capability(
                "forms on the punctured cone are modelled only for hypersurface cones".into(),
            )),
        }
    }

    fn empty() -> FormSpace {
        FormSpace {
            form_degree: 0,
            internal_degree: 0,
            ambient_index: HashMap::new(),
            residue: None,
            basis: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Representatives of the basis; numerators α of α/q on a hypersurface.
    pub fn basis(&self) -> &[FormElement] {
        &self.basis
    }

    /// Coordinates of a representative in the basis.
    pub fn coords(&self, w: &FormElement) -> Result<SparseVec> {
        let v = coords_in(&self.ambient_index, w)?;
        let Some(res) = &self.residue else {
            return Ok(v);
        };
        let combo = res
            .echelon
            .solve(&v)
            .ok_or_else(|| Error::contract("form is not logarithmic along the cone"))?;
        let mut out: SparseVec = combo
            .into_iter()
            .filter_map(|(i, c)| res.pos_of_insert.get(&i).map(|&j| (j, c)))
            .collect();
        out.sort_by_key(|(i, _)| *i);
        Ok(out)
    }

    /// Numerator of d(α/q) for a representative α, or dα on affine space.
    fn exterior(&self, w: &FormElement) -> Result<FormElement> {
        let dw = d(w);
        let Some(res) = &self.residue else {
            return Ok(dw);
        };
        // d(α/q) = (dα − (dq∧α)/q)/q
        let gamma = div_exact(&df(&res.q).wedge(w), &res.q)
            .ok_or_else(|| Error::contract("form is not logarithmic along the cone"))?;
        Ok(dw.sub(&gamma))
    }
}

fn vector_form(nv: usize, keys: &[FormKey], v: &[(usize, Scalar)]) -> FormElement {
    let mut out = FormElement::zero(nv);
    for (i, c) in v {
        out.add_term(keys[*i].0, keys[*i].1.clone(), c.clone());
    }
    out
}

/// Exact quotient of a form by a polynomial, when it exists.
pub fn div_exact(w: &FormElement, q: &Polynomial) -> Option<FormElement> {
    let (lm, lc) = q.terms().max_by(|a, b| a.0.cmp(b.0))?;
    let mut rest = w.clone();
    let mut out = FormElement::zero(w.nvars);
    while let Some(((s, m), c)) = rest
        .terms
        .iter()
        .max_by(|a, b| a.0 .1.cmp(&b.0 .1))
        .map(|(k, c)| (k.clone(), c.clone()))
    {
        let mono = m.div(lm)?;
        let coef = c / lc;
        let step = FormElement::term(w.nvars, s, mono, coef);
        rest = rest.sub(&step.mul_poly(q));
        out = out.add(&step);
    }
    Some(out)
}

fn coords_in(index: &HashMap<FormKey, usize>, w: &FormElement) -> Result<SparseVec> {
    let mut v: SparseVec = Vec::new();
    for ((s, m), c) in w.terms() {
        let i = index
            .get(&(*s, m.clone()))
            .ok_or_else(|| Error::contract("form outside the expected degree or weight"))?;
        v.push((*i, c.clone()));
    }
    v.sort_by_key(|(i, _)| *i);
    Ok(v)
}

/// Basis of B^{s,t}₀: (s+t+1)-forms of internal degree N_X·t.
pub fn bst_basis(m: &Model, s: i64, t: i64) -> Result<Vec<FormElement>> {
    if let ModelKind::G2N(_) = m.kind() {
        return Err(Error::Capability(
            "bst_basis over G(2,N) needs the experimental weight-zero model; use twisted_cohomology_dim with the experimental flag"
                .into(),
        ));
    }
    let p = s + t + 1;
    if p < 0 || t < 0 {
        return Ok(Vec::new());
    }
    let e = m.ac_degree() as i64 * t;
    Ok(FormSpace::new(m, p as u32, e as u32, false)?
        .basis()
        .to_vec())
}

/// Components t = 1..=tmax of one total degree.
struct Graded {
    comps: Vec<(u32, FormSpace)>,
    offsets: Vec<usize>,
    total: usize,
}

impl Graded {
    fn new(m: &Model, k: i64, tmax: u32, weight_zero: bool) -> Result<Graded> {
        let mut comps = Vec::new();
        let mut offsets = Vec::new();
        let mut total = 0;
        let p = k + 1;
        for t in 1..=tmax {
            let space = if p < 0 {
                FormSpace::empty()
            } else {
                FormSpace::new(m, p as u32, m.ac_degree() * t, weight_zero)?
            };
            offsets.push(total);
            total += space.dim();
            comps.push((t, space));
        }
        Ok(Graded {
            comps,
            offsets,
            total,
        })
    }
}

/// Matrix of ω_t ↦ dω − c(t)·df∧ω from `src` to `tgt`; c(t) = t when
/// `twisted`, else 1.
fn differential(src: &Graded, tgt: &Graded, f: &Polynomial, twisted: bool) -> Result<SparseMatrix> {
    let dfw = df(f);
    let mut cols = Vec::with_capacity(src.total);
    for (ci, (t, space)) in src.comps.iter().enumerate() {
        for w in space.basis() {
            let mut col = Vec::new();
            let dw = space.exterior(w)?;
            if !dw.is_zero() {
                let (_, ts) = &tgt.comps[ci];
                col.extend(
                    ts.coords(&dw)?
                        .into_iter()
                        .map(|(i, c)| (i + tgt.offsets[ci], c)),
                );
            }
            if ci + 1 < tgt.comps.len() {
                let c = if twisted {
                    int(*t as i64)
                } else {
                    Scalar::one()
                };
                let hw = dfw.wedge(w).scale(&-c);
                let (_, ts) = &tgt.comps[ci + 1];
                col.extend(
                    ts.coords(&hw)?
                        .into_iter()
                        .map(|(i, c)| (i + tgt.offsets[ci + 1], c)),
                );
            }
            cols.push(col);
        }
    }
    SparseMatrix::from_columns(tgt.total, cols)
}

/// The slice C^{k−1} → C^k → C^{k+1} truncated at t ≤ tmax.
pub struct ComplexSlice {
    pub k: i64,
    pub tmax: u32,
    /// Dimensions of the components t = 1..=tmax in degrees k−1, k, k+1.
    pub dims: [Vec<usize>; 3],
    pub d_in: SparseMatrix,
    pub d_out: SparseMatrix,
    /// Same maps with d − df∧ in place of d − t·df∧.
    pub plain_in: SparseMatrix,
    pub plain_out: SparseMatrix,
    offsets: [Vec<usize>; 3],
}

fn check_model(m: &Model, f: &Section, experimental: bool) -> Result<bool> {
    if f.model != m.id() {
        return Err(Error::contract(format!(
            "section belongs to {}, not {}",
            f.model, m
        )));
    }
    match m.kind() {
        ModelKind::Pn(_) => Ok(false),
        ModelKind::G2N(_) if !experimental => Err(Error::Capability(
            "the de Rham model over G(2,N) is experimental; enable it explicitly".into(),
        )),
        ModelKind::G2N(_) => {
            if !is_weight_zero(m, &f.poly) {
                return Err(Error::Capability(
                    "the experimental G(2,N) model needs a section of torus weight zero".into(),
                ));
            }
            Ok(true)
        }
    }
}

pub fn assemble_slice(
    m: &Model,
    f: &Section,
    k: i64,
    tmax: u32,
    experimental: bool,
) -> Result<ComplexSlice> {
    let wz = check_model(m, f, experimental)?;
    let g = [
        Graded::new(m, k - 1, tmax, wz)?,
        Graded::new(m, k, tmax, wz)?,
        Graded::new(m, k + 1, tmax, wz)?,
    ];
    let d_in = differential(&g[0], &g[1], &f.poly, true)?;
    let d_out = differential(&g[1], &g[2], &f.poly, true)?;
    let plain_in = differential(&g[0], &g[1], &f.poly, false)?;
    let plain_out = differential(&g[1], &g[2], &f.poly, false)?;
    let dims = [0, 1, 2].map(|i| g[i].comps.iter().map(|(_, s)| s.dim()).collect());
    let offsets = [0, 1, 2].map(|i| g[i].offsets.clone());
    Ok(ComplexSlice {
        k,
        tmax,
        dims,
        d_in,
        d_out,
        plain_in,
        plain_out,
        offsets,
    })
}

impl ComplexSlice {
    /// d_out ∘ d_in == 0.
    pub fn squares_to_zero(&self) -> bool {
        let cols = self.d_in.ncols();
        (0..cols).all(|c| {
            let mut x = vec![Scalar::zero(); cols];
            x[c] = Scalar::one();
            let mid = self.d_in.mul_vec(&x);
            self.d_out.mul_vec(&mid).iter().all(Zero::is_zero)
        })
    }

    fn component_of(&self, which: usize, idx: usize) -> u32 {
        let offs = &self.offsets[which];
        let mut t = 0;
        for (i, &o) in offs.iter().enumerate() {
            if idx >= o {
                t = i as u32 + 1;
            }
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerhamReport {
    pub model: String,
    pub section: String,
    pub k: i64,
    /// dim H_T, the cohomology of the slice truncated at t ≤ T, for
    /// T = 1..=tmax.
    pub t_dims: Vec<usize>,
    /// Rank of H_{T−1} → H_T; zero at T = 1.
    pub settled_dims: Vec<usize>,
    pub dim: Option<usize>,
    pub stabilized: bool,
    pub experimental: bool,
    pub probabilistic: bool,
}

/// dim H^k(B*₀, D_f) at truncations T = 1..=tmax.
///
/// With Z_T the cocycles in C^k_{≤T} and B_T = D_f(C^k−1_{≤T−1}), the
/// report holds dim Z_T/B_T and the rank of Z_{T−1}/B_{T−1} → Z_T/B_T.
/// The cohomology is the colimit of these maps. For singular sections
/// Z_T/B_T keeps classes that only die at larger T, so the dimension and
/// stabilization are read from the ranks.
pub fn twisted_cohomology(
    m: &Model,
    f: &Section,
    k: i64,
    tmax: u32,
    mode: &RankMode,
    experimental: bool,
) -> Result<DerhamReport> {
    if tmax == 0 {
        return Err(Error::contract("tmax must be positive"));
    }
    let slice = assemble_slice(m, f, k, tmax, experimental)?;
    let mut t_dims = Vec::new();
    let mut settled_dims = Vec::new();
    let mut cocycles_below = 0;
    let mut probabilistic = false;
    for big_t in 1..=tmax {
        let rows_k = upto(&slice.offsets[1], &slice.dims[1], big_t);
        let rows_k1 = upto(&slice.offsets[2], &slice.dims[2], big_t + 1);
        let src_in = upto(&slice.offsets[0], &slice.dims[0], big_t - 1);
        let out = sub_matrix(&slice.d_out, rows_k, rows_k1)?;
        let inn = sub_matrix(&slice.d_in, src_in, rows_k)?;
        let ro = rank(&out, mode)?;
        let ri = rank(&inn, mode)?;
        // B_T ∩ C_{≤T−1} has dimension rank B_T − rank of its component T
        let below = upto(&slice.offsets[1], &slice.dims[1], big_t - 1);
        let top = row_block(&inn, below, rows_k)?;
        let rt = rank(&top, mode)?;
        probabilistic |= ro.probabilistic || ri.probabilistic || rt.probabilistic;
        t_dims.push(rows_k - ro.rank - ri.rank);
        settled_dims.push(cocycles_below - (ri.rank - rt.rank));
        cocycles_below = rows_k - ro.rank;
    }
    let n = settled_dims.len();
    let stabilized = n >= 3 && settled_dims[n - 1] == settled_dims[n - 2];
    Ok(DerhamReport {
        model: m.id(),
        section: f.text(m),
        k,
        dim: settled_dims.last().copied(),
        t_dims,
        settled_dims,
        stabilized,
        experimental: matches!(m.kind(), ModelKind::G2N(_)),
        probabilistic,
    })
}

/// (dim, stabilized) at the largest truncation.
pub fn twisted_cohomology_dim(
    m: &Model,
    f: &Section,
    k: i64,
    tmax: u32,
    experimental: bool,
) -> Result<(usize, bool)> {
    let r = twisted_cohomology(m, f, k, tmax, &RankMode::default(), experimental)?;
    Ok((r.dim.unwrap_or(0), r.stabilized))
}

fn upto(offsets: &[usize], dims: &[usize], t: u32) -> usize {
    let t = t as usize;
    if t == 0 {
        0
    } else if t >= offsets.len() {
        offsets.last().copied().unwrap_or(0) + dims.last().copied().unwrap_or(0)
    } else {
        offsets[t]
    }
}

/// The leading `cols` columns restricted to the leading `rows` rows.
fn sub_matrix(m: &SparseMatrix, cols: usize, rows: usize) -> Result<SparseMatrix> {
    let out: Vec<SparseVec> = (0..cols)
        .map(|c| {
            m.column(c)
                .iter()
                .filter(|(r, _)| *r < rows)
                .cloned()
                .collect()
        })
        .collect();
    SparseMatrix::from_columns(rows, out)
}

/// Rows `start..end` of every column, renumbered from zero.
fn row_block(m: &SparseMatrix, start: usize, end: usize) -> Result<SparseMatrix> {
    let out: Vec<SparseVec> = m
        .columns()
        .iter()
        .map(|c| {
            c.iter()
                .filter(|(r, _)| (start..end).contains(r))
                .map(|(r, v)| (r - start, v.clone()))
                .collect()
        })
        .collect();
    SparseMatrix::from_columns(end - start, out)
}

fn mu(t: u32) -> Scalar {
    let mut f = BigInt::one();
    for i in 1..t.max(1) {
        f *= i;
    }
    Scalar::new(BigInt::one(), f)
}

/// Checks (d − df∧)·diag(μ) = diag(μ)·(d − t·df∧), μ_t = 1/(t−1)!, on both
/// maps of the slice.
pub fn rescale_check(m: &Model, f: &Section, k: i64, tmax: u32) -> Result<bool> {
    let slice = assemble_slice(m, f, k, tmax, true)?;
    let check = |twisted: &SparseMatrix, plain: &SparseMatrix, src: usize, tgt: usize| -> bool {
        if twisted.ncols() != plain.ncols() {
            return false;
        }
        for c in 0..twisted.ncols() {
            let ts = slice.component_of(src, c);
            for (r, v) in twisted.column(c) {
                let tt = slice.component_of(tgt, *r);
                if plain.get(*r, c) * mu(ts) != mu(tt) * v {
                    return false;
                }
            }
            for (r, v) in plain.column(c) {
                let tt = slice.component_of(tgt, *r);
                if twisted.get(*r, c) * mu(tt) != mu(ts) * v {
                    return false;
                }
            }
        }
        true
    };
    Ok(check(&slice.d_in, &slice.plain_in, 0, 1) && check(&slice.d_out, &slice.plain_out, 1, 2))
}

/// A linear vector field with its β-value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    pub images: Vec<Polynomial>,
    pub beta: Scalar,
}

impl Field {
    fn from_generator(x: &LieGenerator) -> Field {
        Field {
            images: x.images.clone(),
            beta: x.beta.clone(),
        }
    }

    pub fn apply(&self, p: &Polynomial) -> Polynomial {
        p.apply_derivation(&self.images)
    }

    /// Field of the Lie bracket [x, y]. Z* reverses brackets, so this is
    /// the commutator of `other` with `self`; β vanishes on brackets.
    pub fn bracket(&self, other: &Field) -> Field {
        let images = self
            .images
            .iter()
            .zip(&other.images)
            .map(|(a, b)| other.apply(a).sub(&self.apply(b)))
            .collect();
        Field {
            images,
            beta: Scalar::zero(),
        }
    }

    /// ρ(ξ)g = ξ(g) + ξ(f)g − β·g.
    pub fn rho(&self, f: &Polynomial, g: &Polynomial) -> Polynomial {
        let mut out = self.apply(g).add(&self.apply(f).mul(g));
        out.add_scaled(g, &-self.beta.clone());
        out
    }
}

/// Chevalley–Eilenberg chain: Σ coefficient · ξ₁∧…∧ξ_p ⊗ g.
pub type Chain = Vec<(Vec<Field>, Polynomial)>;

pub fn ce_boundary(chain: &Chain, f: &Polynomial) -> Chain {
    let mut out = Chain::new();
    for (xs, g) in chain {
        let p = xs.len();
        for i in 0..p {
            let rest: Vec<Field> = xs
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != i)
                .map(|(_, x)| x.clone())
                .collect();
            let v = xs[i].rho(f, g).scale(&sign(i % 2 == 1));
            out.push((rest, v));
        }
        for i in 0..p {
            for j in i + 1..p {
                let mut rest = vec![xs[i].bracket(&xs[j])];
                rest.extend(
                    xs.iter()
                        .enumerate()
                        .filter(|(k, _)| *k != i && *k != j)
                        .map(|(_, x)| x.clone()),
                );
                // (−1)^{i+j} with 1-based positions equals (−1)^{i+j} 0-based
                out.push((rest, g.scale(&sign((i + j) % 2 == 1))));
            }
        }
    }
    out
}

/// φ(ξ₁∧…∧ξ_p ⊗ g) = g · i_{ξ₁}⋯i_{ξ_p} (dx₀∧…∧dx_n).
pub fn chain_to_form(chain: &Chain, nvars: usize) -> FormElement {
    let top = FormElement::term(
        nvars,
        (1u64 << nvars) - 1,
        Monomial::one(nvars),
        Scalar::one(),
    );
    let mut out = FormElement::zero(nvars);
    for (xs, g) in chain {
        let mut w = top.clone();
        for x in xs.iter().rev() {
            w = contract(&x.images, &w);
        }
        out.add_scaled(&w.mul_poly(g), &Scalar::one());
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainMapReport {
    pub p: usize,
    pub samples: usize,
    /// Chains on which both sides vanish.
    pub trivial: usize,
    pub epsilon: Option<i64>,
    pub consistent: bool,
}

/// Samples chains ξ₁∧…∧ξ_p ⊗ g and checks φ(d_CE c) = ε·(d + df∧)φ(c) for
/// one sign ε.
pub fn chain_map_check(
    n: usize,
    f: &Section,
    p: usize,
    samples: usize,
    seed: u64,
) -> Result<ChainMapReport> {
    let m = Model::pn(n)?;
    if f.model != m.id() {
        return Err(Error::contract("chain_map_check needs a section on pn"));
    }
    if p == 0 {
        return Err(Error::contract("homological degree p must be at least 1"));
    }
    let nv = n + 1;
    let basis: Vec<Field> = lie_basis(&m).iter().map(Field::from_generator).collect();
    let dfw = df(&f.poly);
    let mut rng = StdRng::seed_from_u64(seed);
    let mut epsilon: Option<i64> = None;
    let mut consistent = true;
    let mut trivial = 0;
    for _ in 0..samples {
        let mut xs = Vec::with_capacity(p);
        for _ in 0..p {
            // random small integer combination of basis fields
            let mut images = vec![Polynomial::zero(nv); nv];
            let mut beta = Scalar::zero();
            for b in &basis {
                let c = int(rng.gen_range(-2..=2));
                if c.is_zero() {
                    continue;
                }
                for (img, bi) in images.iter_mut().zip(&b.images) {
                    img.add_scaled(bi, &c);
                }
                beta += &b.beta * &c;
            }
            xs.push(Field { images, beta });
        }
        let deg = rng.gen_range(0..=nv as u32 + 1);
        let monos = monomials_of_degree(nv, deg);
        let mut g = Polynomial::zero(nv);
        for _ in 0..3 {
            let mo = monos[rng.gen_range(0..monos.len())].clone();
            g.add_term(mo, int(rng.gen_range(-3..=3)));
        }
        let chain: Chain = vec![(xs, g)];
        let lhs = chain_to_form(&ce_boundary(&chain, &f.poly), nv);
        let phi = chain_to_form(&chain, nv);
        let rhs = d(&phi).add(&dfw.wedge(&phi));
        if lhs.is_zero() && rhs.is_zero() {
            trivial += 1;
            continue;
        }
        let eps = if lhs == rhs {
            1
        } else if lhs == rhs.scale(&int(-1)) {
            -1
        } else {
            consistent = false;
            continue;
        };
        match epsilon {
            None => epsilon = Some(eps),
            Some(e) if e != eps => consistent = false,
            _ => {}
        }
    }
    Ok(ChainMapReport {
        p,
        samples,
        trivial,
        epsilon,
        consistent,
    })
}

/// Random homogeneous form of the given form degree and polynomial degree
/// with small integer coefficients.
pub fn random_form(
    nvars: usize,
    form_degree: u32,
    poly_degree: u32,
    terms: usize,
    rng: &mut impl Rng,
) -> FormElement {
    let monos = monomials_of_degree(nvars, poly_degree);
    let subs = subsets(nvars, form_degree as usize);
    let mut out = FormElement::zero(nvars);
    if subs.is_empty() {
        return out;
    }
    for _ in 0..terms {
        let s = subs[rng.gen_range(0..subs.len())];
        let m = monos[rng.gen_range(0..monos.len())].clone();
        out.add_term(s, m, int(rng.gen_range(-5..=5)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{cyclic, fermat};
    use crate::ring::parse_polynomial;
    use crate::ring::VarNames;

    fn poly(nv: usize, t: &str) -> Polynomial {
        parse_polynomial(t, &VarNames::Indexed(nv)).unwrap()
    }

    #[test]
    fn euler_contract_examples() {
        let w = FormElement::dx(2, &[0, 1]).unwrap();
        let x0dx1 = FormElement::function(&poly(2, "x0")).wedge(&FormElement::dx(2, &[1]).unwrap());
        let x1dx0 = FormElement::function(&poly(2, "x1")).wedge(&FormElement::dx(2, &[0]).unwrap());
        assert_eq!(euler_contract(&w), x0dx1.sub(&x1dx0));
        let f = poly(3, "x0^3+x1^3+x2^3");
        assert_eq!(
            euler_contract(&df(&f)),
            FormElement::function(&f.scale(&int(3)))
        );
    }

    #[test]
    fn wedge_is_graded_commutative() {
        let a = FormElement::dx(3, &[0]).unwrap();
        let b = FormElement::dx(3, &[2]).unwrap();
        assert_eq!(a.wedge(&b), b.wedge(&a).scale(&int(-1)));
        assert!(a.wedge(&a).is_zero());
    }

    #[test]
    fn bst_examples() {
        let p1 = Model::pn(1).unwrap();
        assert_eq!(bst_basis(&p1, 0, 1).unwrap().len(), 1);
        assert!(bst_basis(&p1, 0, 0).unwrap().is_empty());
        assert!(bst_basis(&p1, 2, 1).unwrap().is_empty());
        let g = Model::g2n(4).unwrap();
        assert!(matches!(bst_basis(&g, 0, 1), Err(Error::Capability(_))));
    }

    #[test]
    fn p1_and_p2_cohomology() {
        let p1 = Model::pn(1).unwrap();
        let r =
            twisted_cohomology(&p1, &fermat(&p1).unwrap(), 1, 4, &RankMode::Exact, false).unwrap();
        assert_eq!(r.dim, Some(1), "{:?}", r.t_dims);
        assert!(r.stabilized);
        let p2 = Model::pn(2).unwrap();
        let r =
            twisted_cohomology(&p2, &fermat(&p2).unwrap(), 2, 4, &RankMode::Exact, false).unwrap();
        assert_eq!(r.dim, Some(2), "{:?}", r.t_dims);
        assert!(r.stabilized);
    }

    #[test]
    fn singular_section_settles() {
        let p2 = Model::pn(2).unwrap();
        let s = crate::models::parse_section(&p2, "x0*x1*x2").unwrap();
        let r = twisted_cohomology(&p2, &s, 2, 5, &RankMode::Exact, false).unwrap();
        assert_eq!(r.t_dims, vec![1, 4, 4, 4, 4]);
        assert_eq!(r.settled_dims, vec![0, 1, 1, 1, 1]);
    }

    #[test]
    fn g24_complement() {
        let g = Model::g2n(4).unwrap();
        let f = cyclic(&g).unwrap();
        for (k, want) in [(3, 3), (4, 1)] {
            let r = twisted_cohomology(&g, &f, k, 4, &RankMode::Exact, true).unwrap();
            assert_eq!(r.dim, Some(want), "k = {k}: {:?}", r.settled_dims);
            assert!(r.stabilized);
        }
        let s = assemble_slice(&g, &f, 4, 3, true).unwrap();
        assert!(s.squares_to_zero());
        let g5 = Model::g2n(5).unwrap();
        assert!(matches!(
            twisted_cohomology(&g5, &cyclic(&g5).unwrap(), 6, 2, &RankMode::Exact, true),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn residue_division() {
        let q = poly(3, "x0*x1 - x2^2");
        let w = FormElement::dx(3, &[0, 2])
            .unwrap()
            .mul_poly(&q.mul(&poly(3, "x1 + 2*x2")));
        let got = div_exact(&w, &q).unwrap();
        assert_eq!(got.mul_poly(&q), w);
        assert!(div_exact(&FormElement::function(&poly(3, "x0")), &q).is_none());
    }

    #[test]
    fn slice_squares_to_zero_and_rescales() {
        let p2 = Model::pn(2).unwrap();
        let f = fermat(&p2).unwrap();
        let s = assemble_slice(&p2, &f, 2, 4, false).unwrap();
        assert!(s.squares_to_zero());
        assert!(rescale_check(&p2, &f, 2, 4).unwrap());
        let s = assemble_slice(&p2, &f, 1, 3, false).unwrap();
        assert!(s.squares_to_zero());
    }

    #[test]
    fn g2n_requires_flag() {
        let g = Model::g2n(4).unwrap();
        let f = cyclic(&g).unwrap();
        assert!(matches!(
            twisted_cohomology(&g, &f, 4, 2, &RankMode::Exact, false),
            Err(Error::Capability(_))
        ));
    }

    #[test]
    fn chain_map_p1() {
        let m = Model::pn(1).unwrap();
        let f = fermat(&m).unwrap();
        for p in 1..=2 {
            let r = chain_map_check(1, &f, p, 30, 7).unwrap();
            assert!(r.consistent, "{r:?}");
        }
    }
}
