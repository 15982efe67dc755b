//! Anticanonical models X = P^n and X = G(2,N): the graded ring
//! R = ⊕_r Γ(X, ω_X^{-r}) realized inside the ambient polynomial ring, and
//! the Lie algebra g ⊕ ℂ acting on it by derivations.

use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::{frac, int, Scalar, SparseMatrix};
use crate::graphcalc::{crossing_free_graphs, GraphSum, PluckerGraph, Straightener};
use crate::ring::{
    graded_piece, parse_polynomial, plucker_index, plucker_pair, plucker_relations, GradedPiece,
    Monomial, Polynomial, VarNames,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    Pn(usize),
    G2N(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    kind: ModelKind,
    ambient_vars: usize,
    ac_degree: u32,
    ideal_gens: Vec<Polynomial>,
    beta_scalar: Scalar,
}

impl Model {
    pub fn pn(n: usize) -> Result<Model> {
        if n == 0 {
            return Err(Error::contract("P^n needs n >= 1"));
        }
        Ok(Model {
            kind: ModelKind::Pn(n),
            ambient_vars: n + 1,
            ac_degree: (n + 1) as u32,
            ideal_gens: Vec::new(),
            beta_scalar: Scalar::one(),
        })
    }

    pub fn g2n(n: usize) -> Result<Model> {
        if n < 3 {
            return Err(Error::contract("G(2,N) needs N >= 3"));
        }
        Ok(Model {
            kind: ModelKind::G2N(n),
            ambient_vars: n * (n - 1) / 2,
            ac_degree: n as u32,
            ideal_gens: plucker_relations(n),
            beta_scalar: Scalar::one(),
        })
    }

    /// `pn:<n>` or `g2n:<N>`.
    pub fn parse(spec: &str) -> Result<Model> {
        let spec = spec.trim();
        let (kind, arg) = spec
            .split_once(':')
            .ok_or_else(|| Error::parse(spec, "expected pn:<n> or g2n:<N>"))?;
        let v: usize = arg
            .trim()
            .parse()
            .map_err(|_| Error::parse(arg.trim(), "expected a positive integer"))?;
        match kind.trim() {
            "pn" => Model::pn(v),
            "g2n" => Model::g2n(v),
            other => Err(Error::parse(other, "unknown model kind (pn or g2n)")),
        }
    }

    pub fn with_beta(mut self, beta: Scalar) -> Model {
        self.beta_scalar = beta;
        self
    }

    pub fn id(&self) -> String {
        match self.kind {
            ModelKind::Pn(n) => format!("pn:{n}"),
            ModelKind::G2N(n) => format!("g2n:{n}"),
        }
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn ambient_vars(&self) -> usize {
        self.ambient_vars
    }

    /// Ambient degree N_X of one anticanonical twist.
    pub fn ac_degree(&self) -> u32 {
        self.ac_degree
    }

    pub fn ideal_gens(&self) -> &[Polynomial] {
        &self.ideal_gens
    }

    pub fn beta_scalar(&self) -> &Scalar {
        &self.beta_scalar
    }

    /// Complex dimension of X.
    pub fn dim_x(&self) -> usize {
        match self.kind {
            ModelKind::Pn(n) => n,
            ModelKind::G2N(n) => 2 * (n - 2),
        }
    }

    pub fn names(&self) -> VarNames {
        match self.kind {
            ModelKind::Pn(n) => VarNames::Indexed(n + 1),
            ModelKind::G2N(n) => VarNames::Plucker(n),
        }
    }

    /// Length of torus weight vectors.
    pub fn weight_len(&self) -> usize {
        match self.kind {
            ModelKind::Pn(n) => n + 1,
            ModelKind::G2N(n) => n,
        }
    }

    /// Normal-form monomial basis of R_r (ambient degree r·N_X).
    pub fn piece(&self, r: usize) -> GradedPiece {
        let d = r as u32 * self.ac_degree;
        match self.kind {
            ModelKind::Pn(_) => graded_piece(self.ambient_vars, d),
            ModelKind::G2N(n) => {
                let basis = crossing_free_graphs(n, d as usize)
                    .iter()
                    .map(graph_to_monomial)
                    .collect();
                GradedPiece::from_monomials(self.ambient_vars, d, basis)
            }
        }
    }

    /// The weight-zero part of `piece(r)`.
    pub fn weight_zero_piece(&self, r: usize) -> GradedPiece {
        let full = self.piece(r);
        let basis = full
            .basis()
            .iter()
            .filter(|m| torus_weight(self, m).iter().all(|&w| w == 0))
            .cloned()
            .collect();
        GradedPiece::from_monomials(self.ambient_vars, full.degree(), basis)
    }

    pub fn normal_form(&self, p: &Polynomial) -> Result<Polynomial> {
        Reducer::new(self).reduce(p)
    }

    /// Ambient degree of a homogeneous element divided by N_X.
    pub fn level_of(&self, p: &Polynomial) -> Option<usize> {
        let d = p.homogeneous_degree()?;
        (d % self.ac_degree == 0).then_some((d / self.ac_degree) as usize)
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

/// Reduces ambient polynomials to normal form, caching straightened graphs
/// for G(2,N).
pub struct Reducer<'a> {
    model: &'a Model,
    st: Straightener,
}

impl<'a> Reducer<'a> {
    pub fn new(model: &'a Model) -> Self {
        Reducer {
            model,
            st: Straightener::new(),
        }
    }

    pub fn model(&self) -> &Model {
        self.model
    }

    pub fn reduce(&mut self, p: &Polynomial) -> Result<Polynomial> {
        if p.nvars() != self.model.ambient_vars {
            return Err(Error::contract(format!(
                "polynomial in {} variables, model {} has {}",
                p.nvars(),
                self.model,
                self.model.ambient_vars
            )));
        }
        match self.model.kind {
            ModelKind::Pn(_) => Ok(p.clone()),
            ModelKind::G2N(n) => {
                let mut out = Polynomial::zero(p.nvars());
                for (m, c) in p.terms() {
                    let s = self.st.graph(&monomial_to_graph(n, m));
                    for (g, v) in s.terms() {
                        out.add_term(graph_to_monomial(g), v * c);
                    }
                }
                Ok(out)
            }
        }
    }

    pub fn reduce_sum(&mut self, s: &GraphSum) -> GraphSum {
        self.st.sum(s)
    }
}

pub fn monomial_to_graph(n: usize, m: &Monomial) -> PluckerGraph {
    let mut edges = Vec::new();
    for (idx, &e) in m.exponents().iter().enumerate() {
        let pair = plucker_pair(n, idx);
        for _ in 0..e {
            edges.push(pair);
        }
    }
    PluckerGraph::new(n, edges).expect("Plücker pairs are valid edges")
}

pub fn graph_to_monomial(g: &PluckerGraph) -> Monomial {
    let n = g.n();
    let mut e = vec![0u32; n * (n - 1) / 2];
    for &(a, b) in g.edges() {
        e[plucker_index(n, a, b)] += 1;
    }
    Monomial::new(e)
}

pub fn graph_sum_to_polynomial(s: &GraphSum, n: usize) -> Polynomial {
    Polynomial::from_terms(
        n * (n - 1) / 2,
        s.terms().map(|(g, c)| (graph_to_monomial(g), c.clone())),
    )
}

pub fn polynomial_to_graph_sum(p: &Polynomial, n: usize) -> GraphSum {
    let mut out = GraphSum::zero();
    for (m, c) in p.terms() {
        out.add_term(monomial_to_graph(n, m), c.clone());
    }
    out
}

/// Weight under the diagonal torus, scaled to integers.
///
/// P^n: (n+1)·k_i − deg for exponents k (the traceless projection times
/// n+1). G(2,N): N·valence_i − 2·edges.
pub fn torus_weight(m: &Model, mono: &Monomial) -> Vec<i64> {
    match m.kind {
        ModelKind::Pn(n) => {
            let d = mono.degree() as i64;
            mono.exponents()
                .iter()
                .map(|&k| (n as i64 + 1) * k as i64 - d)
                .collect()
        }
        ModelKind::G2N(n) => monomial_to_graph(n, mono).torus_weight(),
    }
}

pub fn is_weight_zero(m: &Model, p: &Polynomial) -> bool {
    p.terms()
        .all(|(mono, _)| torus_weight(m, mono).iter().all(|&w| w == 0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeneratorKind {
    Root,
    Cartan,
    Center,
}

/// One basis element x of g ⊕ ℂ, stored through its derivation Z*(x)
/// (the image of every ambient variable) and β(x).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieGenerator {
    pub label: String,
    pub kind: GeneratorKind,
    pub images: Vec<Polynomial>,
    pub beta: Scalar,
    /// Scaled torus weight by which the derivation shifts monomials.
    pub shift: Vec<i64>,
}

impl LieGenerator {
    pub fn apply(&self, p: &Polynomial) -> Polynomial {
        p.apply_derivation(&self.images)
    }
}

pub fn lie_basis(m: &Model) -> Vec<LieGenerator> {
    let nv = m.ambient_vars;
    let wl = m.weight_len();
    let mut out = Vec::new();
    match m.kind {
        ModelKind::Pn(n) => {
            let scale = (n + 1) as i64;
            for i in 0..=n {
                for j in 0..=n {
                    if i == j {
                        continue;
                    }
                    // −x_i ∂/∂x_j
                    let mut images = vec![Polynomial::zero(nv); nv];
                    images[j] = Polynomial::var(nv, i).scale(&int(-1));
                    let mut shift = vec![0; wl];
                    shift[i] += scale;
                    shift[j] -= scale;
                    out.push(LieGenerator {
                        label: format!("E{i}{j}"),
                        kind: GeneratorKind::Root,
                        images,
                        beta: Scalar::zero(),
                        shift,
                    });
                }
            }
            for i in 1..=n {
                // −x_0∂_0 + x_i∂_i
                let mut images = vec![Polynomial::zero(nv); nv];
                images[0] = Polynomial::var(nv, 0).scale(&int(-1));
                images[i] = Polynomial::var(nv, i);
                out.push(LieGenerator {
                    label: format!("H{i}"),
                    kind: GeneratorKind::Cartan,
                    images,
                    beta: Scalar::zero(),
                    shift: vec![0; wl],
                });
            }
            let c = frac(-1, (n + 1) as i64);
            out.push(LieGenerator {
                label: "center".into(),
                kind: GeneratorKind::Center,
                images: (0..nv).map(|k| Polynomial::var(nv, k).scale(&c)).collect(),
                beta: m.beta_scalar.clone(),
                shift: vec![0; wl],
            });
        }
        ModelKind::G2N(n) => {
            let scale = n as i64;
            let var = |p: usize, q: usize| -> Polynomial {
                if p == q {
                    Polynomial::zero(nv)
                } else if p < q {
                    Polynomial::var(nv, plucker_index(n, p, q))
                } else {
                    Polynomial::var(nv, plucker_index(n, q, p)).scale(&int(-1))
                }
            };
            for i in 1..=n {
                for j in 1..=n {
                    if i == j {
                        continue;
                    }
                    // x_j∂_i x_pq = δ_pi x_jq + δ_qi x_pj
                    let images = (0..nv)
                        .map(|idx| {
                            let (p, q) = plucker_pair(n, idx);
                            let mut img = Polynomial::zero(nv);
                            if p == i {
                                img = img.add(&var(j, q));
                            }
                            if q == i {
                                img = img.add(&var(p, j));
                            }
                            img
                        })
                        .collect();
                    let mut shift = vec![0; wl];
                    shift[j - 1] += scale;
                    shift[i - 1] -= scale;
                    out.push(LieGenerator {
                        label: format!("x{j}d{i}"),
                        kind: GeneratorKind::Root,
                        images,
                        beta: Scalar::zero(),
                        shift,
                    });
                }
            }
            for i in 1..n {
                // x_i∂_i − x_{i+1}∂_{i+1}
                let images = (0..nv)
                    .map(|idx| {
                        let (p, q) = plucker_pair(n, idx);
                        let count = |v: usize| (p == v) as i64 + (q == v) as i64;
                        Polynomial::var(nv, idx).scale(&int(count(i) - count(i + 1)))
                    })
                    .collect();
                out.push(LieGenerator {
                    label: format!("H{i}"),
                    kind: GeneratorKind::Cartan,
                    images,
                    beta: Scalar::zero(),
                    shift: vec![0; wl],
                });
            }
            // −(1/2N) Σ x_i∂_i sends each p_pq to −(1/N) p_pq
            let c = frac(-1, n as i64);
            out.push(LieGenerator {
                label: "center".into(),
                kind: GeneratorKind::Center,
                images: (0..nv).map(|k| Polynomial::var(nv, k).scale(&c)).collect(),
                beta: m.beta_scalar.clone(),
                shift: vec![0; wl],
            });
        }
    }
    out
}

/// A section f ∈ R_1 in normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    pub model: String,
    pub poly: Polynomial,
    /// The keyword or text it was parsed from.
    pub source: String,
}

impl Section {
    pub fn new(m: &Model, poly: Polynomial, source: impl Into<String>) -> Result<Section> {
        let source = source.into();
        if poly.nvars() != m.ambient_vars {
            return Err(Error::contract("section lives in the wrong ring"));
        }
        if poly.is_zero() {
            return Err(Error::parse(source, "section reduces to zero"));
        }
        if poly.homogeneous_degree() != Some(m.ac_degree) {
            return Err(Error::parse(
                source,
                format!("section must be homogeneous of degree {}", m.ac_degree),
            ));
        }
        let poly = m.normal_form(&poly)?;
        if poly.is_zero() {
            return Err(Error::parse(
                source,
                "section reduces to zero modulo the ideal",
            ));
        }
        Ok(Section {
            model: m.id(),
            poly,
            source,
        })
    }

    pub fn text(&self, m: &Model) -> String {
        self.poly.format(&m.names())
    }
}

pub fn fermat(m: &Model) -> Result<Section> {
    match m.kind {
        ModelKind::Pn(n) => {
            let nv = n + 1;
            let poly = Polynomial::from_terms(
                nv,
                (0..nv).map(|i| {
                    let mut e = vec![0; nv];
                    e[i] = (n + 1) as u32;
                    (Monomial::new(e), Scalar::one())
                }),
            );
            Section::new(m, poly, "fermat")
        }
        ModelKind::G2N(_) => Err(Error::Capability(
            "the fermat section is defined for pn only".into(),
        )),
    }
}

pub fn cyclic(m: &Model) -> Result<Section> {
    match m.kind {
        ModelKind::G2N(n) => {
            let poly = Polynomial::term(graph_to_monomial(&PluckerGraph::cyclic(n)), Scalar::one());
            Section::new(m, poly, "cyclic")
        }
        ModelKind::Pn(_) => Err(Error::Capability(
            "the cyclic section is defined for g2n only".into(),
        )),
    }
}

/// Normal form of an arbitrary homogeneous polynomial in the model's
/// variable names.
pub fn parse_element(m: &Model, text: &str) -> Result<Polynomial> {
    let p = parse_polynomial(text, &m.names())?;
    if !p.is_homogeneous() {
        return Err(Error::parse(text, "polynomial is not homogeneous"));
    }
    m.normal_form(&p)
}

/// `fermat`, `cyclic`, or an inline polynomial.
pub fn parse_section(m: &Model, text: &str) -> Result<Section> {
    match text.trim() {
        "fermat" => fermat(m),
        "cyclic" => cyclic(m),
        t => {
            let poly = parse_polynomial(t, &m.names())?;
            Section::new(m, poly, t)
        }
    }
}

/// Degree-r and degree-(r+1) parts of (Z*(x) + Z*(x)f − β(x))φ.
pub fn action_on(
    red: &mut Reducer<'_>,
    x: &LieGenerator,
    zf: &Polynomial,
    phi: &Polynomial,
) -> Result<(Polynomial, Polynomial)> {
    let mut low = red.reduce(&x.apply(phi))?;
    low.add_scaled(phi, &-x.beta.clone());
    let high = if zf.is_zero() {
        Polynomial::zero(phi.nvars())
    } else {
        red.reduce(&phi.mul(zf))?
    };
    Ok((low, high))
}

/// Z*(x)f in normal form.
pub fn generator_on_section(
    red: &mut Reducer<'_>,
    x: &LieGenerator,
    f: &Section,
) -> Result<Polynomial> {
    red.reduce(&x.apply(&f.poly))
}

fn check_section(m: &Model, f: &Section) -> Result<()> {
    if f.model != m.id() {
        return Err(Error::contract(format!(
            "section belongs to {}, not {}",
            f.model, m
        )));
    }
    if m.normal_form(&f.poly)? != f.poly {
        return Err(Error::contract("section is not in normal form"));
    }
    Ok(())
}

/// Matrix of φ ↦ Z*(x)φ + φ·Z*(x)f − β(x)φ from R_r to R_r ⊕ R_{r+1}
/// (rows of R_r first).
pub fn action_matrix(m: &Model, x: &LieGenerator, f: &Section, r: usize) -> Result<SparseMatrix> {
    check_section(m, f)?;
    let src = m.piece(r);
    let tgt = m.piece(r + 1);
    let mut red = Reducer::new(m);
    let zf = generator_on_section(&mut red, x, f)?;
    let mut cols = Vec::with_capacity(src.dim());
    for mono in src.basis() {
        let phi = Polynomial::term(mono.clone(), Scalar::one());
        let (low, high) = action_on(&mut red, x, &zf, &phi)?;
        let mut col = src.coords(&low)?;
        col.extend(
            tgt.coords(&high)?
                .into_iter()
                .map(|(i, c)| (i + src.dim(), c)),
        );
        cols.push(col);
    }
    SparseMatrix::from_columns(src.dim() + tgt.dim(), cols)
}

/// Matrix of the derivation Z*(x) alone on R_r.
pub fn operator_matrix(m: &Model, x: &LieGenerator, r: usize) -> Result<SparseMatrix> {
    let piece = m.piece(r);
    let mut red = Reducer::new(m);
    let mut cols = Vec::with_capacity(piece.dim());
    for mono in piece.basis() {
        let img = red.reduce(&x.apply(&Polynomial::term(mono.clone(), Scalar::one())))?;
        cols.push(piece.coords(&img)?);
    }
    SparseMatrix::from_columns(piece.dim(), cols)
}

/// Index lookup shared by callers that assemble block matrices over several
/// pieces.
#[derive(Debug, Clone, Default)]
pub struct BlockIndex {
    offsets: Vec<usize>,
    lookup: Vec<HashMap<Monomial, usize>>,
    total: usize,
}

impl BlockIndex {
    pub fn new(pieces: &[GradedPiece]) -> Self {
        let mut offsets = Vec::new();
        let mut lookup = Vec::new();
        let mut total = 0;
        for p in pieces {
            offsets.push(total);
            lookup.push(
                p.basis()
                    .iter()
                    .cloned()
                    .enumerate()
                    .map(|(i, m)| (m, i))
                    .collect(),
            );
            total += p.dim();
        }
        BlockIndex {
            offsets,
            lookup,
            total,
        }
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn offset(&self, block: usize) -> usize {
        self.offsets[block]
    }

    pub fn row(&self, block: usize, m: &Monomial) -> Option<usize> {
        self.lookup
            .get(block)?
            .get(m)
            .map(|i| i + self.offsets[block])
    }

    /// Appends the coordinates of `p` (supported on block `block`) to `col`.
    pub fn push(&self, col: &mut Vec<(usize, Scalar)>, block: usize, p: &Polynomial) -> Result<()> {
        for (m, c) in p.terms() {
            let r = self
                .row(block, m)
                .ok_or_else(|| Error::contract(format!("monomial {m} outside block {block}")))?;
            col.push((r, c.clone()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::quotient_piece;

    fn gen<'a>(b: &'a [LieGenerator], label: &str) -> &'a LieGenerator {
        b.iter().find(|g| g.label == label).unwrap()
    }

    fn poly(m: &Model, t: &str) -> Polynomial {
        parse_polynomial(t, &m.names()).unwrap()
    }

    #[test]
    fn parse_model_spec() {
        assert_eq!(Model::parse("pn:2").unwrap().ambient_vars(), 3);
        assert_eq!(Model::parse("g2n:5").unwrap().ambient_vars(), 10);
        assert!(matches!(Model::parse("p2"), Err(Error::Parse { .. })));
        assert!(matches!(Model::parse("foo:2"), Err(Error::Parse { .. })));
    }

    #[test]
    fn pn_root_generator_example() {
        let m = Model::pn(1).unwrap();
        let b = lie_basis(&m);
        let x = gen(&b, "E10");
        assert_eq!(x.apply(&poly(&m, "x0^2")), poly(&m, "-2*x0*x1"));
    }

    #[test]
    fn g2n_root_generator_example() {
        let m = Model::g2n(4).unwrap();
        let b = lie_basis(&m);
        assert_eq!(gen(&b, "x3d1").apply(&poly(&m, "p12")), poly(&m, "-p23"));
        assert!(gen(&b, "x2d1").apply(&poly(&m, "p12")).is_zero());
    }

    #[test]
    fn center_scales_by_minus_level() {
        for m in [Model::pn(2).unwrap(), Model::g2n(4).unwrap()] {
            let b = lie_basis(&m);
            let c = gen(&b, "center");
            for r in 0..3 {
                for mono in m.piece(r).basis().iter().take(5) {
                    let p = Polynomial::term(mono.clone(), Scalar::one());
                    assert_eq!(c.apply(&p), p.scale(&int(-(r as i64))));
                }
            }
        }
    }

    #[test]
    fn p1_center_column_on_one() {
        let m = Model::pn(1).unwrap();
        let f = fermat(&m).unwrap();
        let b = lie_basis(&m);
        let a = action_matrix(&m, gen(&b, "center"), &f, 0).unwrap();
        // rows: 1 | x0^2, x0x1, x1^2
        assert_eq!(a.nrows(), 4);
        assert_eq!(a.get(0, 0), int(-1));
        let r1 = m.piece(1);
        let i0 = r1.index_of(&Monomial::new(vec![2, 0])).unwrap();
        let i1 = r1.index_of(&Monomial::new(vec![0, 2])).unwrap();
        let im = r1.index_of(&Monomial::new(vec![1, 1])).unwrap();
        assert_eq!(a.get(1 + i0, 0), int(-1));
        assert_eq!(a.get(1 + i1, 0), int(-1));
        assert_eq!(a.get(1 + im, 0), int(0));
    }

    #[test]
    fn p1_root_column_example() {
        let m = Model::pn(1).unwrap();
        let f = fermat(&m).unwrap();
        let b = lie_basis(&m);
        // −x0 ∂/∂x1
        let x = gen(&b, "E01");
        let mut red = Reducer::new(&m);
        let zf = generator_on_section(&mut red, x, &f).unwrap();
        assert_eq!(zf, poly(&m, "-2*x0*x1"));
        let (low, high) = action_on(&mut red, x, &zf, &poly(&m, "x1^2")).unwrap();
        assert_eq!(low, poly(&m, "-2*x0*x1"));
        assert_eq!(high, poly(&m, "-2*x0*x1^3"));
    }

    #[test]
    fn sections() {
        let m = Model::pn(2).unwrap();
        assert_eq!(
            parse_section(&m, "fermat").unwrap().poly,
            poly(&m, "x0^3+x1^3+x2^3")
        );
        let g = Model::g2n(4).unwrap();
        assert_eq!(
            parse_section(&g, "cyclic").unwrap().poly,
            poly(&g, "p12*p23*p34*p14")
        );
        let e = parse_element(&g, "p12*p34 - p13*p24").unwrap();
        assert_eq!(e, poly(&g, "-p14*p23"));
        assert!(matches!(
            parse_section(&g, "p12*p34 - p13*p24"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_section(&g, "p12*p34 - p13*p25"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_section(&m, "x0^2"),
            Err(Error::Parse { .. })
        ));
        assert!(parse_section(&m, "cyclic").is_err());
    }

    #[test]
    fn torus_weights() {
        let m = Model::pn(2).unwrap();
        assert!(torus_weight(&m, &Monomial::new(vec![3, 0, 0]))
            .iter()
            .any(|&w| w != 0));
        assert!(torus_weight(&m, &Monomial::new(vec![1, 1, 1]))
            .iter()
            .all(|&w| w == 0));
        let g = Model::g2n(4).unwrap();
        let f = cyclic(&g).unwrap();
        assert!(is_weight_zero(&g, &f.poly));
        assert!(is_weight_zero(&g, &poly(&g, "p12^2*p34^2")));
        assert!(!is_weight_zero(&g, &poly(&g, "p12^2*p13*p34")));
    }

    #[test]
    fn generators_preserve_ideal() {
        for n in 4..=5 {
            let m = Model::g2n(n).unwrap();
            let q2 = quotient_piece(m.ambient_vars(), m.ideal_gens(), 2).unwrap();
            for x in lie_basis(&m) {
                for q in m.ideal_gens() {
                    let img = x.apply(q);
                    assert!(
                        q2.in_ideal(&img).unwrap(),
                        "{} moves a relation out of the ideal",
                        x.label
                    );
                    assert!(m.normal_form(&img).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn pn_commutators_on_r1() {
        // Z* reverses brackets: [Z(E_ij), Z(E_jk)] = −Z(E_ik)
        let m = Model::pn(2).unwrap();
        let b = lie_basis(&m);
        let mat = |l: &str| operator_matrix(&m, gen(&b, l), 1).unwrap();
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1), (0, 2, 1)] {
            let a = mat(&format!("E{i}{j}"));
            let c = mat(&format!("E{j}{k}"));
            let e = mat(&format!("E{i}{k}"));
            let dim = a.nrows();
            for col in 0..dim {
                let mut v = vec![Scalar::zero(); dim];
                v[col] = Scalar::one();
                let ac = a.mul_vec(&c.mul_vec(&v));
                let ca = c.mul_vec(&a.mul_vec(&v));
                let ev = e.mul_vec(&v);
                for r in 0..dim {
                    assert_eq!(&ac[r] - &ca[r], -ev[r].clone());
                }
            }
        }
    }

    #[test]
    fn cartan_kills_cyclic_section() {
        let m = Model::g2n(5).unwrap();
        let f = cyclic(&m).unwrap();
        for x in lie_basis(&m)
            .iter()
            .filter(|x| x.kind == GeneratorKind::Cartan)
        {
            assert!(x.apply(&f.poly).is_zero());
        }
    }

    #[test]
    fn cartan_acts_by_weight_on_weight_vectors() {
        let m = Model::g2n(4).unwrap();
        let f = cyclic(&m).unwrap();
        let h = lie_basis(&m).into_iter().find(|x| x.label == "H1").unwrap();
        let a = action_matrix(&m, &h, &f, 1).unwrap();
        let piece = m.piece(1);
        for (c, mono) in piece.basis().iter().enumerate() {
            let g = monomial_to_graph(4, mono);
            let v = g.valence();
            let w = v[0] as i64 - v[1] as i64;
            let col = a.column(c);
            if w == 0 {
                assert!(col.is_empty());
            } else {
                assert_eq!(col, &[(c, int(w))]);
            }
        }
    }

    #[test]
    fn pieces_match_quotient_dims() {
        let m = Model::g2n(4).unwrap();
        for r in 0..=1 {
            let q = quotient_piece(6, m.ideal_gens(), 4 * r as u32).unwrap();
            assert_eq!(m.piece(r).dim(), q.dim());
        }
        assert_eq!(m.weight_zero_piece(1).dim(), 3);
        let p = Model::pn(1).unwrap();
        assert_eq!(p.piece(2).dim(), 5);
    }

    #[test]
    fn action_matrix_rejects_foreign_section() {
        let m = Model::pn(2).unwrap();
        let other = Model::pn(3).unwrap();
        let f = fermat(&other).unwrap();
        let b = lie_basis(&m);
        assert!(action_matrix(&m, &b[0], &f, 0).is_err());
    }
}
