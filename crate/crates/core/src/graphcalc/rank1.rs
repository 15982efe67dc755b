//! Constructive reduction of a torus-invariant Plücker monomial g to a
//! multiple of 1 in the coinvariants of R·e^f, f the cyclic section.
//!
//! With the center acting as −r on R_r and β = 1, every graph G′ of level r
//! satisfies G′∪F ≡ −(r+1)·G′. A root generator x_j∂_i applied to a graph H
//! of level m whose valence is 2m+1 at i and 2m−1 at j gives
//!
//!   x_j∂_i(H) + Σ_e σ_e · (H − e + e′)∪F ≡ 0,
//!
//! where e runs over the F-edges at i and e′ is e with i moved to j. When H
//! contains every such e, the center relation turns the second sum into
//! −(m+1)·Σ σ_e (H − e + e′), a relation inside level m. These "move"
//! relations are eliminated with the pivot on the graph of largest
//! (D-value, graph) until only graphs containing F remain; those are then
//! stripped to level m−1.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{g_action, GraphSum, PluckerGraph, Straightener};
use crate::error::{Error, Result};
use crate::exactla::{int, Scalar};

type Echelon = BTreeMap<(usize, PluckerGraph), GraphSum>;
type Edge = (usize, usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    /// Plücker relation at a crossing.
    Plucker,
    /// Cartan generator annihilates a graph of nonzero torus weight.
    WeightAnnihilate,
    /// Root generator combined with the center (see module docs).
    Move,
    /// G′∪F ≡ −(r+1)·G′.
    Center,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionStep {
    pub rule: StepRule,
    /// Level r (edges / N) of the consumed graphs.
    pub level: usize,
    pub consumed: Vec<PluckerGraph>,
    pub produced: Vec<PluckerGraph>,
    pub measures_before: Vec<(usize, String)>,
    pub measures_after: Vec<(usize, String)>,
    /// A combination that is ≡ 0 in the coinvariants (for Plücker steps:
    /// zero in R).
    pub relation: GraphSum,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub n: usize,
    pub input: Option<PluckerGraph>,
    pub steps: Vec<ReductionStep>,
}

impl ReductionTrace {
    /// Steps whose relation holds only modulo ĝ, each with the truncation
    /// degree at which it can be confirmed.
    pub fn coinvariant_relations(&self) -> Vec<(&GraphSum, usize)> {
        self.steps
            .iter()
            .filter(|s| s.rule != StepRule::Plucker)
            .map(|s| (&s.relation, s.level + 1))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rank1Outcome {
    /// c with g·e^f ≡ c·e^f, when the reduction closed.
    #[serde(with = "opt_scalar")]
    pub constant: Option<Scalar>,
    pub trace: ReductionTrace,
    /// Set when the budget ran out or no move relation applied.
    pub failed: bool,
    pub message: Option<String>,
}

mod opt_scalar {
    use super::Scalar;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Scalar>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(c) => s.serialize_some(&c.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Scalar>, D::Error> {
        let v: Option<String> = Option::deserialize(d)?;
        v.map(|t| t.parse().map_err(serde::de::Error::custom))
            .transpose()
    }
}

fn measure(g: &PluckerGraph) -> (usize, String) {
    let (a, b) = g.measure();
    (a, b.to_string())
}

fn key(g: &PluckerGraph) -> (usize, PluckerGraph) {
    (g.d_value(), g.clone())
}

/// Reduces `g` (on N vertices) to c·1. `budget` caps the number of move
/// relations generated plus elimination steps.
pub fn rank1_reduce(n: usize, g: &PluckerGraph, budget: usize) -> Result<Rank1Outcome> {
    if g.n() != n {
        return Err(Error::contract(format!(
            "graph has {} vertices, expected {n}",
            g.n()
        )));
    }
    if n < 3 {
        return Err(Error::contract("the cyclic section needs N >= 3"));
    }
    if !g.edge_count().is_multiple_of(n) {
        return Err(Error::contract(format!(
            "edge count {} is not a multiple of N = {n}",
            g.edge_count()
        )));
    }
    let mut trace = ReductionTrace {
        n,
        input: Some(g.clone()),
        steps: Vec::new(),
    };

    let mut st = Straightener::recording();
    let mut current = st.sum(&GraphSum::single(g.clone()));
    for step in st.take_log() {
        let mut relation = GraphSum::single(step.parent.clone());
        for c in &step.children {
            relation.add_term(c.clone(), -Scalar::one());
        }
        trace.steps.push(ReductionStep {
            rule: StepRule::Plucker,
            level: step.parent.edge_count() / n,
            consumed: vec![step.parent],
            produced: step.children,
            measures_before: vec![step.parent_measure],
            measures_after: step.child_measures,
            relation,
        });
    }

    if !g.is_torus_invariant() {
        let level = g.edge_count() / n;
        trace.steps.push(ReductionStep {
            rule: StepRule::WeightAnnihilate,
            level,
            consumed: current.terms().map(|(h, _)| h.clone()).collect(),
            produced: Vec::new(),
            measures_before: current.terms().map(|(h, _)| measure(h)).collect(),
            measures_after: Vec::new(),
            relation: current.clone(),
        });
        return Ok(Rank1Outcome {
            constant: Some(Scalar::zero()),
            trace,
            failed: false,
            message: None,
        });
    }

    let mut spent = 0usize;
    let mut level = g.edge_count() / n;
    while level > 0 {
        let relations = match move_relations(n, level, budget.saturating_sub(spent)) {
            Some((r, used)) => {
                spent += used;
                r
            }
            None => {
                return Ok(failed(
                    trace,
                    "budget exhausted while generating move relations",
                ))
            }
        };
        while let Some((lead, _)) = current
            .terms()
            .filter(|(h, _)| h.d_value() > 0)
            .max_by_key(|(h, _)| key(h))
        {
            spent += 1;
            if spent > budget {
                return Ok(failed(trace, "budget exhausted during elimination"));
            }
            let lead = lead.clone();
            let Some(rel) = relations.get(&key(&lead)) else {
                return Ok(failed(trace, &format!("no move relation reaches {lead}")));
            };
            let c = current.coeff(&lead);
            let before = current.clone();
            current.add_scaled(rel, &-c.clone());
            trace.steps.push(ReductionStep {
                rule: StepRule::Move,
                level,
                consumed: vec![lead.clone()],
                produced: rel
                    .terms()
                    .map(|(h, _)| h.clone())
                    .filter(|h| *h != lead)
                    .collect(),
                measures_before: vec![measure(&lead)],
                measures_after: rel
                    .terms()
                    .filter(|(h, _)| **h != lead)
                    .map(|(h, _)| measure(h))
                    .collect(),
                relation: rel.scale(&c),
            });
            debug_assert_ne!(before, current);
        }

        let f = PluckerGraph::cyclic(n);
        let factor = -int(level as i64);
        let mut lower = GraphSum::zero();
        let mut relation = GraphSum::zero();
        for (h, c) in current.terms() {
            let rest = h.minus(&f).expect("D-value zero graphs contain F");
            lower.add_term(rest.clone(), c * &factor);
            relation.add_term(h.clone(), c.clone());
            relation.add_term(rest, c * int(level as i64));
        }
        trace.steps.push(ReductionStep {
            rule: StepRule::Center,
            level,
            consumed: current.terms().map(|(h, _)| h.clone()).collect(),
            produced: lower.terms().map(|(h, _)| h.clone()).collect(),
            measures_before: current.terms().map(|(h, _)| measure(h)).collect(),
            measures_after: lower.terms().map(|(h, _)| measure(h)).collect(),
            relation,
        });
        current = lower;
        level -= 1;
    }

    let constant = current.coeff(&PluckerGraph::empty(n));
    Ok(Rank1Outcome {
        constant: Some(constant),
        trace,
        failed: false,
        message: None,
    })
}

fn failed(trace: ReductionTrace, msg: &str) -> Rank1Outcome {
    Rank1Outcome {
        constant: None,
        trace,
        failed: true,
        message: Some(msg.to_string()),
    }
}

/// Move relations at level m in echelon form, keyed by their leading graph
/// (largest (D-value, graph)); leading coefficient 1. Returns `None` when
/// more than `budget` relations would be generated.
fn move_relations(n: usize, m: usize, budget: usize) -> Option<(Echelon, usize)> {
    let f = PluckerGraph::cyclic(n);
    let mut st = Straightener::new();
    let mut echelon: Echelon = BTreeMap::new();
    let mut used = 0usize;
    for i in 1..=n {
        for j in 1..=n {
            if i == j {
                continue;
            }
            let mut valence = vec![2 * m; n];
            valence[i - 1] += 1;
            valence[j - 1] -= 1;
            // F-edges at i and their images under i ↦ j
            let moves: Vec<(Edge, Edge, Scalar)> = f
                .edges()
                .iter()
                .filter(|&&(a, b)| a == i || b == i)
                .filter_map(|&(a, b)| {
                    let other = if a == i { b } else { a };
                    if other == j {
                        return None;
                    }
                    let sign = if (a == i && j < b) || (b == i && a < j) {
                        int(1)
                    } else {
                        int(-1)
                    };
                    Some(((a, b), (other.min(j), other.max(j)), sign))
                })
                .collect();
            for h in super::graphs_with_valence(n, &valence) {
                if !moves.iter().all(|(e, _, _)| h.contains_edge(*e)) {
                    continue;
                }
                used += 1;
                if used > budget {
                    return None;
                }
                let mut rel = st.sum(&g_action(j, i, &GraphSum::single(h.clone())).ok()?);
                for (e, e2, sign) in &moves {
                    let moved = h.without(*e)?.with(*e2);
                    let s = st.graph(&moved);
                    rel.add_scaled(&s, &(sign * int(-(m as i64 + 1))));
                }
                insert(&mut echelon, rel);
            }
        }
    }
    Some((echelon, used))
}

fn insert(echelon: &mut BTreeMap<(usize, PluckerGraph), GraphSum>, mut rel: GraphSum) {
    loop {
        let Some((lead, c)) = rel
            .terms()
            .max_by_key(|(h, _)| key(h))
            .map(|(h, c)| (h.clone(), c.clone()))
        else {
            return;
        };
        match echelon.get(&key(&lead)) {
            Some(piv) => rel.add_scaled(&piv.clone(), &-c),
            None => {
                let inv = c.recip();
                let rel = rel.scale(&inv);
                debug_assert!(rel.coeff(&lead).is_one() && !rel.coeff(&lead).is_negative());
                echelon.insert(key(&lead), rel);
                return;
            }
        }
    }
}
