//! Closed forms and combinatorial counts used as ground truth.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphcalc::chords_cross;
use crate::models::{Model, ModelKind};

/// ν_n = n/(n+1)·(nⁿ − (−1)ⁿ).
pub fn nu(n: usize) -> Result<BigInt> {
    if n == 0 {
        return Err(Error::contract("nu needs n ≥ 1"));
    }
    let nn = BigInt::from(n).pow(n as u32);
    let sgn = if n.is_multiple_of(2) {
        BigInt::one()
    } else {
        -BigInt::one()
    };
    let num = BigInt::from(n) * (nn - sgn);
    let den = BigInt::from(n + 1);
    debug_assert!((&num % &den).is_zero());
    Ok(num / den)
}

/// a(s): solutions of k₀+⋯+k_n = s with 0 ≤ k_i ≤ n−1, for every s.
pub fn a_counts(n: usize) -> Vec<BigInt> {
    assert!(n >= 1, "a_counts needs n ≥ 1");
    let top = (n + 1) * (n - 1);
    let mut ways = vec![BigInt::zero(); top + 1];
    ways[0] = BigInt::one();
    for _ in 0..=n {
        let mut next = vec![BigInt::zero(); top + 1];
        for (s, w) in ways.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            for k in 0..n {
                if s + k <= top {
                    next[s + k] += w;
                }
            }
        }
        ways = next;
    }
    ways
}

/// Σ_{(n+1)|s} a(s).
pub fn count_a(n: usize) -> Result<BigInt> {
    if n == 0 {
        return Err(Error::contract("count_a needs n ≥ 1"));
    }
    Ok(a_counts(n).into_iter().step_by(n + 1).sum())
}

/// b_deg of G(2,N): partitions in a 2×(N−2) box with deg/2 cells.
pub fn grassmann_betti(n: usize, deg: usize) -> Result<usize> {
    if n < 3 {
        return Err(Error::contract("G(2,N) needs N ≥ 3"));
    }
    if deg % 2 == 1 {
        return Ok(0);
    }
    let k = deg / 2;
    let w = n - 2;
    Ok((0..=w).filter(|&l1| l1 <= k && k - l1 <= l1).count())
}

/// b_n − b_{n−2} in the middle degree n = 2(N−2).
pub fn primitive_middle(n: usize) -> Result<usize> {
    let mid = 2 * (n.max(3) - 2);
    let b = grassmann_betti(n, mid)?;
    let below = if mid >= 2 {
        grassmann_betti(n, mid - 2)?
    } else {
        0
    };
    Ok(b.saturating_sub(below))
}

pub fn is_complete(m: &Model) -> Result<bool> {
    match m.kind() {
        ModelKind::Pn(_) => Ok(true),
        ModelKind::G2N(n) => Ok(primitive_middle(n)? == 0),
    }
}

const HILBERT_BUDGET: u64 = 200_000_000;

fn hilbert_cache() -> &'static Mutex<HashMap<(usize, usize), u64>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), u64>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Number of crossing-free multigraphs on ℤ/N with d edges.
pub fn hilbert_g2n(n: usize, d: usize) -> Result<u64> {
    if n < 2 {
        return Err(Error::contract("hilbert_g2n needs N ≥ 2"));
    }
    if let Some(v) = hilbert_cache().lock().unwrap().get(&(n, d)) {
        return Ok(*v);
    }
    let pairs: Vec<(usize, usize)> = (1..=n)
        .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
        .collect();
    let mut chosen = Vec::new();
    let mut nodes = 0u64;
    let v = count(&pairs, 0, d, &mut chosen, &mut nodes)?;
    hilbert_cache().lock().unwrap().insert((n, d), v);
    Ok(v)
}

fn count(
    pairs: &[(usize, usize)],
    k: usize,
    left: usize,
    chosen: &mut Vec<(usize, usize)>,
    nodes: &mut u64,
) -> Result<u64> {
    *nodes += 1;
    if *nodes > HILBERT_BUDGET {
        return Err(Error::Resource(
            "hilbert_g2n enumeration budget exhausted".into(),
        ));
    }
    if left == 0 {
        return Ok(1);
    }
    let mut total = 0;
    for idx in k..pairs.len() {
        let e = pairs[idx];
        if chosen.iter().any(|&c| chords_cross(c, e)) {
            continue;
        }
        chosen.push(e);
        total += count(pairs, idx, left - 1, chosen, nodes)?;
        chosen.pop();
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankPrediction {
    pub model: String,
    /// Dimension of the vanishing cohomology of a smooth section.
    pub period_rank: Option<String>,
    /// dim H^n_dR of the complement of a generic section.
    pub solution_rank: Option<String>,
    pub complete: bool,
    pub primitive_middle: usize,
}

pub fn rank_prediction(m: &Model) -> Result<RankPrediction> {
    let (period, solution, prim) = match m.kind() {
        ModelKind::Pn(n) => {
            let v = nu(n)?.to_string();
            (Some(v.clone()), Some(v), 0)
        }
        ModelKind::G2N(n) => {
            let prim = primitive_middle(n)?;
            // b₃ = 2 + 2·89 for the (2,4) complete intersection in P⁵
            let period = (n == 4).then_some(180usize);
            (
                period.map(|p| p.to_string()),
                period.map(|p| (p + prim).to_string()),
                prim,
            )
        }
    };
    Ok(RankPrediction {
        model: m.id(),
        period_rank: period,
        solution_rank: solution,
        complete: prim == 0,
        primitive_middle: prim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nu_values() {
        assert_eq!(nu(1).unwrap(), BigInt::from(1));
        assert_eq!(nu(2).unwrap(), BigInt::from(2));
        assert_eq!(nu(3).unwrap(), BigInt::from(21));
        assert_eq!(nu(4).unwrap(), BigInt::from(204));
    }

    #[test]
    fn count_a_matches_nu() {
        assert_eq!(
            a_counts(2),
            vec![1, 3, 3, 1]
                .into_iter()
                .map(BigInt::from)
                .collect::<Vec<_>>()
        );
        for n in 1..=8 {
            assert_eq!(count_a(n).unwrap(), nu(n).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn betti_and_completeness() {
        assert_eq!(grassmann_betti(4, 4).unwrap(), 2);
        assert_eq!(grassmann_betti(4, 2).unwrap(), 1);
        assert_eq!(grassmann_betti(4, 3).unwrap(), 0);
        assert_eq!(grassmann_betti(7, 0).unwrap(), 1);
        assert_eq!(primitive_middle(4).unwrap(), 1);
        assert_eq!(primitive_middle(3).unwrap(), 0);
        assert!(is_complete(&Model::pn(5).unwrap()).unwrap());
        assert!(!is_complete(&Model::g2n(4).unwrap()).unwrap());
        assert!(is_complete(&Model::g2n(3).unwrap()).unwrap());
        let total: usize = (0..=8).map(|k| grassmann_betti(4, k).unwrap()).sum();
        assert_eq!(total, 6);
    }

    #[test]
    fn hilbert_values() {
        assert_eq!(hilbert_g2n(4, 0).unwrap(), 1);
        assert_eq!(hilbert_g2n(4, 1).unwrap(), 6);
        assert_eq!(hilbert_g2n(4, 2).unwrap(), 20);
        assert_eq!(
            hilbert_g2n(5, 3).unwrap(),
            crate::graphcalc::crossing_free_graphs(5, 3).len() as u64
        );
    }

    #[test]
    fn predictions() {
        let p = rank_prediction(&Model::pn(3).unwrap()).unwrap();
        assert_eq!(p.solution_rank.as_deref(), Some("21"));
        assert!(p.complete);
        let g = rank_prediction(&Model::g2n(4).unwrap()).unwrap();
        assert!(!g.complete);
        assert_eq!(g.solution_rank.as_deref(), Some("181"));
        assert!(rank_prediction(&Model::g2n(5).unwrap())
            .unwrap()
            .period_rank
            .is_none());
    }
}
