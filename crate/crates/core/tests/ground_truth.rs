use tautrank_core::coinv::{coinvariant_rank, jacobian_oracle, weight_zero_rank};
use tautrank_core::exactla::RankMode;
use tautrank_core::models::{cyclic, fermat, parse_section, Model};
use tautrank_core::oracle::{hilbert_g2n, nu};
use tautrank_core::ring::{plucker_relations, quotient_piece};
use tautrank_core::Error;

#[test]
fn hilbert_function_matches_plucker_quotient() {
    for d in 0..=5 {
        let q = quotient_piece(6, &plucker_relations(4), d).unwrap().dim() as u64;
        assert_eq!(hilbert_g2n(4, d as usize).unwrap(), q, "d = {d}");
    }
}

#[test]
fn coinvariant_rank_equals_nu_on_complete_models() {
    for n in 1..=2 {
        let m = Model::pn(n).unwrap();
        let r = coinvariant_rank(&m, &fermat(&m).unwrap(), 6, 2, &RankMode::Exact).unwrap();
        assert_eq!(
            r.rank.map(|v| v.to_string()),
            Some(nu(n).unwrap().to_string())
        );
    }
}

#[test]
fn oracle_rejects_singular_sections() {
    let m = Model::pn(2).unwrap();
    let s = parse_section(&m, "x0*x1*x2").unwrap();
    assert!(matches!(
        jacobian_oracle(2, &s),
        Err(Error::OracleInapplicable(_))
    ));
    let r = coinvariant_rank(&m, &s, 5, 2, &RankMode::Exact).unwrap();
    assert_eq!(r.rank, Some(1));
}

#[test]
fn weight_zero_needs_weight_zero_section() {
    let m = Model::g2n(4).unwrap();
    let s = parse_section(&m, "p12^4").unwrap();
    assert!(matches!(
        weight_zero_rank(&m, &s, 2, 2, &RankMode::Exact),
        Err(Error::Contract(_))
    ));
    let r = weight_zero_rank(&m, &cyclic(&m).unwrap(), 3, 2, &RankMode::Exact).unwrap();
    assert_eq!(r.rank, Some(1));
}

#[test]
fn report_round_trips_through_json() {
    let m = Model::pn(1).unwrap();
    let r = coinvariant_rank(&m, &fermat(&m).unwrap(), 3, 2, &RankMode::Exact).unwrap();
    let text = serde_json::to_string(&r).unwrap();
    assert_eq!(
        serde_json::from_str::<tautrank_core::coinv::CoinvariantReport>(&text).unwrap(),
        r
    );
}
