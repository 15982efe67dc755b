use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use tautrank_core::coinv::jacobian_oracle;
use tautrank_core::derham::{
    assemble_slice, d, euler_contract, random_form, rescale_check, twisted_cohomology, FormElement,
    FormSpace,
};
use tautrank_core::exactla::{int, rank_exact, RankMode, SparseMatrix};
use tautrank_core::models::{fermat, parse_section, Model, Section};
use tautrank_core::ring::monomials_of_degree;

/// Fermat plus random mixed terms, resampled until smooth.
fn random_section(m: &Model, n: usize, rng: &mut StdRng) -> Section {
    let nv = n + 1;
    loop {
        let mut f = fermat(m).unwrap().poly;
        for mono in monomials_of_degree(nv, (n + 1) as u32) {
            if rng.gen_bool(0.4) {
                f.add_term(mono, int(rng.gen_range(-2..=2)));
            }
        }
        let s = parse_section(m, &f.format(&m.names())).unwrap();
        if jacobian_oracle(n, &s).is_ok() {
            return s;
        }
    }
}

#[test]
fn exterior_derivative_squares_to_zero_and_is_a_derivation() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..300 {
        let nv = rng.gen_range(1..=5);
        let p = rng.gen_range(0..=nv as u32);
        let u = random_form(nv, p, rng.gen_range(0..=3), 3, &mut rng);
        let v = random_form(
            nv,
            rng.gen_range(0..=nv as u32),
            rng.gen_range(0..=3),
            3,
            &mut rng,
        );
        assert!(d(&d(&u)).is_zero());
        let sign = int(if p % 2 == 0 { 1 } else { -1 });
        assert_eq!(
            d(&u.wedge(&v)),
            d(&u).wedge(&v).add(&u.wedge(&d(&v)).scale(&sign))
        );
    }
}

fn delta_matrix(m: &Model, p: u32, e: u32) -> (usize, SparseMatrix) {
    let src = FormSpace::new(m, p, e, false).unwrap();
    let tgt = FormSpace::new(m, p - 1, e, false).unwrap();
    let cols = src
        .basis()
        .iter()
        .map(|w| tgt.coords(&euler_contract(w)).unwrap())
        .collect();
    (
        src.dim(),
        SparseMatrix::from_columns(tgt.dim(), cols).unwrap(),
    )
}

#[test]
fn koszul_sequence_is_exact_in_positive_degree() {
    for n in 1..=3 {
        let m = Model::pn(n).unwrap();
        for e in 1..=5u32 {
            let mut ranks = vec![0usize; n + 3];
            let mut dims = vec![0usize; n + 2];
            for p in 1..=(n as u32 + 1) {
                let (dim, mat) = delta_matrix(&m, p, e);
                dims[p as usize] = dim;
                ranks[p as usize] = rank_exact(&mat).unwrap();
            }
            dims[0] = FormSpace::new(&m, 0, e, false).unwrap().dim();
            for p in 0..=(n + 1) {
                assert_eq!(
                    dims[p],
                    ranks[p] + ranks[p + 1],
                    "pn:{n} internal degree {e} form degree {p}"
                );
            }
        }
    }
}

#[test]
fn twisted_differential_squares_to_zero_on_random_sections() {
    let mut rng = StdRng::seed_from_u64(23);
    for n in 1..=2 {
        let m = Model::pn(n).unwrap();
        for _ in 0..3 {
            let f = random_section(&m, n, &mut rng);
            for k in 0..=(n as i64 + 1) {
                let s = assemble_slice(&m, &f, k, 3, false).unwrap();
                assert!(s.squares_to_zero(), "{} k = {k}", f.source);
            }
            assert!(rescale_check(&m, &f, n as i64, 3).unwrap());
        }
    }
}

#[test]
fn generic_conic_and_cubic() {
    let mut rng = StdRng::seed_from_u64(5);
    for (n, want) in [(1, 1), (2, 2)] {
        let m = Model::pn(n).unwrap();
        let f = random_section(&m, n, &mut rng);
        let r =
            twisted_cohomology(&m, &f, n as i64, n as u32 + 3, &RankMode::Exact, false).unwrap();
        assert_eq!(r.dim, Some(want), "{}: {:?}", f.source, r.settled_dims);
    }
}

#[test]
fn form_degrees() {
    let w = FormElement::dx(3, &[0, 2]).unwrap();
    assert_eq!(w.form_degree(), Some(2));
    assert_eq!(euler_contract(&w).internal_degree(), Some(2));
    assert!(FormElement::dx(3, &[2, 0]).is_err());
}
