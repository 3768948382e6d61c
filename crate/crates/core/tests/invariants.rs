use std::collections::HashSet;

use proptest::prelude::*;
use ringideal::abelian::RingArith;
use ringideal::blackbox::{brute_force_closure, make_ring, ElementCode, RingOracle, Side};
use ringideal::conformance::DESK_SUITE;
use ringideal::idealcore::{find_basis_representation, IdealSpec};
use ringideal::qsim::Provider;
use ringideal::reference;
use ringideal::ringops::Engine;

fn ring(i: usize) -> RingOracle {
    make_ring(&DESK_SUITE[i % DESK_SUITE.len()].parse().unwrap(), 77).unwrap()
}

fn pick(r: &RingOracle, idx: &[usize]) -> Vec<ElementCode> {
    let all = r.ground_truth().all_codes().unwrap();
    idx.iter().map(|&i| all[i % all.len()]).collect()
}

fn side(k: u8) -> Side {
    [Side::Left, Side::Right, Side::TwoSided][k as usize % 3]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn equality_is_an_equivalence(ri in 0usize..10, s in 0u8..3, gens in prop::collection::vec(prop::collection::vec(0usize..200, 1..3), 3)) {
        let r = ring(ri);
        let mut p = Provider::exact(1);
        let e = Engine::new(&r, &mut p).unwrap();
        let specs: Vec<IdealSpec> = gens.iter().map(|g| IdealSpec::new(side(s), pick(&r, g)).unwrap()).collect();
        let eq = |a: &IdealSpec, b: &IdealSpec, p: &mut Provider| e.ideal_equal(a, b, p).unwrap();
        for a in &specs {
            prop_assert!(eq(a, a, &mut p));
            for b in &specs {
                prop_assert_eq!(eq(a, b, &mut p), eq(b, a, &mut p));
                for c in &specs {
                    if eq(a, b, &mut p) && eq(b, c, &mut p) {
                        prop_assert!(eq(a, c, &mut p));
                    }
                }
            }
        }
    }

    #[test]
    fn colon_contains_the_ideal(ri in 0usize..10, gi in prop::collection::vec(0usize..200, 1..3), gj in prop::collection::vec(0usize..200, 1..3)) {
        let r = ring(ri);
        let mut p = Provider::exact(2);
        let e = Engine::new(&r, &mut p).unwrap();
        let i = e.represent(&IdealSpec::two_sided(pick(&r, &gi)).unwrap(), &mut p).unwrap();
        let j = e.represent(&IdealSpec::two_sided(pick(&r, &gj)).unwrap(), &mut p).unwrap();
        let colon: HashSet<_> = reference::span(&r, &e.colon(&i, &j, &mut p).unwrap().generators).unwrap();
        for x in reference::span(&r, &i.basis.h).unwrap() {
            prop_assert!(colon.contains(&x));
        }
    }

    #[test]
    fn inverses_multiply_to_identity(ri in 0usize..10, x in 0usize..200) {
        let r = ring(ri);
        let mut p = Provider::exact(3);
        let e = Engine::new(&r, &mut p).unwrap();
        let x = pick(&r, &[x])[0];
        if e.is_unit(x, &mut p).unwrap() {
            let y = e.inverse(x, &mut p).unwrap();
            let one = e.multiplicative_identity(&mut p).unwrap();
            let t = r.ground_truth();
            prop_assert_eq!(t.mul(x, y).unwrap(), one);
            prop_assert_eq!(t.mul(y, x).unwrap(), one);
        }
    }

    #[test]
    fn linear_solutions_are_sound_and_complete(ri in 0usize..10, a in 0usize..200, b in 0usize..200) {
        let r = ring(ri);
        let mut p = Provider::exact(4);
        let e = Engine::new(&r, &mut p).unwrap();
        let v = pick(&r, &[a, b]);
        let sols = reference::solutions(&r, v[0], v[1]).unwrap();
        match e.solve_linear(v[0], v[1], &mut p).unwrap() {
            Some(x) => prop_assert_eq!(r.ground_truth().mul(v[0], x).unwrap(), v[1]),
            None => prop_assert!(sols.is_empty()),
        }
    }

    #[test]
    fn tensor_is_associative_and_distributive(ri in 0usize..10, s in 0u8..3, g in prop::collection::vec(0usize..200, 1..3)) {
        let r = ring(ri);
        let mut p = Provider::exact(5);
        let a = RingArith::new(&r, &mut p).unwrap();
        let spec = IdealSpec::new(side(s), pick(&r, &g)).unwrap();
        let rep = find_basis_representation(&a, &spec, &mut p).unwrap();
        let truth: HashSet<_> = brute_force_closure(&r, &spec.generators, r.generators(), spec.side).unwrap().into_iter().collect();
        prop_assert_eq!(rep.order() as usize, truth.len());
        let (m, s, l) = (&rep.tensor, &rep.basis.s, rep.rank());
        for i in 0..l {
            for j in 0..l {
                for k in 0..l {
                    for n in 0..l {
                        let lhs: u128 = (0..l).map(|q| m[i][j][q] as u128 * m[q][k][n] as u128).sum();
                        let rhs: u128 = (0..l).map(|q| m[j][k][q] as u128 * m[i][q][n] as u128).sum();
                        prop_assert_eq!(lhs % s[n] as u128, rhs % s[n] as u128);
                    }
                    let sum = a.add(rep.basis.h[i], rep.basis.h[j]).unwrap();
                    let prod = a.mul(sum, rep.basis.h[k]).unwrap();
                    let expect: Vec<u64> = (0..l).map(|n| (m[i][k][n] + m[j][k][n]) % s[n]).collect();
                    prop_assert_eq!(a.combination(&expect, &rep.basis.h).unwrap(), prod);
                }
            }
        }
    }
}
