mod common;

use common::*;
use proptest::prelude::*;
use raag::amalgam::extend;
use raag::centralizers::centralizer;
use raag::discrimination::{make_psi, retract, separate, RetractionIndex};
use raag::words;
use raag::zt_ice::{build_ice, PolyExp};
use raag::{Elem, Graph, Group};

fn letters(n: usize, max: usize) -> impl Strategy<Value = Letters> {
    prop::collection::vec((0..n, prop_oneof![Just(1i64), Just(-1i64)]), 0..=max)
}

fn graph_strategy() -> impl Strategy<Value = Graph> {
    (2usize..=6, prop::collection::vec(any::<bool>(), 15)).prop_map(|(n, bits)| {
        let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let mut edges = Vec::new();
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                if bits[k] {
                    edges.push((names[i].clone(), names[j].clone()));
                }
                k += 1;
            }
        }
        Graph::new(&names, &edges).unwrap()
    })
}

fn p4_ext() -> Group {
    let p4 = Group::raag(Graph::p4());
    extend(&p4, &p4.parse("a c").unwrap(), 2, None).unwrap()
}

/// Element of the extension from a letter list over its generators.
fn elem(g: &Group, l: &[(usize, i64)]) -> Elem {
    let gens = g.generators();
    let parts: Vec<Elem> = l.iter().map(|&(i, e)| g.pow(&gens[i % gens.len()], e)).collect();
    g.product(parts.iter())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn normalize_is_idempotent_and_agrees_with_oracle(g in graph_strategy(), l in letters(6, 10)) {
        let l: Letters = l.into_iter().map(|(x, e)| (x % g.len(), e)).collect();
        let n = words::normalize(&g, &to_word(&l));
        prop_assert_eq!(words::normalize(&g, &n), n.clone());
        prop_assert_eq!(expand(&n).len(), oracle_reduce(&g, &l).len());
        prop_assert!(oracle_equal(&g, &l, &expand(&n)));
    }

    #[test]
    fn chordality_matches_brute_force(g in graph_strategy()) {
        prop_assert_eq!(g.is_chordal().0, brute_force_induced_cycle(&g).is_none());
    }

    #[test]
    fn centraliser_generators_commute(l in letters(4, 6)) {
        let g = Graph::p4();
        let w = words::normalize(&g, &to_word(&l));
        prop_assume!(!w.is_identity());
        let c = centralizer(&g, &w).unwrap();
        for x in c.generators(&g) {
            prop_assert!(oracle_commute(&g, &expand(&w), &expand(&x)));
        }
        prop_assert!(c.contains(&g, &w));
    }

    #[test]
    fn extension_is_a_group(a in letters(6, 6), b in letters(6, 6), c in letters(6, 6)) {
        let g = p4_ext();
        let (x, y, z) = (elem(&g, &a), elem(&g, &b), elem(&g, &c));
        prop_assert_eq!(g.mul(&g.mul(&x, &y), &z), g.mul(&x, &g.mul(&y, &z)));
        prop_assert!(g.is_identity(&g.mul(&x, &g.inv(&x))));
        prop_assert_eq!(g.mul(&x, &g.identity()), x);
    }

    #[test]
    fn retraction_is_a_homomorphism(a in letters(6, 6), b in letters(6, 6), p1 in -3i64..=3, p2 in -3i64..=3, m in 1i64..=4) {
        let g = p4_ext();
        let base = &g.ext().unwrap().base;
        let idx = RetractionIndex { psi: vec![p1, p2], m };
        let (x, y) = (elem(&g, &a), elem(&g, &b));
        let lhs = retract(&g, &idx, &g.mul(&x, &y)).unwrap();
        let rhs = base.mul(&retract(&g, &idx, &x).unwrap(), &retract(&g, &idx, &y).unwrap());
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(retract(&g, &idx, &base.parse("b a").map(|e| g.lift(&e)).unwrap()).unwrap(), base.parse("b a").unwrap());
    }

    #[test]
    fn psi_separates_vectors(vs in prop::collection::vec(prop::collection::vec(-4i64..=4, 3), 1..6)) {
        let vs: Vec<Vec<i64>> = vs.into_iter().filter(|v| v.iter().any(|&c| c != 0)).collect();
        let psi = make_psi(3, &vs);
        let mut vals: Vec<i64> = vs.iter().map(|v| v.iter().zip(&psi).map(|(a, b)| a * b).sum::<i64>().abs()).collect();
        prop_assert!(vals.iter().all(|&x| x != 0));
        // v and -v always share |psi·v|, so count vectors up to sign.
        let mut distinct: Vec<Vec<i64>> = vs
            .iter()
            .map(|v| std::cmp::max(v.clone(), v.iter().map(|c| -c).collect()))
            .collect();
        distinct.sort();
        distinct.dedup();
        vals.sort();
        vals.dedup();
        prop_assert_eq!(vals.len(), distinct.len());
    }

    #[test]
    fn separation_certificates_are_nontrivial(a in letters(6, 6)) {
        let g = p4_ext();
        let x = elem(&g, &a);
        prop_assume!(!g.is_identity(&x));
        let c = separate(&g, &x, 64).unwrap();
        let base = &g.ext().unwrap().base;
        prop_assert!(!base.is_identity(c.image()));
        prop_assert_eq!(retract(&g, &c.index, &x).unwrap(), c.image().clone());
    }

    #[test]
    fn polynomial_evaluation_is_a_ring_map(p in prop::collection::vec(-5i64..=5, 0..4), q in prop::collection::vec(-5i64..=5, 0..4), m in -3i64..=3) {
        let (p, q) = (PolyExp::new(p), PolyExp::new(q));
        prop_assert_eq!(p.add(&q).eval(m), p.eval(m) + q.eval(m));
        prop_assert_eq!(p.mul(&q).eval(m), p.eval(m) * q.eval(m));
        prop_assert_eq!(PolyExp::parse(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn specialisation_is_a_homomorphism(a in letters(4, 6), b in letters(4, 6), m in 1i64..=4) {
        let chain = build_ice(&Graph::edgeless(&["x", "y"]), &[("x".into(), 2)]).unwrap();
        let top = chain.top();
        let (x, y) = (elem(top, &a), elem(top, &b));
        let base = &chain.levels[0];
        prop_assert_eq!(chain.specialize(&top.mul(&x, &y), m), base.mul(&chain.specialize(&x, m), &chain.specialize(&y, m)));
    }
}
