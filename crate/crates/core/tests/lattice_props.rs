use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use spd_core::lattice::{enumerate_fi_subgroups, LatticeSubgroup};
use spd_core::{IndexValue, IntMatrix};

fn small_matrix(max_rank: usize, entry: i64) -> impl Strategy<Value = (Vec<Vec<i64>>, usize)> {
    (1..=max_rank).prop_flat_map(move |r| {
        (0..=r).prop_flat_map(move |nrows| {
            proptest::collection::vec(proptest::collection::vec(-entry..=entry, r), nrows)
                .prop_map(move |rows| (rows, r))
        })
    })
}

/// Generators plus a point of matching dimension.
fn matrix_and_point(max_rank: usize, entry: i64, point: i64) -> impl Strategy<Value = (Vec<Vec<i64>>, usize, Vec<i64>)> {
    (1..=max_rank).prop_flat_map(move |r| {
        let rows = (0..=r).prop_flat_map(move |nrows| {
            proptest::collection::vec(proptest::collection::vec(-entry..=entry, r), nrows)
        });
        (rows, proptest::collection::vec(-point..=point, r)).prop_map(move |(rows, v)| (rows, r, v))
    })
}

fn to_big(rows: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

fn subgroup(rows: &[Vec<i64>], r: usize) -> LatticeSubgroup {
    LatticeSubgroup::from_generator_rows(to_big(rows), r).unwrap()
}

proptest! {
    #[test]
    fn hnf_is_idempotent_and_permutation_invariant((rows, r) in small_matrix(3, 8)) {
        let h = subgroup(&rows, r);
        let again = LatticeSubgroup::from_generators(h.basis(), r).unwrap();
        prop_assert_eq!(&again, &h);

        let mut rev = rows.clone();
        rev.reverse();
        prop_assert_eq!(subgroup(&rev, r), h);
    }

    #[test]
    fn member_matches_bruteforce((rows, r, v) in matrix_and_point(2, 4, 6)) {
        let h = subgroup(&rows, r);
        let vb: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        let got = h.contains(&vb).unwrap();

        // Exhaustive over coefficients in a sufficient box: any representation
        // of a point in the box [-6,6]^r over HNF rows with pivots >= 1 needs
        // coefficients bounded by 40 at this size.
        let gens = h.basis().row_vecs();
        let mut found = false;
        let bound = 40i64;
        fn rec(gens: &[Vec<BigInt>], acc: Vec<BigInt>, target: &[BigInt], bound: i64, found: &mut bool) {
            if *found {
                return;
            }
            if gens.is_empty() {
                if acc == target {
                    *found = true;
                }
                return;
            }
            for c in -bound..=bound {
                let cb = BigInt::from(c);
                let next: Vec<BigInt> = acc.iter().zip(&gens[0]).map(|(a, g)| a + &cb * g).collect();
                rec(&gens[1..], next, target, bound, found);
            }
        }
        rec(&gens, vec![BigInt::zero(); r], &vb, bound, &mut found);
        prop_assert_eq!(got, found);
    }

    #[test]
    fn intersection_index_bound(d1 in proptest::collection::vec(1i64..=4, 2),
                                d2 in proptest::collection::vec(1i64..=4, 2),
                                o1 in 0i64..4, o2 in 0i64..4) {
        let h1 = subgroup(&[vec![d1[0], o1], vec![0, d1[1]]], 2);
        let h2 = subgroup(&[vec![d2[0], o2], vec![0, d2[1]]], 2);
        let cap = h1.intersect(&h2).unwrap();
        let (i1, i2) = (h1.index(), h2.index());
        let (n1, n2) = (i1.finite().unwrap(), i2.finite().unwrap());
        match cap.index() {
            IndexValue::Finite(n) => prop_assert!(n <= n1 * n2),
            IndexValue::Infinite => prop_assert!(false, "intersection of finite-index subgroups must be finite index"),
        }
        // Intersection is contained in both.
        prop_assert!(cap.is_subset_of(&h1).unwrap());
        prop_assert!(cap.is_subset_of(&h2).unwrap());
    }

    #[test]
    fn index_multiplicative_on_chains(db in proptest::collection::vec(1i64..=3, 2),
                                      scale in proptest::collection::vec(1i64..=3, 2),
                                      off in 0i64..3) {
        // B full rank; A built from scaled combinations of B's rows.
        let b = subgroup(&[vec![db[0], off], vec![0, db[1]]], 2);
        let rows = b.basis().row_vecs();
        let a_rows = vec![
            rows[0].iter().map(|e| e * BigInt::from(scale[0])).collect::<Vec<_>>(),
            rows[1].iter().map(|e| e * BigInt::from(scale[1])).collect::<Vec<_>>(),
        ];
        let a = LatticeSubgroup::from_generator_rows(a_rows, 2).unwrap();
        let ia = a.index().finite().unwrap().clone();
        let ib = b.index().finite().unwrap().clone();
        let rel = a.index_in(&b).unwrap().finite().unwrap().clone();
        prop_assert_eq!(ia, ib * rel);
    }

    #[test]
    fn adapted_basis_postconditions((rows, r) in small_matrix(3, 6)) {
        let h = subgroup(&rows, r);
        prop_assume!(!h.is_zero());
        let ab = h.adapted_basis().unwrap();
        prop_assert!(ab.full_basis.det().abs().is_one());
        for w in ab.divisors.windows(2) {
            prop_assert!((&w[1] % &w[0]).is_zero(), "divisor chain {:?}", ab.divisors);
        }
        let scaled: Vec<Vec<BigInt>> = ab
            .divisors
            .iter()
            .enumerate()
            .map(|(i, d)| ab.full_basis.row(i).iter().map(|e| e * d).collect())
            .collect();
        prop_assert_eq!(LatticeSubgroup::from_generator_rows(scaled, r).unwrap(), h);
    }

    #[test]
    fn fi_supergroup_postconditions((rows, r, y) in matrix_and_point(4, 10, 10)) {
        let h = subgroup(&rows, r);
        prop_assume!(!h.index().is_finite());
        let yb: Vec<BigInt> = y.iter().map(|&x| BigInt::from(x)).collect();
        prop_assume!(!h.contains(&yb).unwrap());
        let g = h.fi_supergroup(&yb).unwrap();
        prop_assert!(g.index().is_finite());
        prop_assert!(h.is_subset_of(&g).unwrap());
        prop_assert!(!g.contains(&yb).unwrap());
    }
}

#[test]
fn enumeration_is_exhaustive_in_z2() {
    // Cross-check against an independent enumeration: subgroups of index n
    // in Z^2 from all (a, b, d) with a*d = n, 0 <= b < d... counted via the
    // canonical forms themselves, so instead verify against distinct residue
    // quotients: two distinct HNF matrices must differ as point sets.
    let subs: Vec<LatticeSubgroup> = enumerate_fi_subgroups(2, 4).collect();
    for (i, a) in subs.iter().enumerate() {
        for b in subs.iter().skip(i + 1) {
            let same = a.is_subset_of(b).unwrap() && b.is_subset_of(a).unwrap();
            assert!(!same, "duplicate subgroup in enumeration: {a:?} vs {b:?}");
        }
    }
    // sum over n <= 4 of sigma(n) = 1 + 3 + 4 + 7
    assert_eq!(subs.len(), 15);
}

#[test]
fn hnf_pivot_shape() {
    // Echelon with positive pivots and reduced entries above.
    let m = IntMatrix::from_i64_rows(&[&[6, 8, 5], &[2, 3, 1], &[4, 2, 9]], 3);
    let h = LatticeSubgroup::from_generators(&m, 3).unwrap();
    let b = h.basis();
    let mut last_pivot: Option<usize> = None;
    for i in 0..b.rows() {
        let p = b.row(i).iter().position(|e| !e.is_zero()).unwrap();
        if let Some(lp) = last_pivot {
            assert!(p > lp);
        }
        assert!(b.get(i, p) > &BigInt::zero());
        for k in 0..i {
            let e = b.get(k, p);
            assert!(e >= &BigInt::zero() && e < b.get(i, p), "entry above pivot not reduced");
        }
        last_pivot = Some(p);
    }
}
