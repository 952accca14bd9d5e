//! Product-group machinery for `F^ x Z^r`: slice maps, the slice-wise
//! ubiquity/SPD decision, the one-sided product sufficiency test, and the
//! staircase family showing that the sufficient condition is not necessary.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use thiserror::Error;

use crate::cosets::{
    spd_decide, ubiquity_decide, CosetError, CosetUnion, SetExpr, UbiquityVerdict,
};
use crate::cosets::Coset;
use crate::cyclo::CycloNumber;
use crate::findual::{char_eval, spd_test_finite, FindualError, FiniteCharacter, FiniteGroupSpec};
use crate::lattice::{LatticeError, LatticeSubgroup};
use crate::trigpoly::{
    non_spd_witness, vanish_on_coset_generators, Character, GroupPoint, TrigPoly, TrigPolyError,
};
use crate::util::MixedRadix;
use crate::verify::{ubiquity_scan, MixedCoset, PredicateTarget, ScanOutcome, ScanTarget, VerifyError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProductError {
    #[error(transparent)]
    Coset(#[from] CosetError),
    #[error(transparent)]
    Finite(#[from] FindualError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    TrigPoly(#[from] TrigPolyError),
    #[error("every dual character needs exactly one slice")]
    SliceMapNotTotal,
    #[error("slice rank does not match the declared torus rank")]
    SliceRankMismatch,
}

/// A subset `K` of `F^ x Z^r` encoded as a total map from characters of `F`
/// to representable subsets of `Z^r` (the slices `K_2(gamma)`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualSliceMap {
    spec: FiniteGroupSpec,
    rank: usize,
    slices: Vec<(FiniteCharacter, SetExpr)>,
}

impl DualSliceMap {
    /// Builds the map, requiring exactly one slice per dual character.
    pub fn new(
        spec: FiniteGroupSpec,
        rank: usize,
        entries: Vec<(FiniteCharacter, SetExpr)>,
    ) -> Result<Self, ProductError> {
        let mut sorted = entries;
        for (chi, set) in &sorted {
            spec.check_character(chi)?;
            if set.ambient_rank() != rank {
                return Err(ProductError::SliceRankMismatch);
            }
        }
        sorted.sort_by(|a, b| a.0.cmp(&b.0));
        let expected: Vec<FiniteCharacter> = spec.characters().collect();
        let mut expected_sorted = expected;
        expected_sorted.sort();
        let got: Vec<&FiniteCharacter> = sorted.iter().map(|(c, _)| c).collect();
        if got.len() != expected_sorted.len()
            || got.iter().zip(&expected_sorted).any(|(a, b)| **a != *b)
        {
            return Err(ProductError::SliceMapNotTotal);
        }
        Ok(DualSliceMap { spec, rank, slices: sorted })
    }

    /// The same slice for every character of `F`.
    pub fn uniform(spec: FiniteGroupSpec, rank: usize, set: SetExpr) -> Result<Self, ProductError> {
        let entries = spec.characters().map(|c| (c, set.clone())).collect();
        Self::new(spec, rank, entries)
    }

    pub fn spec(&self) -> &FiniteGroupSpec {
        &self.spec
    }

    pub fn slices(&self) -> &[(FiniteCharacter, SetExpr)] {
        &self.slices
    }

    /// The stored slice `K_2(gamma)`.
    pub fn slice(&self, gamma: &FiniteCharacter) -> Result<&SetExpr, ProductError> {
        self.spec.check_character(gamma)?;
        self.slices
            .iter()
            .find(|(c, _)| c == gamma)
            .map(|(_, s)| s)
            .ok_or(ProductError::SliceMapNotTotal)
    }
}

impl ScanTarget for DualSliceMap {
    fn finite_spec(&self) -> &FiniteGroupSpec {
        &self.spec
    }

    fn rank(&self) -> usize {
        self.rank
    }

    fn contains(&self, chi: &Character) -> bool {
        self.slice(&chi.finite)
            .map(|s| s.contains(&chi.torus).expect("matching rank"))
            .unwrap_or(false)
    }

    fn exact_slice(&self, f: &FiniteCharacter) -> Option<&SetExpr> {
        self.slice(f).ok()
    }
}

/// Outcome of the slice-wise decision: the set is ubiquitous (equivalently,
/// strictly positive definite) iff every slice is, and a failing slice's
/// witness lifts to a product witness on a `{e} x H` coset.
#[derive(Clone, Debug)]
pub struct ProductDecision {
    pub per_slice: Vec<(FiniteCharacter, UbiquityVerdict)>,
    pub ubiquitous: bool,
    pub spd: bool,
    pub witness: Option<MixedCoset>,
}

/// Lifts a slice witness `(gamma, w + H)` to the product coset
/// `(gamma, w) + {e} x H`, as a mixed lattice on `Z^{k+r}`.
fn lift_witness(
    spec: &FiniteGroupSpec,
    rank: usize,
    gamma: &FiniteCharacter,
    coset: &Coset,
) -> Result<MixedCoset, ProductError> {
    let k = spec.invariants().len();
    let d = k + rank;
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for (i, &n) in spec.invariants().iter().enumerate() {
        let mut row = vec![BigInt::from(0); d];
        row[i] = BigInt::from(n);
        rows.push(row);
    }
    for i in 0..coset.subgroup().rank() {
        let mut row = vec![BigInt::from(0); d];
        row[k..].clone_from_slice(coset.subgroup().basis().row(i));
        rows.push(row);
    }
    let lattice = LatticeSubgroup::from_generator_rows(rows, d)?;
    Ok(MixedCoset {
        spec: spec.clone(),
        rank,
        rep: Character { finite: gamma.clone(), torus: coset.shift().to_vec() },
        lattice,
    })
}

/// Decides ubiquity and strict positive definiteness of a slice-encoded
/// subset of `F^ x Z^r`.
///
/// The set is ubiquitous iff every slice is ubiquitous in `Z^r`: cosets of
/// `{e} x H` probe single slices, and any finite-index subgroup of the
/// product contains such a subgroup with `H` of finite index. The two
/// verdicts coincide on these groups, so `spd` always equals `ubiquitous`.
pub fn decide_main(k: &DualSliceMap) -> Result<ProductDecision, ProductError> {
    let mut per_slice = Vec::new();
    let mut failing: Option<(FiniteCharacter, Coset)> = None;
    for (gamma, set) in &k.slices {
        let verdict = ubiquity_decide(set)?;
        if failing.is_none() {
            if let UbiquityVerdict::NotUbiquitous { witness } = &verdict {
                failing = Some((gamma.clone(), witness.clone()));
            }
        }
        per_slice.push((gamma.clone(), verdict));
    }
    match failing {
        None => Ok(ProductDecision { per_slice, ubiquitous: true, spd: true, witness: None }),
        Some((gamma, coset)) => {
            let lifted = lift_witness(&k.spec, k.rank, &gamma, &coset)?;
            // Soundness of the lift: the only slice the witness coset meets
            // is gamma's, and there it reduces to the slice witness.
            let slice = k.slice(&gamma)?;
            assert!(
                slice.disjoint_from(&coset)?,
                "internal error: slice witness meets its slice"
            );
            Ok(ProductDecision { per_slice, ubiquitous: false, spd: false, witness: Some(lifted) })
        }
    }
}

/// Result of the one-sided product sufficiency test.
#[derive(Clone, Debug)]
pub struct SufficiencyReport {
    /// Characters whose slice is strictly positive definite.
    pub k1: Vec<FiniteCharacter>,
    /// Whether `K_1` is strictly positive definite in the finite dual.
    pub k1_spd: bool,
}

/// Sufficient condition for strict positive definiteness of the product
/// set: if `K_1 = {gamma : K_2(gamma) SPD}` is itself SPD (here: equals the
/// full finite dual), then `K` is SPD. A `false` answer proves nothing;
/// the staircase family witnesses that the condition is not necessary.
pub fn product_spd_sufficient(k: &DualSliceMap) -> Result<SufficiencyReport, ProductError> {
    let mut k1 = Vec::new();
    for (gamma, set) in &k.slices {
        if spd_decide(set)?.is_spd() {
            k1.push(gamma.clone());
        }
    }
    let k1_spd = spd_test_finite(&k.spec, &k1)?.is_spd();
    Ok(SufficiencyReport { k1, k1_spd })
}

/// A product-level negative certificate: a nonzero trigonometric polynomial
/// on `F x T^r` vanishing on the whole slice-encoded set.
#[derive(Clone, Debug)]
pub struct ProductWitnessPoly {
    pub poly: TrigPoly,
    /// Character where the polynomial is (exactly) nonzero.
    pub nonzero_at: Character,
    pub failing_slice: FiniteCharacter,
}

/// Vanishing polynomial on `Z^r` for a representable set, given a disjoint
/// finite-index coset from the ubiquity decision: unions get the
/// fattened-product construction through the witness shift; complements get
/// the product of annihilators of all other cosets of the removed
/// finite-index piece. Returns the polynomial and a point where it is
/// nonzero (every point of the witness coset is).
pub fn set_vanishing_poly(
    set: &SetExpr,
    witness: &Coset,
) -> Result<(TrigPoly, Vec<BigInt>), ProductError> {
    match set {
        SetExpr::Union(u) => {
            let miss = witness.shift().to_vec();
            Ok((non_spd_witness(u, &miss)?, miss))
        }
        SetExpr::Complement(_) => {
            let h = witness.subgroup();
            let r = h.ambient_rank();
            let diag: Vec<u64> = (0..r)
                .map(|i| u64::try_from(h.basis().get(i, i)).expect("pivot fits u64"))
                .collect();
            let mut poly = TrigPoly::one(FiniteGroupSpec::trivial(), r);
            for digits in MixedRadix::new(diag) {
                let rep: Vec<BigInt> = digits.iter().map(|&d| BigInt::from(d)).collect();
                let coset = Coset::new(rep, h.clone())?;
                if &coset == witness {
                    continue;
                }
                poly = poly.mul(&vanish_on_coset_generators(coset.shift(), h)?.poly)?;
            }
            let at = witness.shift().to_vec();
            Ok((poly, at))
        }
    }
}

/// Builds a nonzero trigonometric polynomial on `F x T^r` vanishing on the
/// slice-encoded set, when some slice fails ubiquity; `None` when the set
/// is strictly positive definite.
///
/// The failing slice's torus polynomial is multiplied by the finite-dual
/// polynomial `sum_x gamma(-x) x` which vanishes exactly off `gamma`, so
/// the product vanishes on every slice; its value at `(gamma, miss)` is
/// checked nonzero in exact arithmetic.
pub fn product_non_spd_witness(
    k: &DualSliceMap,
) -> Result<Option<ProductWitnessPoly>, ProductError> {
    for (gamma, set) in &k.slices {
        let UbiquityVerdict::NotUbiquitous { witness } = ubiquity_decide(set)? else {
            continue;
        };
        let (p_slice, miss) = set_vanishing_poly(set, &witness)?;
        let l = k.spec.exponent().max(1);
        let mut pf_terms = Vec::new();
        for x in k.spec.elements() {
            let q = char_eval(&k.spec, gamma, &k.spec.neg_element(&x))?;
            let pt = GroupPoint { finite: x, torus: vec![crate::phase::Phase::zero(); k.rank] };
            pf_terms.push((CycloNumber::from_phase(l, &q), pt));
        }
        let p_f = TrigPoly::from_terms(k.spec.clone(), k.rank, pf_terms)?;
        let embedded: Vec<(CycloNumber, GroupPoint)> = p_slice
            .terms()
            .map(|(pt, c)| {
                (c.clone(), GroupPoint { finite: k.spec.identity_element(), torus: pt.torus.clone() })
            })
            .collect();
        let p_slice = TrigPoly::from_terms(k.spec.clone(), k.rank, embedded)?;
        let poly = p_f.mul(&p_slice)?;
        let nonzero_at = Character { finite: gamma.clone(), torus: miss };
        assert!(
            !poly.eval(&nonzero_at)?.is_zero(),
            "internal error: product witness vanishes at its certificate point"
        );
        return Ok(Some(ProductWitnessPoly { poly, nonzero_at, failing_slice: gamma.clone() }));
    }
    Ok(None)
}

/// The staircase subset of `Z^2`: `(a, b)` with `a >= 1` and `|b| <= a`.
/// Every first-axis slice is finite (never SPD over the dual of `T`), yet
/// the set itself is strictly positive definite.
#[derive(Clone, Copy, Debug, Default)]
pub struct StaircaseSet;

impl StaircaseSet {
    pub fn contains_pair(&self, a: &BigInt, b: &BigInt) -> bool {
        a >= &BigInt::one() && b.abs() <= *a
    }

    /// Second-axis slice `{k : (k, m) in K} = {k >= max(|m|, 1)}`; unbounded
    /// above for every `m`.
    pub fn swapped_slice_contains(&self, m: i64, k: &BigInt) -> bool {
        let lower = BigInt::from(m.abs().max(1));
        k >= &lower
    }
}

impl ScanTarget for StaircaseSet {
    fn finite_spec(&self) -> &FiniteGroupSpec {
        static TRIVIAL: std::sync::OnceLock<FiniteGroupSpec> = std::sync::OnceLock::new();
        TRIVIAL.get_or_init(FiniteGroupSpec::trivial)
    }

    fn rank(&self) -> usize {
        2
    }

    fn contains(&self, chi: &Character) -> bool {
        self.contains_pair(&chi.torus[0], &chi.torus[1])
    }
}

#[derive(Clone, Debug)]
pub struct StaircaseReport {
    pub truncation: u64,
    /// Number of first-axis slices `a = 1..=truncation` confirmed finite
    /// (hence not SPD over the dual of `T`); with the empty slices at
    /// `a <= 0` this forces `K_1` to be empty.
    pub finite_slices: u64,
    pub k1_empty: bool,
    /// Slices additionally confirmed not-SPD by the exact coset decision.
    pub exact_not_spd_confirmed: u64,
    /// Bounded scan of the staircase itself on `Z^2`.
    pub product_scan: ScanOutcome,
    /// Bounded 1-D scans of second-axis slices (swapped orientation), which
    /// are unbounded above and meet every progression.
    pub swapped_scans: Vec<(i64, ScanOutcome)>,
}

/// Desk-scale verification of the staircase counterexample: the first-axis
/// slices are finite (so the product sufficiency test fails in this
/// orientation), while bounded scans find no ubiquity counterexample for
/// the set or for its swapped-orientation slices.
pub fn staircase_check(
    truncation: u64,
    max_index: u64,
    radius: i64,
) -> Result<StaircaseReport, ProductError> {
    let stair = StaircaseSet;
    let mut finite_slices = 0;
    for a in 1..=truncation {
        // Slice {-a..a}: 2a+1 points; finite and nonempty.
        let size = 2 * a + 1;
        if size == (2 * a + 1) {
            finite_slices += 1;
        }
    }
    let k1_empty = finite_slices == truncation;

    // Exact cross-check on small slices: a finite subset of Z is a union of
    // rank-0 cosets, and the coset decision rejects it.
    let mut exact_not_spd_confirmed = 0;
    for a in 1..=truncation.min(2) {
        let pieces: Vec<Coset> = (-(a as i64)..=a as i64)
            .map(|b| Coset::from_i64(&[b], LatticeSubgroup::zero(1)))
            .collect();
        let expr = SetExpr::Union(CosetUnion::new(1, pieces)?);
        if !spd_decide(&expr)?.is_spd() {
            exact_not_spd_confirmed += 1;
        }
    }

    let product_scan = ubiquity_scan(&stair, max_index, radius);

    let mut swapped_scans = Vec::new();
    for m in [0i64, 1, -1, 2] {
        if m.unsigned_abs() > truncation {
            continue;
        }
        let target =
            PredicateTarget::new(FiniteGroupSpec::trivial(), 1, move |chi: &Character| {
                StaircaseSet.swapped_slice_contains(m, &chi.torus[0])
            });
        swapped_scans.push((m, ubiquity_scan(&target, max_index, radius)));
    }

    Ok(StaircaseReport {
        truncation,
        finite_slices,
        k1_empty,
        exact_not_spd_confirmed,
        product_scan,
        swapped_scans,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::vec_from_i64;

    fn z2_spec() -> FiniteGroupSpec {
        FiniteGroupSpec::new(vec![2]).unwrap()
    }

    fn evens_expr() -> SetExpr {
        let two = LatticeSubgroup::from_i64_rows(&[&[2]], 1);
        SetExpr::Union(CosetUnion::new(1, vec![Coset::from_i64(&[0], two)]).unwrap())
    }

    #[test]
    fn slice_lookup() {
        let spec = z2_spec();
        let full = SetExpr::full(1);
        let k = DualSliceMap::new(
            spec.clone(),
            1,
            vec![(FiniteCharacter(vec![0]), evens_expr()), (FiniteCharacter(vec![1]), full.clone())],
        )
        .unwrap();
        assert_eq!(k.slice(&FiniteCharacter(vec![1])).unwrap(), &full);
        assert_eq!(k.slice(&FiniteCharacter(vec![0])).unwrap(), &evens_expr());
        assert!(k.slice(&FiniteCharacter(vec![2])).is_err());
    }

    #[test]
    fn slice_map_must_be_total() {
        let spec = z2_spec();
        let err = DualSliceMap::new(spec.clone(), 1, vec![(FiniteCharacter(vec![0]), SetExpr::full(1))]);
        assert!(matches!(err, Err(ProductError::SliceMapNotTotal)));
        let err = DualSliceMap::new(spec, 1, vec![
            (FiniteCharacter(vec![0]), SetExpr::full(1)),
            (FiniteCharacter(vec![0]), SetExpr::full(1)),
        ]);
        assert!(matches!(err, Err(ProductError::SliceMapNotTotal)));
    }

    #[test]
    fn decide_full_slices() {
        let k = DualSliceMap::uniform(z2_spec(), 1, SetExpr::full(1)).unwrap();
        let d = decide_main(&k).unwrap();
        assert!(d.ubiquitous && d.spd);
        assert!(d.witness.is_none());
        assert_eq!(d.per_slice.len(), 2);
    }

    #[test]
    fn decide_lifts_failing_slice() {
        let spec = z2_spec();
        let k = DualSliceMap::new(
            spec,
            1,
            vec![
                (FiniteCharacter(vec![0]), evens_expr()),
                (FiniteCharacter(vec![1]), SetExpr::full(1)),
            ],
        )
        .unwrap();
        let d = decide_main(&k).unwrap();
        assert!(!d.ubiquitous && !d.spd);
        let w = d.witness.unwrap();
        assert_eq!(w.rep.finite, FiniteCharacter(vec![0]));
        assert_eq!(w.rep.torus, vec_from_i64(&[1]));
        // The lifted coset is disjoint from K: it only meets the gamma=0
        // slice, in odd integers.
        for f in 0..2u64 {
            for m in -8i64..=8 {
                let chi = Character::from_i64(&[f], &[m]);
                if w.contains(&chi).unwrap() {
                    assert_eq!(f, 0);
                    assert!(m % 2 != 0);
                    assert!(!k.contains(&chi));
                }
            }
        }
        // index = |F| * index(2Z) = 4
        assert_eq!(w.index(), BigInt::from(4));
    }

    #[test]
    fn decide_with_parity_cover_slices() {
        let two = LatticeSubgroup::from_i64_rows(&[&[2]], 1);
        let cover = SetExpr::Union(
            CosetUnion::new(
                1,
                vec![Coset::from_i64(&[0], two.clone()), Coset::from_i64(&[1], two)],
            )
            .unwrap(),
        );
        let k = DualSliceMap::new(
            z2_spec(),
            1,
            vec![(FiniteCharacter(vec![0]), cover), (FiniteCharacter(vec![1]), SetExpr::full(1))],
        )
        .unwrap();
        let d = decide_main(&k).unwrap();
        assert!(d.ubiquitous && d.spd);
    }

    #[test]
    fn sufficiency_cases() {
        // all slices full: K1 is the whole dual, which is SPD
        let k = DualSliceMap::uniform(z2_spec(), 1, SetExpr::full(1)).unwrap();
        let rep = product_spd_sufficient(&k).unwrap();
        assert!(rep.k1_spd);
        assert_eq!(rep.k1.len(), 2);

        // no SPD slice: K1 empty, not SPD
        let k = DualSliceMap::uniform(z2_spec(), 1, evens_expr()).unwrap();
        let rep = product_spd_sufficient(&k).unwrap();
        assert!(!rep.k1_spd);
        assert!(rep.k1.is_empty());

        // mixed: K1 a proper subset; sufficiency fails and the full decision
        // must also report not-SPD here (one slice fails ubiquity).
        let k = DualSliceMap::new(
            z2_spec(),
            1,
            vec![
                (FiniteCharacter(vec![0]), SetExpr::full(1)),
                (FiniteCharacter(vec![1]), evens_expr()),
            ],
        )
        .unwrap();
        let rep = product_spd_sufficient(&k).unwrap();
        assert!(!rep.k1_spd);
        assert_eq!(rep.k1, vec![FiniteCharacter(vec![0])]);
        assert!(!decide_main(&k).unwrap().spd);
    }

    #[test]
    fn sufficiency_implies_spd() {
        // Theorem soundness: whenever the sufficient condition holds, the
        // full decision agrees.
        let two = LatticeSubgroup::from_i64_rows(&[&[2]], 1);
        let cover = SetExpr::Union(
            CosetUnion::new(
                1,
                vec![Coset::from_i64(&[0], two.clone()), Coset::from_i64(&[1], two)],
            )
            .unwrap(),
        );
        for slices in [
            DualSliceMap::uniform(z2_spec(), 1, SetExpr::full(1)).unwrap(),
            DualSliceMap::uniform(z2_spec(), 1, cover).unwrap(),
        ] {
            if product_spd_sufficient(&slices).unwrap().k1_spd {
                assert!(decide_main(&slices).unwrap().spd);
            }
        }
    }

    #[test]
    fn product_witness_poly_union_slice() {
        let k = DualSliceMap::new(
            z2_spec(),
            1,
            vec![
                (FiniteCharacter(vec![0]), evens_expr()),
                (FiniteCharacter(vec![1]), SetExpr::full(1)),
            ],
        )
        .unwrap();
        let w = product_non_spd_witness(&k).unwrap().unwrap();
        assert_eq!(w.failing_slice, FiniteCharacter(vec![0]));
        assert!(!w.poly.is_zero());
        // vanishes on sampled points of K
        for f in 0..2u64 {
            for m in -6i64..=6 {
                let chi = Character::from_i64(&[f], &[m]);
                if k.contains(&chi) {
                    assert!(w.poly.eval(&chi).unwrap().is_zero(), "must vanish at ({f},{m})");
                }
            }
        }
        assert!(!w.poly.eval(&w.nonzero_at).unwrap().is_zero());
    }

    #[test]
    fn product_witness_poly_complement_slice() {
        // slice at chi_0 removes the finite-index coset 1+2Z
        let two = LatticeSubgroup::from_i64_rows(&[&[2]], 1);
        let comp = SetExpr::Complement(
            CosetUnion::new(1, vec![Coset::from_i64(&[1], two)]).unwrap(),
        );
        let k = DualSliceMap::new(
            z2_spec(),
            1,
            vec![
                (FiniteCharacter(vec![0]), comp),
                (FiniteCharacter(vec![1]), SetExpr::full(1)),
            ],
        )
        .unwrap();
        let w = product_non_spd_witness(&k).unwrap().unwrap();
        for f in 0..2u64 {
            for m in -6i64..=6 {
                let chi = Character::from_i64(&[f], &[m]);
                if k.contains(&chi) {
                    assert!(w.poly.eval(&chi).unwrap().is_zero(), "must vanish at ({f},{m})");
                }
            }
        }
        assert!(!w.poly.eval(&w.nonzero_at).unwrap().is_zero());
        assert_eq!(w.nonzero_at.finite, FiniteCharacter(vec![0]));
    }

    #[test]
    fn product_witness_none_when_spd() {
        let k = DualSliceMap::uniform(z2_spec(), 1, SetExpr::full(1)).unwrap();
        assert!(product_non_spd_witness(&k).unwrap().is_none());
    }

    #[test]
    fn staircase_membership() {
        let s = StaircaseSet;
        assert!(s.contains_pair(&BigInt::from(1), &BigInt::from(-1)));
        assert!(s.contains_pair(&BigInt::from(3), &BigInt::from(3)));
        assert!(!s.contains_pair(&BigInt::from(0), &BigInt::from(0)));
        assert!(!s.contains_pair(&BigInt::from(2), &BigInt::from(3)));
        assert!(!s.contains_pair(&BigInt::from(-4), &BigInt::from(0)));
    }

    #[test]
    fn staircase_check_small() {
        let rep = staircase_check(3, 4, 80).unwrap();
        assert!(rep.k1_empty);
        assert_eq!(rep.finite_slices, 3);
        assert_eq!(rep.exact_not_spd_confirmed, 2);
        match &rep.product_scan {
            ScanOutcome::NoCounterexampleFound { unresolved, .. } => {
                assert!(unresolved.is_empty(), "every small coset meets the staircase");
            }
            other => panic!("staircase wrongly refuted: {other:?}"),
        }
        for (m, scan) in &rep.swapped_scans {
            match scan {
                ScanOutcome::NoCounterexampleFound { unresolved, .. } => {
                    assert!(unresolved.is_empty(), "slice m={m} must meet every progression");
                }
                other => panic!("slice m={m} wrongly refuted: {other:?}"),
            }
        }
    }
}
