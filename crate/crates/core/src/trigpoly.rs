//! Trigonometric polynomials on the dual of `F x T^r` with rational torus
//! phases: exact evaluation in cyclotomic arithmetic, zero sets as coset
//! unions, and the coset-annihilating polynomial constructions behind the
//! negative certificates.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

use crate::cosets::{Coset, CosetError, CosetUnion};
use crate::cyclo::CycloNumber;
use crate::findual::{char_eval, FindualError, FiniteCharacter, FiniteElement, FiniteGroupSpec};
use crate::lattice::{LatticeError, LatticeSubgroup};
use crate::phase::Phase;
use crate::util::{lcm_u64, MixedRadix};

/// Default cap on the evaluation box `L^r` used by [`TrigPoly::zero_set`].
pub const ZERO_SET_BOX_CAP: usize = 1 << 20;

/// Consolidation into coarser cosets is attempted only below this box size;
/// above it the residue-level union (already exact) is returned as is.
const CONSOLIDATE_BOX_LIMIT: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TrigPolyError {
    #[error(transparent)]
    Finite(#[from] FindualError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Coset(#[from] CosetError),
    #[error("group point does not match the polynomial's group")]
    PointMismatch,
    #[error("character does not match the polynomial's group")]
    CharacterMismatch,
    #[error("zero set needs a trivial finite part; slice the finite group first")]
    FinitePartNotTrivial,
    #[error("evaluation box of size {size} exceeds the cap {cap}")]
    BoxTooLarge { size: u128, cap: usize },
    #[error("coset subgroup must have finite index")]
    InfiniteIndex,
    #[error("point lies in the set; no vanishing witness exists through it")]
    MissInsideSet,
    #[error("conductor or index too large for exact evaluation")]
    ConductorOverflow,
}

/// A point of `G = F x T^r`: a finite component and rational torus phases.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct GroupPoint {
    pub finite: FiniteElement,
    pub torus: Vec<Phase>,
}

impl GroupPoint {
    pub fn torus_only(torus: Vec<Phase>) -> Self {
        GroupPoint { finite: FiniteElement(Vec::new()), torus }
    }

    pub fn identity(spec: &FiniteGroupSpec, rank: usize) -> Self {
        GroupPoint { finite: spec.identity_element(), torus: vec![Phase::zero(); rank] }
    }

    pub fn add(&self, spec: &FiniteGroupSpec, other: &GroupPoint) -> GroupPoint {
        GroupPoint {
            finite: spec.add_elements(&self.finite, &other.finite),
            torus: self.torus.iter().zip(&other.torus).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn neg(&self, spec: &FiniteGroupSpec) -> GroupPoint {
        GroupPoint {
            finite: spec.neg_element(&self.finite),
            torus: self.torus.iter().map(Phase::neg).collect(),
        }
    }
}

/// A character of `F x T^r`, identified with a pair in `F^ x Z^r`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Character {
    pub finite: FiniteCharacter,
    pub torus: Vec<BigInt>,
}

impl Character {
    pub fn torus_only(m: Vec<BigInt>) -> Self {
        Character { finite: FiniteCharacter(Vec::new()), torus: m }
    }

    pub fn from_i64(finite: &[u64], m: &[i64]) -> Self {
        Character {
            finite: FiniteCharacter(finite.to_vec()),
            torus: m.iter().map(|&x| BigInt::from(x)).collect(),
        }
    }
}

/// A finite character sum `p(chi) = sum_i c_i chi(x_i)` with cyclotomic
/// coefficients and pairwise distinct points; the zero polynomial has no
/// terms. Input coefficients are usually Gaussian rationals, but coset
/// shifts introduce general roots of unity, so coefficients are kept in
/// full cyclotomic form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TrigPoly {
    spec: FiniteGroupSpec,
    rank: usize,
    terms: BTreeMap<GroupPoint, CycloNumber>,
}

impl TrigPoly {
    pub fn zero(spec: FiniteGroupSpec, rank: usize) -> Self {
        TrigPoly { spec, rank, terms: BTreeMap::new() }
    }

    pub fn constant(spec: FiniteGroupSpec, rank: usize, value: CycloNumber) -> Self {
        let mut p = TrigPoly::zero(spec, rank);
        if !value.is_zero() {
            let identity = GroupPoint::identity(&p.spec, rank);
            p.terms.insert(identity, value);
        }
        p
    }

    pub fn one(spec: FiniteGroupSpec, rank: usize) -> Self {
        Self::constant(spec, rank, CycloNumber::one(1))
    }

    pub fn from_terms(
        spec: FiniteGroupSpec,
        rank: usize,
        terms: Vec<(CycloNumber, GroupPoint)>,
    ) -> Result<Self, TrigPolyError> {
        let mut p = TrigPoly::zero(spec, rank);
        for (c, pt) in terms {
            p.check_point(&pt)?;
            p.accumulate(pt, c);
        }
        p.prune();
        Ok(p)
    }

    /// Convenience constructor for Gaussian-rational coefficients
    /// `re + i im`.
    pub fn from_gaussian_terms(
        spec: FiniteGroupSpec,
        rank: usize,
        terms: Vec<((BigRational, BigRational), GroupPoint)>,
    ) -> Result<Self, TrigPolyError> {
        let converted = terms
            .into_iter()
            .map(|((re, im), pt)| {
                let c = CycloNumber::from_rational(4, &re)
                    .add(&CycloNumber::imaginary_unit(4).mul(&CycloNumber::from_rational(4, &im)));
                (c, pt)
            })
            .collect();
        Self::from_terms(spec, rank, converted)
    }

    /// Pure-torus polynomial from integer coefficients and phase lists.
    pub fn torus_poly(rank: usize, terms: &[(i64, &[(i64, i64)])]) -> Self {
        let spec = FiniteGroupSpec::trivial();
        let converted = terms
            .iter()
            .map(|&(c, phases)| {
                let pt = GroupPoint::torus_only(
                    phases.iter().map(|&(n, d)| Phase::from_ratio(n, d)).collect(),
                );
                (CycloNumber::from_int(1, c), pt)
            })
            .collect();
        Self::from_terms(spec, rank, converted).expect("torus points have no finite part")
    }

    fn check_point(&self, pt: &GroupPoint) -> Result<(), TrigPolyError> {
        self.spec.check_element(&pt.finite)?;
        if pt.torus.len() != self.rank {
            return Err(TrigPolyError::PointMismatch);
        }
        Ok(())
    }

    fn check_character(&self, chi: &Character) -> Result<(), TrigPolyError> {
        self.spec
            .check_character(&chi.finite)
            .map_err(|_| TrigPolyError::CharacterMismatch)?;
        if chi.torus.len() != self.rank {
            return Err(TrigPolyError::CharacterMismatch);
        }
        Ok(())
    }

    fn accumulate(&mut self, pt: GroupPoint, c: CycloNumber) {
        match self.terms.entry(pt) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&c);
                *e.get_mut() = sum;
            }
        }
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| !c.is_zero());
    }

    pub fn spec(&self) -> &FiniteGroupSpec {
        &self.spec
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupPoint, &CycloNumber)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Nonzero iff some coefficient survives merging: characters of abelian
    /// groups are linearly independent, so distinct points with nonzero
    /// coefficients cannot cancel as a function.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Conductor at which every term of this polynomial evaluates exactly:
    /// lcm of 4, the finite exponent, and all phase denominators.
    pub fn conductor(&self) -> Result<u64, TrigPolyError> {
        let mut l: u64 = lcm_u64(4, self.spec.exponent().max(1));
        for pt in self.terms.keys() {
            for q in &pt.torus {
                let d = u64::try_from(q.denom()).map_err(|_| TrigPolyError::ConductorOverflow)?;
                l = lcm_u64(l, d);
                if l > (1 << 32) {
                    return Err(TrigPolyError::ConductorOverflow);
                }
            }
        }
        Ok(l)
    }

    /// Exact evaluation at a character `(b, m)`:
    /// `sum_i c_i chi_b(a_i) e^{2 pi i m . q_i}`.
    pub fn eval(&self, chi: &Character) -> Result<CycloNumber, TrigPolyError> {
        self.check_character(chi)?;
        let l = self.conductor()?;
        let mut acc = CycloNumber::zero(l);
        for (pt, c) in &self.terms {
            let mut phase = char_eval(&self.spec, &chi.finite, &pt.finite)?;
            for (q, m) in pt.torus.iter().zip(&chi.torus) {
                phase = phase.add(&q.scale(m));
            }
            acc = acc.add(&c.mul(&CycloNumber::from_phase(l, &phase)));
        }
        Ok(acc)
    }

    pub fn add(&self, other: &TrigPoly) -> Result<TrigPoly, TrigPolyError> {
        if self.spec != other.spec || self.rank != other.rank {
            return Err(TrigPolyError::PointMismatch);
        }
        let mut out = self.clone();
        for (pt, c) in &other.terms {
            out.accumulate(pt.clone(), c.clone());
        }
        out.prune();
        Ok(out)
    }

    pub fn mul(&self, other: &TrigPoly) -> Result<TrigPoly, TrigPolyError> {
        if self.spec != other.spec || self.rank != other.rank {
            return Err(TrigPolyError::PointMismatch);
        }
        let mut out = TrigPoly::zero(self.spec.clone(), self.rank);
        for (p1, c1) in &self.terms {
            for (p2, c2) in &other.terms {
                out.accumulate(p1.add(&self.spec, p2), c1.mul(c2));
            }
        }
        out.prune();
        Ok(out)
    }

    /// Complex conjugate as a function: conjugated coefficients at negated
    /// points.
    pub fn conj(&self) -> TrigPoly {
        let mut out = TrigPoly::zero(self.spec.clone(), self.rank);
        for (pt, c) in &self.terms {
            out.accumulate(pt.neg(&self.spec), c.conj());
        }
        out.prune();
        out
    }

    pub fn scale(&self, factor: &CycloNumber) -> TrigPoly {
        let mut out = TrigPoly::zero(self.spec.clone(), self.rank);
        for (pt, c) in &self.terms {
            out.accumulate(pt.clone(), c.mul(factor));
        }
        out.prune();
        out
    }

    /// Exact zero set of a pure-torus polynomial as a union of cosets of
    /// `Z^r` ([`ZERO_SET_BOX_CAP`] bounds the `L^r` evaluation box).
    ///
    /// The polynomial is `L Z^r`-periodic for `L` the lcm of its phase
    /// denominators, so evaluating all residues decides the zero set; the
    /// residue classes are then greedily merged into coarser cosets where a
    /// full coset of zeros is verified.
    pub fn zero_set(&self) -> Result<CosetUnion, TrigPolyError> {
        self.zero_set_capped(ZERO_SET_BOX_CAP)
    }

    pub fn zero_set_capped(&self, cap: usize) -> Result<CosetUnion, TrigPolyError> {
        for pt in self.terms.keys() {
            if pt.finite.0.iter().any(|&x| x != 0) {
                return Err(TrigPolyError::FinitePartNotTrivial);
            }
        }
        let r = self.rank;
        if self.is_zero() {
            // The zero polynomial vanishes everywhere.
            let full = Coset::new(vec![BigInt::zero(); r], LatticeSubgroup::full(r))?;
            return Ok(CosetUnion::new(r, vec![full])?);
        }
        let mut l: u64 = 1;
        for pt in self.terms.keys() {
            for q in &pt.torus {
                let d = u64::try_from(q.denom()).map_err(|_| TrigPolyError::ConductorOverflow)?;
                l = lcm_u64(l, d);
            }
        }
        let size = (l as u128).pow(r as u32);
        if size > cap as u128 {
            return Err(TrigPolyError::BoxTooLarge { size, cap });
        }
        let mut zeros: Vec<Vec<u64>> = Vec::new();
        for digits in MixedRadix::new(vec![l; r]) {
            let m: Vec<BigInt> = digits.iter().map(|&d| BigInt::from(d)).collect();
            if self.eval(&Character { finite: self.spec.trivial_character(), torus: m })?.is_zero() {
                zeros.push(digits);
            }
        }
        consolidate_residues(r, l, zeros, size as usize)
    }
}

/// Merges zero residues modulo `L Z^r` into coarser cosets. Each merge is
/// verified: a candidate subgroup is accepted only when its entire coset
/// inside the residue box consists of zeros, so the result stays exact.
fn consolidate_residues(
    r: usize,
    l: u64,
    zeros: Vec<Vec<u64>>,
    box_size: usize,
) -> Result<CosetUnion, TrigPolyError> {
    let base_rows: Vec<Vec<BigInt>> = (0..r)
        .map(|i| {
            let mut row = vec![BigInt::zero(); r];
            row[i] = BigInt::from(l);
            row
        })
        .collect();
    let base = LatticeSubgroup::from_generator_rows(base_rows, r)?;
    let zero_set: std::collections::BTreeSet<Vec<u64>> = zeros.iter().cloned().collect();
    let to_big = |v: &[u64]| -> Vec<BigInt> { v.iter().map(|&x| BigInt::from(x)).collect() };

    let mut remaining = zero_set.clone();
    let mut pieces = Vec::new();
    while let Some(u) = remaining.iter().next().cloned() {
        let ub = to_big(&u);
        let mut current = base.clone();
        let mut members: Vec<Vec<u64>> = vec![u.clone()];
        if box_size <= CONSOLIDATE_BOX_LIMIT {
            loop {
                let mut grew = false;
                for v in remaining.iter() {
                    if members.contains(v) {
                        continue;
                    }
                    let diff: Vec<BigInt> =
                        v.iter().zip(&u).map(|(&a, &b)| BigInt::from(a) - BigInt::from(b)).collect();
                    let cand = current
                        .join(&LatticeSubgroup::from_generator_rows(vec![diff], r)?)?;
                    // Collect the candidate coset's residues and verify they
                    // are all zeros.
                    let mut coset_residues = Vec::new();
                    let mut all_zero = true;
                    for w in MixedRadix::new(vec![l; r]) {
                        let wd: Vec<BigInt> =
                            w.iter().zip(&ub).map(|(&a, b)| BigInt::from(a) - b).collect();
                        if cand.contains(&wd)? {
                            if zero_set.contains(&w) {
                                coset_residues.push(w);
                            } else {
                                all_zero = false;
                                break;
                            }
                        }
                    }
                    if all_zero && coset_residues.len() > members.len() {
                        current = cand;
                        members = coset_residues;
                        grew = true;
                        break;
                    }
                }
                if !grew {
                    break;
                }
            }
        }
        for m in &members {
            remaining.remove(m);
        }
        pieces.push(Coset::new(ub, current)?);
    }
    Ok(CosetUnion::new(r, pieces)?)
}

/// Output of the coset-annihilating construction: a real-valued polynomial
/// `p >= 0` with `p(mu) = 0` iff `mu` lies in the prescribed coset. The full
/// group yields the zero polynomial, flagged degenerate.
#[derive(Clone, Debug)]
pub struct CosetVanisher {
    pub poly: TrigPoly,
    pub degenerate: bool,
    /// Size of the annihilator `H^perp` (= the index of `H`).
    pub annihilator_size: BigInt,
}

fn annihilator_data(
    h: &LatticeSubgroup,
) -> Result<(Vec<BigRational>, Vec<Vec<BigInt>>), TrigPolyError> {
    if !h.index().is_finite() {
        return Err(TrigPolyError::InfiniteIndex);
    }
    let ab = h.adapted_basis()?;
    let alphas: Vec<BigRational> =
        ab.divisors.iter().map(|a| BigRational::from_integer(a.clone())).collect();
    let duals: Vec<Vec<BigInt>> = (0..h.ambient_rank()).map(|i| ab.dual_vector(i)).collect();
    Ok((alphas.iter().map(|a| a.clone()).collect(), duals))
}

fn vanisher_from_annihilator_points(
    shift: &[BigInt],
    points: Vec<Vec<Phase>>,
    rank: usize,
    annihilator_size: BigInt,
) -> Result<CosetVanisher, TrigPolyError> {
    let spec = FiniteGroupSpec::trivial();
    let mut poly = TrigPoly::zero(spec.clone(), rank);
    let mut degenerate = true;
    for t in points {
        if t.iter().all(Phase::is_zero) {
            continue; // identity annihilator point contributes |1 - 1|^2 = 0
        }
        degenerate = false;
        // |conj(gamma(t)) mu(t) - 1|^2 = 2 - conj(gamma(t)) mu(t) - gamma(t) mu(-t)
        let mut gamma_phase = Phase::zero();
        for (q, s) in t.iter().zip(shift) {
            gamma_phase = gamma_phase.add(&q.scale(s));
        }
        let d = u64::try_from(gamma_phase.denom()).map_err(|_| TrigPolyError::ConductorOverflow)?;
        let c_fwd = CycloNumber::from_phase(d, &gamma_phase.neg()).neg();
        let c_bwd = CycloNumber::from_phase(d, &gamma_phase).neg();
        poly = poly.add(&TrigPoly::from_terms(
            spec.clone(),
            rank,
            vec![
                (CycloNumber::from_int(1, 2), GroupPoint::identity(&spec, rank)),
                (c_fwd, GroupPoint::torus_only(t.clone())),
                (c_bwd, GroupPoint::torus_only(t.iter().map(Phase::neg).collect())),
            ],
        )?)?;
    }
    Ok(CosetVanisher { poly, degenerate, annihilator_size })
}

/// Polynomial vanishing exactly on `shift + H` for a finite-index `H`,
/// expanded from `sum_{t in H^perp} |conj(gamma(t)) mu(t) - 1|^2` over the
/// full annihilator (computed through the adapted basis).
pub fn vanish_on_coset(
    shift: &[BigInt],
    h: &LatticeSubgroup,
) -> Result<CosetVanisher, TrigPolyError> {
    let r = h.ambient_rank();
    if h.is_full() {
        return vanisher_from_annihilator_points(shift, vec![vec![Phase::zero(); r]], r, BigInt::one());
    }
    let (alphas, duals) = annihilator_data(h)?;
    let radices: Vec<u64> = alphas
        .iter()
        .map(|a| u64::try_from(a.numer()).map_err(|_| TrigPolyError::ConductorOverflow))
        .collect::<Result<_, _>>()?;
    let mut points = Vec::new();
    for ks in MixedRadix::new(radices) {
        let mut t = vec![Phase::zero(); r];
        for (i, &k) in ks.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let frac = BigRational::new(BigInt::from(k), alphas[i].numer().clone());
            for (j, tj) in t.iter_mut().enumerate() {
                *tj = tj.add(&Phase::new(&frac * BigRational::from_integer(duals[i][j].clone())));
            }
        }
        points.push(t);
    }
    let size = h.index().finite().expect("finite index checked").clone();
    debug_assert_eq!(BigInt::from(points.len()), size);
    vanisher_from_annihilator_points(shift, points, r, size)
}

/// Like [`vanish_on_coset`] but summing only over a generating set of the
/// annihilator (one point per adapted-basis divisor > 1). The zero locus is
/// the same; the polynomial stays small when the index is large.
pub fn vanish_on_coset_generators(
    shift: &[BigInt],
    h: &LatticeSubgroup,
) -> Result<CosetVanisher, TrigPolyError> {
    let r = h.ambient_rank();
    if h.is_full() {
        return vanisher_from_annihilator_points(shift, vec![vec![Phase::zero(); r]], r, BigInt::one());
    }
    let (alphas, duals) = annihilator_data(h)?;
    let mut points = Vec::new();
    for (i, a) in alphas.iter().enumerate() {
        if a.numer().is_one() {
            continue;
        }
        let frac = BigRational::new(BigInt::one(), a.numer().clone());
        let t: Vec<Phase> = duals[i]
            .iter()
            .map(|d| Phase::new(&frac * BigRational::from_integer(d.clone())))
            .collect();
        points.push(t);
    }
    let size = h.index().finite().expect("finite index checked").clone();
    vanisher_from_annihilator_points(shift, points, r, size)
}

/// Nonzero trigonometric polynomial vanishing on the whole coset union `s`
/// while staying nonzero at `miss`: infinite-index pieces are first fattened
/// to finite-index supergroups avoiding `miss`, each piece contributes a
/// coset-annihilating factor, and the product is checked exactly at `miss`.
pub fn non_spd_witness(s: &CosetUnion, miss: &[BigInt]) -> Result<TrigPoly, TrigPolyError> {
    let r = s.ambient_rank();
    if s.contains(miss)? {
        return Err(TrigPolyError::MissInsideSet);
    }
    let mut poly = TrigPoly::one(FiniteGroupSpec::trivial(), r);
    for piece in s.pieces() {
        let h_eff = if piece.subgroup().index().is_finite() {
            piece.subgroup().clone()
        } else {
            // The compact variant keeps the fattened indices (and with them
            // the conductors of the product polynomial) small.
            let d: Vec<BigInt> =
                miss.iter().zip(piece.shift()).map(|(a, b)| a - b).collect();
            piece.subgroup().fi_supergroup_compact(&d)?
        };
        let vp = vanish_on_coset_generators(piece.shift(), &h_eff)?;
        assert!(!vp.degenerate, "internal error: pieces cannot be the full group here");
        poly = poly.mul(&vp.poly)?;
    }
    let at_miss = poly.eval(&Character::torus_only(miss.to_vec()))?;
    assert!(!at_miss.is_zero(), "internal error: witness vanishes at the miss point");
    Ok(poly)
}
