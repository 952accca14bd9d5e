//! Cosets of subgroups of `Z^r`, finite unions and complements thereof, and
//! the ubiquity / strict-positive-definiteness decisions with witnesses.
//!
//! A set is representable either as a finite union of shifted subgroups
//! (the exact shape of zero sets of rational-phase trigonometric
//! polynomials) or as the complement of such a union.

use num_bigint::BigInt;
use thiserror::Error;

use crate::lattice::{solve_row_system, LatticeError, LatticeSubgroup};
use crate::util::{MixedRadix, NormShells};

/// Hard cap on candidate points inspected while searching a coset for a
/// point avoiding all infinite-index pieces. The search terminates long
/// before this by a density argument; the cap guards against bugs.
pub const POINT_SEARCH_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CosetError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("ambient rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
}

/// A shifted subgroup `shift + H` of `Z^r`, with the shift held in canonical
/// reduced form so equal cosets compare equal.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Coset {
    shift: Vec<BigInt>,
    subgroup: LatticeSubgroup,
}

impl Coset {
    pub fn new(shift: Vec<BigInt>, subgroup: LatticeSubgroup) -> Result<Self, CosetError> {
        let shift = subgroup.reduce_point(&shift)?;
        Ok(Coset { shift, subgroup })
    }

    pub fn from_i64(shift: &[i64], subgroup: LatticeSubgroup) -> Self {
        let shift = shift.iter().map(|&x| BigInt::from(x)).collect();
        Coset::new(shift, subgroup).expect("matching dimensions")
    }

    pub fn ambient_rank(&self) -> usize {
        self.subgroup.ambient_rank()
    }

    pub fn shift(&self) -> &[BigInt] {
        &self.shift
    }

    pub fn subgroup(&self) -> &LatticeSubgroup {
        &self.subgroup
    }

    pub fn contains(&self, v: &[BigInt]) -> Result<bool, CosetError> {
        if v.len() != self.shift.len() {
            return Err(CosetError::RankMismatch { expected: self.shift.len(), got: v.len() });
        }
        let diff: Vec<BigInt> = v.iter().zip(&self.shift).map(|(a, b)| a - b).collect();
        Ok(self.subgroup.contains(&diff)?)
    }

    /// Exact intersection of two cosets: empty, or a coset of the
    /// intersection subgroup (solved as an integer linear system).
    pub fn intersect(&self, other: &Coset) -> Result<Option<Coset>, CosetError> {
        if self.ambient_rank() != other.ambient_rank() {
            return Err(CosetError::RankMismatch {
                expected: self.ambient_rank(),
                got: other.ambient_rank(),
            });
        }
        let stacked = self.subgroup.basis().stack(other.subgroup.basis())?;
        let d: Vec<BigInt> = other.shift.iter().zip(&self.shift).map(|(a, b)| a - b).collect();
        let Some(x) = solve_row_system(&stacked, &d)? else {
            return Ok(None);
        };
        let s1 = self.subgroup.rank();
        let u = &x[..s1];
        let offset = self.subgroup.basis().left_mul(u)?;
        let point: Vec<BigInt> = self.shift.iter().zip(&offset).map(|(a, b)| a + b).collect();
        let cap = self.subgroup.intersect(&other.subgroup)?;
        Ok(Some(Coset::new(point, cap)?))
    }

    /// First point of the coset accepted by the predicate, visiting points
    /// in growing sup-norm shells of the coefficient lattice. Panics past
    /// [`POINT_SEARCH_CAP`] candidates.
    fn search_point<F: FnMut(&[BigInt]) -> bool>(&self, mut accept: F) -> Vec<BigInt> {
        let basis = self.subgroup.basis();
        let mut candidates = 0usize;
        for c in NormShells::new(self.subgroup.rank()) {
            candidates += 1;
            assert!(
                candidates <= POINT_SEARCH_CAP,
                "internal error: coset point search exceeded {POINT_SEARCH_CAP} candidates"
            );
            let cb: Vec<BigInt> = c.iter().map(|&x| BigInt::from(x)).collect();
            let offset = basis.left_mul(&cb).expect("coefficient length matches basis rows");
            let point: Vec<BigInt> = self.shift.iter().zip(&offset).map(|(a, b)| a + b).collect();
            if accept(&point) {
                return point;
            }
        }
        unreachable!("norm shells over a full-rank coset are inexhaustible")
    }
}

/// A finite union of cosets; possibly empty. Duplicate pieces are removed on
/// construction, insertion order is otherwise kept.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CosetUnion {
    ambient_rank: usize,
    pieces: Vec<Coset>,
}

impl CosetUnion {
    pub fn new(ambient_rank: usize, pieces: Vec<Coset>) -> Result<Self, CosetError> {
        let mut seen = Vec::new();
        for p in pieces {
            if p.ambient_rank() != ambient_rank {
                return Err(CosetError::RankMismatch { expected: ambient_rank, got: p.ambient_rank() });
            }
            if !seen.contains(&p) {
                seen.push(p);
            }
        }
        Ok(CosetUnion { ambient_rank, pieces: seen })
    }

    pub fn empty(ambient_rank: usize) -> Self {
        CosetUnion { ambient_rank, pieces: Vec::new() }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn pieces(&self) -> &[Coset] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn contains(&self, v: &[BigInt]) -> Result<bool, CosetError> {
        for p in &self.pieces {
            if p.contains(v)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// The first finite-index piece, if any.
pub fn contains_fi_coset(s: &CosetUnion) -> Option<&Coset> {
    s.pieces.iter().find(|p| p.subgroup.index().is_finite())
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CoverOutcome {
    Covers,
    Misses(Vec<BigInt>),
}

/// Decides whether a coset union equals all of `Z^r`.
///
/// The finite-index pieces are tested on the residue system of their common
/// intersection `H'`; an uncovered residue is then refined, inside its
/// `H'`-coset, to a point avoiding the infinite-index pieces as well (such a
/// point exists because finitely many infinite-index cosets cannot exhaust a
/// finite-index coset).
pub fn covers_group(s: &CosetUnion) -> CoverOutcome {
    let r = s.ambient_rank;
    let (fi, ii): (Vec<&Coset>, Vec<&Coset>) =
        s.pieces.iter().partition(|p| p.subgroup.index().is_finite());
    let mut h_prime = LatticeSubgroup::full(r);
    for p in &fi {
        h_prime = h_prime.intersect(&p.subgroup).expect("equal ambient ranks");
    }
    let diag: Vec<u64> = (0..r)
        .map(|i| u64::try_from(h_prime.basis().get(i, i)).expect("pivot fits u64"))
        .collect();
    for digits in MixedRadix::new(diag) {
        let v: Vec<BigInt> = digits.iter().map(|&d| BigInt::from(d)).collect();
        let covered = fi.iter().any(|p| p.contains(&v).expect("dimensions match"));
        if covered {
            continue;
        }
        let base = Coset::new(v, h_prime.clone()).expect("dimensions match");
        let point =
            base.search_point(|pt| ii.iter().all(|p| !p.contains(pt).expect("dimensions match")));
        return CoverOutcome::Misses(point);
    }
    CoverOutcome::Covers
}

/// Does the coset `c` lie inside the union `u`? Decided exactly by pulling
/// the intersections back to coefficient coordinates of `c` and re-running
/// the covering test there.
pub fn coset_covered_by(c: &Coset, u: &CosetUnion) -> Result<bool, CosetError> {
    if c.ambient_rank() != u.ambient_rank {
        return Err(CosetError::RankMismatch { expected: u.ambient_rank, got: c.ambient_rank() });
    }
    let s = c.subgroup.rank();
    if s == 0 {
        return u.contains(&c.shift);
    }
    let mut pulled = Vec::new();
    for piece in &u.pieces {
        let Some(part) = c.intersect(piece)? else { continue };
        // part is a coset inside c; express it over c's coefficient
        // coordinates (t -> shift + t * basis maps Z^s bijectively onto c).
        let mut gens = Vec::new();
        for i in 0..part.subgroup.rank() {
            let g = part.subgroup.basis().row(i);
            let coeff = c
                .subgroup
                .decompose(g)?
                .expect("intersection subgroup is contained in the coset subgroup");
            gens.push(coeff);
        }
        let diff: Vec<BigInt> = part.shift.iter().zip(&c.shift).map(|(a, b)| a - b).collect();
        let c0 = c
            .subgroup
            .decompose(&diff)?
            .expect("intersection representative lies in the coset");
        let sub = LatticeSubgroup::from_generator_rows(gens, s)?;
        pulled.push(Coset::new(c0, sub)?);
    }
    let pulled_union = CosetUnion::new(s, pulled)?;
    Ok(matches!(covers_group(&pulled_union), CoverOutcome::Covers))
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SetExpr {
    Union(CosetUnion),
    Complement(CosetUnion),
}

impl SetExpr {
    pub fn ambient_rank(&self) -> usize {
        match self {
            SetExpr::Union(u) | SetExpr::Complement(u) => u.ambient_rank,
        }
    }

    pub fn full(ambient_rank: usize) -> Self {
        SetExpr::Complement(CosetUnion::empty(ambient_rank))
    }

    pub fn empty(ambient_rank: usize) -> Self {
        SetExpr::Union(CosetUnion::empty(ambient_rank))
    }

    pub fn contains(&self, v: &[BigInt]) -> Result<bool, CosetError> {
        match self {
            SetExpr::Union(u) => u.contains(v),
            SetExpr::Complement(u) => Ok(!u.contains(v)?),
        }
    }

    /// Exact emptiness of the intersection with a coset.
    pub fn disjoint_from(&self, c: &Coset) -> Result<bool, CosetError> {
        match self {
            SetExpr::Union(u) => {
                for p in &u.pieces {
                    if c.intersect(p)?.is_some() {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            SetExpr::Complement(u) => coset_covered_by(c, u),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum UbiquityVerdict {
    Ubiquitous,
    NotUbiquitous { witness: Coset },
}

impl UbiquityVerdict {
    pub fn is_ubiquitous(&self) -> bool {
        matches!(self, UbiquityVerdict::Ubiquitous)
    }

    pub fn witness(&self) -> Option<&Coset> {
        match self {
            UbiquityVerdict::Ubiquitous => None,
            UbiquityVerdict::NotUbiquitous { witness } => Some(witness),
        }
    }
}

/// Decides ubiquity of a representable set, producing a disjoint
/// finite-index coset as witness in the negative case.
///
/// * Union case: the set is ubiquitous iff it covers `Z^r`. Otherwise the
///   covering test yields a point `g` outside the set; intersecting the
///   common finite-index subgroup `H'` with finite-index supergroups that
///   exclude `g - shift_i` for every infinite-index piece gives the witness
///   coset `g + H`.
/// * Complement case: a finite-index piece inside the removed union is
///   itself a witness; if every removed piece has infinite index the
///   complement meets every finite-index coset (a finite union of
///   infinite-index cosets contains no finite-index coset).
pub fn ubiquity_decide(s: &SetExpr) -> Result<UbiquityVerdict, CosetError> {
    match s {
        SetExpr::Union(u) => {
            let gamma = match covers_group(u) {
                CoverOutcome::Covers => return Ok(UbiquityVerdict::Ubiquitous),
                CoverOutcome::Misses(g) => g,
            };
            let r = u.ambient_rank;
            let mut h = LatticeSubgroup::full(r);
            for p in &u.pieces {
                if p.subgroup.index().is_finite() {
                    h = h.intersect(&p.subgroup)?;
                } else {
                    let d: Vec<BigInt> = gamma.iter().zip(&p.shift).map(|(a, b)| a - b).collect();
                    let fattened = p.subgroup.fi_supergroup(&d)?;
                    h = h.intersect(&fattened)?;
                }
            }
            let witness = Coset::new(gamma, h)?;
            for p in &u.pieces {
                assert!(
                    witness.intersect(p)?.is_none(),
                    "internal error: ubiquity witness meets piece {p:?}"
                );
            }
            Ok(UbiquityVerdict::NotUbiquitous { witness })
        }
        SetExpr::Complement(u) => match contains_fi_coset(u) {
            Some(c) => Ok(UbiquityVerdict::NotUbiquitous { witness: c.clone() }),
            None => Ok(UbiquityVerdict::Ubiquitous),
        },
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SpdVerdict {
    Spd,
    NotSpd { witness: Coset },
}

impl SpdVerdict {
    pub fn is_spd(&self) -> bool {
        matches!(self, SpdVerdict::Spd)
    }
}

/// Strict positive definiteness of a representable subset of `Z^r`
/// (the dual of `T^r`): equivalent to ubiquity on these groups.
pub fn spd_decide(s: &SetExpr) -> Result<SpdVerdict, CosetError> {
    Ok(match ubiquity_decide(s)? {
        UbiquityVerdict::Ubiquitous => SpdVerdict::Spd,
        UbiquityVerdict::NotUbiquitous { witness } => SpdVerdict::NotSpd { witness },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{enumerate_fi_subgroups, vec_from_i64};

    fn sg(rows: &[&[i64]], r: usize) -> LatticeSubgroup {
        LatticeSubgroup::from_i64_rows(rows, r)
    }

    fn union(r: usize, pieces: Vec<Coset>) -> CosetUnion {
        CosetUnion::new(r, pieces).unwrap()
    }

    #[test]
    fn coset_canonical_form() {
        let a = Coset::from_i64(&[5], sg(&[&[2]], 1));
        let b = Coset::from_i64(&[-3], sg(&[&[2]], 1));
        assert_eq!(a, b);
        assert_eq!(a.shift(), &vec_from_i64(&[1])[..]);
    }

    #[test]
    fn intersect_crt() {
        let a = Coset::from_i64(&[1], sg(&[&[2]], 1));
        let b = Coset::from_i64(&[2], sg(&[&[3]], 1));
        let c = a.intersect(&b).unwrap().unwrap();
        assert_eq!(c, Coset::from_i64(&[5], sg(&[&[6]], 1)));
        // CRT brute force over residues mod 6
        for x in 0..6i64 {
            let inside = x % 2 == 1 && x % 3 == 2;
            assert_eq!(c.contains(&vec_from_i64(&[x])).unwrap(), inside);
        }
    }

    #[test]
    fn intersect_parity_empty_and_idempotent() {
        let a = Coset::from_i64(&[1], sg(&[&[2]], 1));
        let b = Coset::from_i64(&[0], sg(&[&[2]], 1));
        assert!(a.intersect(&b).unwrap().is_none());
        assert_eq!(a.intersect(&a).unwrap().unwrap(), a);
    }

    #[test]
    fn intersect_rank_deficient() {
        // Lines x=y and x=-y in Z^2 meet in the origin only.
        let a = Coset::from_i64(&[0, 0], sg(&[&[1, 1]], 2));
        let b = Coset::from_i64(&[0, 0], sg(&[&[1, -1]], 2));
        let c = a.intersect(&b).unwrap().unwrap();
        assert_eq!(c.subgroup().rank(), 0);
        assert_eq!(c.shift(), &vec_from_i64(&[0, 0])[..]);
        // Shifted parallels are disjoint.
        let d = Coset::from_i64(&[1, 0], sg(&[&[1, 1]], 2));
        assert!(a.intersect(&d).unwrap().is_none());
    }

    #[test]
    fn covers_parity_partition() {
        let s = union(
            1,
            vec![Coset::from_i64(&[0], sg(&[&[2]], 1)), Coset::from_i64(&[1], sg(&[&[2]], 1))],
        );
        assert_eq!(covers_group(&s), CoverOutcome::Covers);
    }

    #[test]
    fn covers_misses_residue() {
        let s = union(
            1,
            vec![Coset::from_i64(&[0], sg(&[&[2]], 1)), Coset::from_i64(&[1], sg(&[&[4]], 1))],
        );
        assert_eq!(covers_group(&s), CoverOutcome::Misses(vec_from_i64(&[3])));
    }

    #[test]
    fn covers_misses_with_infinite_index_piece() {
        let s = union(
            2,
            vec![
                Coset::from_i64(&[0, 0], sg(&[&[2, 0], &[0, 1]], 2)),
                Coset::from_i64(&[0, 0], sg(&[&[1, 1]], 2)),
            ],
        );
        match covers_group(&s) {
            CoverOutcome::Misses(p) => {
                for piece in s.pieces() {
                    assert!(!piece.contains(&p).unwrap(), "miss point must avoid {piece:?}");
                }
            }
            CoverOutcome::Covers => panic!("set does not cover Z^2"),
        }
    }

    #[test]
    fn empty_union_misses_origin() {
        assert_eq!(
            covers_group(&CosetUnion::empty(2)),
            CoverOutcome::Misses(vec_from_i64(&[0, 0]))
        );
    }

    #[test]
    fn ubiquity_union_cases() {
        let covers = SetExpr::Union(union(
            1,
            vec![Coset::from_i64(&[0], sg(&[&[2]], 1)), Coset::from_i64(&[1], sg(&[&[2]], 1))],
        ));
        assert!(ubiquity_decide(&covers).unwrap().is_ubiquitous());

        let evens = SetExpr::Union(union(1, vec![Coset::from_i64(&[0], sg(&[&[2]], 1))]));
        match ubiquity_decide(&evens).unwrap() {
            UbiquityVerdict::NotUbiquitous { witness } => {
                assert_eq!(witness, Coset::from_i64(&[1], sg(&[&[2]], 1)));
                let piece = Coset::from_i64(&[0], sg(&[&[2]], 1));
                assert!(witness.intersect(&piece).unwrap().is_none());
            }
            _ => panic!("2Z is not ubiquitous"),
        }
    }

    #[test]
    fn ubiquity_complement_cases() {
        let diag =
            SetExpr::Complement(union(2, vec![Coset::from_i64(&[0, 0], sg(&[&[1, 1]], 2))]));
        assert!(ubiquity_decide(&diag).unwrap().is_ubiquitous());

        let comp = SetExpr::Complement(union(
            2,
            vec![Coset::from_i64(&[1, 0], sg(&[&[2, 0], &[0, 1]], 2))],
        ));
        match ubiquity_decide(&comp).unwrap() {
            UbiquityVerdict::NotUbiquitous { witness } => {
                assert_eq!(witness, Coset::from_i64(&[1, 0], sg(&[&[2, 0], &[0, 1]], 2)));
            }
            _ => panic!("complement misses the removed finite-index coset"),
        }
    }

    #[test]
    fn complement_of_diagonal_meets_all_small_cosets() {
        // Bounded scan: every coset of every subgroup of index <= 8 meets the
        // complement of the diagonal line.
        let line = Coset::from_i64(&[0, 0], sg(&[&[1, 1]], 2));
        let expr = SetExpr::Complement(union(2, vec![line]));
        for h in enumerate_fi_subgroups(2, 8) {
            let d0 = u64::try_from(h.basis().get(0, 0)).unwrap();
            let d1 = u64::try_from(h.basis().get(1, 1)).unwrap();
            for digits in MixedRadix::new(vec![d0, d1]) {
                let rep: Vec<BigInt> = digits.iter().map(|&d| BigInt::from(d)).collect();
                let coset = Coset::new(rep, h.clone()).unwrap();
                assert!(
                    !expr.disjoint_from(&coset).unwrap(),
                    "complement of a line must meet {coset:?}"
                );
            }
        }
    }

    #[test]
    fn spd_matches_ubiquity() {
        let evens = SetExpr::Union(union(1, vec![Coset::from_i64(&[0], sg(&[&[2]], 1))]));
        assert!(!spd_decide(&evens).unwrap().is_spd());
        let both = SetExpr::Union(union(
            1,
            vec![Coset::from_i64(&[0], sg(&[&[2]], 1)), Coset::from_i64(&[1], sg(&[&[2]], 1))],
        ));
        assert!(spd_decide(&both).unwrap().is_spd());
        let diag =
            SetExpr::Complement(union(2, vec![Coset::from_i64(&[0, 0], sg(&[&[1, 1]], 2))]));
        assert!(spd_decide(&diag).unwrap().is_spd());
    }

    #[test]
    fn fi_coset_detection() {
        let none = union(2, vec![Coset::from_i64(&[1, 0], sg(&[&[1, 1]], 2))]);
        assert!(contains_fi_coset(&none).is_none());

        let some = union(
            2,
            vec![
                Coset::from_i64(&[0, 0], sg(&[&[1, 1]], 2)),
                Coset::from_i64(&[1, 1], sg(&[&[3, 0], &[0, 3]], 2)),
            ],
        );
        let c = contains_fi_coset(&some).unwrap();
        assert_eq!(c, &Coset::from_i64(&[1, 1], sg(&[&[3, 0], &[0, 3]], 2)));
    }

    #[test]
    fn coset_containment_in_union() {
        // 1 + 2Z inside {1+4Z, 3+4Z}.
        let c = Coset::from_i64(&[1], sg(&[&[2]], 1));
        let u = union(
            1,
            vec![Coset::from_i64(&[1], sg(&[&[4]], 1)), Coset::from_i64(&[3], sg(&[&[4]], 1))],
        );
        assert!(coset_covered_by(&c, &u).unwrap());

        let partial = union(1, vec![Coset::from_i64(&[1], sg(&[&[4]], 1))]);
        assert!(!coset_covered_by(&c, &partial).unwrap());

        // Rank-0 coset: plain membership.
        let pt = Coset::from_i64(&[3], LatticeSubgroup::zero(1));
        assert!(coset_covered_by(&pt, &u).unwrap());
    }

    #[test]
    fn dedup_pieces() {
        let u = union(
            1,
            vec![
                Coset::from_i64(&[1], sg(&[&[2]], 1)),
                Coset::from_i64(&[3], sg(&[&[2]], 1)), // same coset
            ],
        );
        assert_eq!(u.pieces().len(), 1);
    }
}
