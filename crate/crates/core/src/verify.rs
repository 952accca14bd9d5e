//! Numerical verification harness for the Bochner-side identities, plus a
//! bounded exact scan for ubiquity counterexamples on `F^ x Z^r`.
//!
//! Functions synthesized from finite Fourier data use plain doubles (their
//! torus points may be irrational); the subgroup/coset scan stays in exact
//! integer arithmetic and only refutes with a coset whose emptiness against
//! the set is proven from the set's own structure.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer as _;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cosets::SetExpr;
use crate::cosets::{Coset, CosetError};
use crate::findual::{char_eval, FindualError, FiniteCharacter, FiniteElement, FiniteGroupSpec};
use crate::lattice::{enumerate_fi_subgroups, LatticeError, LatticeSubgroup};
use crate::trigpoly::Character;
use crate::util::MixedRadix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error(transparent)]
    Finite(#[from] FindualError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Coset(#[from] CosetError),
    #[error("weights must be strictly positive")]
    NonPositiveWeight,
    #[error("support must be nonempty and match the weights")]
    SupportMismatch,
    #[error("group point does not match the function's group")]
    PointMismatch,
    #[error("points must be pairwise distinct")]
    DuplicatePoints,
    #[error("coefficient count must match the point count")]
    CoefficientMismatch,
}

/// A point of `F x T^r` with free floating-point torus coordinates
/// (synthesized functions are evaluated numerically, so irrational phases
/// are allowed here).
#[derive(Clone, Debug, PartialEq)]
pub struct RealPoint {
    pub finite: FiniteElement,
    pub torus: Vec<f64>,
}

impl RealPoint {
    pub fn torus_only(torus: Vec<f64>) -> Self {
        RealPoint { finite: FiniteElement(Vec::new()), torus }
    }

    fn wrapped(&self) -> RealPoint {
        RealPoint {
            finite: self.finite.clone(),
            torus: self.torus.iter().map(|t| t.rem_euclid(1.0)).collect(),
        }
    }
}

/// A function synthesized from finite Fourier data: strictly positive
/// weights on a finite set of characters.
#[derive(Clone, Debug)]
pub struct SpdFunction {
    spec: FiniteGroupSpec,
    rank: usize,
    support: Vec<Character>,
    weights: Vec<f64>,
}

impl SpdFunction {
    pub fn synth(
        spec: FiniteGroupSpec,
        rank: usize,
        support: Vec<Character>,
        weights: Vec<f64>,
    ) -> Result<Self, VerifyError> {
        if support.is_empty() || support.len() != weights.len() {
            return Err(VerifyError::SupportMismatch);
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(VerifyError::NonPositiveWeight);
        }
        for chi in &support {
            spec.check_character(&chi.finite)?;
            if chi.torus.len() != rank {
                return Err(VerifyError::SupportMismatch);
            }
        }
        Ok(SpdFunction { spec, rank, support, weights })
    }

    pub fn spec(&self) -> &FiniteGroupSpec {
        &self.spec
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn support(&self) -> &[Character] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn check_point(&self, x: &RealPoint) -> Result<(), VerifyError> {
        self.spec.check_element(&x.finite)?;
        if x.torus.len() != self.rank {
            return Err(VerifyError::PointMismatch);
        }
        Ok(())
    }

    /// Character value `chi(x)` in doubles.
    fn char_value(&self, chi: &Character, x: &RealPoint) -> Complex64 {
        let mut phase = char_eval(&self.spec, &chi.finite, &x.finite)
            .expect("validated inputs")
            .to_f64();
        for (m, t) in chi.torus.iter().zip(&x.torus) {
            phase += m.to_f64().unwrap_or(f64::NAN) * t;
        }
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * phase)
    }

    /// `f(x) = sum a_chi chi(x)`.
    pub fn eval(&self, x: &RealPoint) -> Result<Complex64, VerifyError> {
        self.check_point(x)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (chi, &w) in self.support.iter().zip(&self.weights) {
            acc += w * self.char_value(chi, x);
        }
        Ok(acc)
    }

    fn diff_point(&self, xi: &RealPoint, xj: &RealPoint) -> RealPoint {
        RealPoint {
            finite: self.spec.add_elements(&xi.finite, &self.spec.neg_element(&xj.finite)),
            torus: xi.torus.iter().zip(&xj.torus).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Hermitian matrix `M[i][j] = f(x_j^{-1} x_i)`. Duplicate points (same
/// finite part and torus coordinates mod 1) are rejected.
pub fn gram_matrix(
    f: &SpdFunction,
    points: &[RealPoint],
) -> Result<Vec<Vec<Complex64>>, VerifyError> {
    for x in points {
        f.check_point(x)?;
    }
    for (i, x) in points.iter().enumerate() {
        for y in points.iter().skip(i + 1) {
            if x.wrapped() == y.wrapped() {
                return Err(VerifyError::DuplicatePoints);
            }
        }
    }
    let n = points.len();
    let mut m = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in 0..n {
            m[i][j] = f.eval(&f.diff_point(&points[i], &points[j]))?;
        }
    }
    Ok(m)
}

/// Minimum eigenvalue of a Hermitian matrix, through the real symmetric
/// embedding `[[Re, -Im], [Im, Re]]`.
pub fn min_eigenvalue(matrix: &[Vec<Complex64>]) -> f64 {
    let n = matrix.len();
    if n == 0 {
        return 0.0;
    }
    let embed = nalgebra::DMatrix::<f64>::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, bj) = (i % n, j % n);
        match (i < n, j < n) {
            (true, true) | (false, false) => matrix[bi][bj].re,
            (true, false) => -matrix[bi][bj].im,
            (false, true) => matrix[bi][bj].im,
        }
    });
    // Symmetrize away floating roundoff before the eigensolve.
    let sym = (&embed + embed.transpose()) * 0.5;
    let eig = nalgebra::SymmetricEigen::new(sym);
    eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Both sides of the quadratic-form identity: the Gram form
/// `sum c_i conj(c_j) f(x_j^{-1} x_i)` against the weighted square sum
/// `sum_chi a_chi |sum_i c_i chi(x_i)|^2`. Returns their absolute
/// difference.
pub fn identity_check(
    f: &SpdFunction,
    points: &[RealPoint],
    c: &[Complex64],
) -> Result<f64, VerifyError> {
    if c.len() != points.len() {
        return Err(VerifyError::CoefficientMismatch);
    }
    for x in points {
        f.check_point(x)?;
    }
    let mut quad = Complex64::new(0.0, 0.0);
    for (i, ci) in c.iter().enumerate() {
        for (j, cj) in c.iter().enumerate() {
            quad += ci * cj.conj() * f.eval(&f.diff_point(&points[i], &points[j]))?;
        }
    }
    let mut weighted = 0.0;
    for (chi, &w) in f.support.iter().zip(&f.weights) {
        let mut s = Complex64::new(0.0, 0.0);
        for (ci, x) in c.iter().zip(points) {
            s += ci * f.char_value(chi, x);
        }
        weighted += w * s.norm_sqr();
    }
    Ok((quad - Complex64::new(weighted, 0.0)).norm())
}

/// Report of the positive-definiteness checks on one Gram matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct GramReport {
    pub size: usize,
    pub min_eigenvalue: f64,
    /// Max over coefficient trials of the quadratic-form identity residual.
    pub identity_residual: f64,
}

/// Builds the Gram matrix, solves for its minimum eigenvalue, and stresses
/// the quadratic-form identity with seeded random coefficient vectors.
pub fn gram_report(
    f: &SpdFunction,
    points: &[RealPoint],
    trials: usize,
    seed: u64,
) -> Result<GramReport, VerifyError> {
    let m = gram_matrix(f, points)?;
    let min = min_eigenvalue(&m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let c: Vec<Complex64> = (0..points.len())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        worst = worst.max(identity_check(f, points, &c)?);
    }
    Ok(GramReport { size: points.len(), min_eigenvalue: min, identity_residual: worst })
}

/// A set of characters of `F x T^r` that the scan can query. Implementors
/// optionally expose exact per-slice set expressions, which upgrades the
/// scan from evidence to proof on refutations.
pub trait ScanTarget {
    fn finite_spec(&self) -> &FiniteGroupSpec;
    fn rank(&self) -> usize;
    fn contains(&self, chi: &Character) -> bool;
    fn exact_slice(&self, _f: &FiniteCharacter) -> Option<&SetExpr> {
        None
    }
}

/// A predicate-backed scan target; refutations are never claimed for it.
pub struct PredicateTarget<F: Fn(&Character) -> bool> {
    spec: FiniteGroupSpec,
    rank: usize,
    pred: F,
}

impl<F: Fn(&Character) -> bool> PredicateTarget<F> {
    pub fn new(spec: FiniteGroupSpec, rank: usize, pred: F) -> Self {
        PredicateTarget { spec, rank, pred }
    }
}

impl<F: Fn(&Character) -> bool> ScanTarget for PredicateTarget<F> {
    fn finite_spec(&self) -> &FiniteGroupSpec {
        &self.spec
    }

    fn rank(&self) -> usize {
        self.rank
    }

    fn contains(&self, chi: &Character) -> bool {
        (self.pred)(chi)
    }
}

/// A coset of a finite-index subgroup of `F^ x Z^r`. The subgroup is stored
/// as its preimage lattice in `Z^{k+r}` (containing the invariant-factor
/// relations), which represents arbitrary subgroups of the product,
/// including graphs of homomorphisms between the factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedCoset {
    pub spec: FiniteGroupSpec,
    pub rank: usize,
    pub rep: Character,
    pub lattice: LatticeSubgroup,
}

impl MixedCoset {
    pub fn index(&self) -> BigInt {
        self.lattice.index().finite().expect("scan lattices have full rank").clone()
    }

    /// For each character of `F`, the torus slice of this coset: the set
    /// `{m : (phi, m) in coset}` as a coset of `Z^r`, or `None` when empty.
    /// Together these sections are exactly the coset, which lets exact
    /// slice-based emptiness checks be replayed from outside.
    pub fn torus_sections(&self) -> Result<Vec<(FiniteCharacter, Option<Coset>)>, VerifyError> {
        let k = self.spec.invariants().len();
        let mut out = Vec::new();
        for phi in self.spec.characters() {
            let a: Vec<BigInt> = phi
                .0
                .iter()
                .zip(&self.rep.finite.0)
                .map(|(&p, &v)| BigInt::from(p) - BigInt::from(v))
                .collect();
            let section = match torus_section(&self.lattice, k, self.rank, &a) {
                Some((acc, l2)) => {
                    let m0: Vec<BigInt> =
                        self.rep.torus.iter().zip(&acc).map(|(a, b)| a + b).collect();
                    Some(Coset::new(m0, l2)?)
                }
                None => None,
            };
            out.push((phi, section));
        }
        Ok(out)
    }

    pub fn contains(&self, chi: &Character) -> Result<bool, VerifyError> {
        self.spec.check_character(&chi.finite)?;
        let k = self.spec.invariants().len();
        let mut diff: Vec<BigInt> = Vec::with_capacity(k + self.rank);
        for (i, &a) in chi.finite.0.iter().enumerate() {
            diff.push(BigInt::from(a) - BigInt::from(self.rep.finite.0[i]));
        }
        for (m, v) in chi.torus.iter().zip(&self.rep.torus) {
            diff.push(m - v);
        }
        Ok(self.lattice.contains(&diff)?)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ScanOutcome {
    /// A coset proven disjoint from the set; only emitted for slice-backed
    /// targets where emptiness is decided exactly.
    Refuted { witness: MixedCoset },
    /// No coset was proven disjoint. `unresolved` lists cosets where no
    /// member was found within the radius and no exact emptiness decision
    /// was available (always empty for slice-backed targets).
    NoCounterexampleFound {
        max_index: u64,
        radius: i64,
        cosets_tested: usize,
        unresolved: Vec<MixedCoset>,
    },
}

impl ScanOutcome {
    pub fn is_refuted(&self) -> bool {
        matches!(self, ScanOutcome::Refuted { .. })
    }
}

/// Torus section `{m : (a, m) in lat}` of a full-rank HNF lattice on
/// `Z^{k+r}` at the finite residue `a`: either empty or `m0 + L2` with `L2`
/// the lower-right block lattice.
fn torus_section(
    lat: &LatticeSubgroup,
    k: usize,
    rank: usize,
    a: &[BigInt],
) -> Option<(Vec<BigInt>, LatticeSubgroup)> {
    let b = lat.basis();
    let mut w = a.to_vec();
    let mut torus_acc = vec![BigInt::zero(); rank];
    for i in 0..k {
        let (q, rem) = w[i].div_rem(b.get(i, i));
        if !rem.is_zero() {
            return None;
        }
        for j in i..k {
            let sub = &q * b.get(i, j);
            w[j] -= sub;
        }
        for j in 0..rank {
            torus_acc[j] += &q * b.get(i, k + j);
        }
    }
    debug_assert!(w.iter().all(|x| x.is_zero()));
    let rows: Vec<Vec<BigInt>> =
        (k..k + rank).map(|i| (k..k + rank).map(|j| b.get(i, j).clone()).collect()).collect();
    let l2 = if rank == 0 {
        return Some((torus_acc, LatticeSubgroup::full(1)));
    } else {
        LatticeSubgroup::from_generator_rows(rows, rank).expect("square block")
    };
    Some((torus_acc, l2))
}

/// Enumerates points `m0 + c * basis` of a full-rank triangular lattice
/// coset with sup-norm at most `radius`, calling `visit` until it returns
/// true; reports whether a visit succeeded.
fn visit_section_points<F: FnMut(&[BigInt]) -> bool>(
    m0: &[BigInt],
    l2: &LatticeSubgroup,
    radius: i64,
    visit: &mut F,
) -> bool {
    fn rec<F: FnMut(&[BigInt]) -> bool>(
        base: &[BigInt],
        rows: &[Vec<BigInt>],
        i: usize,
        radius: &BigInt,
        visit: &mut F,
    ) -> bool {
        if i == rows.len() {
            return visit(base);
        }
        let pivot = &rows[i][i];
        let lo = (-(radius.clone()) - &base[i]).div_ceil(pivot);
        let hi = (radius - &base[i]).div_floor(pivot);
        let mut c = lo;
        while c <= hi {
            let mut next = base.to_vec();
            for (j, e) in rows[i].iter().enumerate() {
                next[j] += &c * e;
            }
            if rec(&next, rows, i + 1, radius, visit) {
                return true;
            }
            c += 1;
        }
        false
    }
    let rows = l2.basis().row_vecs();
    rec(m0, &rows, 0, &BigInt::from(radius), visit)
}

/// Scans all finite-index subgroups of `F^ x Z^r` of index at most
/// `max_index` and all their cosets for one missing the target set.
///
/// For each coset the scan first searches for a member with torus part
/// within `radius`; failing that, slice-backed targets are tested for exact
/// emptiness (the only way a refutation is reported), and predicate-backed
/// targets record the coset as unresolved evidence.
pub fn ubiquity_scan(target: &dyn ScanTarget, max_index: u64, radius: i64) -> ScanOutcome {
    let spec = target.finite_spec().clone();
    let rank = target.rank();
    let k = spec.invariants().len();
    let d = k + rank;
    assert!(d > 0, "scan needs a nontrivial group");
    let relations: Vec<Vec<BigInt>> = (0..k)
        .map(|i| {
            let mut row = vec![BigInt::zero(); d];
            row[i] = BigInt::from(spec.invariants()[i]);
            row
        })
        .collect();
    let finite_chars: Vec<FiniteCharacter> = spec.characters().collect();

    let mut cosets_tested = 0usize;
    let mut unresolved = Vec::new();
    'lattices: for lat in enumerate_fi_subgroups(d, max_index) {
        for rel in &relations {
            if !lat.contains(rel).expect("dimensions match") {
                continue 'lattices;
            }
        }
        let diag: Vec<u64> =
            (0..d).map(|i| u64::try_from(lat.basis().get(i, i)).expect("pivot fits u64")).collect();
        for digits in MixedRadix::new(diag) {
            cosets_tested += 1;
            let v: Vec<BigInt> = digits.iter().map(|&x| BigInt::from(x)).collect();
            let (v_fin, v_tor) = v.split_at(k);
            let rep = Character {
                finite: FiniteCharacter(digits[..k].to_vec()),
                torus: v_tor.to_vec(),
            };

            // Search for a member of the set inside this coset.
            let mut found = false;
            let mut exact_nonempty = false;
            let mut exact_available = true;
            for phi in &finite_chars {
                let a: Vec<BigInt> = phi
                    .0
                    .iter()
                    .zip(v_fin)
                    .map(|(&p, vf)| BigInt::from(p) - vf)
                    .collect();
                let Some((acc, l2)) = torus_section(&lat, k, rank, &a) else { continue };
                let m0: Vec<BigInt> = v_tor.iter().zip(&acc).map(|(a, b)| a + b).collect();
                if rank > 0 {
                    found = visit_section_points(&m0, &l2, radius, &mut |m| {
                        target.contains(&Character { finite: phi.clone(), torus: m.to_vec() })
                    });
                } else {
                    found = target.contains(&Character { finite: phi.clone(), torus: Vec::new() });
                }
                if found {
                    break;
                }
                match target.exact_slice(phi) {
                    Some(slice) => {
                        let coset = Coset::new(m0, l2).expect("matching rank");
                        if !slice.disjoint_from(&coset).expect("matching rank") {
                            exact_nonempty = true;
                        }
                    }
                    None => exact_available = false,
                }
            }
            if found {
                continue;
            }
            let witness =
                MixedCoset { spec: spec.clone(), rank, rep, lattice: lat.clone() };
            if exact_available {
                if !exact_nonempty {
                    return ScanOutcome::Refuted { witness };
                }
                // Exactly known nonempty, member just lies beyond the search
                // radius: the coset is met, keep scanning.
            } else {
                unresolved.push(witness);
            }
        }
    }
    ScanOutcome::NoCounterexampleFound { max_index, radius, cosets_tested, unresolved }
}
