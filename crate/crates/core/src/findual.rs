//! Finite abelian groups and their duals: character evaluation, the exact
//! finite-group strict-positive-definiteness test, a brute-force ubiquity
//! oracle, and dual generation.
//!
//! Groups are given by invariant factors `n_1, ..., n_k` (the group is the
//! direct sum of `Z/n_i`), and the dual is identified with the group itself
//! through the pairing `chi_b(a) = exp(2 pi i sum a_i b_i / n_i)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use std::collections::{BTreeSet, VecDeque};
use thiserror::Error;

use crate::cyclo::CycloNumber;
use crate::lattice::LatticeSubgroup;
use crate::phase::Phase;
use crate::util::{lcm_u64, MixedRadix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FindualError {
    #[error("invariant factors must all be at least 2")]
    InvalidInvariant,
    #[error("element does not match the group spec")]
    ElementMismatch,
    #[error("character does not match the group spec")]
    CharacterMismatch,
}

/// A finite abelian group as a list of invariant factors; the empty list is
/// the trivial group.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct FiniteGroupSpec {
    invariants: Vec<u64>,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct FiniteElement(pub Vec<u64>);

#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct FiniteCharacter(pub Vec<u64>);

impl FiniteGroupSpec {
    pub fn new(invariants: Vec<u64>) -> Result<Self, FindualError> {
        if invariants.iter().any(|&n| n < 2) {
            return Err(FindualError::InvalidInvariant);
        }
        Ok(FiniteGroupSpec { invariants })
    }

    pub fn trivial() -> Self {
        FiniteGroupSpec { invariants: Vec::new() }
    }

    pub fn invariants(&self) -> &[u64] {
        &self.invariants
    }

    pub fn order(&self) -> u64 {
        self.invariants.iter().product()
    }

    /// Least common multiple of the invariant factors (the exponent of the
    /// group); 1 for the trivial group.
    pub fn exponent(&self) -> u64 {
        self.invariants.iter().fold(1, |acc, &n| lcm_u64(acc, n))
    }

    pub fn identity_element(&self) -> FiniteElement {
        FiniteElement(vec![0; self.invariants.len()])
    }

    pub fn trivial_character(&self) -> FiniteCharacter {
        FiniteCharacter(vec![0; self.invariants.len()])
    }

    pub fn elements(&self) -> impl Iterator<Item = FiniteElement> {
        MixedRadix::new(self.invariants.clone()).map(FiniteElement)
    }

    pub fn characters(&self) -> impl Iterator<Item = FiniteCharacter> {
        MixedRadix::new(self.invariants.clone()).map(FiniteCharacter)
    }

    pub fn check_element(&self, a: &FiniteElement) -> Result<(), FindualError> {
        if a.0.len() != self.invariants.len()
            || a.0.iter().zip(&self.invariants).any(|(&r, &n)| r >= n)
        {
            return Err(FindualError::ElementMismatch);
        }
        Ok(())
    }

    pub fn check_character(&self, b: &FiniteCharacter) -> Result<(), FindualError> {
        if b.0.len() != self.invariants.len()
            || b.0.iter().zip(&self.invariants).any(|(&r, &n)| r >= n)
        {
            return Err(FindualError::CharacterMismatch);
        }
        Ok(())
    }

    pub fn add_elements(&self, a: &FiniteElement, b: &FiniteElement) -> FiniteElement {
        FiniteElement(
            a.0.iter().zip(&b.0).zip(&self.invariants).map(|((&x, &y), &n)| (x + y) % n).collect(),
        )
    }

    pub fn neg_element(&self, a: &FiniteElement) -> FiniteElement {
        FiniteElement(a.0.iter().zip(&self.invariants).map(|(&x, &n)| (n - x) % n).collect())
    }

    pub fn add_characters(&self, a: &FiniteCharacter, b: &FiniteCharacter) -> FiniteCharacter {
        FiniteCharacter(
            a.0.iter().zip(&b.0).zip(&self.invariants).map(|((&x, &y), &n)| (x + y) % n).collect(),
        )
    }

    pub fn neg_character(&self, a: &FiniteCharacter) -> FiniteCharacter {
        FiniteCharacter(a.0.iter().zip(&self.invariants).map(|(&x, &n)| (n - x) % n).collect())
    }
}

/// Exact character value as a rational phase: `chi_b(a) = e^{2 pi i q}` with
/// `q = sum a_i b_i / n_i mod 1`.
pub fn char_eval(
    spec: &FiniteGroupSpec,
    b: &FiniteCharacter,
    a: &FiniteElement,
) -> Result<Phase, FindualError> {
    spec.check_character(b)?;
    spec.check_element(a)?;
    let mut q = Phase::zero();
    for ((&ai, &bi), &ni) in a.0.iter().zip(&b.0).zip(spec.invariants()) {
        let term = Phase::new(BigRational::new(BigInt::from(ai * bi), BigInt::from(ni)));
        q = q.add(&term);
    }
    Ok(q)
}

/// A trigonometric polynomial on the dual of a finite group, stored as
/// cyclotomic coefficients indexed by group elements. Produced as the
/// negative certificate of the finite SPD test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VanishingVector {
    pub spec: FiniteGroupSpec,
    pub terms: Vec<(FiniteElement, CycloNumber)>,
}

impl VanishingVector {
    /// Exact value of `sum_x c_x chi(x)`.
    pub fn eval(&self, chi: &FiniteCharacter) -> Result<CycloNumber, FindualError> {
        let l = self.spec.exponent().max(1);
        let mut acc = CycloNumber::zero(l);
        for (x, c) in &self.terms {
            let q = char_eval(&self.spec, chi, x)?;
            acc = acc.add(&c.mul(&CycloNumber::from_phase(l, &q)));
        }
        Ok(acc)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|(_, c)| c.is_zero())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FiniteSpdVerdict {
    Spd { rank: u64 },
    NotSpd { witness: VanishingVector },
}

impl FiniteSpdVerdict {
    pub fn is_spd(&self) -> bool {
        matches!(self, FiniteSpdVerdict::Spd { .. })
    }
}

fn mod_pow(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc: u128 = 1;
    let m = modulus as u128;
    let mut b = (base % modulus) as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    base = acc as u64;
    base
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// A prime `p = 1 mod l` exceeding `min`, together with an element of exact
/// multiplicative order `l` in `F_p`.
fn split_prime_with_root(l: u64, min: u64) -> (u64, u64) {
    let mut k = min / l + 1;
    loop {
        let p = l * k + 1;
        if p > min && is_prime(p) {
            'outer: for h in 2..p {
                let g = mod_pow(h, (p - 1) / l, p);
                if g == 1 && l > 1 {
                    continue;
                }
                for &q in &prime_factors(l) {
                    if mod_pow(g, l / q, p) == 1 {
                        continue 'outer;
                    }
                }
                return (p, g);
            }
        }
        k += 1;
    }
}

fn rank_mod_p(mut m: Vec<Vec<u64>>, p: u64) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&i| m[i][col] % p != 0) else { continue };
        m.swap(rank, pivot);
        let inv = mod_pow(m[rank][col], p - 2, p);
        for i in 0..rows {
            if i == rank || m[i][col] % p == 0 {
                continue;
            }
            let factor = m[i][col] as u128 * inv as u128 % p as u128;
            for j in col..cols {
                let sub = factor * m[rank][j] as u128 % p as u128;
                m[i][j] = ((m[i][j] as u128 + p as u128 - sub) % p as u128) as u64;
            }
        }
        rank += 1;
    }
    rank
}

/// Decides whether a subset of the dual is strictly positive definite.
///
/// Two criteria are evaluated and cross-checked: the set criterion
/// `K = dual` and the rank criterion (the element-by-character evaluation
/// matrix has row-rank `|G|`). The rank is certified exactly: a full-rank
/// reduction of the matrix modulo a split prime bounds the rank from below,
/// and in the deficient case the returned vanishing vector is verified to
/// annihilate every character of `K` in exact cyclotomic arithmetic, which
/// bounds the rank from above. A criteria mismatch is an internal error.
pub fn spd_test_finite(
    spec: &FiniteGroupSpec,
    k: &[FiniteCharacter],
) -> Result<FiniteSpdVerdict, FindualError> {
    let mut unique = BTreeSet::new();
    for chi in k {
        spec.check_character(chi)?;
        unique.insert(chi.clone());
    }
    let order = spec.order();
    let set_criterion = unique.len() as u64 == order;

    // Rank of the evaluation matrix modulo a split prime. Character values
    // e^{2 pi i t / L} map to g^t for an order-L element g of F_p.
    let l = spec.exponent().max(1);
    let (p, g) = split_prime_with_root(l, order.max(l) + 1);
    let elements: Vec<FiniteElement> = spec.elements().collect();
    let matrix: Vec<Vec<u64>> = unique
        .iter()
        .map(|chi| {
            elements
                .iter()
                .map(|x| {
                    let q = char_eval(spec, chi, x).expect("validated inputs");
                    mod_pow(g, q.numer_over(l), p)
                })
                .collect()
        })
        .collect();
    let rank_p = rank_mod_p(matrix, p) as u64;
    assert_eq!(
        rank_p,
        unique.len() as u64,
        "internal error: distinct characters must stay independent mod a split prime"
    );
    let rank_criterion = rank_p == order;
    assert_eq!(
        rank_criterion, set_criterion,
        "internal error: rank criterion and set criterion disagree"
    );

    if set_criterion {
        return Ok(FiniteSpdVerdict::Spd { rank: rank_p });
    }

    // Witness: the conjugate value vector of a missing character annihilates
    // every other character by orthogonality; verified exactly below.
    let missing = spec
        .characters()
        .find(|chi| !unique.contains(chi))
        .expect("a proper subset misses some character");
    let terms: Vec<(FiniteElement, CycloNumber)> = elements
        .iter()
        .map(|x| {
            let q = char_eval(spec, &missing, &spec.neg_element(x)).expect("validated inputs");
            (x.clone(), CycloNumber::from_phase(l, &q))
        })
        .collect();
    let witness = VanishingVector { spec: spec.clone(), terms };
    assert!(!witness.is_zero(), "internal error: witness vector must be nonzero");
    for chi in &unique {
        assert!(
            witness.eval(chi)?.is_zero(),
            "internal error: witness fails to vanish at {chi:?}"
        );
    }
    debug_assert!(!witness.eval(&missing)?.is_zero());
    Ok(FiniteSpdVerdict::NotSpd { witness })
}

/// A subgroup of the dual, listed in sorted order.
pub type DualSubgroup = Vec<FiniteCharacter>;

fn close_under_addition(spec: &FiniteGroupSpec, gens: &BTreeSet<FiniteCharacter>) -> DualSubgroup {
    let mut set: BTreeSet<FiniteCharacter> = BTreeSet::new();
    set.insert(spec.trivial_character());
    let mut queue: VecDeque<FiniteCharacter> = gens.iter().cloned().collect();
    while let Some(g) = queue.pop_front() {
        if set.contains(&g) {
            continue;
        }
        let snapshot: Vec<FiniteCharacter> = set.iter().cloned().collect();
        set.insert(g.clone());
        for s in snapshot {
            queue.push_back(spec.add_characters(&s, &g));
        }
        queue.push_back(spec.add_characters(&g, &g));
    }
    set.into_iter().collect()
}

/// Every subgroup of the dual, by closure over extensions of generator
/// sets; deduplicated and sorted. Intended for small groups.
pub fn enumerate_dual_subgroups(spec: &FiniteGroupSpec) -> Vec<DualSubgroup> {
    let all: Vec<FiniteCharacter> = spec.characters().collect();
    let trivial = close_under_addition(spec, &BTreeSet::new());
    let mut found: BTreeSet<DualSubgroup> = BTreeSet::new();
    found.insert(trivial.clone());
    let mut queue = VecDeque::new();
    queue.push_back(trivial);
    while let Some(sub) = queue.pop_front() {
        let base: BTreeSet<FiniteCharacter> = sub.iter().cloned().collect();
        for g in &all {
            if base.contains(g) {
                continue;
            }
            let mut gens = base.clone();
            gens.insert(g.clone());
            let bigger = close_under_addition(spec, &gens);
            if found.insert(bigger.clone()) {
                queue.push_back(bigger);
            }
        }
    }
    found.into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FiniteUbiquityVerdict {
    Ubiquitous,
    NotUbiquitous { rep: FiniteCharacter, subgroup: DualSubgroup },
}

impl FiniteUbiquityVerdict {
    pub fn is_ubiquitous(&self) -> bool {
        matches!(self, FiniteUbiquityVerdict::Ubiquitous)
    }
}

/// Exhaustive ubiquity test on a finite dual: every subgroup (all have
/// finite index here) and every coset is intersected with `K`.
pub fn ubiquity_bruteforce_finite(
    spec: &FiniteGroupSpec,
    k: &[FiniteCharacter],
) -> Result<FiniteUbiquityVerdict, FindualError> {
    let mut kset = BTreeSet::new();
    for chi in k {
        spec.check_character(chi)?;
        kset.insert(chi.clone());
    }
    for subgroup in enumerate_dual_subgroups(spec) {
        let mut seen: BTreeSet<FiniteCharacter> = BTreeSet::new();
        for rep in spec.characters() {
            if seen.contains(&rep) {
                continue;
            }
            let coset: Vec<FiniteCharacter> =
                subgroup.iter().map(|s| spec.add_characters(&rep, s)).collect();
            seen.extend(coset.iter().cloned());
            if coset.iter().all(|c| !kset.contains(c)) {
                let canonical_rep = coset.iter().min().unwrap().clone();
                return Ok(FiniteUbiquityVerdict::NotUbiquitous { rep: canonical_rep, subgroup });
            }
        }
    }
    Ok(FiniteUbiquityVerdict::Ubiquitous)
}

/// Does `K` generate the full dual group? Decided exactly by reducing the
/// residue rows together with the invariant-factor relations to Hermite
/// form and checking the index is 1.
pub fn generates_dual(spec: &FiniteGroupSpec, k: &[FiniteCharacter]) -> Result<bool, FindualError> {
    for chi in k {
        spec.check_character(chi)?;
    }
    let kdim = spec.invariants().len();
    if kdim == 0 {
        return Ok(true);
    }
    let mut rows: Vec<Vec<BigInt>> = k.iter().map(|chi| {
        chi.0.iter().map(|&r| BigInt::from(r)).collect()
    }).collect();
    for (i, &n) in spec.invariants().iter().enumerate() {
        let mut rel = vec![BigInt::from(0); kdim];
        rel[i] = BigInt::from(n);
        rows.push(rel);
    }
    let lat = LatticeSubgroup::from_generator_rows(rows, kdim).expect("consistent row lengths");
    Ok(lat.is_full())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(inv: &[u64]) -> FiniteGroupSpec {
        FiniteGroupSpec::new(inv.to_vec()).unwrap()
    }

    #[test]
    fn char_eval_examples() {
        let z4 = spec(&[4]);
        let trivial = z4.trivial_character();
        for a in z4.elements() {
            assert!(char_eval(&z4, &trivial, &a).unwrap().is_zero());
        }
        assert_eq!(
            char_eval(&z4, &FiniteCharacter(vec![1]), &FiniteElement(vec![1])).unwrap(),
            Phase::from_ratio(1, 4)
        );

        let g = spec(&[2, 3]);
        assert_eq!(
            char_eval(&g, &FiniteCharacter(vec![1, 2]), &FiniteElement(vec![1, 1])).unwrap(),
            Phase::from_ratio(1, 6)
        );
    }

    #[test]
    fn char_eval_rejects_mismatch() {
        let z4 = spec(&[4]);
        assert!(char_eval(&z4, &FiniteCharacter(vec![5]), &FiniteElement(vec![0])).is_err());
        assert!(char_eval(&z4, &FiniteCharacter(vec![0, 0]), &FiniteElement(vec![0])).is_err());
    }

    #[test]
    fn spd_full_dual_is_spd() {
        let z2 = spec(&[2]);
        let full: Vec<FiniteCharacter> = z2.characters().collect();
        match spd_test_finite(&z2, &full).unwrap() {
            FiniteSpdVerdict::Spd { rank } => assert_eq!(rank, 2),
            _ => panic!("full dual must be SPD"),
        }
    }

    #[test]
    fn spd_witness_for_trivial_subset() {
        let z2 = spec(&[2]);
        let k = vec![z2.trivial_character()];
        let FiniteSpdVerdict::NotSpd { witness } = spd_test_finite(&z2, &k).unwrap() else {
            panic!("proper subset cannot be SPD");
        };
        assert!(witness.eval(&z2.trivial_character()).unwrap().is_zero());
        let at_one = witness.eval(&FiniteCharacter(vec![1])).unwrap();
        // value is +-2 at the other character
        let sq = at_one.mul(&at_one.conj()).to_rational().unwrap();
        assert_eq!(sq, BigRational::from_integer(4.into()));
        // coefficients are 1 and -1 up to global sign
        assert_eq!(witness.terms.len(), 2);
        let sum = witness.terms[0].1.add(&witness.terms[1].1);
        assert!(sum.is_zero());
    }

    #[test]
    fn spd_trivial_group() {
        let t = FiniteGroupSpec::trivial();
        let k = vec![t.trivial_character()];
        assert!(spd_test_finite(&t, &k).unwrap().is_spd());
        let FiniteSpdVerdict::NotSpd { witness } = spd_test_finite(&t, &[]).unwrap() else {
            panic!("empty set on a nontrivial-order-1 dual is not SPD");
        };
        assert!(!witness.is_zero());
    }

    #[test]
    fn spd_iff_full_dual_small_groups() {
        for inv in [vec![2], vec![3], vec![4], vec![2, 2], vec![5], vec![6]] {
            let g = spec(&inv);
            let chars: Vec<FiniteCharacter> = g.characters().collect();
            let n = chars.len();
            for mask in 0u32..(1 << n) {
                let k: Vec<FiniteCharacter> = (0..n)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| chars[i].clone())
                    .collect();
                let verdict = spd_test_finite(&g, &k).unwrap();
                assert_eq!(verdict.is_spd(), k.len() == n, "group {inv:?} mask {mask:b}");
                if let FiniteSpdVerdict::NotSpd { witness } = verdict {
                    for chi in &k {
                        assert!(witness.eval(chi).unwrap().is_zero());
                    }
                    assert!(!witness.is_zero());
                }
            }
        }
    }

    #[test]
    fn ubiquity_bruteforce_examples() {
        let z4 = spec(&[4]);
        let full: Vec<FiniteCharacter> = z4.characters().collect();
        assert!(ubiquity_bruteforce_finite(&z4, &full).unwrap().is_ubiquitous());

        let k = vec![FiniteCharacter(vec![0]), FiniteCharacter(vec![2])];
        let FiniteUbiquityVerdict::NotUbiquitous { rep, subgroup } =
            ubiquity_bruteforce_finite(&z4, &k).unwrap()
        else {
            panic!("{{0, 2}} misses the odd coset of {{0, 2}}");
        };
        // the witness coset must avoid K
        for s in &subgroup {
            let shifted = z4.add_characters(&rep, s);
            assert!(!k.contains(&shifted));
        }

        let z2 = spec(&[2]);
        let k = vec![FiniteCharacter(vec![1])];
        let FiniteUbiquityVerdict::NotUbiquitous { rep, subgroup } =
            ubiquity_bruteforce_finite(&z2, &k).unwrap()
        else {
            panic!("{{1}} misses the trivial coset of the trivial subgroup");
        };
        assert_eq!(rep, z2.trivial_character());
        assert_eq!(subgroup, vec![z2.trivial_character()]);
    }

    #[test]
    fn generates_dual_examples() {
        let z4 = spec(&[4]);
        assert!(generates_dual(&z4, &[FiniteCharacter(vec![1])]).unwrap());
        assert!(!generates_dual(&z4, &[FiniteCharacter(vec![2])]).unwrap());

        let v = spec(&[2, 2]);
        assert!(generates_dual(
            &v,
            &[FiniteCharacter(vec![1, 0]), FiniteCharacter(vec![0, 1])]
        )
        .unwrap());
        assert!(!generates_dual(&v, &[FiniteCharacter(vec![1, 1])]).unwrap());
        assert!(generates_dual(&FiniteGroupSpec::trivial(), &[]).unwrap());
    }

    #[test]
    fn subgroup_enumeration_counts() {
        // Z/4 has 3 subgroups; Z/2 x Z/2 has 5; Z/6 has 4.
        assert_eq!(enumerate_dual_subgroups(&spec(&[4])).len(), 3);
        assert_eq!(enumerate_dual_subgroups(&spec(&[2, 2])).len(), 5);
        assert_eq!(enumerate_dual_subgroups(&spec(&[6])).len(), 4);
        assert_eq!(enumerate_dual_subgroups(&FiniteGroupSpec::trivial()).len(), 1);
    }

    #[test]
    fn spd_agrees_with_ubiquity_small() {
        for inv in [vec![2], vec![3], vec![4], vec![2, 2]] {
            let g = spec(&inv);
            let chars: Vec<FiniteCharacter> = g.characters().collect();
            let n = chars.len();
            for mask in 0u32..(1 << n) {
                let k: Vec<FiniteCharacter> = (0..n)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| chars[i].clone())
                    .collect();
                let spd = spd_test_finite(&g, &k).unwrap().is_spd();
                let ubiq = ubiquity_bruteforce_finite(&g, &k).unwrap().is_ubiquitous();
                assert_eq!(spd, ubiq, "group {inv:?} mask {mask:b}");
                if spd {
                    assert!(generates_dual(&g, &k).unwrap());
                }
            }
        }
    }
}
