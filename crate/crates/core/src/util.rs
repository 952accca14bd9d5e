//! Small enumeration helpers shared across modules.

/// Counts through all tuples `(a_0, ..., a_{k-1})` with `0 <= a_i < radix_i`,
/// in lexicographic order. Empty radix lists yield the single empty tuple;
/// a zero radix yields nothing.
pub struct MixedRadix {
    radices: Vec<u64>,
    state: Option<Vec<u64>>,
}

impl MixedRadix {
    pub fn new(radices: Vec<u64>) -> Self {
        let state = if radices.iter().any(|&r| r == 0) {
            None
        } else {
            Some(vec![0; radices.len()])
        };
        MixedRadix { radices, state }
    }
}

impl Iterator for MixedRadix {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let current = self.state.clone()?;
        let digits = self.state.as_mut().unwrap();
        let mut pos = self.radices.len();
        loop {
            if pos == 0 {
                self.state = None;
                break;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < self.radices[pos] {
                break;
            }
            digits[pos] = 0;
        }
        Some(current)
    }
}

/// Integer vectors of `Z^r` ordered by growing sup-norm shells:
/// first the origin, then all points with sup-norm 1, and so on.
pub struct NormShells {
    rank: usize,
    shell: i64,
    inner: Vec<Vec<i64>>,
    pos: usize,
}

impl NormShells {
    pub fn new(rank: usize) -> Self {
        NormShells { rank, shell: -1, inner: Vec::new(), pos: 0 }
    }

    fn fill_shell(&mut self) {
        self.shell += 1;
        self.pos = 0;
        self.inner.clear();
        let t = self.shell;
        if self.rank == 0 {
            if t == 0 {
                self.inner.push(Vec::new());
            }
            return;
        }
        let width = (2 * t + 1) as u64;
        for digits in MixedRadix::new(vec![width; self.rank]) {
            let v: Vec<i64> = digits.iter().map(|&d| d as i64 - t).collect();
            if v.iter().map(|x| x.abs()).max() == Some(t) || t == 0 {
                self.inner.push(v);
            }
        }
    }
}

impl Iterator for NormShells {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        while self.pos >= self.inner.len() {
            if self.rank == 0 && self.shell >= 0 {
                return None; // Z^0 has a single point
            }
            self.fill_shell();
        }
        let v = self.inner[self.pos].clone();
        self.pos += 1;
        Some(v)
    }
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd_u64(a, b) * b
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    num_integer::Integer::gcd(&a, &b)
}
