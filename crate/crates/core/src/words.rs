//! Words in free groups and braid groups.
//!
//! `FreeWord` letters are non-zero signed generator indices (`3` means
//! `g_3`, `-3` means `g_3^{-1}`); `BraidWord` letters index the Artin
//! generators `X_1 .. X_{d-1}` the same way.

use crate::perm::Perm;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Freely reduced word in the free group on `rank` generators.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FreeWord {
    rank: usize,
    letters: Vec<i32>,
}

impl fmt::Debug for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|&l| {
                if l > 0 {
                    format!("g{}", l)
                } else {
                    format!("g{}^-1", -l)
                }
            })
            .collect();
        write!(f, "{}", parts.join("."))
    }
}

fn reduce_letters(letters: &mut Vec<i32>) {
    let mut out: Vec<i32> = Vec::with_capacity(letters.len());
    for &l in letters.iter() {
        if l == 0 {
            continue;
        }
        if out.last().copied() == Some(-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    *letters = out;
}

impl FreeWord {
    pub fn identity(rank: usize) -> Self {
        FreeWord { rank, letters: Vec::new() }
    }

    pub fn generator(rank: usize, i: usize) -> Self {
        assert!(i >= 1 && i <= rank);
        FreeWord { rank, letters: vec![i as i32] }
    }

    /// Build from signed letters, freely reducing.
    pub fn from_letters(rank: usize, letters: &[i32]) -> Self {
        for &l in letters {
            assert!(l != 0 && (l.unsigned_abs() as usize) <= rank, "letter out of range");
        }
        let mut v = letters.to_vec();
        reduce_letters(&mut v);
        FreeWord { rank, letters: v }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|&l| -l).collect(),
        }
    }

    pub fn concat(&self, other: &FreeWord) -> FreeWord {
        assert_eq!(self.rank, other.rank, "rank mismatch");
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        reduce_letters(&mut letters);
        FreeWord { rank: self.rank, letters }
    }

    /// `self * other * self^{-1}`
    pub fn conjugate(&self, other: &FreeWord) -> FreeWord {
        self.concat(other).concat(&self.inverse())
    }

    pub fn pow(&self, e: i32) -> FreeWord {
        let base = if e >= 0 { self.clone() } else { self.inverse() };
        let mut out = FreeWord::identity(self.rank);
        for _ in 0..e.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// Exponent sum per generator.
    pub fn exponent_row(&self) -> Vec<i64> {
        let mut row = vec![0i64; self.rank];
        for &l in &self.letters {
            let idx = l.unsigned_abs() as usize - 1;
            row[idx] += if l > 0 { 1 } else { -1 };
        }
        row
    }

    pub fn total_exponent(&self) -> i64 {
        self.letters.iter().map(|&l| if l > 0 { 1 } else { -1 }).sum()
    }

    /// Substitute each generator `g_i` by `images[i-1]` (inverse letters get
    /// the inverse image) and reduce.
    pub fn substitute(&self, images: &[FreeWord]) -> FreeWord {
        assert_eq!(images.len(), self.rank);
        let out_rank = images.first().map_or(self.rank, |w| w.rank);
        let mut letters = Vec::new();
        for &l in &self.letters {
            let img = &images[l.unsigned_abs() as usize - 1];
            if l > 0 {
                letters.extend_from_slice(&img.letters);
            } else {
                letters.extend(img.letters.iter().rev().map(|&x| -x));
            }
        }
        reduce_letters(&mut letters);
        FreeWord { rank: out_rank, letters }
    }

    /// Product g_1 g_2 ... g_rank.
    pub fn full_product(rank: usize) -> FreeWord {
        FreeWord { rank, letters: (1..=rank as i32).collect() }
    }
}

/// Word in the braid group `B_d` on `strands` strands.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<i32>,
}

impl fmt::Debug for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|&l| {
                if l > 0 {
                    format!("X{}", l)
                } else {
                    format!("X{}^-1", -l)
                }
            })
            .collect();
        write!(f, "{}", parts.join("."))
    }
}

impl BraidWord {
    pub fn identity(strands: usize) -> Self {
        BraidWord { strands, letters: Vec::new() }
    }

    pub fn from_letters(strands: usize, letters: &[i32]) -> Self {
        assert!(strands >= 1);
        for &l in letters {
            assert!(
                l != 0 && (l.unsigned_abs() as usize) < strands,
                "braid letter {} out of range for {} strands",
                l,
                strands
            );
        }
        BraidWord { strands, letters: letters.to_vec() }
    }

    pub fn generator(strands: usize, i: usize) -> Self {
        BraidWord::from_letters(strands, &[i as i32])
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn inverse(&self) -> BraidWord {
        BraidWord {
            strands: self.strands,
            letters: self.letters.iter().rev().map(|&l| -l).collect(),
        }
    }

    pub fn concat(&self, other: &BraidWord) -> BraidWord {
        assert_eq!(self.strands, other.strands);
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        BraidWord { strands: self.strands, letters }
    }

    pub fn pow(&self, e: i32) -> BraidWord {
        let base = if e >= 0 { self.clone() } else { self.inverse() };
        let mut letters = Vec::new();
        for _ in 0..e.unsigned_abs() {
            letters.extend_from_slice(&base.letters);
        }
        BraidWord { strands: self.strands, letters }
    }

    /// Induced permutation (product of adjacent transpositions, letters
    /// applied left to right).
    pub fn permutation(&self) -> Perm {
        let mut p = Perm::identity(self.strands);
        for &l in &self.letters {
            p = p.then(&Perm::adjacent_transposition(self.strands, l.unsigned_abs() as usize));
        }
        p
    }

    /// Degree (exponent sum).
    pub fn degree(&self) -> i64 {
        self.letters.iter().map(|&l| if l > 0 { 1 } else { -1 }).sum()
    }

    /// The full twist Delta^2 = (X_1 X_2 ... X_{d-1})^d.
    pub fn full_twist(strands: usize) -> BraidWord {
        let round: Vec<i32> = (1..strands as i32).collect();
        let mut letters = Vec::new();
        for _ in 0..strands {
            letters.extend_from_slice(&round);
        }
        BraidWord { strands, letters }
    }
}

/// Right Artin action of a single braid letter on a free word.
///
/// The positive generator `X_i` substitutes
/// `g_i -> g_i g_{i+1} g_i^{-1}`, `g_{i+1} -> g_i`; a negative letter acts
/// by the inverse substitution `g_i -> g_{i+1}`, `g_{i+1} -> g_{i+1}^{-1} g_i g_{i+1}`.
fn artin_letter(strands: usize, letter: i32, w: &FreeWord) -> FreeWord {
    let i = letter.unsigned_abs() as usize;
    assert!(i >= 1 && i < strands);
    let rank = w.rank();
    assert_eq!(rank, strands, "free word rank must equal strand count");
    let mut images: Vec<FreeWord> = (1..=rank).map(|j| FreeWord::generator(rank, j)).collect();
    let gi = FreeWord::generator(rank, i);
    let gi1 = FreeWord::generator(rank, i + 1);
    if letter > 0 {
        images[i - 1] = gi.concat(&gi1).concat(&gi.inverse());
        images[i] = gi;
    } else {
        images[i - 1] = gi1.clone();
        images[i] = gi1.inverse().concat(&gi).concat(&gi1);
    }
    w.substitute(&images)
}

/// Image of `w` under the right action of the braid `b`: letters of `b` are
/// applied in order, so `artin_action(b1.concat(b2), w) ==
/// artin_action(b2, artin_action(b1, w))`.
pub fn artin_action(b: &BraidWord, w: &FreeWord) -> FreeWord {
    assert_eq!(
        b.strands(),
        w.rank(),
        "braid strand count {} does not match free rank {}",
        b.strands(),
        w.rank()
    );
    let mut out = w.clone();
    for &l in b.letters() {
        out = artin_letter(b.strands(), l, &out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_braid(rng: &mut ChaCha8Rng, d: usize, len: usize) -> BraidWord {
        let letters: Vec<i32> = (0..len)
            .map(|_| {
                let i = rng.gen_range(1..d as i32);
                if rng.gen_bool(0.5) {
                    i
                } else {
                    -i
                }
            })
            .collect();
        BraidWord::from_letters(d, &letters)
    }

    fn random_word(rng: &mut ChaCha8Rng, rank: usize, len: usize) -> FreeWord {
        let letters: Vec<i32> = (0..len)
            .map(|_| {
                let i = rng.gen_range(1..=rank as i32);
                if rng.gen_bool(0.5) {
                    i
                } else {
                    -i
                }
            })
            .collect();
        FreeWord::from_letters(rank, &letters)
    }

    #[test]
    fn free_reduction() {
        let w = FreeWord::from_letters(2, &[1, 2, -2, -1, 2]);
        assert_eq!(w.letters(), &[2]);
        assert!(w.concat(&w.inverse()).is_empty());
    }

    #[test]
    fn identity_braid_acts_trivially() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let w = random_word(&mut rng, 4, 8);
            assert_eq!(artin_action(&BraidWord::identity(4), &w), w);
        }
    }

    #[test]
    fn x1_on_g1() {
        let b = BraidWord::generator(2, 1);
        let g1 = FreeWord::generator(2, 1);
        assert_eq!(artin_action(&b, &g1), FreeWord::from_letters(2, &[1, 2, -1]));
        // cross-check X1 X1 acts as conjugation by g1 g2 on F_2
        let b2 = b.concat(&b);
        let w = FreeWord::full_product(2);
        for j in 1..=2 {
            let gj = FreeWord::generator(2, j);
            assert_eq!(artin_action(&b2, &gj), w.conjugate(&gj));
        }
    }

    #[test]
    fn full_twist_is_conjugation_by_product() {
        for d in 2..=5 {
            let delta2 = BraidWord::full_twist(d);
            assert!(delta2.permutation().is_identity());
            assert_eq!(delta2.degree(), (d * (d - 1)) as i64);
            let w = FreeWord::full_product(d);
            for j in 1..=d {
                let gj = FreeWord::generator(d, j);
                assert_eq!(artin_action(&delta2, &gj), w.conjugate(&gj));
            }
        }
    }

    #[test]
    fn action_is_right_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let d = rng.gen_range(2..6);
            let b1 = random_braid(&mut rng, d, 6);
            let b2 = random_braid(&mut rng, d, 6);
            let w = random_word(&mut rng, d, 6);
            assert_eq!(
                artin_action(&b1.concat(&b2), &w),
                artin_action(&b2, &artin_action(&b1, &w)),
            );
        }
    }

    #[test]
    fn action_preserves_product_and_exponent() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let d = rng.gen_range(2..6);
            let b = random_braid(&mut rng, d, 8);
            let w = random_word(&mut rng, d, 6);
            assert_eq!(artin_action(&b, &w).total_exponent(), w.total_exponent());
            // the product g_1...g_d is fixed (central element's image)
            let full = FreeWord::full_product(d);
            assert_eq!(artin_action(&b, &full), full);
        }
    }

    #[test]
    fn braid_relations_act_equally() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for d in 3..6 {
            for i in 1..d - 1 {
                let a = BraidWord::from_letters(d, &[i as i32, i as i32 + 1, i as i32]);
                let b = BraidWord::from_letters(d, &[i as i32 + 1, i as i32, i as i32 + 1]);
                for _ in 0..10 {
                    let w = random_word(&mut rng, d, 6);
                    assert_eq!(artin_action(&a, &w), artin_action(&b, &w));
                }
            }
            for i in 1..d as i32 - 2 {
                for j in i + 2..d as i32 {
                    let comm = BraidWord::from_letters(d, &[i, j, -i, -j]);
                    for _ in 0..10 {
                        let w = random_word(&mut rng, d, 6);
                        assert_eq!(artin_action(&comm, &w), w);
                    }
                }
            }
        }
    }

    #[test]
    fn braid_permutation_and_degree() {
        let b = BraidWord::from_letters(2, &[1, 1, 1]);
        assert_eq!(b.permutation().as_transposition(), Some((1, 2)));
        assert_eq!(b.degree(), 3);
        assert!(BraidWord::identity(4).permutation().is_identity());
        assert_eq!(BraidWord::identity(4).degree(), 0);
    }
}
