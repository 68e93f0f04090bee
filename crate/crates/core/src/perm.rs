//! Permutations of `{1, ..., n}`, stored as 0-based image vectors.
//!
//! Composition follows braid-word order: `a.then(&b)` applies `a` first.

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Perm(Vec<usize>);

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let images: Vec<String> = self.0.iter().map(|x| (x + 1).to_string()).collect();
        write!(f, "[{}]", images.join(" "))
    }
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    /// Transposition of adjacent points `i`, `i+1` (1-based `i`).
    pub fn adjacent_transposition(n: usize, i: usize) -> Self {
        assert!(i >= 1 && i < n);
        let mut p = Perm::identity(n);
        p.0.swap(i - 1, i);
        p
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        assert!(a >= 1 && b >= 1 && a <= n && b <= n && a != b);
        let mut p = Perm::identity(n);
        p.0.swap(a - 1, b - 1);
        p
    }

    pub fn from_images_1based(images: &[usize]) -> Self {
        let n = images.len();
        let mut seen = vec![false; n];
        for &im in images {
            assert!(im >= 1 && im <= n && !seen[im - 1], "not a permutation");
            seen[im - 1] = true;
        }
        Perm(images.iter().map(|&x| x - 1).collect())
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// Image of 1-based point `i`.
    pub fn image(&self, i: usize) -> usize {
        self.0[i - 1] + 1
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// `self` first, then `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        assert_eq!(self.n(), other.n());
        Perm(self.0.iter().map(|&x| other.0[x]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x] = i;
        }
        Perm(inv)
    }

    /// Coxeter length = inversion count.
    pub fn length(&self) -> usize {
        let n = self.0.len();
        let mut count = 0;
        for i in 0..n {
            for j in i + 1..n {
                if self.0[i] > self.0[j] {
                    count += 1;
                }
            }
        }
        count
    }

    /// Returns `Some((a, b))` with `a < b` (1-based) when the permutation is
    /// a transposition.
    pub fn as_transposition(&self) -> Option<(usize, usize)> {
        let moved: Vec<usize> = (0..self.0.len()).filter(|&i| self.0[i] != i).collect();
        match moved.as_slice() {
            [a, b] if self.0[*a] == *b && self.0[*b] == *a => Some((a + 1, b + 1)),
            _ => None,
        }
    }

    /// Lexicographically least reduced word in adjacent transpositions
    /// (1-based generator indices), with letters composing left to right.
    pub fn lex_least_reduced_word(&self) -> Vec<usize> {
        let mut p = self.0.clone();
        let mut word = Vec::new();
        loop {
            let mut found = None;
            for i in 0..p.len().saturating_sub(1) {
                if p[i] > p[i + 1] {
                    found = Some(i);
                    break;
                }
            }
            match found {
                Some(i) => {
                    word.push(i + 1);
                    p.swap(i, i + 1);
                }
                None => break,
            }
        }
        word
    }

    pub fn one_line_1based(&self) -> Vec<usize> {
        self.0.iter().map(|&x| x + 1).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_and_invert() {
        let s1 = Perm::adjacent_transposition(3, 1);
        let s2 = Perm::adjacent_transposition(3, 2);
        let p = s1.then(&s2); // apply s1 then s2: 1->2->3, 2->1, 3->2
        assert_eq!(p.one_line_1based(), vec![3, 1, 2]);
        assert!(p.then(&p.inverse()).is_identity());
        assert_eq!(p.length(), 2);
    }

    #[test]
    fn lex_least_word_roundtrip() {
        let p = Perm::transposition(3, 1, 3);
        let w = p.lex_least_reduced_word();
        assert_eq!(w, vec![1, 2, 1]);
        let mut q = Perm::identity(3);
        for i in w {
            q = q.then(&Perm::adjacent_transposition(3, i));
        }
        assert_eq!(q, p);
    }

    #[test]
    fn word_length_is_coxeter_length() {
        // exhaustive over S_4
        let mut perms = vec![vec![0usize]];
        for n in 1..4 {
            let mut next = Vec::new();
            for p in &perms {
                for pos in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(pos, n);
                    next.push(q);
                }
            }
            perms = next;
        }
        for images in perms {
            let p = Perm(images);
            assert_eq!(p.lex_least_reduced_word().len(), p.length());
        }
    }

    #[test]
    fn transposition_detection() {
        assert_eq!(Perm::transposition(5, 2, 4).as_transposition(), Some((2, 4)));
        assert_eq!(Perm::identity(4).as_transposition(), None);
        let three_cycle = Perm::from_images_1based(&[2, 3, 1]);
        assert_eq!(three_cycle.as_transposition(), None);
    }
}
