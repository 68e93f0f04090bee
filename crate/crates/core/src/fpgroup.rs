//! Finitely presented group oracle: abelianization, Todd-Coxeter coset
//! enumeration (HLT strategy), and Reidemeister-Schreier subgroup
//! presentations.
//!
//! This is the brute-force cross-check engine for tiny instances; the
//! structural pipelines elsewhere in the crate are authoritative at scale.
//! Enumerations always carry an explicit coset bound and report "exceeded"
//! rather than returning a wrong table. Kernels of the combined
//! (permutation, degree) homomorphism have infinite index and are out of
//! reach for any coset enumerator; only plain permutation kernels are
//! served here, via `CosetTable::from_permutation_action`.

use crate::intlinalg::{quotient_invariants, InvariantFactors};
use crate::perm::Perm;
use crate::words::FreeWord;
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FpGroupError {
    #[error("coset enumeration exceeded the bound of {0} cosets")]
    Exceeded(usize),
    #[error("coset table is not closed")]
    OpenTable,
    #[error("relator rank {got} does not match generator count {expected}")]
    RankMismatch { expected: usize, got: usize },
}

/// Finite presentation: `gens` generators and a list of freely reduced
/// relator words.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    generators: usize,
    relators: Vec<FreeWord>,
}

impl Presentation {
    pub fn new(generators: usize, relators: Vec<FreeWord>) -> Result<Self, FpGroupError> {
        for r in &relators {
            if r.rank() != generators {
                return Err(FpGroupError::RankMismatch { expected: generators, got: r.rank() });
            }
        }
        let relators = relators.into_iter().filter(|r| !r.is_empty()).collect();
        Ok(Presentation { generators, relators })
    }

    pub fn free(generators: usize) -> Self {
        Presentation { generators, relators: Vec::new() }
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn relators(&self) -> &[FreeWord] {
        &self.relators
    }

    pub fn push_relator(&mut self, r: FreeWord) {
        assert_eq!(r.rank(), self.generators);
        if !r.is_empty() {
            self.relators.push(r);
        }
    }

    /// Export shape: generator count plus relators as signed index lists.
    pub fn export(&self) -> PresentationExport {
        PresentationExport {
            generators: self.generators,
            relators: self.relators.iter().map(|r| r.letters().to_vec()).collect(),
        }
    }

    pub fn import(e: &PresentationExport) -> Result<Self, FpGroupError> {
        let relators = e
            .relators
            .iter()
            .map(|letters| FreeWord::from_letters(e.generators, letters))
            .collect();
        Presentation::new(e.generators, relators)
    }

    /// Smith invariant factors of the relator exponent matrix: the
    /// abelianization of the presented group.
    pub fn abelianization(&self) -> InvariantFactors {
        let rows: Vec<Vec<BigInt>> = self
            .relators
            .iter()
            .map(|r| r.exponent_row().into_iter().map(BigInt::from).collect())
            .collect();
        quotient_invariants(self.generators, &rows).expect("relator ranks checked on entry")
    }
}

/// Serialized presentation: generator count plus relator words as signed
/// index lists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationExport {
    pub generators: usize,
    pub relators: Vec<Vec<i32>>,
}

/// Closed coset table: `action[g]` is the permutation each generator induces
/// on cosets; coset 0 is the subgroup itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetTable {
    generators: usize,
    /// forward[g][c] = c . g_{g+1}
    forward: Vec<Vec<usize>>,
    /// backward[g][c] = c . g_{g+1}^{-1}
    backward: Vec<Vec<usize>>,
}

impl CosetTable {
    pub fn index(&self) -> usize {
        self.forward.first().map_or(1, |col| col.len())
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn apply(&self, coset: usize, letter: i32) -> usize {
        let g = letter.unsigned_abs() as usize - 1;
        if letter > 0 {
            self.forward[g][coset]
        } else {
            self.backward[g][coset]
        }
    }

    pub fn trace(&self, start: usize, word: &FreeWord) -> usize {
        word.letters().iter().fold(start, |c, &l| self.apply(c, l))
    }

    /// Permutation action of generator `g` (1-based) on cosets.
    pub fn generator_perm(&self, g: usize) -> Perm {
        Perm::from_images_1based(
            &self.forward[g - 1].iter().map(|&c| c + 1).collect::<Vec<_>>(),
        )
    }

    /// Build the coset table of the kernel of `theta: G -> S_n` given the
    /// images of the generators: cosets are the elements of the image
    /// subgroup, acted on by right multiplication. Always closed.
    pub fn from_permutation_action(images: &[Perm]) -> CosetTable {
        assert!(!images.is_empty());
        let n = images[0].n();
        let id = Perm::identity(n);
        let mut elems: Vec<Perm> = vec![id.clone()];
        let mut lookup = std::collections::HashMap::new();
        lookup.insert(id, 0usize);
        let mut frontier = vec![0usize];
        while let Some(c) = frontier.pop() {
            let base = elems[c].clone();
            for img in images {
                let next = base.then(img);
                if !lookup.contains_key(&next) {
                    lookup.insert(next.clone(), elems.len());
                    frontier.push(elems.len());
                    elems.push(next);
                }
            }
        }
        let size = elems.len();
        let mut forward = vec![vec![0usize; size]; images.len()];
        let mut backward = vec![vec![0usize; size]; images.len()];
        for (g, img) in images.iter().enumerate() {
            for (c, e) in elems.iter().enumerate() {
                let to = lookup[&e.then(img)];
                forward[g][c] = to;
                backward[g][to] = c;
            }
        }
        CosetTable { generators: images.len(), forward, backward }
    }
}

const UNDEF: usize = usize::MAX;

struct Enumerator {
    ngens: usize,
    // table[c][2g] = c.g, table[c][2g+1] = c.g^{-1}
    table: Vec<Vec<usize>>,
    parent: Vec<usize>, // union-find for coincidences
    queue: std::collections::VecDeque<(usize, usize)>,
    live: usize,
    max_cosets: usize,
}

impl Enumerator {
    fn new(ngens: usize, max_cosets: usize) -> Self {
        Enumerator {
            ngens,
            table: vec![vec![UNDEF; 2 * ngens]],
            parent: vec![0],
            queue: std::collections::VecDeque::new(),
            live: 1,
            max_cosets,
        }
    }

    fn col(letter: i32) -> usize {
        let g = letter.unsigned_abs() as usize - 1;
        if letter > 0 {
            2 * g
        } else {
            2 * g + 1
        }
    }

    fn rep(&mut self, mut c: usize) -> usize {
        while self.parent[c] != c {
            self.parent[c] = self.parent[self.parent[c]];
            c = self.parent[c];
        }
        c
    }

    fn is_live(&self, c: usize) -> bool {
        self.parent[c] == c
    }

    fn define(&mut self, c: usize, col: usize) -> Result<usize, FpGroupError> {
        if self.live >= self.max_cosets {
            return Err(FpGroupError::Exceeded(self.max_cosets));
        }
        let new = self.table.len();
        self.table.push(vec![UNDEF; 2 * self.ngens]);
        self.parent.push(new);
        self.live += 1;
        self.table[c][col] = new;
        self.table[new][col ^ 1] = c;
        Ok(new)
    }

    /// Record `a.col = b`, queuing a coincidence if the slot disagrees.
    fn deduce(&mut self, a: usize, col: usize, b: usize) {
        let cur = self.table[a][col];
        if cur == UNDEF {
            self.table[a][col] = b;
        } else if cur != b {
            self.queue.push_back((cur, b));
        }
        let back = self.table[b][col ^ 1];
        if back == UNDEF {
            self.table[b][col ^ 1] = a;
        } else if back != a {
            self.queue.push_back((back, a));
        }
    }

    fn process_coincidences(&mut self) {
        while let Some((a, b)) = self.queue.pop_front() {
            let a = self.rep(a);
            let b = self.rep(b);
            if a == b {
                continue;
            }
            let (keep, drop) = if a < b { (a, b) } else { (b, a) };
            self.parent[drop] = keep;
            self.live -= 1;
            for col in 0..2 * self.ngens {
                let d = self.table[drop][col];
                if d == UNDEF {
                    continue;
                }
                let d = self.rep(d);
                let k = self.rep(keep);
                self.deduce(k, col, d);
            }
        }
    }

    /// Scan word `w` at coset `c`; with `fill`, define cosets to complete
    /// the scan.
    fn scan(&mut self, c: usize, w: &FreeWord, fill: bool) -> Result<(), FpGroupError> {
        let letters = w.letters();
        let mut f = self.rep(c);
        let mut i = 0;
        while i < letters.len() {
            let next = self.table[f][Self::col(letters[i])];
            if next == UNDEF {
                break;
            }
            f = self.rep(next);
            i += 1;
        }
        if i == letters.len() {
            let c0 = self.rep(c);
            if f != c0 {
                self.queue.push_back((f, c0));
                self.process_coincidences();
            }
            return Ok(());
        }
        let mut b = self.rep(c);
        let mut j = letters.len();
        while j > i {
            let next = self.table[b][Self::col(-letters[j - 1])];
            if next == UNDEF {
                break;
            }
            b = self.rep(next);
            j -= 1;
        }
        if j == i + 1 {
            // one gap: deduction
            self.deduce(f, Self::col(letters[i]), b);
            self.process_coincidences();
            return Ok(());
        }
        if j == i {
            // both pointers met with no gap: coincidence
            if f != b {
                self.queue.push_back((f, b));
                self.process_coincidences();
            }
            return Ok(());
        }
        if fill {
            let new = self.define(f, Self::col(letters[i]))?;
            let _ = new;
            self.scan(c, w, fill)?;
        }
        Ok(())
    }
}

/// HLT coset enumeration of the subgroup generated by `subgroup_gens` in the
/// group presented by `p`, with a mandatory coset bound. Returns a closed,
/// BFS-standardized table, or `Exceeded`; never a wrong table.
pub fn todd_coxeter(
    p: &Presentation,
    subgroup_gens: &[FreeWord],
    max_cosets: usize,
) -> Result<CosetTable, FpGroupError> {
    for w in subgroup_gens {
        if w.rank() != p.generators() {
            return Err(FpGroupError::RankMismatch { expected: p.generators(), got: w.rank() });
        }
    }
    let mut e = Enumerator::new(p.generators(), max_cosets);
    for w in subgroup_gens {
        e.scan(0, w, true)?;
    }
    let mut c = 0;
    while c < e.table.len() {
        if !e.is_live(c) {
            c += 1;
            continue;
        }
        for r in p.relators() {
            e.scan(c, r, true)?;
            if !e.is_live(c) {
                break;
            }
        }
        if e.is_live(c) {
            for col in 0..2 * e.ngens {
                if e.table[c][col] == UNDEF {
                    e.define(c, col)?;
                }
            }
        }
        c += 1;
    }
    // closed now; re-scan relators at every live coset as a final audit
    let live: Vec<usize> = (0..e.table.len()).filter(|&c| e.is_live(c)).collect();
    for &c in &live {
        for r in p.relators() {
            e.scan(c, r, false)?;
        }
    }
    e.process_coincidences();

    // standardize: BFS from coset 0 in column order
    let root = e.rep(0);
    let mut number = std::collections::HashMap::new();
    number.insert(root, 0usize);
    let mut order = vec![root];
    let mut head = 0;
    while head < order.len() {
        let c = order[head];
        head += 1;
        for col in 0..2 * e.ngens {
            let d = e.rep(e.table[c][col]);
            if let std::collections::hash_map::Entry::Vacant(slot) = number.entry(d) {
                slot.insert(order.len());
                order.push(d);
            }
        }
    }
    let size = order.len();
    let mut forward = vec![vec![0usize; size]; e.ngens];
    let mut backward = vec![vec![0usize; size]; e.ngens];
    for (idx, &c) in order.iter().enumerate() {
        for g in 0..e.ngens {
            forward[g][idx] = number[&e.rep(e.table[c][2 * g])];
            backward[g][idx] = number[&e.rep(e.table[c][2 * g + 1])];
        }
    }
    Ok(CosetTable { generators: p.generators(), forward, backward })
}

/// Presentation of the subgroup described by a closed coset table, on
/// Schreier generators, via Reidemeister rewriting.
pub fn reidemeister_schreier(
    p: &Presentation,
    t: &CosetTable,
) -> Result<Presentation, FpGroupError> {
    if t.generators() != p.generators() {
        return Err(FpGroupError::RankMismatch {
            expected: p.generators(),
            got: t.generators(),
        });
    }
    let m = t.index();
    let d = p.generators();
    // BFS Schreier tree from coset 0; tree[c] = (parent, letter) with
    // parent . letter = c
    let mut tree: Vec<Option<(usize, i32)>> = vec![None; m];
    let mut seen = vec![false; m];
    seen[0] = true;
    let mut frontier = std::collections::VecDeque::from([0usize]);
    while let Some(c) = frontier.pop_front() {
        for g in 1..=d as i32 {
            for letter in [g, -g] {
                let to = t.apply(c, letter);
                if !seen[to] {
                    seen[to] = true;
                    tree[to] = Some((c, letter));
                    frontier.push_back(to);
                }
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(FpGroupError::OpenTable);
    }
    // Schreier generator numbering: non-tree (coset, gen) pairs
    let mut is_tree = vec![vec![false; d]; m];
    for c in 0..m {
        if let Some((parent, letter)) = tree[c] {
            let g = letter.unsigned_abs() as usize - 1;
            if letter > 0 {
                is_tree[parent][g] = true;
            } else {
                is_tree[c][g] = true;
            }
        }
    }
    let mut gen_id = vec![vec![0usize; d]; m];
    let mut next = 0usize;
    for c in 0..m {
        for g in 0..d {
            if !is_tree[c][g] {
                gen_id[c][g] = next;
                next += 1;
            }
        }
    }
    let sub_gens = next;
    // rewrite rep(c) * r * rep(c)^{-1} in Schreier generators
    let rewrite = |start: usize, w: &FreeWord| -> FreeWord {
        let mut letters = Vec::new();
        let mut c = start;
        for &l in w.letters() {
            let g = l.unsigned_abs() as usize - 1;
            if l > 0 {
                if !is_tree[c][g] {
                    letters.push(gen_id[c][g] as i32 + 1);
                }
                c = t.apply(c, l);
            } else {
                let from = t.apply(c, l);
                if !is_tree[from][g] {
                    letters.push(-(gen_id[from][g] as i32 + 1));
                }
                c = from;
            }
        }
        FreeWord::from_letters(sub_gens.max(1), &letters)
    };
    let mut relators = Vec::new();
    for c in 0..m {
        for r in p.relators() {
            let w = rewrite(c, r);
            if !w.is_empty() {
                relators.push(w);
            }
        }
    }
    // when there are no Schreier generators at all, every rewrite is empty
    let rank = if relators.is_empty() { sub_gens } else { sub_gens.max(1) };
    Presentation::new(rank, relators)
}

/// Order of the presented group via coset enumeration of the trivial
/// subgroup; `None` when the bound is exceeded.
pub fn group_order(p: &Presentation, max_cosets: usize) -> Option<usize> {
    todd_coxeter(p, &[], max_cosets).ok().map(|t| t.index())
}
