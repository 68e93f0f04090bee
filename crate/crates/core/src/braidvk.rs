//! Braid factorizations and the Zariski-Van Kampen presentation machinery:
//! half-twist factors, the full-twist check, relation emission per factor
//! type (tangency / node / cusp), projective closure, stabilization by
//! commutators of disjoint-image conjugates, and validation of geometric
//! monodromy representations.
//!
//! Conventions (fixed once, validated by the full-twist identity): the
//! free generators `g_1 .. g_d` of the fiber group are the meridians of
//! the `d` intersection points ordered along the real axis of the
//! reference fiber; for a curve whose components are doubled, the pair
//! `(g_{2i-1}, g_{2i})` plays the role of the couple of generators
//! attached to the i-th component. The positive generator `X_i` acts by
//! `g_i -> g_i g_{i+1} g_i^{-1}`, `g_{i+1} -> g_i`, under which the full
//! twist acts as conjugation by `g_1 ... g_d`. The mirrored loop ordering
//! around the base point is not reconciled here; everything downstream
//! depends only on this fixed convention.

use crate::fpgroup::Presentation;
use crate::perm::Perm;
use crate::words::{artin_action, BraidWord, FreeWord};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BraidVkError {
    #[error("factor {index}: permutation is not a transposition")]
    NotATransposition { index: usize },
    #[error("factor {index}: exponent {exp} is not one of 1, 2, -2, 3")]
    BadExponent { index: usize, exp: i32 },
    #[error("factorization fails the full-twist check and --partial was not set: {0}")]
    NotFullTwist(String),
    #[error("monodromy image for generator {gen} is not a transposition")]
    BadImage { gen: usize },
    #[error("strand/generator count mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
}

/// A half-twist stored in band form: the conjugate `w X_i w^{-1}` of a
/// standard generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfTwistSpec {
    pub conjugator: BraidWord,
    pub core: usize,
}

impl HalfTwistSpec {
    pub fn standard(strands: usize, core: usize) -> Self {
        HalfTwistSpec { conjugator: BraidWord::identity(strands), core }
    }

    pub fn strands(&self) -> usize {
        self.conjugator.strands()
    }

    /// The underlying braid word `w X_i w^{-1}`.
    pub fn word(&self) -> BraidWord {
        let core = BraidWord::generator(self.strands(), self.core);
        self.conjugator.concat(&core).concat(&self.conjugator.inverse())
    }

    pub fn permutation(&self) -> Perm {
        self.word().permutation()
    }

    /// Meridians of the two strands exchanged by this half-twist, as
    /// elements of the free group on the fiber: the images of `g_core`
    /// and `g_{core+1}` under the Artin action of the conjugator's
    /// inverse. These are exactly the two words whose tangency / node /
    /// cusp relation generates the same normal subgroup as
    /// `{ g^{-1} (g . b^e) }` for this factor.
    pub fn meridian_pair(&self) -> (FreeWord, FreeWord) {
        let d = self.strands();
        let back = self.conjugator.inverse();
        let m1 = artin_action(&back, &FreeWord::generator(d, self.core));
        let m2 = artin_action(&back, &FreeWord::generator(d, self.core + 1));
        (m1, m2)
    }
}

/// Ordered product of half-twist powers representing the braid monodromy of
/// a plane curve: exponent 1 is a vertical tangency, +-2 a node, 3 a cusp.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BraidFactorization {
    pub strands: usize,
    pub factors: Vec<(HalfTwistSpec, i32)>,
}

impl BraidFactorization {
    pub fn new(strands: usize, factors: Vec<(HalfTwistSpec, i32)>) -> Result<Self, BraidVkError> {
        for (index, (ht, exp)) in factors.iter().enumerate() {
            if ht.strands() != strands {
                return Err(BraidVkError::SizeMismatch(ht.strands(), strands));
            }
            if ![1, 2, -2, 3].contains(exp) {
                return Err(BraidVkError::BadExponent { index, exp: *exp });
            }
            if ht.permutation().as_transposition().is_none() {
                return Err(BraidVkError::NotATransposition { index });
            }
        }
        Ok(BraidFactorization { strands, factors })
    }

    /// Total braid word (product of all factor powers, in order).
    pub fn product_word(&self) -> BraidWord {
        let mut w = BraidWord::identity(self.strands);
        for (ht, exp) in &self.factors {
            w = w.concat(&ht.conjugator);
            w = w.concat(&BraidWord::generator(self.strands, ht.core).pow(*exp));
            w = w.concat(&ht.conjugator.inverse());
        }
        w
    }
}

/// Outcome of the full-twist check on a factorization.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeltaSquaredReport {
    pub pass: bool,
    pub degree_found: i64,
    pub degree_expected: i64,
    pub permutation_trivial: bool,
    pub action_is_full_conjugation: bool,
    /// Set when the degree is short of d(d-1): the usual sign of a local
    /// model embedded without its completion.
    pub partial_factorization_hint: bool,
}

/// Checks that the product of all factors is the full twist: identity
/// permutation, degree d(d-1), and Artin action equal to conjugation by
/// `g_1 ... g_d` on every generator.
pub fn check_delta_squared(f: &BraidFactorization) -> DeltaSquaredReport {
    let d = f.strands;
    let w = f.product_word();
    let degree_found = w.degree();
    let degree_expected = (d * (d - 1)) as i64;
    let permutation_trivial = w.permutation().is_identity();
    let full = FreeWord::full_product(d);
    let action_is_full_conjugation = permutation_trivial
        && (1..=d).all(|j| {
            let gj = FreeWord::generator(d, j);
            artin_action(&w, &gj) == full.conjugate(&gj)
        });
    DeltaSquaredReport {
        pass: degree_found == degree_expected && permutation_trivial && action_is_full_conjugation,
        degree_found,
        degree_expected,
        permutation_trivial,
        action_is_full_conjugation,
        partial_factorization_hint: degree_found < degree_expected,
    }
}

/// The twisting substitution rho with `rho(a) = b`, `rho(b) = b a b^{-1}`,
/// iterated `power` times (negative powers use the inverse substitution).
pub fn twist_action(pair: (&FreeWord, &FreeWord), power: i32) -> (FreeWord, FreeWord) {
    let (mut a, mut b) = (pair.0.clone(), pair.1.clone());
    if power >= 0 {
        for _ in 0..power {
            let na = b.clone();
            let nb = b.concat(&a).concat(&b.inverse());
            a = na;
            b = nb;
        }
    } else {
        for _ in 0..(-power) {
            // inverse: rho^{-1}(a') = a'^{-1} b' a', rho^{-1}(b') = a'
            let na = a.inverse().concat(&b).concat(&a);
            let nb = a.clone();
            b = nb;
            a = na;
        }
    }
    (a, b)
}

/// Kind of Van Kampen relation a factor contributes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RelationKind {
    Tangency,
    Node,
    Cusp,
    ProjectiveClosure,
}

/// One emitted relation together with the meridian pair it came from.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VkRelation {
    pub kind: RelationKind,
    pub gamma1: FreeWord,
    pub gamma2: FreeWord,
    pub relator: FreeWord,
}

/// A Van Kampen presentation: the underlying `Presentation` plus per-factor
/// relation metadata (used by theta validation).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VkPresentation {
    pub presentation: Presentation,
    pub relations: Vec<VkRelation>,
    pub projective: bool,
}

/// Emit the Zariski-Van Kampen presentation of the curve complement from a
/// braid factorization: one relation per factor (tangency `g1 = g2`, node
/// `[g1, g2] = 1` for either orientation, cusp `g1 g2 g1 = g2 g1 g2`), and
/// `g_1 ... g_d = 1` appended in the projective case.
///
/// `allow_partial` skips the full-twist precondition for local studies.
pub fn vk_presentation(
    f: &BraidFactorization,
    projective: bool,
    allow_partial: bool,
) -> Result<VkPresentation, BraidVkError> {
    let d = f.strands;
    if !allow_partial {
        let report = check_delta_squared(f);
        if !report.pass {
            return Err(BraidVkError::NotFullTwist(format!(
                "degree {} vs {}, trivial permutation: {}, full-twist action: {}",
                report.degree_found,
                report.degree_expected,
                report.permutation_trivial,
                report.action_is_full_conjugation,
            )));
        }
    }
    let mut relations = Vec::new();
    for (index, (ht, exp)) in f.factors.iter().enumerate() {
        if ht.permutation().as_transposition().is_none() {
            return Err(BraidVkError::NotATransposition { index });
        }
        let (g1, g2) = ht.meridian_pair();
        let (kind, relator) = match exp {
            1 => (RelationKind::Tangency, g1.concat(&g2.inverse())),
            2 | -2 => (
                RelationKind::Node,
                g1.concat(&g2).concat(&g1.inverse()).concat(&g2.inverse()),
            ),
            3 => {
                let lhs = g1.concat(&g2).concat(&g1);
                let rhs = g2.concat(&g1).concat(&g2);
                (RelationKind::Cusp, lhs.concat(&rhs.inverse()))
            }
            _ => unreachable!("exponents validated on construction"),
        };
        relations.push(VkRelation { kind, gamma1: g1, gamma2: g2, relator });
    }
    if projective {
        let w = FreeWord::full_product(d);
        relations.push(VkRelation {
            kind: RelationKind::ProjectiveClosure,
            gamma1: w.clone(),
            gamma2: FreeWord::identity(d),
            relator: w,
        });
    }
    let presentation =
        Presentation::new(d, relations.iter().map(|r| r.relator.clone()).collect())
            .expect("relators built at rank d");
    Ok(VkPresentation { presentation, relations, projective })
}

/// Geometric monodromy representation: each free generator maps to a
/// transposition in `S_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonodromyRep {
    pub n: usize,
    /// 1-based transpositions, one per generator.
    pub images: Vec<(usize, usize)>,
}

impl MonodromyRep {
    pub fn new(n: usize, images: Vec<(usize, usize)>) -> Result<Self, BraidVkError> {
        for (gen, &(a, b)) in images.iter().enumerate() {
            if a == b || a < 1 || b < 1 || a > n || b > n {
                return Err(BraidVkError::BadImage { gen: gen + 1 });
            }
        }
        Ok(MonodromyRep { n, images })
    }

    pub fn generator_image(&self, g: usize) -> Perm {
        let (a, b) = self.images[g - 1];
        Perm::transposition(self.n, a, b)
    }

    pub fn image_of(&self, w: &FreeWord) -> Perm {
        let mut p = Perm::identity(self.n);
        for &l in w.letters() {
            // transpositions are involutions, sign is irrelevant
            p = p.then(&self.generator_image(l.unsigned_abs() as usize));
        }
        p
    }

    /// The image subgroup acts transitively iff the graph on sheets with one
    /// edge per transposition is connected.
    pub fn is_transitive(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(a, b) in &self.images {
            let ra = find(&mut parent, a - 1);
            let rb = find(&mut parent, b - 1);
            parent[ra] = rb;
        }
        let root = find(&mut parent, 0);
        (0..self.n).all(|x| find(&mut parent, x) == root)
    }
}

fn transpositions_disjoint(a: (usize, usize), b: (usize, usize)) -> bool {
    a.0 != b.0 && a.0 != b.1 && a.1 != b.0 && a.1 != b.1
}

fn transpositions_adjacent(a: (usize, usize), b: (usize, usize)) -> bool {
    !transpositions_disjoint(a, b) && a != b && (a.0, a.1) != (b.1, b.0)
}

fn perm_as_sorted_transposition(p: &Perm) -> Option<(usize, usize)> {
    p.as_transposition()
}

/// One theta-consistency violation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ThetaViolation {
    pub relation_index: Option<usize>,
    pub reason: String,
}

/// Verdict of `validate_theta`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ThetaVerdict {
    pub violations: Vec<ThetaViolation>,
}

impl ThetaVerdict {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check a monodromy representation against a Van Kampen presentation: the
/// image of every meridian must be a transposition, a tangency forces equal
/// images, a node forces disjoint ones, a cusp forces adjacent
/// (non-commuting) ones, every relator must die in `S_n`, and the image
/// must act transitively on the sheets.
pub fn validate_theta(p: &VkPresentation, theta: &MonodromyRep) -> ThetaVerdict {
    let mut violations = Vec::new();
    if theta.images.len() != p.presentation.generators() {
        violations.push(ThetaViolation {
            relation_index: None,
            reason: format!(
                "theta has {} generator images, presentation has {} generators",
                theta.images.len(),
                p.presentation.generators()
            ),
        });
        return ThetaVerdict { violations };
    }
    if !theta.is_transitive() {
        violations.push(ThetaViolation {
            relation_index: None,
            reason: format!("image is not transitive on {} sheets", theta.n),
        });
    }
    for (idx, rel) in p.relations.iter().enumerate() {
        if rel.kind == RelationKind::ProjectiveClosure {
            continue;
        }
        let t1 = perm_as_sorted_transposition(&theta.image_of(&rel.gamma1));
        let t2 = perm_as_sorted_transposition(&theta.image_of(&rel.gamma2));
        let (Some(t1), Some(t2)) = (t1, t2) else {
            violations.push(ThetaViolation {
                relation_index: Some(idx),
                reason: "meridian image is not a transposition".into(),
            });
            continue;
        };
        let ok = match rel.kind {
            RelationKind::Tangency => t1 == t2,
            RelationKind::Node => transpositions_disjoint(t1, t2),
            RelationKind::Cusp => transpositions_adjacent(t1, t2),
            RelationKind::ProjectiveClosure => true,
        };
        if !ok {
            violations.push(ThetaViolation {
                relation_index: Some(idx),
                reason: format!(
                    "{:?} relation incompatible with images {:?}, {:?}",
                    rel.kind, t1, t2
                ),
            });
        }
    }
    for (idx, rel) in p.relations.iter().enumerate() {
        if !theta.image_of(&rel.relator).is_identity() {
            violations.push(ThetaViolation {
                relation_index: Some(idx),
                reason: "relator does not map to the identity permutation".into(),
            });
        }
    }
    ThetaVerdict { violations }
}

/// Stabilize a presentation: add `[c1, c2] = 1` for all pairs of
/// geometric-generator conjugates `w g_i w^{-1}` (over words `w` of length
/// at most `conjugation_depth`) whose theta images are disjoint
/// transpositions.
///
/// This bounded-depth truncation is an oracle for abelianization-level
/// questions; the diagram pipeline is the authority for the exact
/// invariants.
pub fn stabilize(
    p: &Presentation,
    theta: &MonodromyRep,
    conjugation_depth: usize,
) -> Result<Presentation, BraidVkError> {
    let d = p.generators();
    if theta.images.len() != d {
        return Err(BraidVkError::SizeMismatch(theta.images.len(), d));
    }
    // conjugates of generators by words up to the depth bound
    let mut words = vec![FreeWord::identity(d)];
    let mut frontier = words.clone();
    for _ in 0..conjugation_depth {
        let mut next = Vec::new();
        for w in &frontier {
            for l in 1..=d as i32 {
                for s in [l, -l] {
                    let ext = w.concat(&FreeWord::from_letters(d, &[s]));
                    if ext.len() > w.len() && !words.contains(&ext) {
                        words.push(ext.clone());
                        next.push(ext);
                    }
                }
            }
        }
        frontier = next;
    }
    let mut conjugates: Vec<(FreeWord, (usize, usize))> = Vec::new();
    for w in &words {
        for g in 1..=d {
            let c = w.conjugate(&FreeWord::generator(d, g));
            let img = theta.image_of(&c);
            let t = img.as_transposition().ok_or(BraidVkError::BadImage { gen: g })?;
            if !conjugates.iter().any(|(cw, _)| cw == &c) {
                conjugates.push((c, t));
            }
        }
    }
    let mut out = p.clone();
    let mut seen = std::collections::HashSet::new();
    for i in 0..conjugates.len() {
        for j in i + 1..conjugates.len() {
            let (c1, t1) = &conjugates[i];
            let (c2, t2) = &conjugates[j];
            if transpositions_disjoint(*t1, *t2) {
                let relator = c1.concat(c2).concat(&c1.inverse()).concat(&c2.inverse());
                if !relator.is_empty() && seen.insert(relator.clone()) {
                    out.push_relator(relator);
                }
            }
        }
    }
    Ok(out)
}

/// Wire format for braid factorization files:
/// `{ "schema": 1, "strands": d, "factors": [ { "conjugator": [...],
/// "core": i, "exp": e }, ... ] }`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorizationFile {
    #[serde(default = "schema_one")]
    pub schema: u32,
    pub strands: usize,
    pub factors: Vec<FactorEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorEntry {
    #[serde(default)]
    pub conjugator: Vec<i32>,
    pub core: usize,
    pub exp: i32,
}

fn schema_one() -> u32 {
    1
}

impl FactorizationFile {
    pub fn into_factorization(self) -> Result<BraidFactorization, BraidVkError> {
        let strands = self.strands;
        let factors = self
            .factors
            .into_iter()
            .map(|f| {
                (
                    HalfTwistSpec {
                        conjugator: BraidWord::from_letters(strands, &f.conjugator),
                        core: f.core,
                    },
                    f.exp,
                )
            })
            .collect();
        BraidFactorization::new(strands, factors)
    }

    pub fn from_factorization(f: &BraidFactorization) -> Self {
        FactorizationFile {
            schema: 1,
            strands: f.strands,
            factors: f
                .factors
                .iter()
                .map(|(ht, exp)| FactorEntry {
                    conjugator: ht.conjugator.letters().to_vec(),
                    core: ht.core,
                    exp: *exp,
                })
                .collect(),
        }
    }
}

/// Factorization of the branch curve of a smooth conic: two vertical
/// tangencies in `B_2`. The affine complement group is `Z`, the projective
/// one `Z_2`.
pub fn conic_factorization() -> BraidFactorization {
    BraidFactorization::new(
        2,
        vec![
            (HalfTwistSpec::standard(2, 1), 1),
            (HalfTwistSpec::standard(2, 1), 1),
        ],
    )
    .expect("valid by construction")
}
