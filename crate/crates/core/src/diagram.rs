//! Degeneration diagrams and the `a-bar` constraint pipeline.
//!
//! A diagram is a planar grid of triangles (the sheets of the covering),
//! with interior edges carrying the geometric generators and vertices typed
//! 2-point / 3-point / 6-point (plus the special boundary types of the
//! double-cover template). Each vertex contributes affine relations over
//! `Z^2`-valued unknowns, one unknown per governed edge; solving the system
//! yields a closed-form assignment per edge and a subgroup `Lambda` of
//! `Z^2` spanned by the residual contradictions `0 = v` together with any
//! explicit membership constraints. The abelianization of the reduced
//! subgroup is `(Z^2/Lambda)^(n-1)` and the commutator subgroup is read off
//! the parities of the `Lambda` generators.
//!
//! Two independent constraint generators run per diagram: the per-template
//! hardcoded relation lists, and the generic vertex-type rules whose
//! 3-point signs come from the triangle ordering (rows bottom to top, left
//! to right, upper-left triangle before lower-right within a square). The
//! solver cross-validates the two systems and surfaces any divergence as a
//! verification failure. The 3-point orientation at the staircase boundary
//! is pinned by that cross-validation rather than derived independently,
//! and the parity rule behind the commutator verdict is recomputed on a
//! second generating set with any discrepancy reported as an error.

use crate::braidvk::{MonodromyRep, RelationKind, VkPresentation, VkRelation};
use crate::fpgroup::Presentation;
use crate::intlinalg::{hermite_normal_form, quotient_invariants_i64, IntMatrix, InvariantFactors};
use crate::words::FreeWord;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiagramError {
    #[error("{0}")]
    BadParameters(String),
    #[error("constraint system is not unit-triangular: {0}")]
    NonUnitPivot(String),
    #[error("constraint system leaves unknowns undetermined: {0}")]
    Underdetermined(String),
    #[error("inconsistent constraint system: {0}")]
    Inconsistent(String),
    #[error("generic and hardcoded constraint systems diverge: {0}")]
    GenericHardcodedMismatch(String),
    #[error("no consistent twisting-integer labeling exists: {0}")]
    TwistLabels(String),
}

/// Which degeneration the diagram models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TemplateKind {
    Cp1xCp1,
    F1,
    DoubleCover,
}

impl fmt::Display for TemplateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TemplateKind::Cp1xCp1 => write!(f, "cp1xcp1"),
            TemplateKind::F1 => write!(f, "f1"),
            TemplateKind::DoubleCover => write!(f, "doublecover"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeKind {
    Diagonal,
    Vertical,
    Horizontal,
}

impl EdgeKind {
    fn letter(self) -> char {
        match self {
            EdgeKind::Diagonal => 'd',
            EdgeKind::Vertical => 'v',
            EdgeKind::Horizontal => 'h',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VertexType {
    TwoPoint,
    ThreePoint,
    SixPoint,
    /// Top boundary vertex of the double-cover diagram.
    TopSpecial,
    /// Right boundary vertex of the double-cover diagram.
    RightSpecial,
    /// The corner vertex `pq` of the double-cover diagram.
    CornerSpecial,
}

/// Interior edge of the diagram.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Edge {
    pub kind: EdgeKind,
    /// Position indices per the labeling conventions (`d[i,j]`, `v[i,j]`,
    /// `h[i,j]`).
    pub pos: (i64, i64),
    /// 1-based label in the lexicographic edge order.
    pub label: usize,
    /// Grid coordinates of the two endpoints, lower vertex first.
    pub endpoints: ((i64, i64), (i64, i64)),
    /// 1-based sheet indices of the two bounded triangles.
    pub sheets: (usize, usize),
}

impl Edge {
    pub fn name(&self) -> String {
        format!("{}[{},{}]", self.kind.letter(), self.pos.0, self.pos.1)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Vertex {
    pub at: (i64, i64),
    pub vtype: VertexType,
    /// Indices into `edges`, sorted by label.
    pub edges: Vec<usize>,
}

/// A triangle (sheet) of the degenerated surface.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Triangle {
    pub square: (i64, i64),
    pub upper: bool,
}

/// Boundary edge of the double-cover diagram, carrying branch-curve
/// generators.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundaryEdge {
    pub pos: (i64, i64),
    pub generator_count: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DegenerationDiagram {
    pub template: TemplateKind,
    pub params: BTreeMap<String, i64>,
    /// Sheets in their canonical order (sheet i+1 = `triangles[i]`).
    pub triangles: Vec<Triangle>,
    /// Interior edges sorted by label.
    pub edges: Vec<Edge>,
    pub vertices: Vec<Vertex>,
    /// Double cover only: top boundary edges (2b generators each).
    pub boundary_top: Vec<BoundaryEdge>,
    /// Double cover only: right boundary edges (2a generators each).
    pub boundary_right: Vec<BoundaryEdge>,
}

impl DegenerationDiagram {
    /// Number of sheets of the covering.
    pub fn n(&self) -> usize {
        match self.template {
            TemplateKind::DoubleCover => 2 * self.triangles.len(),
            _ => self.triangles.len(),
        }
    }

    pub fn edge_by_name(&self, kind: EdgeKind, i: i64, j: i64) -> Option<usize> {
        self.edges.iter().position(|e| e.kind == kind && e.pos == (i, j))
    }

    fn param(&self, k: &str) -> i64 {
        self.params[k]
    }
}

fn vertex_ord(p: i64, at: (i64, i64)) -> i64 {
    at.1 * (p + 2) + at.0
}

/// Shared construction for the triangulated grids of the product and
/// Hirzebruch templates: `square_exists` tells which unit squares are
/// present, `half_square` marks squares carrying only their lower-right
/// triangle.
struct GridSpec {
    p: i64,
    q: i64,
    square_exists: fn(i64, i64, i64, i64) -> bool,
    half_square: fn(i64, i64, i64, i64) -> bool,
}

impl GridSpec {
    fn has_square(&self, i: i64, j: i64) -> bool {
        i >= 1 && i <= self.p && j >= 1 && j <= self.q && (self.square_exists)(i, j, self.p, self.q)
    }

    fn is_half(&self, i: i64, j: i64) -> bool {
        (self.half_square)(i, j, self.p, self.q)
    }

    fn build(&self) -> (Vec<Triangle>, Vec<Edge>) {
        // sheets: rows bottom to top, squares left to right, upper-left
        // triangle before lower-right
        let mut triangles = Vec::new();
        let mut sheet = BTreeMap::new();
        for j in 1..=self.q {
            for i in 1..=self.p {
                if !self.has_square(i, j) {
                    continue;
                }
                if !self.is_half(i, j) {
                    triangles.push(Triangle { square: (i, j), upper: true });
                    sheet.insert((i, j, true), triangles.len());
                }
                triangles.push(Triangle { square: (i, j), upper: false });
                sheet.insert((i, j, false), triangles.len());
            }
        }
        let mut edges = Vec::new();
        for j in 1..=self.q {
            for i in 1..=self.p {
                // diagonal of square (i,j): present when both triangles are
                if self.has_square(i, j) && !self.is_half(i, j) {
                    edges.push(Edge {
                        kind: EdgeKind::Diagonal,
                        pos: (i, j),
                        label: 0,
                        endpoints: ((i - 1, j - 1), (i, j)),
                        sheets: (sheet[&(i, j, true)], sheet[&(i, j, false)]),
                    });
                }
                // vertical at x = i between squares (i,j) and (i+1,j)
                if self.has_square(i, j) && self.has_square(i + 1, j) {
                    edges.push(Edge {
                        kind: EdgeKind::Vertical,
                        pos: (i, j),
                        label: 0,
                        endpoints: ((i, j - 1), (i, j)),
                        sheets: (sheet[&(i, j, false)], sheet[&(i + 1, j, true)]),
                    });
                }
                // horizontal at y = j between squares (i,j) and (i,j+1)
                if self.has_square(i, j) && self.has_square(i, j + 1) && !self.is_half(i, j) {
                    edges.push(Edge {
                        kind: EdgeKind::Horizontal,
                        pos: (i, j),
                        label: 0,
                        endpoints: ((i - 1, j), (i, j)),
                        sheets: (sheet[&(i, j, true)], sheet[&(i, j + 1, false)]),
                    });
                }
            }
        }
        // lexicographic edge order by (upper endpoint, lower endpoint)
        edges.sort_by_key(|e| (vertex_ord(self.p, e.endpoints.1), vertex_ord(self.p, e.endpoints.0)));
        for (idx, e) in edges.iter_mut().enumerate() {
            e.label = idx + 1;
        }
        (triangles, edges)
    }
}

fn collect_vertices(
    edges: &[Edge],
    classify: impl Fn((i64, i64)) -> Option<VertexType>,
    p: i64,
    q: i64,
) -> Vec<Vertex> {
    let mut incident: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    for (idx, e) in edges.iter().enumerate() {
        incident.entry(e.endpoints.0).or_default().push(idx);
        incident.entry(e.endpoints.1).or_default().push(idx);
    }
    let mut vertices = Vec::new();
    for y in 0..=q {
        for x in 0..=p {
            if let Some(vtype) = classify((x, y)) {
                let mut es = incident.remove(&(x, y)).unwrap_or_default();
                es.sort_by_key(|&i| edges[i].label);
                vertices.push(Vertex { at: (x, y), vtype, edges: es });
            }
        }
    }
    vertices
}

/// Product-of-lines template on a `p x q` grid; `n = 2pq`. Requires
/// `p, q >= 2`: the insufficiently ample case `p = 1` has a braid-group
/// complement and is rejected.
pub fn build_cp1xcp1(p: i64, q: i64) -> Result<DegenerationDiagram, DiagramError> {
    if p < 2 || q < 2 {
        return Err(DiagramError::BadParameters(format!(
            "cp1xcp1 requires p, q >= 2 (got p={p}, q={q}); bidegree (1, q) is the \
             insufficiently ample case whose complement is the braid group B_2q"
        )));
    }
    let spec = GridSpec { p, q, square_exists: |_, _, _, _| true, half_square: |_, _, _, _| false };
    let (triangles, edges) = spec.build();
    debug_assert_eq!(triangles.len() as i64, 2 * p * q);
    debug_assert_eq!(edges.len() as i64, 3 * p * q - p - q);
    let classify = move |(x, y): (i64, i64)| -> Option<VertexType> {
        let corner = (x == 0 && y == 0) || (x == p && y == q);
        if corner {
            return Some(VertexType::TwoPoint);
        }
        if x > 0 && x < p && y > 0 && y < q {
            return Some(VertexType::SixPoint);
        }
        Some(VertexType::ThreePoint)
    };
    let vertices = collect_vertices(&edges, classify, p, q);
    let mut params = BTreeMap::new();
    params.insert("p".into(), p);
    params.insert("q".into(), q);
    Ok(DegenerationDiagram {
        template: TemplateKind::Cp1xCp1,
        params,
        triangles,
        edges,
        vertices,
        boundary_top: Vec::new(),
        boundary_right: Vec::new(),
    })
}

/// Hirzebruch surface staircase template; `n = (2p - q) q`, requires
/// `p > q >= 2`. Row `j` spans `x` in `[j-1, p]`, and the leftmost square
/// of each row carries only its lower-right triangle (its diagonal lies on
/// the staircase boundary).
pub fn build_f1(p: i64, q: i64) -> Result<DegenerationDiagram, DiagramError> {
    if q < 2 || p <= q {
        return Err(DiagramError::BadParameters(format!(
            "f1 requires p > q >= 2 (got p={p}, q={q})"
        )));
    }
    let spec = GridSpec {
        p,
        q,
        square_exists: |i, j, _, _| i >= j,
        half_square: |i, j, _, _| i == j,
    };
    let (triangles, edges) = spec.build();
    debug_assert_eq!(triangles.len() as i64, (2 * p - q) * q);
    let classify = move |(x, y): (i64, i64)| -> Option<VertexType> {
        // vertex set of the staircase: y <= x <= p
        if x < y || x > p || y > q {
            return None;
        }
        if (x == q && y == q) || (x == p && y == q) {
            return Some(VertexType::TwoPoint);
        }
        if y >= 1 && y < q && x > y && x < p {
            return Some(VertexType::SixPoint);
        }
        Some(VertexType::ThreePoint)
    };
    let vertices = collect_vertices(&edges, classify, p, q);
    let mut params = BTreeMap::new();
    params.insert("p".into(), p);
    params.insert("q".into(), q);
    Ok(DegenerationDiagram {
        template: TemplateKind::F1,
        params,
        triangles,
        edges,
        vertices,
        boundary_top: Vec::new(),
        boundary_right: Vec::new(),
    })
}

/// Double cover of the product template branched along a curve of bidegree
/// `(2a, 2b)`; `n = 4pq`. The grid is the `p x q` product diagram with
/// augmented top and right boundary edges carrying the branch-curve
/// generators (`2b` per top edge, `2a` per right edge), and the top, right
/// and corner vertices carry membership constraints instead of equations.
pub fn build_doublecover(a: i64, b: i64, p: i64, q: i64) -> Result<DegenerationDiagram, DiagramError> {
    if a < 1 || b < 1 {
        return Err(DiagramError::BadParameters(format!(
            "doublecover requires a, b >= 1 (got a={a}, b={b})"
        )));
    }
    if p < 2 || q < 2 {
        return Err(DiagramError::BadParameters(format!(
            "doublecover requires p, q >= 2 (got p={p}, q={q})"
        )));
    }
    let spec = GridSpec { p, q, square_exists: |_, _, _, _| true, half_square: |_, _, _, _| false };
    let (triangles, edges) = spec.build();
    let classify = move |(x, y): (i64, i64)| -> Option<VertexType> {
        if x == 0 && y == 0 {
            return Some(VertexType::TwoPoint);
        }
        if x == p && y == q {
            return Some(VertexType::CornerSpecial);
        }
        if y == q && x >= 1 && x < p {
            return Some(VertexType::TopSpecial);
        }
        if x == p && y >= 1 && y < q {
            return Some(VertexType::RightSpecial);
        }
        if x > 0 && x < p && y > 0 && y < q {
            return Some(VertexType::SixPoint);
        }
        Some(VertexType::ThreePoint)
    };
    let vertices = collect_vertices(&edges, classify, p, q);
    let boundary_top = (1..=p)
        .map(|i| BoundaryEdge { pos: (i, q), generator_count: 2 * b as usize })
        .collect();
    let boundary_right = (1..=q)
        .map(|j| BoundaryEdge { pos: (p, j), generator_count: 2 * a as usize })
        .collect();
    let mut params = BTreeMap::new();
    params.insert("a".into(), a);
    params.insert("b".into(), b);
    params.insert("p".into(), p);
    params.insert("q".into(), q);
    Ok(DegenerationDiagram {
        template: TemplateKind::DoubleCover,
        params,
        triangles,
        edges,
        vertices,
        boundary_top,
        boundary_right,
    })
}

/// One affine relation `sum_k c_k . abar_{u_k} = rhs` over `Z^2`-valued
/// unknowns.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AbarEquation {
    pub terms: Vec<(usize, i64)>,
    pub rhs: (i64, i64),
    pub origin: String,
}

/// The `Z^2`-valued affine constraint system of a diagram.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AbarSystem {
    /// Unknown names, e.g. `v[1,1]` (copy 2 of the double cover is
    /// prefixed `~`).
    pub unknowns: Vec<String>,
    pub equations: Vec<AbarEquation>,
    /// Vectors asserted to lie in Lambda, with provenance.
    pub lambda_constraints: Vec<((i64, i64), String)>,
}

/// The two parallel constraint systems of a diagram.
#[derive(Clone, Debug)]
pub struct AbarSystems {
    pub hardcoded: AbarSystem,
    pub generic: AbarSystem,
}

struct SystemBuilder<'d> {
    diagram: &'d DegenerationDiagram,
    copies: usize,
    sys: AbarSystem,
}

impl<'d> SystemBuilder<'d> {
    fn new(diagram: &'d DegenerationDiagram) -> Self {
        let copies = if diagram.template == TemplateKind::DoubleCover { 2 } else { 1 };
        let mut unknowns = Vec::new();
        for copy in 0..copies {
            for e in &diagram.edges {
                let prefix = if copy == 1 { "~" } else { "" };
                unknowns.push(format!("{}{}", prefix, e.name()));
            }
        }
        SystemBuilder {
            diagram,
            copies,
            sys: AbarSystem { unknowns, equations: Vec::new(), lambda_constraints: Vec::new() },
        }
    }

    fn unknown(&self, copy: usize, edge_idx: usize) -> usize {
        copy * self.diagram.edges.len() + edge_idx
    }

    fn edge(&self, kind: EdgeKind, i: i64, j: i64) -> usize {
        self.diagram
            .edge_by_name(kind, i, j)
            .unwrap_or_else(|| panic!("missing edge {}[{},{}]", kind.letter(), i, j))
    }

    /// Emit `sum c_k edge_k = rhs` for every copy.
    fn eq(&mut self, terms: &[(EdgeKind, i64, i64, i64)], rhs: (i64, i64), origin: &str) {
        let resolved: Vec<(usize, i64)> =
            terms.iter().map(|&(k, i, j, c)| (self.edge(k, i, j), c)).collect();
        for copy in 0..self.copies {
            let terms = resolved.iter().map(|&(e, c)| (self.unknown(copy, e), c)).collect();
            let origin = if copy == 1 { format!("~{}", origin) } else { origin.to_string() };
            self.sys.equations.push(AbarEquation { terms, rhs, origin });
        }
    }

    fn membership(&mut self, v: (i64, i64), origin: &str) {
        self.sys.lambda_constraints.push((v, origin.to_string()));
    }

    /// Normalization: the distinguished edge `v[1,1]` carries `(0, 1)`.
    fn normalize(&mut self) {
        self.eq(&[(EdgeKind::Vertical, 1, 1, 1)], (0, 1), "normalization v[1,1]=(0,1)");
    }
}

/// Hardcoded per-template constraint lists.
fn emit_hardcoded(d: &DegenerationDiagram) -> AbarSystem {
    let mut b = SystemBuilder::new(d);
    b.normalize();
    let p = d.param("p");
    let q = d.param("q");
    use EdgeKind::{Diagonal as D, Horizontal as H, Vertical as V};
    match d.template {
        TemplateKind::Cp1xCp1 | TemplateKind::DoubleCover => {
            b.eq(&[(D, 1, 1, 1)], (0, 0), "2-point 00");
            for i in 1..=p - 1 {
                b.eq(&[(V, i, 1, 1), (D, i + 1, 1, -1)], (1, 1), &format!("bottom 3-point ({i},0)"));
            }
            for j in 1..=q - 1 {
                b.eq(&[(H, 1, j, 1), (D, 1, j + 1, 1)], (1, 1), &format!("left 3-point (0,{j})"));
            }
            for j in 1..=q - 1 {
                for i in 1..=p - 1 {
                    let o = format!("6-point ({i},{j})");
                    b.eq(&[(D, i + 1, j + 1, 1), (D, i, j, -1)], (0, 0), &o);
                    b.eq(&[(V, i, j + 1, 1), (V, i, j, -1)], (0, 0), &o);
                    b.eq(&[(H, i + 1, j, 1), (H, i, j, -1)], (0, 0), &o);
                    b.eq(&[(D, i, j, 1), (V, i, j, -1), (H, i, j, 1)], (0, 0), &o);
                }
            }
            if d.template == TemplateKind::Cp1xCp1 {
                for j in 1..=q - 1 {
                    b.eq(&[(D, p, j, -1), (H, p, j, -1)], (1, 1), &format!("right 3-point (p,{j})"));
                }
                for i in 1..=p - 1 {
                    b.eq(&[(D, i, q, 1), (V, i, q, -1)], (1, 1), &format!("top 3-point ({i},q)"));
                }
                b.eq(&[(D, p, q, 1)], (0, 0), "2-point pq");
            } else {
                let a = d.param("a");
                let bb = d.param("b");
                for i in 1..=p - 1 {
                    b.membership((q + bb - 2, bb - 2), &format!("top special ({i},q)"));
                }
                for j in 1..=q - 1 {
                    b.membership((p + a - 2, a - 2), &format!("right special (p,{j})"));
                }
                b.membership((a - bb + p - q, a - bb), "corner special (p,q)");
            }
        }
        TemplateKind::F1 => {
            for i in 1..=p - 1 {
                b.eq(&[(V, i, 1, 1), (D, i + 1, 1, -1)], (1, 1), &format!("bottom 3-point ({i},0)"));
            }
            for i in 1..=q - 1 {
                b.eq(&[(V, i, i, 1), (H, i + 1, i, -1)], (1, 1), &format!("step 3-point ({i},{i})"));
            }
            for j in 1..=q - 1 {
                for i in j + 1..=p - 1 {
                    let o = format!("6-point ({i},{j})");
                    b.eq(&[(D, i + 1, j + 1, 1), (D, i, j, -1)], (0, 0), &o);
                    b.eq(&[(V, i, j + 1, 1), (V, i, j, -1)], (0, 0), &o);
                    b.eq(&[(H, i + 1, j, 1), (H, i, j, -1)], (0, 0), &o);
                    b.eq(&[(D, i, j, 1), (V, i, j, -1), (H, i, j, 1)], (0, 0), &o);
                }
            }
            for j in 1..=q - 1 {
                b.eq(&[(D, p, j, -1), (H, p, j, -1)], (1, 1), &format!("right 3-point (p,{j})"));
            }
            b.eq(&[(V, q, q, 1)], (0, 0), "2-point qq");
            for i in q + 1..=p - 1 {
                b.eq(&[(D, i, q, 1), (V, i, q, -1)], (1, 1), &format!("top 3-point ({i},q)"));
            }
            b.eq(&[(D, p, q, 1)], (0, 0), "2-point pq");
        }
    }
    b.sys
}

/// Generic vertex-type emission: the 2-point, 3-point (with signs from the
/// triangle order) and 6-point rules, walked over the diagram's vertex list.
fn emit_generic(d: &DegenerationDiagram) -> AbarSystem {
    let mut b = SystemBuilder::new(d);
    b.normalize();
    for v in &d.vertices {
        let origin = format!("vertex ({},{})", v.at.0, v.at.1);
        match v.vtype {
            VertexType::TwoPoint => {
                assert_eq!(v.edges.len(), 1, "2-point with {} edges at {:?}", v.edges.len(), v.at);
                let e = &d.edges[v.edges[0]];
                b.eq(&[(e.kind, e.pos.0, e.pos.1, 1)], (0, 0), &format!("2-point {origin}"));
            }
            VertexType::ThreePoint => {
                if v.edges.is_empty() {
                    continue; // boundary corner with no interior lines
                }
                assert_eq!(v.edges.len(), 2, "3-point with {} edges at {:?}", v.edges.len(), v.at);
                let e1 = &d.edges[v.edges[0]];
                let e2 = &d.edges[v.edges[1]];
                // the triangle bounded by both edges, and the other triangle
                // along each edge
                let shared = [e1.sheets.0, e1.sheets.1]
                    .into_iter()
                    .find(|s| *s == e2.sheets.0 || *s == e2.sheets.1)
                    .expect("3-point edges must bound a common triangle");
                let other1 = if e1.sheets.0 == shared { e1.sheets.1 } else { e1.sheets.0 };
                let other2 = if e2.sheets.0 == shared { e2.sheets.1 } else { e2.sheets.0 };
                let s1 = if shared > other1 { 1 } else { -1 };
                let s2 = if shared > other2 { 1 } else { -1 };
                b.eq(
                    &[(e1.kind, e1.pos.0, e1.pos.1, s1), (e2.kind, e2.pos.0, e2.pos.1, s2)],
                    (1, 1),
                    &format!("3-point {origin}"),
                );
            }
            VertexType::SixPoint => {
                assert_eq!(v.edges.len(), 6, "6-point with {} edges at {:?}", v.edges.len(), v.at);
                let es: Vec<&Edge> = v.edges.iter().map(|&i| &d.edges[i]).collect();
                assert_eq!(es[0].kind, EdgeKind::Diagonal);
                assert_eq!(es[5].kind, EdgeKind::Diagonal);
                assert_eq!(es[1].kind, EdgeKind::Vertical);
                assert_eq!(es[4].kind, EdgeKind::Vertical);
                assert_eq!(es[2].kind, EdgeKind::Horizontal);
                assert_eq!(es[3].kind, EdgeKind::Horizontal);
                let t = |e: &Edge| (e.kind, e.pos.0, e.pos.1);
                let (d1, v1, h1) = (t(es[0]), t(es[1]), t(es[2]));
                let (h2, v2, d2) = (t(es[3]), t(es[4]), t(es[5]));
                let o = format!("6-point {origin}");
                b.eq(&[(d2.0, d2.1, d2.2, 1), (d1.0, d1.1, d1.2, -1)], (0, 0), &o);
                b.eq(&[(v2.0, v2.1, v2.2, 1), (v1.0, v1.1, v1.2, -1)], (0, 0), &o);
                b.eq(&[(h2.0, h2.1, h2.2, 1), (h1.0, h1.1, h1.2, -1)], (0, 0), &o);
                b.eq(
                    &[(d1.0, d1.1, d1.2, 1), (v1.0, v1.1, v1.2, -1), (h1.0, h1.1, h1.2, 1)],
                    (0, 0),
                    &o,
                );
            }
            VertexType::TopSpecial => {
                let (q, bb) = (d.param("q"), d.param("b"));
                b.membership((q + bb - 2, bb - 2), &format!("top special {origin}"));
            }
            VertexType::RightSpecial => {
                let (p, a) = (d.param("p"), d.param("a"));
                b.membership((p + a - 2, a - 2), &format!("right special {origin}"));
            }
            VertexType::CornerSpecial => {
                let (p, q) = (d.param("p"), d.param("q"));
                let (a, bb) = (d.param("a"), d.param("b"));
                b.membership((a - bb + p - q, a - bb), &format!("corner special {origin}"));
            }
        }
    }
    b.sys
}

/// Both constraint systems of a diagram.
pub fn emit_constraints(d: &DegenerationDiagram) -> AbarSystems {
    AbarSystems { hardcoded: emit_hardcoded(d), generic: emit_generic(d) }
}

/// Solved system: a concrete `Z^2` value per unknown plus the residual
/// `Lambda` generators.
#[derive(Clone, Debug)]
pub struct AbarSolution {
    pub assignment: Vec<(i64, i64)>,
    pub lambda: Vec<(i64, i64)>,
}

/// Affine elimination over `Z^2`-valued unknowns: propagate equalities and
/// substitute along unit pivots in emission order; leftover relations with
/// no unknowns become `Lambda` generators (`0 = v`), and explicit
/// membership constraints are merged in.
pub fn solve_system(sys: &AbarSystem) -> Result<AbarSolution, DiagramError> {
    type Row = (BTreeMap<usize, i64>, (i64, i64));
    let mut rows: Vec<Row> = sys
        .equations
        .iter()
        .map(|e| {
            let mut m = BTreeMap::new();
            for &(u, c) in &e.terms {
                *m.entry(u).or_insert(0) += c;
            }
            m.retain(|_, c| *c != 0);
            (m, e.rhs)
        })
        .collect();
    // exprs[u] = (terms, rhs) meaning u = rhs - sum(terms)
    let mut exprs: Vec<Option<Row>> = vec![None; sys.unknowns.len()];
    let mut elim_order = Vec::new();
    let mut residuals = Vec::new();
    let mut active: Vec<bool> = vec![true; rows.len()];
    loop {
        let pick = rows.iter().enumerate().find(|(idx, (m, _))| {
            active[*idx] && m.values().any(|c| c.abs() == 1)
        });
        let Some((ridx, _)) = pick else { break };
        active[ridx] = false;
        let (m, rhs) = rows[ridx].clone();
        let (&u, &c) = m.iter().find(|(_, c)| c.abs() == 1).expect("unit checked");
        // c*u + rest = rhs  =>  u = c*rhs - c*rest
        let rest: BTreeMap<usize, i64> =
            m.iter().filter(|&(k, _)| *k != u).map(|(&k, &v)| (k, c * v)).collect();
        let expr_rhs = (c * rhs.0, c * rhs.1);
        exprs[u] = Some((rest.clone(), expr_rhs));
        elim_order.push(u);
        for (idx, (rm, rrhs)) in rows.iter_mut().enumerate() {
            if !active[idx] {
                continue;
            }
            if let Some(&k) = rm.get(&u) {
                rm.remove(&u);
                // k*u = k*expr_rhs - k*rest
                for (&eu, &ec) in &rest {
                    let entry = rm.entry(eu).or_insert(0);
                    *entry -= k * ec;
                }
                rm.retain(|_, c| *c != 0);
                rrhs.0 -= k * expr_rhs.0;
                rrhs.1 -= k * expr_rhs.1;
            }
        }
    }
    for (idx, (m, rhs)) in rows.iter().enumerate() {
        if !active[idx] {
            continue;
        }
        if m.is_empty() {
            if *rhs != (0, 0) {
                residuals.push(*rhs);
            }
        } else {
            return Err(DiagramError::NonUnitPivot(format!(
                "row with coefficients {:?} has no unit pivot",
                m.values().collect::<Vec<_>>()
            )));
        }
    }
    // back-substitute in reverse elimination order
    let mut values: Vec<Option<(i64, i64)>> = vec![None; sys.unknowns.len()];
    for &u in elim_order.iter().rev() {
        let (terms, rhs) = exprs[u].as_ref().expect("eliminated");
        let mut v = *rhs;
        for (&eu, &ec) in terms {
            let Some(ev) = values[eu] else {
                return Err(DiagramError::Underdetermined(format!(
                    "unknown {} feeds {} but was never pinned",
                    sys.unknowns[eu], sys.unknowns[u]
                )));
            };
            v.0 -= ec * ev.0;
            v.1 -= ec * ev.1;
        }
        values[u] = Some(v);
    }
    let mut assignment = Vec::with_capacity(values.len());
    for (u, v) in values.iter().enumerate() {
        match v {
            Some(v) => assignment.push(*v),
            None => {
                return Err(DiagramError::Underdetermined(format!(
                    "unknown {} is free",
                    sys.unknowns[u]
                )))
            }
        }
    }
    let mut lambda = residuals;
    lambda.extend(sys.lambda_constraints.iter().map(|(v, _)| *v));
    Ok(AbarSolution { assignment, lambda })
}

fn lambda_matrix(gens: &[(i64, i64)]) -> IntMatrix {
    IntMatrix::from_rows(&gens.iter().map(|&(a, b)| vec![a, b]).collect::<Vec<_>>())
}

/// HNF rows of the subgroup generated by `gens`, as pairs.
pub fn lambda_hnf(gens: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let h = hermite_normal_form(&lambda_matrix(gens));
    (0..h.rows())
        .map(|r| {
            let a = i64::try_from(&h[(r, 0)]).expect("small entries");
            let b = i64::try_from(&h[(r, 1)]).expect("small entries");
            (a, b)
        })
        .collect()
}

/// Is `v` in the subgroup of `Z^2` generated by `gens`?
pub fn lambda_contains(gens: &[(i64, i64)], v: (i64, i64)) -> bool {
    let mut with = gens.to_vec();
    with.push(v);
    lambda_hnf(gens) == lambda_hnf(&with)
}

/// Structure of the commutator subgroup, read from `Lambda`: the kernel
/// contains `(eta, 1)` iff some generator has odd first coordinate and
/// `(1, eta)` iff some generator has odd second coordinate; `(eta, eta)`
/// never lies in the kernel alone. The verdict is `C / (C ∩ Ker)` with
/// `C = {1, eta} x {1, eta}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CommutatorVerdict {
    Trivial,
    /// `Z_2` generated by the class of `(eta, 1)`.
    Z2ViaEta1,
    /// `Z_2` generated by the class of `(1, eta)`.
    Z2ViaEta2,
    Z2xZ2,
}

impl CommutatorVerdict {
    /// Isomorphism class, forgetting which generator survives.
    pub fn group_order(self) -> usize {
        match self {
            CommutatorVerdict::Trivial => 1,
            CommutatorVerdict::Z2ViaEta1 | CommutatorVerdict::Z2ViaEta2 => 2,
            CommutatorVerdict::Z2xZ2 => 4,
        }
    }
}

impl fmt::Display for CommutatorVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CommutatorVerdict::Trivial => write!(f, "trivial"),
            CommutatorVerdict::Z2ViaEta1 => write!(f, "Z_2 via (eta,1)"),
            CommutatorVerdict::Z2ViaEta2 => write!(f, "Z_2 via (1,eta)"),
            CommutatorVerdict::Z2xZ2 => write!(f, "Z_2 x Z_2"),
        }
    }
}

/// Parity rule over the generating set. The predicate "some generator has
/// odd kappa" only depends on the image of `Lambda` in `(Z_2)^2`, so it is
/// independent of the chosen generating set; `commutator_subgroup` still
/// recomputes it on the HNF basis and flags any discrepancy.
pub fn commutator_subgroup(gens: &[(i64, i64)]) -> Result<CommutatorVerdict, DiagramError> {
    let verdict = parity_verdict(gens);
    let hnf_verdict = parity_verdict(&lambda_hnf(gens));
    if verdict != hnf_verdict {
        return Err(DiagramError::Inconsistent(format!(
            "parity verdict differs between generating sets: {verdict} vs {hnf_verdict}"
        )));
    }
    Ok(verdict)
}

fn parity_verdict(gens: &[(i64, i64)]) -> CommutatorVerdict {
    let eta1_killed = gens.iter().any(|g| g.0.rem_euclid(2) == 1);
    let eta2_killed = gens.iter().any(|g| g.1.rem_euclid(2) == 1);
    match (eta1_killed, eta2_killed) {
        (true, true) => CommutatorVerdict::Trivial,
        (true, false) => CommutatorVerdict::Z2ViaEta2,
        (false, true) => CommutatorVerdict::Z2ViaEta1,
        (false, false) => CommutatorVerdict::Z2xZ2,
    }
}

/// Full report of the diagram pipeline for one surface.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LambdaReport {
    pub template: String,
    pub params: BTreeMap<String, i64>,
    pub n: usize,
    /// Lambda generators in the canonical kernel form (as emitted).
    pub lambda_gens: Vec<(i64, i64)>,
    /// Hermite normal form rows, the comparison-stable shape.
    pub lambda_hnf: Vec<(i64, i64)>,
    /// Closed-form assignment per governed edge.
    pub assignment: BTreeMap<String, (i64, i64)>,
    /// Invariant factors of `Z^2 / Lambda` (one tensor factor of Ab G0).
    pub ab_g0_factor: InvariantFactors,
    /// Ab G0 is the factor repeated `n - 1` times.
    pub multiplicity: usize,
    pub commutator: CommutatorVerdict,
    /// Asserted for supported templates; not re-derived.
    pub property_star: bool,
    /// Double cover only: the corner membership constraint is implied by
    /// the other two generators.
    pub corner_redundant: Option<bool>,
}

/// Run the full pipeline on a diagram: emit both constraint systems, solve
/// each, cross-validate, and assemble the report.
pub fn solve_lambda(d: &DegenerationDiagram) -> Result<LambdaReport, DiagramError> {
    let systems = emit_constraints(d);
    let hard = solve_system(&systems.hardcoded)?;
    let gen = solve_system(&systems.generic)?;
    let hnf_hard = lambda_hnf(&hard.lambda);
    let hnf_gen = lambda_hnf(&gen.lambda);
    if hnf_hard != hnf_gen {
        return Err(DiagramError::GenericHardcodedMismatch(format!(
            "Lambda differs: hardcoded {:?} vs generic {:?}",
            hnf_hard, hnf_gen
        )));
    }
    for (idx, (a, b)) in hard.assignment.iter().zip(&gen.assignment).enumerate() {
        let diff = (a.0 - b.0, a.1 - b.1);
        if diff != (0, 0) && !lambda_contains(&hard.lambda, diff) {
            return Err(DiagramError::GenericHardcodedMismatch(format!(
                "assignment for {} differs by {:?}, not in Lambda",
                systems.hardcoded.unknowns[idx], diff
            )));
        }
    }
    // dedup the emitted generators, preserving first-seen order; the zero
    // vector generates nothing
    let mut gens: Vec<(i64, i64)> = Vec::new();
    for g in &hard.lambda {
        if *g != (0, 0) && !gens.contains(g) {
            gens.push(*g);
        }
    }
    let corner_redundant = if d.template == TemplateKind::DoubleCover {
        let (p, q) = (d.param("p"), d.param("q"));
        let (a, b) = (d.param("a"), d.param("b"));
        let main = [(p + a - 2, a - 2), (q + b - 2, b - 2)];
        Some(lambda_contains(&main, (a - b + p - q, a - b)))
    } else {
        None
    };
    let ab = quotient_invariants_i64(2, &gens.iter().map(|&(a, b)| vec![a, b]).collect::<Vec<_>>())
        .expect("rank 2 rows");
    let commutator = commutator_subgroup(&gens)?;
    let assignment = systems
        .hardcoded
        .unknowns
        .iter()
        .cloned()
        .zip(hard.assignment.iter().copied())
        .collect();
    Ok(LambdaReport {
        template: d.template.to_string(),
        params: d.params.clone(),
        n: d.n(),
        lambda_gens: gens,
        lambda_hnf: hnf_hard,
        assignment,
        ab_g0_factor: ab,
        multiplicity: d.n() - 1,
        commutator,
        property_star: true,
        corner_redundant,
    })
}

/// Existence check for the twisting integers: a labeling `l_e` with
/// `l(diag out) = l(diag in) - 1`, `l(vert out) = l(vert in) + 1`,
/// `l(horiz out) = l(horiz in)` across every 6-point, plus the pinned
/// values the double-cover argument assumes on the top row and right
/// column. Solved as a difference system by weighted union-find.
pub fn twist_labels_exist(d: &DegenerationDiagram) -> Result<(), DiagramError> {
    let ne = d.edges.len();
    // potential[i] relative to parent
    let mut parent: Vec<usize> = (0..=ne).collect(); // node ne = virtual zero
    let mut offset: Vec<i64> = vec![0; ne + 1];
    fn find(parent: &mut Vec<usize>, offset: &mut Vec<i64>, x: usize) -> (usize, i64) {
        if parent[x] == x {
            return (x, 0);
        }
        let (root, off) = find(parent, offset, parent[x]);
        parent[x] = root;
        offset[x] += off;
        (root, offset[x])
    }
    // l(a) = l(b) + delta
    let unite = |parent: &mut Vec<usize>, offset: &mut Vec<i64>, a: usize, b: usize, delta: i64| -> bool {
        let (ra, oa) = find(parent, offset, a);
        let (rb, ob) = find(parent, offset, b);
        if ra == rb {
            return oa == ob + delta;
        }
        parent[ra] = rb;
        offset[ra] = ob + delta - oa;
        true
    };
    for v in &d.vertices {
        if v.vtype != VertexType::SixPoint {
            continue;
        }
        let es: Vec<&Edge> = v.edges.iter().map(|&i| &d.edges[i]).collect();
        let idx = |k: usize| v.edges[k];
        // labels i1..i6: diagonal, vertical, horizontal, horizontal,
        // vertical, diagonal
        let pairs = [(idx(0), idx(5), -1i64), (idx(1), idx(4), 1), (idx(2), idx(3), 0)];
        let _ = es;
        for (a, b, delta) in pairs {
            // l(b) = l(a) + delta  <=>  l(b) = l(a) + delta
            if !unite(&mut parent, &mut offset, b, a, delta) {
                return Err(DiagramError::TwistLabels(format!(
                    "conflict at 6-point ({},{})",
                    v.at.0, v.at.1
                )));
            }
        }
    }
    if d.template == TemplateKind::DoubleCover {
        let (p, q) = (d.param("p"), d.param("q"));
        let pin = |kind: EdgeKind, i: i64, j: i64, val: i64, parent: &mut Vec<usize>, offset: &mut Vec<i64>| -> bool {
            match d.edge_by_name(kind, i, j) {
                Some(e) => unite(parent, offset, e, ne, val),
                None => true,
            }
        };
        for i in 1..=p {
            if !pin(EdgeKind::Diagonal, i, q, 1, &mut parent, &mut offset)
                || !pin(EdgeKind::Vertical, i, q, 0, &mut parent, &mut offset)
            {
                return Err(DiagramError::TwistLabels("top row pins conflict".into()));
            }
        }
        for j in 1..=q {
            if !pin(EdgeKind::Diagonal, p, j, 1, &mut parent, &mut offset)
                || !pin(EdgeKind::Horizontal, p, j, 0, &mut parent, &mut offset)
            {
                return Err(DiagramError::TwistLabels("right column pins conflict".into()));
            }
        }
    }
    Ok(())
}

/// Geometric monodromy representation attached to the diagram: one
/// generator per interior edge mapping to the transposition of its two
/// adjacent sheets; the double cover duplicates the edges over the second
/// set of sheets and adds the corner connector exchanging sheets
/// `2pq` and `2pq + 1`.
pub fn theta(d: &DegenerationDiagram) -> MonodromyRep {
    let base = d.triangles.len();
    let mut images: Vec<(usize, usize)> =
        d.edges.iter().map(|e| (e.sheets.0.min(e.sheets.1), e.sheets.0.max(e.sheets.1))).collect();
    if d.template == TemplateKind::DoubleCover {
        let copy2: Vec<(usize, usize)> =
            images.iter().map(|&(a, b)| (a + base, b + base)).collect();
        images.extend(copy2);
        images.push((base, base + 1));
    }
    MonodromyRep::new(d.n(), images).expect("edges bound two distinct sheets")
}

/// Relation skeleton of the diagram for theta validation: for every pair of
/// generators, a cusp-type relation when their transpositions share a sheet
/// (edges bounding a common triangle, or the connector against its
/// neighbours) and a node-type relation otherwise.
pub fn theta_skeleton(d: &DegenerationDiagram) -> VkPresentation {
    let rep = theta(d);
    let gens = rep.images.len();
    let mut relations = Vec::new();
    for i in 0..gens {
        for j in i + 1..gens {
            let a = rep.images[i];
            let b = rep.images[j];
            let g1 = FreeWord::generator(gens, i + 1);
            let g2 = FreeWord::generator(gens, j + 1);
            let disjoint = a.0 != b.0 && a.0 != b.1 && a.1 != b.0 && a.1 != b.1;
            let (kind, relator) = if disjoint {
                (
                    RelationKind::Node,
                    g1.concat(&g2).concat(&g1.inverse()).concat(&g2.inverse()),
                )
            } else {
                let lhs = g1.concat(&g2).concat(&g1);
                let rhs = g2.concat(&g1).concat(&g2);
                (RelationKind::Cusp, lhs.concat(&rhs.inverse()))
            };
            relations.push(VkRelation { kind, gamma1: g1, gamma2: g2, relator });
        }
    }
    let presentation =
        Presentation::new(gens, relations.iter().map(|r| r.relator.clone()).collect())
            .expect("relators built at generator rank");
    VkPresentation { presentation, relations, projective: false }
}

/// Surface spec as accepted on the command line and in JSON job files.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SurfaceSpec {
    pub template: String,
    pub params: BTreeMap<String, i64>,
}

impl SurfaceSpec {
    pub fn build(&self) -> Result<DegenerationDiagram, DiagramError> {
        let get = |k: &str| {
            self.params
                .get(k)
                .copied()
                .ok_or_else(|| DiagramError::BadParameters(format!("missing parameter {k}")))
        };
        match self.template.as_str() {
            "cp1xcp1" => build_cp1xcp1(get("p")?, get("q")?),
            "f1" => build_f1(get("p")?, get("q")?),
            "doublecover" => build_doublecover(get("a")?, get("b")?, get("p")?, get("q")?),
            other => Err(DiagramError::BadParameters(format!(
                "unknown diagram template {other} (expected cp1xcp1, f1 or doublecover)"
            ))),
        }
    }
}
