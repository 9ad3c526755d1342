//! Combinatorics of the balanced triangulation of N₁,₃, the tree of
//! balanced triangulations, and standard-position curve descriptors.
//!
//! Every triangle carries the reference orientation (v1, v2, v3). These
//! orientations disagree across every edge, so the local orientation seen
//! by a curve flips at each crossing; turn labels below are expressed in the
//! orientation of the current step, which alternates.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Vertex {
    V1,
    V2,
    V3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Edge {
    A,
    B,
    C,
    D,
    E,
    F,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tri {
    T1,
    T2,
    T3,
    T4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Turn {
    L,
    R,
}

impl Turn {
    pub fn flip(self) -> Turn {
        match self {
            Turn::L => Turn::R,
            Turn::R => Turn::L,
        }
    }
}

impl Vertex {
    pub const ALL: [Vertex; 3] = [Vertex::V1, Vertex::V2, Vertex::V3];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl Edge {
    pub const ALL: [Edge; 6] = [Edge::A, Edge::B, Edge::C, Edge::D, Edge::E, Edge::F];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn endpoints(self) -> (Vertex, Vertex) {
        use Vertex::*;
        match self {
            Edge::A | Edge::D => (V1, V2),
            Edge::B | Edge::E => (V2, V3),
            Edge::C | Edge::F => (V3, V1),
        }
    }

    pub fn has_endpoint(self, v: Vertex) -> bool {
        let (p, q) = self.endpoints();
        p == v || q == v
    }

    /// The two triangles containing this edge, in increasing order.
    pub fn dual_pair(self) -> (Tri, Tri) {
        use Tri::*;
        match self {
            Edge::A => (T3, T4),
            Edge::B => (T1, T4),
            Edge::C => (T2, T4),
            Edge::D => (T1, T2),
            Edge::E => (T2, T3),
            Edge::F => (T1, T3),
        }
    }

    /// The edge shared by two distinct triangles.
    pub fn between(s: Tri, t: Tri) -> Option<Edge> {
        let key = if s < t { (s, t) } else { (t, s) };
        Edge::ALL.into_iter().find(|e| e.dual_pair() == key)
    }

    pub fn label(self) -> &'static str {
        ["a", "b", "c", "d", "e", "f"][self.index()]
    }

    pub fn parse(s: &str) -> Option<Edge> {
        Edge::ALL.into_iter().find(|e| e.label() == s.trim())
    }
}

impl Tri {
    pub const ALL: [Tri; 4] = [Tri::T1, Tri::T2, Tri::T3, Tri::T4];

    /// 0-based index into coordinate arrays.
    pub fn index(self) -> usize {
        self as usize
    }

    /// 1-based number as used in X₁..X₄.
    pub fn number(self) -> usize {
        self as usize + 1
    }

    pub fn from_index(i: usize) -> Tri {
        Tri::ALL[i]
    }

    pub fn edges(self) -> [Edge; 3] {
        use Edge::*;
        match self {
            Tri::T1 => [B, D, F],
            Tri::T2 => [C, D, E],
            Tri::T3 => [A, E, F],
            Tri::T4 => [A, B, C],
        }
    }

    pub fn contains(self, e: Edge) -> bool {
        self.edges().contains(&e)
    }

    pub fn third_edge(self, x: Edge, y: Edge) -> Option<Edge> {
        if x == y || !self.contains(x) || !self.contains(y) {
            return None;
        }
        self.edges().into_iter().find(|&g| g != x && g != y)
    }

    /// The edge of this triangle joining two given punctures.
    pub fn edge_joining(self, p: Vertex, q: Vertex) -> Edge {
        self.edges()
            .into_iter()
            .find(|g| g.has_endpoint(p) && g.has_endpoint(q))
            .expect("balanced: one edge per vertex pair")
    }

    pub fn label(self) -> &'static str {
        ["t1", "t2", "t3", "t4"][self.index()]
    }

    pub fn parse(s: &str) -> Option<Tri> {
        let s = s.trim().to_ascii_lowercase();
        Tri::ALL.into_iter().find(|t| t.label() == s || t.number().to_string() == s)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl fmt::Display for Tri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

fn opposite_vertex(g: Edge) -> Vertex {
    Vertex::ALL.into_iter().find(|&v| !g.has_endpoint(v)).unwrap()
}

fn shared_vertex(x: Edge, y: Edge) -> Option<Vertex> {
    let (p, q) = x.endpoints();
    [p, q].into_iter().find(|&v| y.has_endpoint(v))
}

/// Turn made inside a triangle, read in the triangle's reference orientation.
///
/// The curve enters across `enter`, leaves across `exit` and goes around the
/// vertex they share; it is a left turn when (opposite(enter), shared,
/// opposite(exit)) is a positive cyclic order of (v1, v2, v3).
pub fn reference_turn(enter: Edge, exit: Edge) -> Option<Turn> {
    let s = shared_vertex(enter, exit)?;
    if enter == exit {
        return None;
    }
    let (p, r) = (opposite_vertex(enter).index(), opposite_vertex(exit).index());
    let ccw = (s.index() + 3 - p) % 3 == 1 && (r + 3 - s.index()) % 3 == 1;
    Some(if ccw { Turn::L } else { Turn::R })
}

/// Corner of a triangle at a puncture: the curve passes from `enter` to `exit`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corner {
    pub tri: Tri,
    pub enter: Edge,
    pub exit: Edge,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeInfo {
    pub label: Edge,
    pub endpoints: (Vertex, Vertex),
    pub triangles: (Tri, Tri),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangleInfo {
    pub label: Tri,
    pub edges: [Edge; 3],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexLink {
    pub vertex: Vertex,
    pub corners: Vec<Corner>,
}

/// The fixed balanced triangulation of N₁,₃ (3 punctures, 6 edges, 4 triangles).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangulationModel {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<EdgeInfo>,
    pub triangles: Vec<TriangleInfo>,
    pub links: Vec<VertexLink>,
}

const fn corner(tri: Tri, enter: Edge, exit: Edge) -> Corner {
    Corner { tri, enter, exit }
}

/// Cyclic corner sequence around each puncture.
const LINKS: [[Corner; 4]; 3] = {
    use Edge::*;
    use Tri::*;
    [
        [corner(T1, D, F), corner(T3, F, A), corner(T4, A, C), corner(T2, C, D)],
        [corner(T1, B, D), corner(T2, D, E), corner(T3, E, A), corner(T4, A, B)],
        [corner(T1, B, F), corner(T3, F, E), corner(T2, E, C), corner(T4, C, B)],
    ]
};

pub fn canonical_model() -> TriangulationModel {
    TriangulationModel {
        vertices: Vertex::ALL.to_vec(),
        edges: Edge::ALL
            .into_iter()
            .map(|e| EdgeInfo { label: e, endpoints: e.endpoints(), triangles: e.dual_pair() })
            .collect(),
        triangles: Tri::ALL.into_iter().map(|t| TriangleInfo { label: t, edges: t.edges() }).collect(),
        links: Vertex::ALL
            .into_iter()
            .map(|v| VertexLink { vertex: v, corners: LINKS[v.index()].to_vec() })
            .collect(),
    }
}

impl TriangulationModel {
    /// Checks the structural invariants: edge ↔ triangle-pair bijection,
    /// χ = V − E + F = 1, and each vertex link a single 4-cycle.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInput(m.to_string()));
        let (v, e, f) = (self.vertices.len() as i64, self.edges.len() as i64, self.triangles.len() as i64);
        if v - e + f != 1 {
            return bad("Euler characteristic is not 1");
        }
        let mut pairs: Vec<(Tri, Tri)> = Vec::new();
        for info in &self.edges {
            let holders: Vec<Tri> =
                self.triangles.iter().filter(|t| t.edges.contains(&info.label)).map(|t| t.label).collect();
            if holders.len() != 2 || (holders[0], holders[1]) != info.triangles {
                return bad("edge does not lie in exactly its two dual triangles");
            }
            if info.endpoints.0 == info.endpoints.1 {
                return bad("edge joins a puncture to itself");
            }
            pairs.push(info.triangles);
        }
        pairs.sort();
        pairs.dedup();
        if pairs.len() != 6 {
            return bad("edge to triangle-pair map is not a bijection");
        }
        for link in &self.links {
            let c = &link.corners;
            if c.len() != 4 {
                return bad("vertex link is not a 4-cycle");
            }
            let mut tris: Vec<Tri> = c.iter().map(|k| k.tri).collect();
            tris.sort();
            tris.dedup();
            if tris.len() != 4 {
                return bad("vertex link repeats a triangle");
            }
            for (i, k) in c.iter().enumerate() {
                let next = &c[(i + 1) % c.len()];
                let ok = k.tri.contains(k.enter)
                    && k.tri.contains(k.exit)
                    && k.enter != k.exit
                    && k.enter.has_endpoint(link.vertex)
                    && k.exit.has_endpoint(link.vertex)
                    && k.exit == next.enter;
                if !ok {
                    return bad("vertex link corners do not chain");
                }
            }
        }
        Ok(())
    }
}

/// A vertex of the 4-regular tree of balanced triangulations: the reduced
/// word of triangle switches S₁..S₄ leading to it from the base.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TreeAddress {
    pub word: Vec<Tri>,
}

impl TreeAddress {
    pub fn root() -> Self {
        Self::default()
    }

    /// Builds a word and reduces it (SᵢSᵢ cancels).
    pub fn from_word(word: &[Tri]) -> Self {
        let mut a = Self::root();
        for &t in word {
            a = a.switched(t);
        }
        a
    }

    pub fn is_reduced(&self) -> bool {
        self.word.windows(2).all(|w| w[0] != w[1])
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn last(&self) -> Option<Tri> {
        self.word.last().copied()
    }

    /// The address after one more switch.
    pub fn switched(&self, t: Tri) -> Self {
        let mut word = self.word.clone();
        if word.last() == Some(&t) {
            word.pop();
        } else {
            word.push(t);
        }
        Self { word }
    }

    pub fn neighbors(&self) -> [TreeAddress; 4] {
        Tri::ALL.map(|t| self.switched(t))
    }

    pub fn distance(&self, other: &Self) -> usize {
        let common = self.word.iter().zip(&other.word).take_while(|(x, y)| x == y).count();
        self.len() + other.len() - 2 * common
    }

    /// All reduced words of length ≤ depth, in breadth-first order.
    pub fn enumerate(depth: usize) -> Vec<TreeAddress> {
        let mut out = vec![Self::root()];
        let mut frontier = 0;
        for _ in 0..depth {
            let end = out.len();
            for i in frontier..end {
                for t in Tri::ALL {
                    if out[i].last() != Some(t) {
                        let next = out[i].switched(t);
                        out.push(next);
                    }
                }
            }
            frontier = end;
        }
        out
    }
}

impl fmt::Display for TreeAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return f.write_str("[]");
        }
        let letters: Vec<String> = self.word.iter().map(|t| format!("S{}", t.number())).collect();
        write!(f, "[{}]", letters.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub tri: Tri,
    pub enter: Edge,
    pub exit: Edge,
    pub turn: Turn,
}

/// A closed curve in standard position: the cyclic list of triangle
/// crossings with the turn made in each.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveDescriptor {
    pub steps: Vec<Step>,
    pub one_sided: bool,
}

impl CurveDescriptor {
    /// Builds a descriptor from a corner path, assigning turns by the
    /// alternating-orientation rule (step 0 read in the reference orientation).
    pub fn from_path(path: &[(Tri, Edge, Edge)]) -> Result<Self> {
        let mut steps = Vec::with_capacity(path.len());
        for (k, &(tri, enter, exit)) in path.iter().enumerate() {
            let turn = reference_turn(enter, exit)
                .ok_or_else(|| Error::BadStep(format!("{enter}->{exit} in {tri}")))?;
            steps.push(Step { tri, enter, exit, turn: if k % 2 == 1 { turn.flip() } else { turn } });
        }
        let d = Self { one_sided: path.len() % 2 == 1, steps };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.steps.len();
        if n == 0 {
            return Err(Error::BadStep("empty curve".into()));
        }
        for (k, s) in self.steps.iter().enumerate() {
            if s.enter == s.exit || !s.tri.contains(s.enter) || !s.tri.contains(s.exit) {
                return Err(Error::BadStep(format!("step {k}: {}->{} not in {}", s.enter, s.exit, s.tri)));
            }
            if self.steps[(k + 1) % n].enter != s.exit {
                return Err(Error::BadStep(format!("step {k} does not chain to the next")));
            }
        }
        if self.one_sided != (n % 2 == 1) {
            return Err(Error::BadStep("sidedness does not match crossing parity".into()));
        }
        Ok(())
    }

    /// The curve traversed twice. For a 1-sided curve the second pass is
    /// read in the opposite local orientation, so its turns flip.
    pub fn square(&self) -> CurveDescriptor {
        let mut steps = self.steps.clone();
        steps.extend(self.steps.iter().map(|s| Step {
            turn: if self.one_sided { s.turn.flip() } else { s.turn },
            ..*s
        }));
        CurveDescriptor { steps, one_sided: false }
    }

    pub fn triangles(&self) -> Vec<Tri> {
        let mut t: Vec<Tri> = self.steps.iter().map(|s| s.tri).collect();
        t.sort();
        t.dedup();
        t
    }

    pub fn crossed_edges(&self) -> Vec<Edge> {
        self.steps.iter().map(|s| s.enter).collect()
    }
}

fn frozen(table: &[(Tri, Edge, Edge, Turn)], one_sided: bool) -> CurveDescriptor {
    CurveDescriptor {
        steps: table.iter().map(|&(tri, enter, exit, turn)| Step { tri, enter, exit, turn }).collect(),
        one_sided,
    }
}

/// The 2-sided curve bounding a regular neighbourhood of `edge`
/// (it encircles the two punctures the edge joins): six crossings through
/// all four triangles, never crossing `edge` itself. The crossed λ-lengths
/// multiply to X_k·X_l, {k, l} the complement of the edge's dual pair.
pub fn edge_curve(edge: Edge) -> CurveDescriptor {
    use Edge::*;
    use Tri::*;
    use Turn::*;
    let table: [(Tri, Edge, Edge, Turn); 6] = match edge {
        A => [(T3, F, E, L), (T2, E, D, R), (T1, D, B, R), (T4, B, C, L), (T2, C, D, R), (T1, D, F, R)],
        B => [(T4, A, C, L), (T2, C, E, R), (T3, E, F, R), (T1, F, D, L), (T2, D, E, R), (T3, E, A, R)],
        C => [(T2, E, D, L), (T1, D, F, R), (T3, F, A, R), (T4, A, B, L), (T1, B, F, R), (T3, F, E, R)],
        D => [(T2, C, E, L), (T3, E, A, R), (T4, A, B, R), (T1, B, F, L), (T3, F, A, R), (T4, A, C, R)],
        E => [(T2, D, C, L), (T4, C, B, R), (T1, B, F, R), (T3, F, A, L), (T4, A, B, R), (T1, B, D, R)],
        F => [(T1, B, D, L), (T2, D, C, R), (T4, C, A, R), (T3, A, E, L), (T2, E, C, R), (T4, C, B, R)],
    };
    frozen(&table, false)
}

/// The loop around a puncture through the four corners of its link, in the
/// phase where every turn is a left turn (puncture on the left).
pub fn peripheral_curve(v: Vertex) -> CurveDescriptor {
    let link = LINKS[v.index()];
    // Rotating a 4-step loop by one step flips every turn; v3's link table
    // starts on the other phase.
    let shift = if v == Vertex::V3 { 1 } else { 0 };
    let table: Vec<(Tri, Edge, Edge, Turn)> =
        (0..4).map(|i| link[(i + shift) % 4]).map(|c| (c.tri, c.enter, c.exit, Turn::L)).collect();
    frozen(&table, false)
}

/// The 1-sided curve γₗ crossing, once each, the three edges not in tₗ.
pub fn one_sided_curve(t: Tri) -> CurveDescriptor {
    use Edge::*;
    use Tri::*;
    use Turn::*;
    let table: [(Tri, Edge, Edge, Turn); 3] = match t {
        T1 => [(T2, C, E, L), (T3, E, A, R), (T4, A, C, L)],
        T2 => [(T1, B, F, R), (T3, F, A, L), (T4, A, B, R)],
        T3 => [(T1, B, D, L), (T2, D, C, R), (T4, C, B, L)],
        T4 => [(T1, F, D, R), (T2, D, E, L), (T3, E, F, R)],
    };
    frozen(&table, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn model_invariants() {
        let m = canonical_model();
        m.validate().unwrap();
        assert_eq!(m.triangles[3].edges, [Edge::A, Edge::B, Edge::C]);
        assert_eq!(Edge::D.dual_pair(), (Tri::T1, Tri::T2));
        assert!(m.links.iter().all(|l| l.corners.len() == 4));
    }

    #[test]
    fn dual_pairs_match_triangle_edges() {
        for e in Edge::ALL {
            let holders: Vec<Tri> = Tri::ALL.into_iter().filter(|t| t.contains(e)).collect();
            assert_eq!(holders, vec![e.dual_pair().0, e.dual_pair().1]);
        }
    }

    #[test]
    fn broken_model_is_rejected() {
        let mut m = canonical_model();
        m.links[0].corners.swap(1, 2);
        assert!(m.validate().is_err());
    }

    #[test]
    fn neighbors_of_root_and_cancellation() {
        let root = TreeAddress::root();
        let n = root.neighbors();
        assert_eq!(n.iter().map(|a| a.len()).collect::<Vec<_>>(), vec![1; 4]);
        let s1 = TreeAddress::from_word(&[Tri::T1]);
        let n1 = s1.neighbors();
        assert!(n1.contains(&root));
        assert!(n1.contains(&TreeAddress::from_word(&[Tri::T1, Tri::T3])));
        let s12 = TreeAddress::from_word(&[Tri::T1, Tri::T2]);
        assert_eq!(s12.distance(&root), 2);
        assert_eq!(s12.to_string(), "[S1,S2]");
    }

    #[test]
    fn enumerate_counts() {
        // 1 + 4 + 12 + 36 + ... = 1 + 4(3^d − 1)/2
        assert_eq!(TreeAddress::enumerate(0).len(), 1);
        assert_eq!(TreeAddress::enumerate(6).len(), 1 + 2 * (729 - 1));
        assert!(TreeAddress::enumerate(4).iter().all(|a| a.is_reduced()));
    }

    #[test]
    fn frozen_edge_curves_follow_turn_rule() {
        for e in Edge::ALL {
            let c = edge_curve(e);
            c.validate().unwrap();
            assert_eq!(c.steps.len(), 6);
            assert_eq!(c.triangles(), Tri::ALL.to_vec());
            assert!(!c.crossed_edges().contains(&e));
            let path: Vec<_> = c.steps.iter().map(|s| (s.tri, s.enter, s.exit)).collect();
            assert_eq!(CurveDescriptor::from_path(&path).unwrap(), c);
        }
    }

    #[test]
    fn edge_curve_crossings_multiply_to_complement() {
        // each crossed edge is counted once per crossing; the multiset of
        // crossed edges covers the edges of the two complementary triangles
        for e in Edge::ALL {
            let (i, j) = e.dual_pair();
            let mut crossed = edge_curve(e).crossed_edges();
            crossed.sort();
            let mut expect: Vec<Edge> = Tri::ALL
                .into_iter()
                .filter(|&t| t != i && t != j)
                .flat_map(|t| t.edges())
                .collect();
            expect.sort();
            assert_eq!(crossed, expect, "edge {e}");
        }
    }

    #[test]
    fn peripheral_curves_are_links() {
        for v in Vertex::ALL {
            let c = peripheral_curve(v);
            c.validate().unwrap();
            assert_eq!(c.triangles(), Tri::ALL.to_vec());
            assert!(c.steps.iter().all(|s| s.turn == Turn::L));
            let path: Vec<_> = c.steps.iter().map(|s| (s.tri, s.enter, s.exit)).collect();
            assert_eq!(CurveDescriptor::from_path(&path).unwrap(), c);
        }
    }

    #[test]
    fn one_sided_curves_and_squares() {
        for t in Tri::ALL {
            let g = one_sided_curve(t);
            g.validate().unwrap();
            assert!(g.one_sided);
            assert!(!g.triangles().contains(&t));
            let sq = g.square();
            sq.validate().unwrap();
            let path: Vec<_> = sq.steps.iter().map(|s| (s.tri, s.enter, s.exit)).collect();
            assert_eq!(CurveDescriptor::from_path(&path).unwrap(), sq);
        }
    }

    #[test]
    fn bad_descriptors_rejected() {
        use Edge::*;
        assert!(CurveDescriptor::from_path(&[(Tri::T1, B, B)]).is_err());
        let mut c = edge_curve(A);
        c.steps[2].exit = Edge::F;
        assert!(c.validate().is_err());
    }

    fn word() -> impl Strategy<Value = TreeAddress> {
        proptest::collection::vec(0usize..4, 0..12)
            .prop_map(|w| TreeAddress::from_word(&w.into_iter().map(Tri::from_index).collect::<Vec<_>>()))
    }

    proptest! {
        #[test]
        fn tree_metric(u in word(), w in word()) {
            prop_assert!(u.is_reduced());
            prop_assert_eq!(u.distance(&w), w.distance(&u));
            for n in u.neighbors() {
                prop_assert_eq!(n.distance(&u), 1);
            }
            // distance through the root bounds the metric
            prop_assert!(u.distance(&w) <= u.len() + w.len());
        }
    }
}
