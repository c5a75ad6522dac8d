//! Planar diagram codes, faces, and checkerboard colorings.
//!
//! PD convention: each crossing is `X[a,b,c,d]` with the four edge labels
//! listed counterclockwise starting from the incoming under-strand. Edges
//! are numbered 1..2c along the knot, so the under-strand exits at
//! `c = a+1 (mod 2c)` and the over-strand occupies `b, d` with exactly one
//! of `d = b+1` / `b = d+1` holding.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiagramError {
    #[error("malformed PD code: {0}")]
    MalformedCode(String),
    #[error("not a single-component knot diagram: {0}")]
    NonKnot(String),
    #[error("face structure violates the Euler check (V - E + F = {chi}, expected 2): corrupt PD code")]
    NonPlanar { chi: i64 },
}

/// A knot projection given by its PD code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnotDiagram {
    name: String,
    crossings: Vec<[u32; 4]>,
    edge_count: u32,
}

/// One complementary region: the cyclic sequence of crossing corners it
/// touches. Corner `k` of a crossing sits between tuple slots `k` and `k+1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub corners: Vec<(usize, u8)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shade {
    Black,
    White,
}

/// A checkerboard coloring of a diagram's faces, with the crossing weight
/// eta assigned relative to its white regions.
#[derive(Debug, Clone)]
pub struct Coloring {
    pub knot: String,
    /// 0 or 1; the two colorings of a diagram swap black and white.
    pub id: usize,
    pub faces: Vec<Face>,
    pub shading: Vec<Shade>,
    /// Indices into `faces`, in order: the regions A_1..A_n.
    pub white_regions: Vec<usize>,
    /// Per crossing: +1 if the white corners are the {0,2} pair, -1 if {1,3}.
    pub eta: Vec<i8>,
    /// Per crossing, the face id at each of the four corners.
    pub corner_faces: Vec<[usize; 4]>,
}

impl Coloring {
    /// The two white regions incident to a crossing (as positions in
    /// `white_regions`); equal for a nugatory crossing.
    pub fn white_pair(&self, crossing: usize) -> (usize, usize) {
        let cf = &self.corner_faces[crossing];
        let (f1, f2) = if self.eta[crossing] == 1 { (cf[0], cf[2]) } else { (cf[1], cf[3]) };
        let pos = |f| self.white_regions.iter().position(|&w| w == f).expect("white region");
        (pos(f1), pos(f2))
    }
}

impl KnotDiagram {
    /// Parse a comma-separated list of `X[a,b,c,d]` tuples. The empty string
    /// is the unknot sentinel (zero crossings).
    pub fn parse(name: &str, text: &str) -> Result<Self, DiagramError> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(KnotDiagram { name: name.to_string(), crossings: Vec::new(), edge_count: 0 });
        }
        let mut crossings = Vec::new();
        let mut rest = text;
        loop {
            rest = rest.trim_start();
            let body = rest
                .strip_prefix('X')
                .map(str::trim_start)
                .and_then(|r| r.strip_prefix('['))
                .ok_or_else(|| DiagramError::MalformedCode(format!("expected X[..] at {rest:?}")))?;
            let (tuple, tail) = body
                .split_once(']')
                .ok_or_else(|| DiagramError::MalformedCode("unterminated tuple".into()))?;
            let labels: Vec<u32> = tuple
                .split(',')
                .map(|t| t.trim().parse::<u32>())
                .collect::<Result<_, _>>()
                .map_err(|_| DiagramError::MalformedCode(format!("bad labels in X[{tuple}]")))?;
            let [a, b, c, d] = labels[..] else {
                return Err(DiagramError::MalformedCode(format!(
                    "tuple X[{tuple}] has {} entries, expected 4",
                    labels.len()
                )));
            };
            crossings.push([a, b, c, d]);
            match tail.trim_start().strip_prefix(',') {
                Some(t) => rest = t,
                None if tail.trim().is_empty() => break,
                None => return Err(DiagramError::MalformedCode(format!("unexpected trailing {tail:?}"))),
            }
        }
        Self::new(name, crossings)
    }

    /// Validate an explicit crossing list.
    pub fn new(name: &str, crossings: Vec<[u32; 4]>) -> Result<Self, DiagramError> {
        let c = crossings.len() as u32;
        let edge_count = 2 * c;
        let mut seen = vec![0u8; (edge_count + 1) as usize];
        for x in &crossings {
            for &e in x {
                if e == 0 || e > edge_count {
                    return Err(DiagramError::NonKnot(format!(
                        "edge label {e} outside 1..{edge_count}"
                    )));
                }
                seen[e as usize] += 1;
            }
        }
        if let Some(e) = (1..=edge_count).find(|&e| seen[e as usize] != 2) {
            return Err(DiagramError::NonKnot(format!(
                "edge label {e} appears {} times, expected 2",
                seen[e as usize]
            )));
        }
        let nxt = |e: u32| e % edge_count + 1;
        for (i, &[a, b, c_out, d]) in crossings.iter().enumerate() {
            if c_out != nxt(a) {
                return Err(DiagramError::NonKnot(format!(
                    "crossing {i}: under-strand {a} -> {c_out} is not sequential"
                )));
            }
            // both relations hold at once only in the 1-crossing diagram
            if d != nxt(b) && b != nxt(d) {
                return Err(DiagramError::NonKnot(format!(
                    "crossing {i}: over-strand pair ({b},{d}) is not sequential"
                )));
            }
        }
        Ok(KnotDiagram { name: name.to_string(), crossings, edge_count })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn crossings(&self) -> &[[u32; 4]] {
        &self.crossings
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn edge_count(&self) -> u32 {
        self.edge_count
    }

    pub fn is_unknot_sentinel(&self) -> bool {
        self.crossings.is_empty()
    }

    /// True if the over-strand at `crossing` runs from slot 1 to slot 3.
    fn over_runs_b_to_d(&self, crossing: usize) -> bool {
        let [_, b, _, d] = self.crossings[crossing];
        d == b % self.edge_count + 1
    }

    /// Whether strands alternate under/over along the knot (every edge has
    /// one under end and one over end).
    pub fn is_alternating(&self) -> bool {
        let mut under = vec![false; (self.edge_count + 1) as usize];
        let mut over = vec![false; (self.edge_count + 1) as usize];
        for x in &self.crossings {
            under[x[0] as usize] = true;
            under[x[2] as usize] = true;
            over[x[1] as usize] = true;
            over[x[3] as usize] = true;
        }
        (1..=self.edge_count).all(|e| under[e as usize] && over[e as usize])
    }

    /// The mirror diagram: every crossing switched (over/under swapped).
    /// The tuple is re-rooted at the new incoming under-strand.
    pub fn mirror(&self) -> KnotDiagram {
        let crossings = self
            .crossings
            .iter()
            .enumerate()
            .map(|(i, &[a, b, c, d])| {
                if self.over_runs_b_to_d(i) {
                    [b, c, d, a]
                } else {
                    [d, a, b, c]
                }
            })
            .collect();
        KnotDiagram {
            name: format!("-{}", self.name.trim_start_matches('-')),
            crossings,
            edge_count: self.edge_count,
        }
    }

    /// Faces of the planar embedding induced by the PD rotation system,
    /// checked against V - E + F = 2. The unknot sentinel has two faces.
    pub fn extract_faces(&self) -> Result<Vec<Face>, DiagramError> {
        if self.is_unknot_sentinel() {
            return Ok(vec![Face { corners: Vec::new() }, Face { corners: Vec::new() }]);
        }
        let n = self.crossings.len();
        // other end of each edge: dart (crossing, slot) -> dart
        let mut ends: Vec<Vec<(usize, u8)>> = vec![Vec::new(); (self.edge_count + 1) as usize];
        for (ci, x) in self.crossings.iter().enumerate() {
            for (s, &e) in x.iter().enumerate() {
                ends[e as usize].push((ci, s as u8));
            }
        }
        let alpha = |(ci, s): (usize, u8)| {
            let e = self.crossings[ci][s as usize] as usize;
            let pair = &ends[e];
            if pair[0] == (ci, s) {
                pair[1]
            } else {
                pair[0]
            }
        };
        let mut face_of = vec![[usize::MAX; 4]; n];
        let mut faces = Vec::new();
        for c0 in 0..n {
            for s0 in 0..4u8 {
                if face_of[c0][s0 as usize] != usize::MAX {
                    continue;
                }
                let id = faces.len();
                let mut corners = Vec::new();
                let mut d = (c0, s0);
                while face_of[d.0][d.1 as usize] == usize::MAX {
                    face_of[d.0][d.1 as usize] = id;
                    corners.push((d.0, d.1));
                    let (ci, s) = alpha(d);
                    d = (ci, (s + 1) % 4);
                }
                faces.push(Face { corners });
            }
        }
        let chi = n as i64 - self.edge_count as i64 + faces.len() as i64;
        if chi != 2 {
            return Err(DiagramError::NonPlanar { chi });
        }
        Ok(faces)
    }

    /// Both checkerboard colorings, each with eta assigned per crossing.
    /// The two colorings have complementary shadings.
    pub fn checkerboard(&self) -> Result<(Coloring, Coloring), DiagramError> {
        let faces = self.extract_faces()?;
        if self.is_unknot_sentinel() {
            let mk = |id: usize| Coloring {
                knot: self.name.clone(),
                id,
                faces: faces.clone(),
                shading: if id == 0 {
                    vec![Shade::White, Shade::Black]
                } else {
                    vec![Shade::Black, Shade::White]
                },
                white_regions: vec![id],
                eta: Vec::new(),
                corner_faces: Vec::new(),
            };
            return Ok((mk(0), mk(1)));
        }
        let n = self.crossings.len();
        let mut corner_faces = vec![[0usize; 4]; n];
        for (fi, f) in faces.iter().enumerate() {
            for &(ci, s) in &f.corners {
                corner_faces[ci][s as usize] = fi;
            }
        }
        // 2-color faces so that corners alternate around every crossing:
        // color(corner 0) = color(corner 2) != color(corner 1) = color(corner 3).
        let mut parity: Vec<Option<bool>> = vec![None; faces.len()];
        parity[corner_faces[0][0]] = Some(false);
        let mut queue = vec![corner_faces[0][0]];
        let mut constraints: Vec<Vec<(usize, bool)>> = vec![Vec::new(); faces.len()];
        for cf in &corner_faces {
            for (s, &f) in cf.iter().enumerate() {
                for (t, &g) in cf.iter().enumerate() {
                    if s < t {
                        let rel = (s % 2) != (t % 2);
                        constraints[f].push((g, rel));
                        constraints[g].push((f, rel));
                    }
                }
            }
        }
        while let Some(f) = queue.pop() {
            let pf = parity[f].unwrap();
            for &(g, rel) in &constraints[f] {
                let want = pf ^ rel;
                match parity[g] {
                    None => {
                        parity[g] = Some(want);
                        queue.push(g);
                    }
                    Some(p) if p != want => {
                        return Err(DiagramError::NonPlanar { chi: 2 });
                    }
                    _ => {}
                }
            }
        }
        if parity.iter().any(|p| p.is_none()) {
            // faces not all reachable: disconnected projection
            return Err(DiagramError::NonKnot("disconnected diagram".into()));
        }
        let mk = |id: usize| {
            let shading: Vec<Shade> = parity
                .iter()
                .map(|p| {
                    if p.unwrap() == (id == 1) {
                        Shade::White
                    } else {
                        Shade::Black
                    }
                })
                .collect();
            let white_regions: Vec<usize> = (0..faces.len())
                .filter(|&f| shading[f] == Shade::White)
                .collect();
            let eta: Vec<i8> = (0..n)
                .map(|ci| {
                    let w0 = shading[corner_faces[ci][0]] == Shade::White;
                    if w0 {
                        1
                    } else {
                        -1
                    }
                })
                .collect();
            Coloring {
                knot: self.name.clone(),
                id,
                faces: faces.clone(),
                shading,
                white_regions,
                eta,
                corner_faces: corner_faces.clone(),
            }
        };
        Ok((mk(0), mk(1)))
    }
}

impl fmt::Display for KnotDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tuples: Vec<String> = self
            .crossings
            .iter()
            .map(|x| format!("X[{},{},{},{}]", x[0], x[1], x[2], x[3]))
            .collect();
        write!(f, "{}", tuples.join(","))
    }
}

pub const TREFOIL_PD: &str = "X[1,4,2,5],X[3,6,4,1],X[5,2,6,3]";
