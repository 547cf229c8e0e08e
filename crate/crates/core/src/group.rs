//! Concrete factor groups behind one element type.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::field::{FieldError, Gf};

/// Upper bound on the number of elements materialised by `elements`.
pub const ELEMENT_CAP: u128 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("invalid group description: {0}")]
    InvalidSpec(String),
    #[error("invalid element for {group}: {detail}")]
    InvalidElement { group: String, detail: String },
    #[error("closure exceeded the cap of {0} elements")]
    CapExceeded(usize),
    #[error("{0} is infinite or too large to enumerate")]
    NotEnumerable(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Description of a factor group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GroupSpec {
    Cyclic { n: u64 },
    Symmetric { n: u32 },
    Alternating { n: u32 },
    Free { rank: u32 },
    Sl2 { p: u32, m: u32 },
    MatrixGroup { p: u32, m: u32, degree: u32 },
}

impl GroupSpec {
    pub fn cyclic(n: u64) -> Self {
        GroupSpec::Cyclic { n }
    }

    pub fn name(&self) -> String {
        match self {
            GroupSpec::Cyclic { n } => format!("C{n}"),
            GroupSpec::Symmetric { n } => format!("S{n}"),
            GroupSpec::Alternating { n } => format!("A{n}"),
            GroupSpec::Free { rank } => format!("F{rank}"),
            GroupSpec::Sl2 { p, m } => format!("SL2({p}^{m})"),
            GroupSpec::MatrixGroup { p, m, degree } => format!("GL{degree}({p}^{m})"),
        }
    }
}

/// A group element. Permutations are 0-based image arrays and compose right
/// to left; free-group elements are freely reduced `(generator, exponent)`
/// syllables; matrices are row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GElem {
    Residue(u64),
    Perm(Vec<u32>),
    Free(Vec<(u32, i64)>),
    Matrix(Vec<u32>),
}

/// Order of an element; `Infinite` records the search bound used for matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ElementOrder {
    Finite(u64),
    Infinite { bound: u64 },
}

impl ElementOrder {
    pub fn finite(self) -> Option<u64> {
        match self {
            ElementOrder::Finite(k) => Some(k),
            ElementOrder::Infinite { .. } => None,
        }
    }
}

/// Build a permutation of `{1..n}` from 1-based cycles.
pub fn perm_from_cycles(n: u32, cycles: &[&[u32]]) -> GElem {
    let mut img: Vec<u32> = (0..n).collect();
    for cycle in cycles {
        for (i, &x) in cycle.iter().enumerate() {
            let y = cycle[(i + 1) % cycle.len()];
            img[(x - 1) as usize] = y - 1;
        }
    }
    GElem::Perm(img)
}

/// 1-based cycle notation, `()` for the identity.
pub fn perm_to_cycles(img: &[u32]) -> String {
    let mut seen = vec![false; img.len()];
    let mut out = String::new();
    for start in 0..img.len() {
        if seen[start] || img[start] as usize == start {
            continue;
        }
        out.push('(');
        let mut x = start;
        let mut first = true;
        while !seen[x] {
            seen[x] = true;
            if !first {
                out.push(' ');
            }
            let _ = write!(out, "{}", x + 1);
            first = false;
            x = img[x] as usize;
        }
        out.push(')');
    }
    if out.is_empty() {
        out.push_str("()");
    }
    out
}

fn perm_is_even(img: &[u32]) -> bool {
    let mut seen = vec![false; img.len()];
    let mut transpositions = 0;
    for start in 0..img.len() {
        let mut len = 0;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = img[x] as usize;
            len += 1;
        }
        if len > 0 {
            transpositions += len - 1;
        }
    }
    transpositions % 2 == 0
}

/// Free reduction of a syllable sequence.
pub fn free_reduce(raw: impl IntoIterator<Item = (u32, i64)>) -> Vec<(u32, i64)> {
    let mut out: Vec<(u32, i64)> = Vec::new();
    for (g, e) in raw {
        if e == 0 {
            continue;
        }
        match out.last_mut() {
            Some(last) if last.0 == g => {
                last.1 += e;
                if last.1 == 0 {
                    out.pop();
                }
            }
            _ => out.push((g, e)),
        }
    }
    out
}

/// A runtime group with the arithmetic for its kind.
#[derive(Debug, Clone)]
pub struct Group {
    spec: GroupSpec,
    field: Option<Arc<Gf>>,
}

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Eq for Group {}

impl Group {
    pub fn new(spec: GroupSpec) -> Result<Self, GroupError> {
        let field = match &spec {
            GroupSpec::Cyclic { n } if *n == 0 => {
                return Err(GroupError::InvalidSpec("cyclic order must be at least 1".into()))
            }
            GroupSpec::Symmetric { n } | GroupSpec::Alternating { n } if *n == 0 => {
                return Err(GroupError::InvalidSpec("degree must be at least 1".into()))
            }
            GroupSpec::Sl2 { p, m } => Some(Arc::new(Gf::new(*p, *m)?)),
            GroupSpec::MatrixGroup { p, m, degree } => {
                if *degree == 0 {
                    return Err(GroupError::InvalidSpec("matrix degree must be at least 1".into()));
                }
                Some(Arc::new(Gf::new(*p, *m)?))
            }
            _ => None,
        };
        Ok(Self { spec, field })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn field(&self) -> Option<&Gf> {
        self.field.as_deref()
    }

    fn degree(&self) -> usize {
        match self.spec {
            GroupSpec::Sl2 { .. } => 2,
            GroupSpec::MatrixGroup { degree, .. } => degree as usize,
            GroupSpec::Symmetric { n } | GroupSpec::Alternating { n } => n as usize,
            _ => 0,
        }
    }

    pub fn identity(&self) -> GElem {
        match &self.spec {
            GroupSpec::Cyclic { .. } => GElem::Residue(0),
            GroupSpec::Symmetric { n } | GroupSpec::Alternating { n } => {
                GElem::Perm((0..*n).collect())
            }
            GroupSpec::Free { .. } => GElem::Free(Vec::new()),
            GroupSpec::Sl2 { .. } | GroupSpec::MatrixGroup { .. } => {
                let d = self.degree();
                let mut m = vec![0; d * d];
                for i in 0..d {
                    m[i * d + i] = 1;
                }
                GElem::Matrix(m)
            }
        }
    }

    pub fn is_identity(&self, g: &GElem) -> bool {
        match g {
            GElem::Residue(r) => *r == 0,
            GElem::Perm(img) => img.iter().enumerate().all(|(i, &x)| i as u32 == x),
            GElem::Free(w) => w.is_empty(),
            GElem::Matrix(_) => *g == self.identity(),
        }
    }

    fn invalid(&self, detail: impl Into<String>) -> GroupError {
        GroupError::InvalidElement { group: self.spec.name(), detail: detail.into() }
    }

    /// Checks that `g` is a well-formed element of this group.
    pub fn validate(&self, g: &GElem) -> Result<(), GroupError> {
        match (&self.spec, g) {
            (GroupSpec::Cyclic { n }, GElem::Residue(r)) => {
                if r < n {
                    Ok(())
                } else {
                    Err(self.invalid(format!("residue {r} not reduced mod {n}")))
                }
            }
            (GroupSpec::Symmetric { n } | GroupSpec::Alternating { n }, GElem::Perm(img)) => {
                let mut seen = vec![false; *n as usize];
                if img.len() != *n as usize {
                    return Err(self.invalid("image array has the wrong length"));
                }
                for &x in img {
                    if x >= *n || seen[x as usize] {
                        return Err(self.invalid("image array is not a bijection"));
                    }
                    seen[x as usize] = true;
                }
                if matches!(self.spec, GroupSpec::Alternating { .. }) && !perm_is_even(img) {
                    return Err(self.invalid("odd permutation"));
                }
                Ok(())
            }
            (GroupSpec::Free { rank }, GElem::Free(w)) => {
                if w.iter().any(|&(g, e)| g >= *rank || e == 0) {
                    return Err(self.invalid("generator out of range or zero exponent"));
                }
                if free_reduce(w.iter().copied()) != *w {
                    return Err(self.invalid("free word not reduced"));
                }
                Ok(())
            }
            (GroupSpec::Sl2 { .. } | GroupSpec::MatrixGroup { .. }, GElem::Matrix(m)) => {
                let d = self.degree();
                let f = self.field.as_ref().expect("matrix groups carry a field");
                if m.len() != d * d || m.iter().any(|&x| x >= f.order()) {
                    return Err(self.invalid("bad matrix shape or entry"));
                }
                let det = determinant(f, m, d);
                match self.spec {
                    GroupSpec::Sl2 { .. } if det != 1 => Err(self.invalid("determinant is not 1")),
                    _ if det == 0 => Err(self.invalid("singular matrix")),
                    _ => Ok(()),
                }
            }
            _ => Err(self.invalid("element kind does not match group")),
        }
    }

    pub fn mul(&self, g: &GElem, h: &GElem) -> GElem {
        match (&self.spec, g, h) {
            (GroupSpec::Cyclic { n }, GElem::Residue(a), GElem::Residue(b)) => {
                GElem::Residue(((*a as u128 + *b as u128) % *n as u128) as u64)
            }
            (_, GElem::Perm(a), GElem::Perm(b)) => {
                GElem::Perm(b.iter().map(|&x| a[x as usize]).collect())
            }
            (_, GElem::Free(a), GElem::Free(b)) => {
                GElem::Free(free_reduce(a.iter().chain(b.iter()).copied()))
            }
            (_, GElem::Matrix(a), GElem::Matrix(b)) => {
                let f = self.field.as_ref().expect("matrix groups carry a field");
                GElem::Matrix(mat_mul(f, a, b, self.degree()))
            }
            _ => panic!("mismatched element kinds for {}", self.spec.name()),
        }
    }

    /// `mul` with both arguments validated first.
    pub fn try_mul(&self, g: &GElem, h: &GElem) -> Result<GElem, GroupError> {
        self.validate(g)?;
        self.validate(h)?;
        Ok(self.mul(g, h))
    }

    pub fn inv(&self, g: &GElem) -> GElem {
        match (&self.spec, g) {
            (GroupSpec::Cyclic { n }, GElem::Residue(a)) => GElem::Residue((n - a) % n),
            (_, GElem::Perm(a)) => {
                let mut out = vec![0; a.len()];
                for (i, &x) in a.iter().enumerate() {
                    out[x as usize] = i as u32;
                }
                GElem::Perm(out)
            }
            (_, GElem::Free(w)) => GElem::Free(w.iter().rev().map(|&(g, e)| (g, -e)).collect()),
            (_, GElem::Matrix(a)) => {
                let f = self.field.as_ref().expect("matrix groups carry a field");
                GElem::Matrix(mat_inv(f, a, self.degree()).expect("group elements are invertible"))
            }
            _ => panic!("mismatched element kind for {}", self.spec.name()),
        }
    }

    pub fn pow(&self, g: &GElem, k: i64) -> GElem {
        let base = if k < 0 { self.inv(g) } else { g.clone() };
        let mut acc = self.identity();
        for _ in 0..k.unsigned_abs() {
            acc = self.mul(&acc, &base);
        }
        acc
    }

    /// Number of elements, or `None` for infinite groups.
    pub fn size(&self) -> Option<u128> {
        match &self.spec {
            GroupSpec::Cyclic { n } => Some(*n as u128),
            GroupSpec::Symmetric { n } => Some((1..=*n as u128).product()),
            GroupSpec::Alternating { n } => {
                let f: u128 = (1..=*n as u128).product();
                Some(if *n >= 2 { f / 2 } else { 1 })
            }
            GroupSpec::Free { rank } => (*rank == 0).then_some(1),
            GroupSpec::Sl2 { .. } | GroupSpec::MatrixGroup { .. } => {
                let f = self.field.as_ref().expect("matrix groups carry a field");
                let q = f.order() as u128;
                let d = self.degree() as u32;
                let gl: u128 = (0..d).map(|i| q.pow(d) - q.pow(i)).product();
                Some(if matches!(self.spec, GroupSpec::Sl2 { .. }) { gl / (q - 1) } else { gl })
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.size().is_some()
    }

    pub fn is_trivial(&self) -> bool {
        self.size() == Some(1)
    }

    pub fn order_of(&self, g: &GElem, bound: u64) -> ElementOrder {
        if let GElem::Free(w) = g {
            return if w.is_empty() {
                ElementOrder::Finite(1)
            } else {
                ElementOrder::Infinite { bound: 0 }
            };
        }
        if let (GroupSpec::Cyclic { n }, GElem::Residue(r)) = (&self.spec, g) {
            return ElementOrder::Finite(n / gcd(*n, *r));
        }
        let mut acc = g.clone();
        for k in 1..=bound {
            if self.is_identity(&acc) {
                return ElementOrder::Finite(k);
            }
            acc = self.mul(&acc, g);
        }
        ElementOrder::Infinite { bound }
    }

    /// All elements in canonical (sorted) order.
    pub fn elements(&self) -> Result<Vec<GElem>, GroupError> {
        let size = self
            .size()
            .filter(|&s| s <= ELEMENT_CAP)
            .ok_or_else(|| GroupError::NotEnumerable(self.spec.name()))?;
        let mut out = match &self.spec {
            GroupSpec::Cyclic { n } => (0..*n).map(GElem::Residue).collect(),
            GroupSpec::Free { .. } => vec![self.identity()],
            GroupSpec::Symmetric { n } | GroupSpec::Alternating { n } => {
                let mut all = Vec::new();
                let mut img: Vec<u32> = (0..*n).collect();
                permutations(&mut img, 0, &mut all);
                let even_only = matches!(self.spec, GroupSpec::Alternating { .. });
                all.into_iter()
                    .filter(|p| !even_only || perm_is_even(p))
                    .map(GElem::Perm)
                    .collect()
            }
            GroupSpec::Sl2 { .. } | GroupSpec::MatrixGroup { .. } => {
                let f = self.field.as_ref().expect("matrix groups carry a field");
                let d = self.degree();
                let q = f.order() as u128;
                if q.pow((d * d) as u32) > 64 * ELEMENT_CAP {
                    return Err(GroupError::NotEnumerable(self.spec.name()));
                }
                let mut all = Vec::new();
                let mut entries = vec![0u32; d * d];
                loop {
                    let g = GElem::Matrix(entries.clone());
                    if self.validate(&g).is_ok() {
                        all.push(g);
                    }
                    if !odometer(&mut entries, f.order()) {
                        break;
                    }
                }
                all
            }
        };
        out.sort();
        debug_assert_eq!(out.len() as u128, size);
        Ok(out)
    }

    pub fn non_identity_elements(&self) -> Result<Vec<GElem>, GroupError> {
        Ok(self.elements()?.into_iter().filter(|g| !self.is_identity(g)).collect())
    }

    /// First non-identity element in canonical order (generator for free groups).
    pub fn first_nontrivial(&self) -> Option<GElem> {
        match &self.spec {
            GroupSpec::Free { rank } => (*rank > 0).then(|| GElem::Free(vec![(0, 1)])),
            GroupSpec::Cyclic { n } => (*n > 1).then_some(GElem::Residue(1)),
            _ => self.non_identity_elements().ok()?.into_iter().next(),
        }
    }

    /// A standard generating set.
    pub fn generators(&self) -> Vec<GElem> {
        match &self.spec {
            GroupSpec::Cyclic { n } => {
                if *n > 1 {
                    vec![GElem::Residue(1)]
                } else {
                    vec![]
                }
            }
            GroupSpec::Symmetric { n } => match n {
                0 | 1 => vec![],
                2 => vec![perm_from_cycles(2, &[&[1, 2]])],
                _ => {
                    let long: Vec<u32> = (1..=*n).collect();
                    vec![perm_from_cycles(*n, &[&[1, 2]]), perm_from_cycles(*n, &[&long])]
                }
            },
            GroupSpec::Alternating { n } => {
                (3..=*n).map(|k| perm_from_cycles(*n, &[&[1, 2, k]])).collect()
            }
            GroupSpec::Free { rank } => (0..*rank).map(|g| GElem::Free(vec![(g, 1)])).collect(),
            GroupSpec::Sl2 { .. } | GroupSpec::MatrixGroup { .. } => {
                let f = self.field.as_ref().expect("matrix groups carry a field");
                let d = self.degree();
                let mut gens = Vec::new();
                for b in f.prime_basis() {
                    for i in 0..d {
                        for j in 0..d {
                            if i != j {
                                let GElem::Matrix(mut m) = self.identity() else { unreachable!() };
                                m[i * d + j] = b;
                                gens.push(GElem::Matrix(m));
                            }
                        }
                    }
                }
                if let GroupSpec::MatrixGroup { .. } = self.spec {
                    if f.order() > 2 {
                        let GElem::Matrix(mut m) = self.identity() else { unreachable!() };
                        m[0] = primitive(f);
                        gens.push(GElem::Matrix(m));
                    }
                }
                gens
            }
        }
    }

    /// Subgroup generated by `gens`, by breadth-first search.
    pub fn closure(&self, gens: &[GElem], cap: usize) -> Result<Vec<GElem>, GroupError> {
        for g in gens {
            self.validate(g)?;
        }
        let id = self.identity();
        let mut seen: HashSet<GElem> = HashSet::from([id.clone()]);
        let mut queue = VecDeque::from([id]);
        let mut steps: Vec<GElem> = gens.to_vec();
        steps.extend(gens.iter().map(|g| self.inv(g)));
        while let Some(x) = queue.pop_front() {
            for s in &steps {
                let y = self.mul(&x, s);
                if seen.insert(y.clone()) {
                    if seen.len() > cap {
                        return Err(GroupError::CapExceeded(cap));
                    }
                    queue.push_back(y);
                }
            }
        }
        let mut out: Vec<GElem> = seen.into_iter().collect();
        out.sort();
        Ok(out)
    }

    /// Shortest positive words in `gens` for every element of a finite group,
    /// as generator-index sequences.
    pub fn decomposition_table(
        &self,
        gens: &[GElem],
        cap: usize,
    ) -> Result<HashMap<GElem, Vec<usize>>, GroupError> {
        let id = self.identity();
        let mut table = HashMap::from([(id.clone(), Vec::new())]);
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            let word = table[&x].clone();
            for (i, s) in gens.iter().enumerate() {
                let y = self.mul(&x, s);
                if !table.contains_key(&y) {
                    if table.len() >= cap {
                        return Err(GroupError::CapExceeded(cap));
                    }
                    let mut w = word.clone();
                    w.push(i);
                    table.insert(y.clone(), w);
                    queue.push_back(y);
                }
            }
        }
        Ok(table)
    }

    pub fn elem_to_json(&self, g: &GElem) -> Value {
        match g {
            GElem::Residue(r) => json!(r),
            GElem::Perm(img) => json!(img),
            GElem::Free(w) => json!(w),
            GElem::Matrix(m) => json!(m),
        }
    }

    pub fn elem_from_json(&self, v: &Value) -> Result<GElem, GroupError> {
        let bad = |d: &str| self.invalid(format!("{d}: {v}"));
        let g = match &self.spec {
            GroupSpec::Cyclic { n } => {
                let r = v.as_i64().ok_or_else(|| bad("expected an integer residue"))?;
                GElem::Residue(r.rem_euclid(*n as i64) as u64)
            }
            GroupSpec::Symmetric { .. } | GroupSpec::Alternating { .. } => {
                let img: Vec<u32> =
                    serde_json::from_value(v.clone()).map_err(|_| bad("expected an image array"))?;
                GElem::Perm(img)
            }
            GroupSpec::Free { .. } => {
                let w: Vec<(u32, i64)> = serde_json::from_value(v.clone())
                    .map_err(|_| bad("expected [[generator, exponent], ...]"))?;
                GElem::Free(free_reduce(w))
            }
            GroupSpec::Sl2 { .. } | GroupSpec::MatrixGroup { .. } => {
                let m: Vec<u32> = serde_json::from_value(v.clone())
                    .map_err(|_| bad("expected a row-major entry list"))?;
                GElem::Matrix(m)
            }
        };
        self.validate(&g)?;
        Ok(g)
    }

    pub fn fmt_elem(&self, g: &GElem) -> String {
        match g {
            GElem::Residue(r) => r.to_string(),
            GElem::Perm(img) => perm_to_cycles(img),
            GElem::Free(w) => {
                if w.is_empty() {
                    return "e".into();
                }
                w.iter()
                    .map(|&(g, e)| if e == 1 { format!("x{g}") } else { format!("x{g}^{e}") })
                    .collect::<Vec<_>>()
                    .join(" ")
            }
            GElem::Matrix(m) => {
                let d = self.degree();
                let rows: Vec<String> = m
                    .chunks(d)
                    .map(|r| format!("[{}]", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
                    .collect();
                format!("[{}]", rows.join(","))
            }
        }
    }
}

fn primitive(f: &Gf) -> u32 {
    (1..f.order())
        .find(|&x| {
            let mut acc = x;
            let mut k = 1;
            while acc != 1 {
                acc = f.mul(acc, x);
                k += 1;
            }
            k == f.order() - 1
        })
        .unwrap_or(1)
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn permutations(img: &mut Vec<u32>, k: usize, out: &mut Vec<Vec<u32>>) {
    if k == img.len() {
        out.push(img.clone());
        return;
    }
    for i in k..img.len() {
        img.swap(k, i);
        permutations(img, k + 1, out);
        img.swap(k, i);
    }
}

fn odometer(digits: &mut [u32], base: u32) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

pub fn mat_mul(f: &Gf, a: &[u32], b: &[u32], d: usize) -> Vec<u32> {
    let mut out = vec![0; d * d];
    for i in 0..d {
        for j in 0..d {
            let mut acc = 0;
            for k in 0..d {
                acc = f.add(acc, f.mul(a[i * d + k], b[k * d + j]));
            }
            out[i * d + j] = acc;
        }
    }
    out
}

pub fn determinant(f: &Gf, a: &[u32], d: usize) -> u32 {
    let mut m = a.to_vec();
    let mut det = 1;
    for col in 0..d {
        let Some(pivot) = (col..d).find(|&r| m[r * d + col] != 0) else {
            return 0;
        };
        if pivot != col {
            for k in 0..d {
                m.swap(pivot * d + k, col * d + k);
            }
            det = f.neg(det);
        }
        let pv = m[col * d + col];
        det = f.mul(det, pv);
        let pinv = f.inv(pv).expect("nonzero pivot");
        for r in (col + 1)..d {
            let factor = f.mul(m[r * d + col], pinv);
            if factor != 0 {
                for k in col..d {
                    let v = f.mul(factor, m[col * d + k]);
                    m[r * d + k] = f.sub(m[r * d + k], v);
                }
            }
        }
    }
    det
}

pub fn mat_inv(f: &Gf, a: &[u32], d: usize) -> Option<Vec<u32>> {
    let mut m = a.to_vec();
    let mut inv = vec![0; d * d];
    for i in 0..d {
        inv[i * d + i] = 1;
    }
    for col in 0..d {
        let pivot = (col..d).find(|&r| m[r * d + col] != 0)?;
        for k in 0..d {
            m.swap(pivot * d + k, col * d + k);
            inv.swap(pivot * d + k, col * d + k);
        }
        let pinv = f.inv(m[col * d + col])?;
        for k in 0..d {
            m[col * d + k] = f.mul(m[col * d + k], pinv);
            inv[col * d + k] = f.mul(inv[col * d + k], pinv);
        }
        for r in 0..d {
            if r != col {
                let factor = m[r * d + col];
                if factor != 0 {
                    for k in 0..d {
                        let v = f.mul(factor, m[col * d + k]);
                        m[r * d + k] = f.sub(m[r * d + k], v);
                        let w = f.mul(factor, inv[col * d + k]);
                        inv[r * d + k] = f.sub(inv[r * d + k], w);
                    }
                }
            }
        }
    }
    Some(inv)
}

/// The generating set `{(i j k) : 2 ≤ i < j < k ≤ n}` of the even
/// permutations of `{2..n}`.
pub fn three_cycles_fixing_one(n: u32) -> Vec<GElem> {
    let mut gens = Vec::new();
    for i in 2..=n {
        for j in (i + 1)..=n {
            for k in (j + 1)..=n {
                gens.push(perm_from_cycles(n, &[&[i, j, k]]));
            }
        }
    }
    gens
}

/// Points moved by a permutation (0-based).
pub fn support(g: &GElem) -> BTreeSet<u32> {
    match g {
        GElem::Perm(img) => {
            img.iter().enumerate().filter(|(i, &x)| *i as u32 != x).map(|(i, _)| i as u32).collect()
        }
        _ => BTreeSet::new(),
    }
}
