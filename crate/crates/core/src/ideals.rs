//! Spanning sets of T-ideals and lower central series terms, one
//! multidegree component at a time.
//!
//! Every ideal here is spanned by monomial instances of its defining
//! shape: commutators and products are multilinear, so substituting sums
//! of monomials expands into monomial substitutions. Inside a component
//! the enumeration is therefore finite and exact.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::IdealError;
use crate::exprparse;
use crate::freering::{Monomial, MultiDegree, Poly};
use crate::zlinalg::{Lattice, Order};

/// A multilinear generator of a custom T-ideal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Schema {
    source: String,
    /// Each term as (slot order, coefficient): slot `k` is the k-th
    /// variable of the support in increasing order.
    terms: Vec<(Vec<usize>, i64)>,
    arity: usize,
}

impl Schema {
    /// Parses one generator expression and checks it is multilinear.
    pub fn parse(text: &str) -> Result<Schema, IdealError> {
        let p = exprparse::parse_poly(text)?;
        let bad = || IdealError::NonMultilinearSchema(text.trim().to_string());
        let deg = p.homogeneous_degree().ok_or_else(bad)?;
        if !deg.is_multilinear() && !p.is_zero() {
            return Err(bad());
        }
        let vars: Vec<u32> = deg.support().collect();
        let slot: HashMap<u32, usize> = vars.iter().enumerate().map(|(k, &v)| (v, k)).collect();
        let mut terms = Vec::with_capacity(p.len());
        for (m, c) in p.terms() {
            let c = c
                .to_i64()
                .ok_or_else(|| IdealError::InvalidParameter(format!("coefficient {c} is too large")))?;
            terms.push((m.letters().iter().map(|v| slot[v]).collect(), c));
        }
        Ok(Schema {
            source: text.trim().to_string(),
            terms,
            arity: vars.len(),
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn arity(&self) -> usize {
        self.arity
    }
}

/// Which subgroup to instantiate per component.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum IdealSpec {
    /// Two-sided ideal generated by all `n`-fold commutators.
    Tn(u32),
    /// Generated by `[a1,a2,a3,a4]` and `[a1,a2,a3][a4,a5]`.
    T32,
    /// Two-sided ideal generated by `[xj1,xj2,xj3][xj4,xj5]`, `j1<...<j5`.
    I32,
    /// n-th term of the lower central series (a subgroup, not an ideal).
    GammaN(u32),
    /// T-ideal generated by multilinear polynomials.
    Custom(Vec<Schema>),
}

impl IdealSpec {
    pub fn tn(n: u32) -> Result<Self, IdealError> {
        if n < 2 {
            return Err(IdealError::InvalidParameter(format!("T{n}: n must be at least 2")));
        }
        Ok(IdealSpec::Tn(n))
    }

    pub fn gamma(n: u32) -> Result<Self, IdealError> {
        if n < 1 {
            return Err(IdealError::InvalidParameter("gamma0: n must be at least 1".into()));
        }
        Ok(IdealSpec::GammaN(n))
    }

    /// One generator expression per line; blank lines and `#` comments
    /// are skipped.
    pub fn custom_from_text(text: &str) -> Result<Self, IdealError> {
        let mut schemas = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let s = Schema::parse(line).map_err(|e| match e {
                IdealError::Parse(pe) => IdealError::SpecFile(format!("line {}: {pe}", lineno + 1)),
                other => other,
            })?;
            schemas.push(s);
        }
        if schemas.is_empty() {
            return Err(IdealError::SpecFile("no generators".into()));
        }
        Ok(IdealSpec::Custom(schemas))
    }

    pub fn custom_from_file(path: &Path) -> Result<Self, IdealError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| IdealError::SpecFile(format!("{}: {e}", path.display())))?;
        Self::custom_from_text(&text)
    }

    fn shapes(&self) -> Vec<Shape> {
        let framed = |pattern, slots| Shape {
            pattern,
            slots,
            framed: true,
            empty_slots: false,
            single_increasing: false,
        };
        match self {
            IdealSpec::Tn(n) => vec![framed(Pattern::Comm, *n as usize)],
            IdealSpec::GammaN(n) => vec![Shape {
                framed: false,
                ..framed(Pattern::Comm, *n as usize)
            }],
            IdealSpec::T32 => vec![framed(Pattern::Comm, 4), framed(Pattern::Prod32, 5)],
            IdealSpec::I32 => vec![Shape {
                single_increasing: true,
                ..framed(Pattern::Prod32, 5)
            }],
            IdealSpec::Custom(schemas) => schemas
                .iter()
                .enumerate()
                .map(|(i, s)| Shape {
                    // Unitary endomorphisms may send a variable to 1.
                    empty_slots: true,
                    ..framed(Pattern::Custom(i), s.arity)
                })
                .collect(),
        }
    }
}

impl fmt::Display for IdealSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdealSpec::Tn(n) => write!(f, "T{n}"),
            IdealSpec::T32 => f.write_str("T32"),
            IdealSpec::I32 => f.write_str("I32"),
            IdealSpec::GammaN(n) => write!(f, "gamma{n}"),
            IdealSpec::Custom(s) => {
                let parts: Vec<&str> = s.iter().map(|s| s.source.as_str()).collect();
                write!(f, "custom{{{}}}", parts.join("; "))
            }
        }
    }
}

impl FromStr for IdealSpec {
    type Err = IdealError;

    /// `T<n>`, `T32`, `I32`, `gamma<n>`, or `custom:<file>`.
    fn from_str(s: &str) -> Result<Self, IdealError> {
        let s = s.trim();
        if let Some(path) = s.strip_prefix("custom:") {
            return Self::custom_from_file(Path::new(path));
        }
        let unknown = || IdealError::UnknownSpec(s.to_string());
        match s {
            "T32" => return Ok(IdealSpec::T32),
            "I32" => return Ok(IdealSpec::I32),
            _ => {}
        }
        if let Some(n) = s.strip_prefix('T') {
            return Self::tn(n.parse().map_err(|_| unknown())?);
        }
        if let Some(n) = s.strip_prefix("gamma") {
            return Self::gamma(n.parse().map_err(|_| unknown())?);
        }
        Err(unknown())
    }
}

#[derive(Clone, Copy, Debug)]
enum Pattern {
    /// Left-normed commutator of all slots.
    Comm,
    /// `[s1,s2,s3][s4,s5]`.
    Prod32,
    Custom(usize),
}

/// How a word of the component is cut into `m0 | slots | m1`.
#[derive(Clone, Copy, Debug)]
struct Shape {
    pattern: Pattern,
    slots: usize,
    /// Allow nonempty `m0`, `m1`.
    framed: bool,
    empty_slots: bool,
    /// Slots are single, strictly increasing letters.
    single_increasing: bool,
}

/// All monomials of one multidegree, in canonical order.
#[derive(Clone, Debug)]
pub struct ComponentBasis {
    mu: MultiDegree,
    words: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

impl ComponentBasis {
    pub fn new(mu: &MultiDegree) -> Self {
        let words = multiset_permutations(mu);
        let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        ComponentBasis {
            mu: mu.clone(),
            words,
            index,
        }
    }

    pub fn multidegree(&self) -> &MultiDegree {
        &self.mu
    }

    pub fn dim(&self) -> usize {
        self.words.len()
    }

    pub fn monomials(&self) -> Vec<Monomial> {
        self.words.iter().map(|w| Monomial::new(w.clone())).collect()
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m.letters()).copied()
    }

    /// Coordinate vector of a polynomial lying in this component.
    pub fn coords(&self, p: &Poly) -> Result<Vec<BigInt>, IdealError> {
        let mut v = vec![BigInt::from(0); self.dim()];
        for (m, c) in p.terms() {
            let i = self
                .index_of(m)
                .ok_or_else(|| IdealError::WrongComponent(self.mu.to_string()))?;
            v[i] = c.clone();
        }
        Ok(v)
    }

    pub fn poly(&self, coords: &[BigInt]) -> Poly {
        Poly::from_terms(
            coords
                .iter()
                .zip(&self.words)
                .map(|(c, w)| (c.clone(), Monomial::new(w.clone()))),
        )
    }

    fn sparse_poly(&self, row: &[(usize, i64)]) -> Poly {
        Poly::from_terms(row.iter().map(|&(i, c)| (c, Monomial::new(self.words[i].clone()))))
    }
}

pub fn component_basis(mu: &MultiDegree) -> ComponentBasis {
    ComponentBasis::new(mu)
}

/// Distinct rearrangements of the letters of `mu`, lexicographically.
fn multiset_permutations(mu: &MultiDegree) -> Vec<Vec<u32>> {
    let mut w: Vec<u32> = mu
        .iter()
        .flat_map(|(v, e)| std::iter::repeat_n(v, e as usize))
        .collect();
    let mut out = vec![w.clone()];
    // Standard next-permutation; `w` starts sorted.
    loop {
        let Some(i) = (1..w.len()).rev().find(|&i| w[i - 1] < w[i]) else {
            return out;
        };
        let j = (i..w.len()).rev().find(|&j| w[j] > w[i - 1]).unwrap();
        w.swap(i - 1, j);
        w[i..].reverse();
        out.push(w.clone());
    }
}

/// Cut points `p0 <= p1 <= ... <= pk` splitting a word of length `d` into
/// `w[..p0] | w[p0..p1] | ... | w[pk..]`.
fn cut_points(d: usize, shape: &Shape) -> Vec<Vec<usize>> {
    fn rec(d: usize, k: usize, step: usize, framed: bool, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k + 1 {
            if framed || *cur.last().unwrap() == d {
                out.push(cur.clone());
            }
            return;
        }
        let lo = cur.last().map_or(0, |&p| p + step);
        let hi = if cur.is_empty() && !framed { 0 } else { d };
        for p in lo..=hi {
            cur.push(p);
            rec(d, k, step, framed, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    let step = usize::from(!shape.empty_slots);
    rec(d, shape.slots, step, shape.framed, &mut Vec::new(), &mut out);
    out
}

fn comm_terms(slots: &[&[u32]]) -> Vec<(Vec<u32>, i64)> {
    let mut acc = vec![(slots[0].to_vec(), 1i64)];
    for s in &slots[1..] {
        let mut next = Vec::with_capacity(acc.len() * 2);
        for (a, c) in acc {
            next.push(([a.as_slice(), s].concat(), c));
            next.push(([*s, a.as_slice()].concat(), -c));
        }
        acc = next;
    }
    acc
}

fn pattern_terms(pattern: Pattern, slots: &[&[u32]], spec: &IdealSpec) -> Vec<(Vec<u32>, i64)> {
    match pattern {
        Pattern::Comm => comm_terms(slots),
        Pattern::Prod32 => {
            let a = comm_terms(&slots[..3]);
            let b = comm_terms(&slots[3..]);
            let mut out = Vec::with_capacity(a.len() * b.len());
            for (x, c) in &a {
                for (y, e) in &b {
                    out.push(([x.as_slice(), y].concat(), c * e));
                }
            }
            out
        }
        Pattern::Custom(i) => {
            let IdealSpec::Custom(schemas) = spec else {
                unreachable!("custom pattern outside a custom spec")
            };
            schemas[i]
                .terms
                .iter()
                .map(|(order, c)| (order.iter().flat_map(|&k| slots[k].iter().copied()).collect(), *c))
                .collect()
        }
    }
}

/// Sparse coordinate rows of the generators, up to sign and without zeros.
fn generator_rows(spec: &IdealSpec, basis: &ComponentBasis) -> Vec<Vec<(usize, i64)>> {
    let d = basis.mu.total() as usize;
    let mut seen: HashSet<Vec<(usize, i64)>> = HashSet::new();
    let mut out = Vec::new();
    if d == 0 && !matches!(spec, IdealSpec::Custom(_)) {
        return out;
    }
    for shape in spec.shapes() {
        if !shape.empty_slots && shape.slots > d {
            continue;
        }
        let cuts = cut_points(d, &shape);
        for w in &basis.words {
            for p in &cuts {
                let k = shape.slots;
                if shape.single_increasing
                    && (p.windows(2).any(|q| q[1] != q[0] + 1)
                        || w[p[0]..p[k]].windows(2).any(|q| q[0] >= q[1]))
                {
                    continue;
                }
                let slots: Vec<&[u32]> = p.windows(2).map(|q| &w[q[0]..q[1]]).collect();
                let (m0, m1) = (&w[..p[0]], &w[p[k]..]);
                let mut row: BTreeMap<usize, i64> = BTreeMap::new();
                for (t, c) in pattern_terms(shape.pattern, &slots, spec) {
                    let full = [m0, t.as_slice(), m1].concat();
                    *row.entry(basis.index[&full]).or_insert(0) += c;
                }
                let mut row: Vec<(usize, i64)> = row.into_iter().filter(|&(_, c)| c != 0).collect();
                if row.is_empty() {
                    continue;
                }
                if row[0].1 < 0 {
                    row.iter_mut().for_each(|e| e.1 = -e.1);
                }
                if seen.insert(row.clone()) {
                    out.push(row);
                }
            }
        }
    }
    out
}

/// The spanning set of `spec` inside the component `mu`.
pub fn enumerate_generators(spec: &IdealSpec, mu: &MultiDegree) -> Vec<Poly> {
    let basis = ComponentBasis::new(mu);
    generator_rows(spec, &basis)
        .iter()
        .map(|r| basis.sparse_poly(r))
        .collect()
}

/// A component of an ideal as a lattice in monomial coordinates.
#[derive(Clone, Debug)]
pub struct ComponentLattice {
    pub spec: IdealSpec,
    pub basis: ComponentBasis,
    pub lattice: Lattice,
    pub generator_count: usize,
}

impl ComponentLattice {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn contains(&self, p: &Poly) -> Result<bool, IdealError> {
        Ok(self.lattice.contains(&self.basis.coords(p)?)?)
    }

    pub fn order_of(&self, p: &Poly) -> Result<Order, IdealError> {
        Ok(self.lattice.order_of(&self.basis.coords(p)?)?)
    }
}

/// Builds the component lattice without caching.
pub fn component_lattice(spec: &IdealSpec, mu: &MultiDegree) -> ComponentLattice {
    let basis = ComponentBasis::new(mu);
    let rows = generator_rows(spec, &basis);
    let big: Vec<Vec<(usize, BigInt)>> = rows
        .iter()
        .map(|r| r.iter().map(|&(i, c)| (i, BigInt::from(c))).collect())
        .collect();
    let lattice = Lattice::from_sparse_rows(basis.dim(), &big).expect("generator rows index the basis");
    ComponentLattice {
        spec: spec.clone(),
        generator_count: rows.len(),
        basis,
        lattice,
    }
}

/// Order-preserving relabeling of the support onto `1..k`.
///
/// Every spec here is invariant under it, and it preserves the canonical
/// monomial order, so relabeled components have identical lattices.
fn compact(mu: &MultiDegree) -> (MultiDegree, HashMap<u32, u32>) {
    let map: HashMap<u32, u32> = mu.support().zip(1..).collect();
    let c = MultiDegree::from_pairs(mu.iter().map(|(v, e)| (map[&v], e)));
    (c, map)
}

fn relabel(p: &Poly, map: &HashMap<u32, u32>) -> Poly {
    Poly::from_terms(p.terms().map(|(m, c)| {
        (c.clone(), Monomial::new(m.letters().iter().map(|v| map[v]).collect()))
    }))
}

/// Memo of component lattices keyed by `(spec, compacted multidegree)`.
///
/// Safe for concurrent use. Two threads may build the same entry; both
/// results are canonical and equal, so whichever lands last is kept.
#[derive(Default)]
pub struct ComponentCache {
    map: RwLock<HashMap<(IdealSpec, MultiDegree), Arc<ComponentLattice>>>,
}

impl ComponentCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Process-wide cache used by the free functions below.
    pub fn global() -> &'static ComponentCache {
        static CACHE: OnceLock<ComponentCache> = OnceLock::new();
        CACHE.get_or_init(ComponentCache::new)
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The component lattice on the compacted multidegree of `mu`.
    fn compact_lattice(&self, spec: &IdealSpec, mu: &MultiDegree) -> Arc<ComponentLattice> {
        let key = (spec.clone(), mu.clone());
        if let Some(hit) = self.map.read().expect("cache lock").get(&key) {
            return Arc::clone(hit);
        }
        let built = Arc::new(component_lattice(spec, mu));
        self.map
            .write()
            .expect("cache lock")
            .insert(key, Arc::clone(&built));
        built
    }

    /// The lattice of `spec` in the component `mu`, with `mu`'s own basis.
    pub fn component_lattice(&self, spec: &IdealSpec, mu: &MultiDegree) -> Arc<ComponentLattice> {
        let (c, _) = compact(mu);
        let base = self.compact_lattice(spec, &c);
        if c == *mu {
            return base;
        }
        Arc::new(ComponentLattice {
            spec: spec.clone(),
            basis: ComponentBasis::new(mu),
            lattice: base.lattice.clone(),
            generator_count: base.generator_count,
        })
    }

    /// Order of one multihomogeneous part.
    fn component_order(&self, part: &Poly, mu: &MultiDegree, spec: &IdealSpec) -> Result<Order, IdealError> {
        let (c, map) = compact(mu);
        self.compact_lattice(spec, &c).order_of(&relabel(part, &map))
    }

    /// Least `k >= 1` with `k*f` in the subgroup, computed per component.
    pub fn order_mod_ideal(&self, f: &Poly, spec: &IdealSpec) -> Result<Order, IdealError> {
        let mut acc = Order::Finite(BigInt::from(1));
        for (mu, part) in f.components() {
            let o = self.component_order(&part, &mu, spec)?;
            acc = acc.lcm(&o);
            if !acc.is_finite() {
                break;
            }
        }
        Ok(acc)
    }

    /// Membership, decided on each multihomogeneous part separately.
    pub fn ideal_member(&self, f: &Poly, spec: &IdealSpec) -> Result<bool, IdealError> {
        for (mu, part) in f.components() {
            let (c, map) = compact(&mu);
            if !self.compact_lattice(spec, &c).contains(&relabel(&part, &map))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `[x1,x2,x3][x4,x5] - sgn(s) [xs1,xs2,xs3][xs4,xs5]` lies in `T4`.
    pub fn sign_congruence_check(&self, sigma: &[u32; 5]) -> Result<bool, IdealError> {
        let sign = permutation_sign(sigma)
            .ok_or_else(|| IdealError::InvalidParameter(format!("{sigma:?} is not a permutation of 1..5")))?;
        let v = |s: &[u32; 5]| {
            let vars: Vec<Poly> = s.iter().map(|&i| Poly::var(i)).collect();
            let a = crate::freering::commutator(&vars[..3]).expect("nonempty");
            let b = crate::freering::commutator(&vars[3..]).expect("nonempty");
            a * b
        };
        let f = v(&[1, 2, 3, 4, 5]) - v(sigma).scale(&BigInt::from(sign));
        self.ideal_member(&f, &IdealSpec::Tn(4))
    }
}

/// Sign of a permutation of `1..n`; `None` if `p` is not one.
pub fn permutation_sign(p: &[u32]) -> Option<i64> {
    let n = p.len();
    let mut seen = vec![false; n];
    for &x in p {
        let i = (x as usize).checked_sub(1).filter(|&i| i < n)?;
        if std::mem::replace(&mut seen[i], true) {
            return None;
        }
    }
    let mut sign = 1;
    let mut visited = vec![false; n];
    for start in 0..n {
        let mut len = 0;
        let mut i = start;
        while !visited[i] {
            visited[i] = true;
            i = p[i] as usize - 1;
            len += 1;
        }
        if len > 0 && len % 2 == 0 {
            sign = -sign;
        }
    }
    Some(sign)
}

pub fn ideal_member(f: &Poly, spec: &IdealSpec) -> Result<bool, IdealError> {
    ComponentCache::global().ideal_member(f, spec)
}

pub fn order_mod_ideal(f: &Poly, spec: &IdealSpec) -> Result<Order, IdealError> {
    ComponentCache::global().order_mod_ideal(f, spec)
}

pub fn sign_congruence_check(sigma: &[u32; 5]) -> Result<bool, IdealError> {
    ComponentCache::global().sign_congruence_check(sigma)
}

#[cfg(test)]
mod tests;
