//! Normal forms modulo `T32` and the decomposition `T32 = T4 + I32`.
//!
//! `D'` consists of `1`, brackets `[x_i,x_j]`, triple brackets and products
//! of brackets under index constraints; `D` is `D'` with nondecreasing
//! monomial prefixes. In each multidegree component, the images of `D`
//! should form a basis of the (free) quotient by `T32`.

use std::fmt;

use num_bigint::BigInt;
use serde::Serialize;

use crate::freering::{xi, Monomial, MultiDegree, Poly};
use crate::ideals::{enumerate_generators, ComponentCache, IdealSpec};
use crate::liebasis::var_commutator;
use crate::par::Exec;
use crate::zlinalg::{quotient_invariants, Lattice, Order};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum DClass {
    D0,
    D1,
    D2,
    D3,
    D4,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DPrimeElement {
    pub class: DClass,
    pub indices: Vec<u32>,
    pub value: Poly,
}

/// Index constraints of each class of `D'`.
pub fn d_prime_admissible(class: DClass, i: &[u32]) -> bool {
    match class {
        DClass::D0 => i.is_empty(),
        DClass::D1 => i.len() == 2 && i[0] < i[1],
        DClass::D2 => i.len() == 3 && i[0] < i[1] && i[0] <= i[2],
        DClass::D3 => {
            i.len() == 4 && i[0] < i[1] && i[2] < i[3] && i[0] <= i[2] && (i[0] != i[2] || i[1] <= i[3])
        }
        DClass::D4 => i.len() >= 6 && i.len().is_multiple_of(2) && i.windows(2).all(|w| w[0] < w[1]),
    }
}

impl DPrimeElement {
    pub fn new(class: DClass, indices: Vec<u32>) -> Option<Self> {
        if !d_prime_admissible(class, &indices) {
            return None;
        }
        let value = match class {
            DClass::D0 => Poly::one(),
            DClass::D1 | DClass::D2 => var_commutator(&indices),
            DClass::D3 | DClass::D4 => indices
                .chunks(2)
                .map(var_commutator)
                .fold(Poly::one(), |acc, b| acc * b),
        };
        Some(DPrimeElement { class, indices, value })
    }

    pub fn multidegree(&self) -> MultiDegree {
        MultiDegree::from_pairs(self.indices.iter().map(|&i| (i, 1)))
    }
}

impl fmt::Display for DPrimeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let x = |i: &u32| format!("x{i}");
        match self.class {
            DClass::D0 => f.write_str("1"),
            DClass::D1 | DClass::D2 => {
                write!(f, "[{}]", self.indices.iter().map(x).collect::<Vec<_>>().join(","))
            }
            DClass::D3 | DClass::D4 => {
                for c in self.indices.chunks(2) {
                    write!(f, "[{},{}]", x(&c[0]), x(&c[1]))?;
                }
                Ok(())
            }
        }
    }
}

/// `x_{i1}...x_{ik} d'` with `i1 <= ... <= ik`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DElement {
    pub prefix: Monomial,
    pub tail: DPrimeElement,
    pub value: Poly,
}

impl fmt::Display for DElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p: Vec<String> = self.prefix.letters().iter().map(|i| format!("x{i}")).collect();
        match (p.is_empty(), self.tail.class) {
            (true, _) => write!(f, "{}", self.tail),
            (false, DClass::D0) => f.write_str(&p.join("*")),
            (false, _) => write!(f, "{}*{}", p.join("*"), self.tail),
        }
    }
}

fn tuples(letters: &[u32], k: usize, out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for &l in letters {
        cur.push(l);
        tuples(letters, k, out, cur);
        cur.pop();
    }
}

/// `D'` elements whose multidegree is at most `mu` letterwise.
pub fn enumerate_d_prime_within(mu: &MultiDegree) -> Vec<DPrimeElement> {
    let letters: Vec<u32> = mu.support().collect();
    let fits = |idx: &[u32]| letters.iter().all(|&l| idx.iter().filter(|&&i| i == l).count() as u32 <= mu.get(l));
    let mut out = vec![DPrimeElement::new(DClass::D0, vec![]).expect("unit")];
    for (class, k) in [(DClass::D1, 2), (DClass::D2, 3), (DClass::D3, 4)] {
        if k > mu.total() as usize {
            continue;
        }
        let mut ts = Vec::new();
        tuples(&letters, k, &mut ts, &mut Vec::new());
        out.extend(
            ts.into_iter()
                .filter(|t| fits(t))
                .filter_map(|t| DPrimeElement::new(class, t)),
        );
    }
    // Strictly increasing index sets of even size >= 6.
    let n = letters.len();
    for mask in 0u64..(1u64 << n) {
        let size = mask.count_ones() as usize;
        if size >= 6 && size.is_multiple_of(2) {
            let idx: Vec<u32> = (0..n).filter(|b| mask >> b & 1 == 1).map(|b| letters[b]).collect();
            out.extend(DPrimeElement::new(DClass::D4, idx));
        }
    }
    out
}

/// All elements of `D` of multidegree exactly `mu`, ordered by class and
/// then by tail indices.
pub fn enumerate_d(mu: &MultiDegree) -> Vec<DElement> {
    let mut out: Vec<DElement> = enumerate_d_prime_within(mu)
        .into_iter()
        .map(|tail| {
            let rest = mu.checked_sub(&tail.multidegree()).expect("tail fits");
            let word: Vec<u32> = rest
                .iter()
                .flat_map(|(v, e)| std::iter::repeat_n(v, e as usize))
                .collect();
            let prefix = Monomial::new(word);
            let value = Poly::from_monomial(prefix.clone()) * tail.value.clone();
            DElement { prefix, tail, value }
        })
        .collect();
    out.sort_by(|a, b| (a.tail.class, &a.tail.indices).cmp(&(b.tail.class, &b.tail.indices)));
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct GradedRecord {
    pub multidegree: String,
    pub dim: usize,
    pub t32_rank: usize,
    pub d_count: usize,
    pub free_rank: usize,
    pub torsion: Vec<String>,
    /// `D` together with `T32` spans the whole component.
    pub spans: bool,
    /// `D` is independent modulo `T32`.
    pub independent: bool,
}

impl GradedRecord {
    pub fn ok(&self) -> bool {
        self.torsion.is_empty() && self.free_rank == self.d_count && self.spans && self.independent
    }
}

pub fn verify_graded_component(mu: &MultiDegree, cache: &ComponentCache) -> GradedRecord {
    let t32 = cache.component_lattice(&IdealSpec::T32, mu);
    let dim = t32.dim();
    let d = enumerate_d(mu);
    let rows: Vec<Vec<BigInt>> = d
        .iter()
        .map(|e| t32.basis.coords(&e.value).expect("element of the component"))
        .collect();
    let full = Lattice::full(dim);
    let q = quotient_invariants(&t32.lattice, &full).expect("inside the component");
    let joint = t32
        .lattice
        .sum(&Lattice::from_rows(dim, &rows).expect("component width"))
        .expect("same ambient");
    let over = quotient_invariants(&t32.lattice, &joint).expect("T32 inside the joint span");
    GradedRecord {
        multidegree: mu.to_string(),
        dim,
        t32_rank: t32.rank(),
        d_count: d.len(),
        free_rank: q.free_rank,
        torsion: q.torsion.iter().map(ToString::to_string).collect(),
        spans: joint.is_full(),
        independent: over.free_rank == d.len() && over.is_torsion_free(),
    }
}

/// Multidegrees over `x1..x_max_var` with total at most `max_total`.
pub fn bounded_multidegrees(max_var: u32, max_total: u32) -> Vec<MultiDegree> {
    MultiDegree::all_bounded(max_var, max_total)
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport<R> {
    pub components: usize,
    pub failures: Vec<R>,
    /// One record per component; omitted from JSON witnesses by callers.
    #[serde(skip)]
    pub records: Vec<R>,
}

impl<R> SweepReport<R> {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

fn sweep<R, F>(mus: &[MultiDegree], exec: Exec, f: F, ok: fn(&R) -> bool) -> SweepReport<R>
where
    R: Clone + Send,
    F: Fn(&MultiDegree) -> R + Sync + Send,
{
    let records = exec.map(mus, f);
    SweepReport {
        components: records.len(),
        failures: records.iter().filter(|r| !ok(r)).cloned().collect(),
        records,
    }
}

pub fn verify_graded_basis(
    mus: &[MultiDegree],
    exec: Exec,
    cache: &ComponentCache,
) -> SweepReport<GradedRecord> {
    sweep(mus, exec, |mu| verify_graded_component(mu, cache), GradedRecord::ok)
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionRecord {
    pub multidegree: String,
    pub t32_rank: usize,
    pub t4_rank: usize,
    pub i32_rank: usize,
    pub equal: bool,
    /// Every generator of `I32` involves a variable beyond `x4`.
    pub xi_kills_i32: bool,
}

impl DecompositionRecord {
    pub fn ok(&self) -> bool {
        self.equal && self.xi_kills_i32
    }
}

pub fn verify_decomposition_component(mu: &MultiDegree, cache: &ComponentCache) -> DecompositionRecord {
    let t32 = cache.component_lattice(&IdealSpec::T32, mu);
    let t4 = cache.component_lattice(&IdealSpec::Tn(4), mu);
    let i32 = cache.component_lattice(&IdealSpec::I32, mu);
    let sum = t4.lattice.sum(&i32.lattice).expect("same component");
    DecompositionRecord {
        multidegree: mu.to_string(),
        t32_rank: t32.rank(),
        t4_rank: t4.rank(),
        i32_rank: i32.rank(),
        equal: sum == t32.lattice,
        xi_kills_i32: enumerate_generators(&IdealSpec::I32, mu)
            .iter()
            .all(|g| xi(g, 4).is_zero()),
    }
}

pub fn verify_t32_decomposition(
    mus: &[MultiDegree],
    exec: Exec,
    cache: &ComponentCache,
) -> SweepReport<DecompositionRecord> {
    sweep(mus, exec, |mu| verify_decomposition_component(mu, cache), DecompositionRecord::ok)
}

#[derive(Clone, Debug, Serialize)]
pub struct PowerProductRecord {
    pub multidegree: String,
    pub dim: usize,
    pub t4_rank: usize,
    pub equal: bool,
    pub torsion: Vec<String>,
}

impl PowerProductRecord {
    pub fn ok(&self) -> bool {
        self.equal && self.torsion.is_empty()
    }
}

pub fn power_product_component(mu: &MultiDegree, cache: &ComponentCache) -> PowerProductRecord {
    let t4 = cache.component_lattice(&IdealSpec::Tn(4), mu);
    let t32 = cache.component_lattice(&IdealSpec::T32, mu);
    let q = quotient_invariants(&t4.lattice, &Lattice::full(t4.dim())).expect("inside the component");
    PowerProductRecord {
        multidegree: mu.to_string(),
        dim: t4.dim(),
        t4_rank: t4.rank(),
        equal: t4.lattice == t32.lattice,
        torsion: q.torsion.iter().map(ToString::to_string).collect(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PowerProductReport {
    pub m: u32,
    pub sweep: SweepReport<PowerProductRecord>,
    /// The multilinear component in five letters, where the two ideals differ.
    pub contrast: PowerProductRecord,
}

impl PowerProductReport {
    pub fn ok(&self) -> bool {
        self.sweep.ok() && !self.contrast.equal && !self.contrast.torsion.is_empty()
            && self.contrast.torsion.iter().all(|t| t == "3")
    }
}

pub fn verify_power_products(m: u32, max_total: u32, exec: Exec, cache: &ComponentCache) -> PowerProductReport {
    let mus = bounded_multidegrees(m, max_total);
    PowerProductReport {
        m,
        sweep: sweep(&mus, exec, |mu| power_product_component(mu, cache), PowerProductRecord::ok),
        contrast: power_product_component(&MultiDegree::multilinear(5), cache),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NonMemberRecord {
    pub element: String,
    pub order: Order,
}

/// Elements whose multiples all avoid `T32`.
pub fn nonmember_instances() -> Vec<(String, Poly)> {
    let b = |i: &[u32]| var_commutator(i);
    vec![
        ("[x1,x3]*[x2,x3]".into(), b(&[1, 3]) * b(&[2, 3])),
        ("[x1,x2]^2".into(), b(&[1, 2]).pow(2)),
        (
            "[x1,x3]*[x2,x4] + [x1,x4]*[x2,x3]".into(),
            b(&[1, 3]) * b(&[2, 4]) + b(&[1, 4]) * b(&[2, 3]),
        ),
    ]
}

pub fn verify_nonmembership_instances(cache: &ComponentCache) -> Vec<NonMemberRecord> {
    nonmember_instances()
        .into_iter()
        .map(|(element, f)| NonMemberRecord {
            order: cache.order_mod_ideal(&f, &IdealSpec::T32).expect("homogeneous"),
            element,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideals::ComponentBasis;
    use proptest::prelude::*;

    fn md(p: &[(u32, u32)]) -> MultiDegree {
        MultiDegree::from_pairs(p.iter().copied())
    }

    #[test]
    fn constraint_checker() {
        assert!(d_prime_admissible(DClass::D1, &[1, 2]));
        assert!(!d_prime_admissible(DClass::D1, &[2, 1]));
        assert!(d_prime_admissible(DClass::D2, &[1, 2, 1]));
        assert!(!d_prime_admissible(DClass::D2, &[2, 3, 1]));
        assert!(d_prime_admissible(DClass::D3, &[1, 3, 1, 3]));
        assert!(!d_prime_admissible(DClass::D3, &[1, 3, 1, 2]));
        assert!(!d_prime_admissible(DClass::D3, &[2, 3, 1, 4]));
        assert!(d_prime_admissible(DClass::D4, &[1, 2, 3, 4, 5, 6]));
        assert!(!d_prime_admissible(DClass::D4, &[1, 2, 3, 4]));
        assert!(!d_prime_admissible(DClass::D4, &[1, 2, 4, 3, 5, 6]));
        assert!(DPrimeElement::new(DClass::D3, vec![2, 3, 1, 4]).is_none());
    }

    #[test]
    fn small_d_sets() {
        let one = enumerate_d(&md(&[(1, 1)]));
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].to_string(), "x1");
        let two: Vec<String> = enumerate_d(&md(&[(1, 1), (2, 1)])).iter().map(ToString::to_string).collect();
        assert_eq!(two, vec!["x1*x2", "[x1,x2]"]);
        assert_eq!(enumerate_d(&MultiDegree::zero()).len(), 1);
        // Prefix-only, three brackets with a one-letter prefix, two triple brackets.
        assert_eq!(enumerate_d(&MultiDegree::multilinear(3)).len(), 6);
    }

    #[test]
    fn d_elements_have_their_multidegree() {
        for mu in bounded_multidegrees(4, 5) {
            for e in enumerate_d(&mu) {
                assert_eq!(e.value.homogeneous_degree(), Some(mu.clone()), "{e}");
                assert!(e.prefix.letters().windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }

    #[test]
    fn p5_count_matches_quotient_rank() {
        let cache = ComponentCache::new();
        let r = verify_graded_component(&MultiDegree::multilinear(5), &cache);
        assert!(r.ok(), "{r:?}");
        assert_eq!(r.dim, 120);
        assert_eq!(r.d_count, 46);
        assert_eq!(r.t32_rank + r.d_count, r.dim);
    }

    #[test]
    fn graded_examples() {
        let cache = ComponentCache::new();
        for mu in [MultiDegree::multilinear(3), md(&[(1, 2), (2, 1), (3, 1), (4, 1)]), md(&[(1, 3), (2, 2)])] {
            let r = verify_graded_component(&mu, &cache);
            assert!(r.ok(), "{r:?}");
        }
    }

    #[test]
    fn decomposition_examples() {
        let cache = ComponentCache::new();
        let p5 = verify_decomposition_component(&MultiDegree::multilinear(5), &cache);
        assert!(p5.ok(), "{p5:?}");
        assert_eq!(p5.i32_rank, 1);
        let rep = verify_decomposition_component(&md(&[(1, 2), (2, 1), (3, 1), (4, 1)]), &cache);
        assert!(rep.ok());
        assert_eq!(rep.i32_rank, 0);
        assert_eq!(rep.t32_rank, rep.t4_rank);
    }

    #[test]
    fn power_products_small() {
        let cache = ComponentCache::new();
        let r = verify_power_products(2, 5, Exec::Sequential, &cache);
        assert!(r.ok(), "{:?}", r.sweep.failures);
        assert_eq!(r.contrast.torsion, vec!["3".to_string()]);
    }

    #[test]
    fn nonmembers_have_infinite_order() {
        for r in verify_nonmembership_instances(&ComponentCache::new()) {
            assert_eq!(r.order, Order::Infinite, "{}", r.element);
        }
    }

    // Oracle: the T32 quotient rank from a rank computation over a prime
    // field, independent of the Smith form.
    fn rank_mod_p(rows: &[Vec<BigInt>], cols: usize) -> usize {
        const P: i64 = 2_147_483_647;
        let mut m: Vec<Vec<i64>> = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| {
                        let v: BigInt = ((x % P) + P) % P;
                        i64::try_from(v).unwrap()
                    })
                    .collect()
            })
            .collect();
        let inv = |a: i64| {
            let (mut b, mut e, mut r) = (a, P - 2, 1i64);
            while e > 0 {
                if e & 1 == 1 {
                    r = r * b % P;
                }
                b = b * b % P;
                e >>= 1;
            }
            r
        };
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..m.len()).find(|&i| m[i][c] != 0) else { continue };
            m.swap(rank, p);
            let iv = inv(m[rank][c]);
            for i in 0..m.len() {
                if i != rank && m[i][c] != 0 {
                    let f = m[i][c] * iv % P;
                    for j in 0..cols {
                        m[i][j] = ((m[i][j] - f * m[rank][j]) % P + P) % P;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn d_count_is_codimension_mod_p(exps in prop::collection::vec(0u32..3, 4)) {
            let mu = MultiDegree::from_pairs((1..=4).zip(exps));
            prop_assume!(mu.total() <= 5);
            let basis = ComponentBasis::new(&mu);
            let gens: Vec<Vec<BigInt>> = enumerate_generators(&IdealSpec::T32, &mu)
                .iter()
                .map(|g| basis.coords(g).unwrap())
                .collect();
            let r = rank_mod_p(&gens, basis.dim());
            prop_assert_eq!(r + enumerate_d(&mu).len(), basis.dim());
            let d_rows: Vec<Vec<BigInt>> = enumerate_d(&mu).iter().map(|e| basis.coords(&e.value).unwrap()).collect();
            let all: Vec<Vec<BigInt>> = gens.iter().chain(&d_rows).cloned().collect();
            prop_assert_eq!(rank_mod_p(&all, basis.dim()), basis.dim());
        }
    }
}
