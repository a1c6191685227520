//! Free Lie bases in multilinear components and the presentation of the
//! degree-5 multilinear part of `T4` by generators `h_s` (`s` a
//! permutation of `1..5`) and the relation groups `Q` and `P`.
//!
//! `P5` is the span of multilinear words in `x1..x5`; every subgroup here
//! is a lattice in its 120 monomial coordinates. Monomials with a
//! repeated variable never occur in `P5`, so reducing modulo them is the
//! identity on these coordinates.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::IdealError;
use crate::freering::{commutator, nu, Monomial, MultiDegree, Poly};
use crate::ideals::{permutation_sign, ComponentBasis, ComponentCache, IdealSpec};
use crate::zlinalg::{
    combine, lattice_intersect, preimage, quotient_invariants, snf, solve_left, IntMatrix, Lattice, Order,
};

pub const MAX_VN: u32 = 7;

/// Permutations of `1..n` in lexicographic order.
pub fn permutations(n: u32) -> Vec<Vec<u32>> {
    fn rec(rest: &mut Vec<u32>, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            cur.push(x);
            rec(rest, cur, out);
            cur.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    rec(&mut (1..=n).collect(), &mut Vec::new(), &mut out);
    out
}

/// `[x_{i1}, ..., x_{ik}]`.
pub fn var_commutator(idx: &[u32]) -> Poly {
    let vars: Vec<Poly> = idx.iter().map(|&i| Poly::var(i)).collect();
    commutator(&vars).expect("at least one variable")
}

fn lattice_of(basis: &ComponentBasis, polys: &[Poly]) -> Lattice {
    let rows: Vec<Vec<BigInt>> = polys
        .iter()
        .map(|p| basis.coords(p).expect("element of the component"))
        .collect();
    Lattice::from_rows(basis.dim(), &rows).expect("rows have component width")
}

fn coord_matrix(basis: &ComponentBasis, polys: &[Poly]) -> IntMatrix {
    let rows = polys
        .iter()
        .map(|p| basis.coords(p).expect("element of the component"))
        .collect();
    IntMatrix::from_rows(basis.dim(), rows).expect("rows have component width")
}

fn all_ones(d: &[BigInt]) -> bool {
    d.iter().all(One::is_one)
}

fn leading_distinct(polys: &[Poly]) -> bool {
    let lead: HashSet<&Monomial> = polys.iter().filter_map(Poly::lex_leading_monomial).collect();
    lead.len() == polys.len()
}

/// The commutators `[x_n, x_{i1}, ..., x_{i(n-1)}]` over orderings of
/// `1..n-1`.
#[derive(Clone, Debug)]
pub struct LieBasisSet {
    pub n: u32,
    pub tails: Vec<Vec<u32>>,
    pub elements: Vec<Poly>,
}

pub fn vn_basis(n: u32) -> Result<LieBasisSet, IdealError> {
    if !(2..=MAX_VN).contains(&n) {
        return Err(IdealError::InvalidParameter(format!("n = {n} is outside 2..={MAX_VN}")));
    }
    let tails = permutations(n - 1);
    let elements = tails
        .iter()
        .map(|t| var_commutator(&[&[n][..], t].concat()))
        .collect();
    Ok(LieBasisSet { n, tails, elements })
}

#[derive(Clone, Debug, Serialize)]
pub struct VnReport {
    pub n: u32,
    pub size: usize,
    pub rank: usize,
    pub invariant_factors_all_one: bool,
    /// Each leading monomial is `x_n x_{i1} ... x_{i(n-1)}`.
    pub leading_terms_as_expected: bool,
    pub leading_terms_distinct: bool,
    /// The span is the whole multilinear Lie component.
    pub spans_lie_component: bool,
}

impl VnReport {
    pub fn ok(&self) -> bool {
        let expected: usize = (1..self.n as usize).product();
        self.size == expected
            && self.rank == expected
            && self.invariant_factors_all_one
            && self.leading_terms_as_expected
            && self.leading_terms_distinct
            && self.spans_lie_component
    }
}

pub fn verify_vn_basis(n: u32, cache: &ComponentCache) -> Result<VnReport, IdealError> {
    let set = vn_basis(n)?;
    let basis = ComponentBasis::new(&MultiDegree::multilinear(n));
    let m = coord_matrix(&basis, &set.elements);
    let s = snf(&m, false);
    let leading_terms_as_expected = set.elements.iter().zip(&set.tails).all(|(e, t)| {
        e.lex_leading_monomial() == Some(&Monomial::new([&[n][..], t].concat()))
    });
    let lie = cache.component_lattice(&IdealSpec::GammaN(n), &MultiDegree::multilinear(n));
    Ok(VnReport {
        n,
        size: set.elements.len(),
        rank: s.rank,
        invariant_factors_all_one: all_ones(&s.d),
        leading_terms_as_expected,
        leading_terms_distinct: leading_distinct(&set.elements),
        spans_lie_component: lattice_of(&basis, &set.elements) == lie.lattice,
    })
}

/// The subgroups of `P5` built from left-normed commutators.
#[derive(Clone, Debug)]
pub struct SectionThree {
    pub p5: ComponentBasis,
    /// Spanned by `x_{i1}[x_{i2},x_{i3},x_{i4},x_{i5}]`.
    pub w1: Lattice,
    /// `w1_parts[j-1]`: the generators of `w1` with leading factor `x_j`.
    pub w1_parts: Vec<Lattice>,
    /// Spanned by `[x_{i1},...,x_{i5}]` and `[x_{i1},x_{i2},x_{i3}][x_{i4},x_{i5}]`.
    pub w2: Lattice,
    pub b1: Vec<Poly>,
    pub b2: Vec<Poly>,
    pub b3: Vec<Poly>,
    /// Spanned by the five-fold commutators alone.
    pub u2_prime: Lattice,
}

impl SectionThree {
    pub fn coords(&self, p: &Poly) -> Vec<BigInt> {
        self.p5.coords(p).expect("element of P5")
    }

    pub fn b(&self) -> Vec<Poly> {
        [self.b1.clone(), self.b2.clone(), self.b3.clone()].concat()
    }

    /// `U = W1 + W2`.
    pub fn u(&self) -> Lattice {
        self.w1.sum(&self.w2).expect("same ambient")
    }
}

fn w1_generator(s: &[u32]) -> Poly {
    Poly::var(s[0]) * var_commutator(&s[1..])
}

fn product32(s: &[u32]) -> Poly {
    var_commutator(&s[..3]) * var_commutator(&s[3..])
}

pub fn build_section3() -> SectionThree {
    let p5 = ComponentBasis::new(&MultiDegree::multilinear(5));
    let perms5 = permutations(5);
    let perms4 = permutations(4);
    let w1_gens: Vec<Poly> = perms5.iter().map(|s| w1_generator(s)).collect();
    let w1_parts = (1..=5)
        .map(|j| {
            let part: Vec<Poly> = perms5
                .iter()
                .filter(|s| s[0] == j)
                .map(|s| w1_generator(s))
                .collect();
            lattice_of(&p5, &part)
        })
        .collect();
    let five: Vec<Poly> = perms5.iter().map(|s| var_commutator(s)).collect();
    let mut w2_gens = five.clone();
    w2_gens.extend(perms5.iter().map(|s| product32(s)));
    let b1 = perms4
        .iter()
        .map(|t| var_commutator(&[&[5][..], t].concat()))
        .collect();
    let b2 = perms4
        .iter()
        .filter(|i| i[0] > i[1] && i[0] > i[2])
        .map(|i| var_commutator(&i[..3]) * var_commutator(&[5, i[3]]))
        .collect();
    let b3 = perms4
        .iter()
        .filter(|i| i[0] > i[1])
        .map(|i| var_commutator(&i[..2]) * var_commutator(&[5, i[2], i[3]]))
        .collect();
    SectionThree {
        w1: lattice_of(&p5, &w1_gens),
        w1_parts,
        w2: lattice_of(&p5, &w2_gens),
        u2_prime: lattice_of(&p5, &five),
        b1,
        b2,
        b3,
        p5,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DisjointReport {
    pub w1_rank: usize,
    pub w1_part_ranks: Vec<usize>,
    pub w1_is_direct_sum: bool,
    pub w2_rank: usize,
    pub intersection_rank: usize,
    pub w1_self_intersection_is_w1: bool,
    /// `[x_{i1},x_{i2}][x_{i3},x_{i4},x_{i5}]` lies in `W2` for every ordering.
    pub swapped_products_in_w2: bool,
    pub nu_kills_w2: bool,
    pub nu_kills_other_parts: bool,
    /// `nu_j` is injective on the `j`-th part of `W1`.
    pub nu_injective_on_parts: bool,
}

impl DisjointReport {
    pub fn ok(&self) -> bool {
        self.intersection_rank == 0
            && self.w1_is_direct_sum
            && self.w1_self_intersection_is_w1
            && self.swapped_products_in_w2
            && self.nu_kills_w2
            && self.nu_kills_other_parts
            && self.nu_injective_on_parts
    }
}

fn lattice_polys(s3: &SectionThree, l: &Lattice) -> Vec<Poly> {
    l.basis_rows().iter().map(|r| s3.p5.poly(r)).collect()
}

pub fn verify_w1_w2_disjoint(s3: &SectionThree) -> DisjointReport {
    let inter = lattice_intersect(&s3.w1, &s3.w2).expect("same ambient");
    let part_ranks: Vec<usize> = s3.w1_parts.iter().map(Lattice::rank).collect();
    let w2_polys = lattice_polys(s3, &s3.w2);
    let nu_kills_w2 = (1..=5).all(|i| w2_polys.iter().all(|f| nu(f, i).is_zero()));
    let mut nu_kills_other_parts = true;
    let mut nu_injective_on_parts = true;
    for (j0, part) in s3.w1_parts.iter().enumerate() {
        let j = j0 as u32 + 1;
        let polys = lattice_polys(s3, part);
        nu_kills_other_parts &= (1..=5)
            .filter(|&i| i != j)
            .all(|i| polys.iter().all(|f| nu(f, i).is_zero()));
        // Images lie in the multilinear component on the other four letters.
        let rest = MultiDegree::from_pairs((1..=5).filter(|&i| i != j).map(|i| (i, 1)));
        let small = ComponentBasis::new(&rest);
        let images: Vec<Poly> = polys.iter().map(|f| nu(f, j)).collect();
        nu_injective_on_parts &= lattice_of(&small, &images).rank() == part.rank();
    }
    let swapped_products_in_w2 = permutations(5).iter().all(|s| {
        let f = var_commutator(&s[..2]) * var_commutator(&s[2..]);
        s3.w2.contains(&s3.coords(&f)).expect("same ambient")
    });
    DisjointReport {
        w1_rank: s3.w1.rank(),
        w1_is_direct_sum: part_ranks.iter().sum::<usize>() == s3.w1.rank(),
        w1_part_ranks: part_ranks,
        w2_rank: s3.w2.rank(),
        intersection_rank: inter.rank(),
        w1_self_intersection_is_w1: lattice_intersect(&s3.w1, &s3.w1).expect("same ambient") == s3.w1,
        swapped_products_in_w2,
        nu_kills_w2,
        nu_kills_other_parts,
        nu_injective_on_parts,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BBasisReport {
    pub b1: usize,
    pub b2: usize,
    pub b3: usize,
    pub rank: usize,
    pub invariant_factors_all_one: bool,
    pub leading_terms_distinct: bool,
    pub span_equals_w2: bool,
    pub u2_prime_equals_b1_span: bool,
    /// `U2 / U2'`: free with basis the images of the second and third sets.
    pub u2_over_u2_prime_free_rank: usize,
    pub u2_over_u2_prime_torsion_free: bool,
    /// `U1 + U2'` meets `U2` exactly in `U2'`.
    pub u1_plus_u2_prime_meets_u2_in_u2_prime: bool,
}

impl BBasisReport {
    pub fn ok(&self) -> bool {
        self.rank == self.b1 + self.b2 + self.b3
            && self.invariant_factors_all_one
            && self.leading_terms_distinct
            && self.span_equals_w2
            && self.u2_prime_equals_b1_span
            && self.u2_over_u2_prime_free_rank == self.b2 + self.b3
            && self.u2_over_u2_prime_torsion_free
            && self.u1_plus_u2_prime_meets_u2_in_u2_prime
    }
}

pub fn verify_b_basis(s3: &SectionThree) -> BBasisReport {
    let b = s3.b();
    let s = snf(&coord_matrix(&s3.p5, &b), false);
    let q = quotient_invariants(&s3.u2_prime, &s3.w2).expect("U2' inside W2");
    let u1_u2p = s3.w1.sum(&s3.u2_prime).expect("same ambient");
    BBasisReport {
        b1: s3.b1.len(),
        b2: s3.b2.len(),
        b3: s3.b3.len(),
        rank: s.rank,
        invariant_factors_all_one: all_ones(&s.d),
        leading_terms_distinct: leading_distinct(&b),
        span_equals_w2: lattice_of(&s3.p5, &b) == s3.w2,
        u2_prime_equals_b1_span: lattice_of(&s3.p5, &s3.b1) == s3.u2_prime,
        u2_over_u2_prime_free_rank: q.free_rank,
        u2_over_u2_prime_torsion_free: q.is_torsion_free(),
        u1_plus_u2_prime_meets_u2_in_u2_prime: lattice_intersect(&u1_u2p, &s3.w2).expect("same ambient")
            == s3.u2_prime,
    }
}

/// Generator `h_s` for a permutation `s` of `1..5`, with relation vectors
/// in the basis of all 120 generators.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub perms: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
    /// Relations generating `Q`, deduplicated.
    pub q: Vec<Vec<BigInt>>,
    /// Relations generating `P`: those of `Q` followed by the extra ones.
    pub p: Vec<Vec<BigInt>>,
    pub q_raw_count: usize,
    pub p_raw_count: usize,
}

impl Presentation {
    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perms.is_empty()
    }

    pub fn index_of(&self, s: &[u32]) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn unit(&self, s: &[u32]) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.len()];
        v[self.index_of(s).expect("permutation of 1..5")] = BigInt::one();
        v
    }

    pub fn q_lattice(&self) -> Lattice {
        Lattice::from_rows(self.len(), &self.q).expect("relation width")
    }

    pub fn p_lattice(&self) -> Lattice {
        Lattice::from_rows(self.len(), &self.p).expect("relation width")
    }

    /// Relations of `P` that are not relations of `Q`.
    pub fn p_extra(&self) -> &[Vec<BigInt>] {
        &self.p[self.q.len()..]
    }
}

type Schema = fn(&[u32]) -> Vec<Vec<u32>>;

fn q_schemas() -> [Schema; 3] {
    [
        |i| vec![i.to_vec(), vec![i[1], i[0], i[2], i[3], i[4]]],
        |i| vec![i.to_vec(), vec![i[0], i[1], i[2], i[4], i[3]]],
        |i| {
            vec![
                i.to_vec(),
                vec![i[1], i[2], i[0], i[3], i[4]],
                vec![i[2], i[0], i[1], i[3], i[4]],
            ]
        },
    ]
}

fn p_extra_schemas() -> [Schema; 2] {
    [
        |i| vec![i.to_vec(), vec![i[0], i[1], i[3], i[2], i[4]]],
        |i| vec![i.to_vec(), vec![i[0], i[3], i[2], i[1], i[4]]],
    ]
}

pub fn build_presentation() -> Presentation {
    let perms = permutations(5);
    let index: HashMap<Vec<u32>, usize> = perms.iter().enumerate().map(|(k, s)| (s.clone(), k)).collect();
    let instantiate = |schemas: &[Schema], seen: &mut HashSet<Vec<BigInt>>, out: &mut Vec<Vec<BigInt>>| {
        let mut raw = 0;
        for schema in schemas {
            for s in &perms {
                raw += 1;
                let mut v = vec![BigInt::zero(); perms.len()];
                for t in schema(s) {
                    v[index[&t]] += 1;
                }
                if seen.insert(v.clone()) {
                    out.push(v);
                }
            }
        }
        raw
    };
    let mut seen = HashSet::new();
    let mut q = Vec::new();
    let q_raw_count = instantiate(&q_schemas(), &mut seen, &mut q);
    let mut p = q.clone();
    let p_raw_count = q_raw_count + instantiate(&p_extra_schemas(), &mut seen, &mut p);
    Presentation {
        perms,
        index,
        q,
        p,
        q_raw_count,
        p_raw_count,
    }
}

/// Sign of the permutation indexing a generator.
pub fn mu(index: &[u32]) -> Result<i64, IdealError> {
    if index.len() != 5 {
        return Err(IdealError::InvalidParameter(format!("{index:?} has length {}", index.len())));
    }
    permutation_sign(index)
        .ok_or_else(|| IdealError::InvalidParameter(format!("{index:?} is not a permutation of 1..5")))
}

/// `mu` extended linearly to a vector over the generators.
pub fn mu_of(pres: &Presentation, v: &[BigInt]) -> BigInt {
    v.iter()
        .zip(&pres.perms)
        .map(|(c, s)| c * BigInt::from(mu(s).expect("generator index")))
        .sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct HReport {
    pub q_relations: usize,
    pub p_relations: usize,
    pub member: bool,
    pub mu_h: i64,
    pub mu_relations_in_3z: bool,
    /// gcd of `mu` over all relations of `P`.
    pub mu_image_generator: String,
    pub order: Order,
}

impl HReport {
    pub fn ok(&self) -> bool {
        !self.member
            && self.mu_h == 1
            && self.mu_relations_in_3z
            && self.mu_image_generator == "3"
            && self.order == Order::Finite(BigInt::from(3))
    }
}

pub fn verify_h_not_in_p(pres: &Presentation) -> HReport {
    let p = pres.p_lattice();
    let h = pres.unit(&[1, 2, 3, 4, 5]);
    let mus: Vec<BigInt> = pres.p.iter().map(|r| mu_of(pres, r)).collect();
    let g = mus.iter().fold(BigInt::zero(), |g, m| g.gcd(m));
    HReport {
        q_relations: pres.q.len(),
        p_relations: pres.p.len(),
        member: p.contains(&h).expect("width"),
        mu_h: mu(&[1, 2, 3, 4, 5]).expect("identity"),
        mu_relations_in_3z: mus.iter().all(|m: &BigInt| (m % 3u32).is_zero()),
        mu_image_generator: g.to_string(),
        order: p.order_of(&h).expect("width"),
    }
}

/// `psi(h_s) = [x_{s1},x_{s2},x_{s3}][x_{s4},x_{s5}] + (U1 + U2')`, in
/// coordinates of the free quotient `U / (U1 + U2')` with basis the images
/// of the second and third `B` sets.
#[derive(Clone, Debug)]
pub struct PsiMap {
    /// Basis of `U`: a basis of `W1`, then `B1`, `B2`, `B3`.
    pub u_basis: IntMatrix,
    /// Rows of `u_basis` spanning `U1 + U2'`.
    pub kept: usize,
    /// 120 x 20 matrix; row `k` is `psi(h_{perms[k]})`.
    pub matrix: IntMatrix,
}

impl PsiMap {
    /// Quotient coordinates of elements of `U`; `None` outside `U`.
    pub fn project(&self, ys: &[Vec<BigInt>]) -> Vec<Option<Vec<BigInt>>> {
        solve_left(&self.u_basis, ys)
            .expect("P5 width")
            .into_iter()
            .map(|x| x.map(|x| x[self.kept..].to_vec()))
            .collect()
    }
}

/// Fails if `W1` and `B` together are not a basis of `U`, in which case
/// the quotient coordinates would not be defined.
pub fn build_psi(s3: &SectionThree, pres: &Presentation) -> Result<PsiMap, String> {
    let mut rows = s3.w1.basis_rows();
    rows.extend(s3.b().iter().map(|b| s3.coords(b)));
    let kept = s3.w1.rank() + s3.b1.len();
    let n = rows.len();
    let u_basis = IntMatrix::from_rows(s3.p5.dim(), rows.clone()).expect("P5 width");
    if Lattice::from_rows(s3.p5.dim(), &rows).expect("P5 width") != s3.u() || s3.u().rank() != n {
        return Err("W1 basis and B are not a basis of U".into());
    }
    let map = PsiMap {
        u_basis,
        kept,
        matrix: IntMatrix::zeros(0, n - kept),
    };
    let images: Vec<Vec<BigInt>> = pres.perms.iter().map(|s| s3.coords(&product32(s))).collect();
    let coords: Option<Vec<Vec<BigInt>>> = map.project(&images).into_iter().collect();
    let coords = coords.ok_or("a product lies outside U")?;
    Ok(PsiMap {
        matrix: IntMatrix::from_rows(n - kept, coords).expect("quotient width"),
        ..map
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct KerPsiReport {
    pub quotient_rank: usize,
    pub psi_kills_q: bool,
    pub kernel_rank: usize,
    pub q_rank: usize,
    pub kernel_equals_q: bool,
    /// Images of the `C` sets are exactly the standard basis of the quotient.
    pub c_images_are_basis: bool,
}

impl KerPsiReport {
    pub fn ok(&self) -> bool {
        self.psi_kills_q && self.kernel_equals_q && self.c_images_are_basis
    }
}

/// The `C` generators in the order of the quotient basis.
fn c_generators() -> Vec<Vec<u32>> {
    let perms4 = permutations(4);
    let c2 = perms4
        .iter()
        .filter(|i| i[0] > i[1] && i[0] > i[2])
        .map(|i| vec![i[0], i[1], i[2], 5, i[3]]);
    let c3 = perms4
        .iter()
        .filter(|i| i[0] > i[1])
        .map(|i| vec![5, i[2], i[3], i[0], i[1]]);
    c2.chain(c3).collect()
}

pub fn verify_ker_psi(pres: &Presentation, psi: &PsiMap) -> KerPsiReport {
    let q = pres.q_lattice();
    let psi_kills_q = pres
        .q
        .iter()
        .all(|r| combine(r, &psi.matrix).iter().all(Zero::is_zero));
    let kernel = crate::zlinalg::left_kernel(&psi.matrix);
    let c_images_are_basis = c_generators().iter().enumerate().all(|(k, s)| {
        let img = psi.matrix.row(pres.index_of(s).expect("permutation"));
        img.iter()
            .enumerate()
            .all(|(j, x)| *x == BigInt::from(i64::from(j == k)))
    });
    KerPsiReport {
        quotient_rank: psi.matrix.ncols(),
        psi_kills_q,
        kernel_rank: kernel.rank(),
        q_rank: q.rank(),
        kernel_equals_q: kernel == q,
        c_images_are_basis,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub t4_rank: usize,
    pub u_rank: usize,
    pub u1_plus_u2_prime_inside_t4: bool,
    pub t4_inside_u: bool,
    /// Each extra relation of `P` maps into the image of `T4`.
    pub p_extra_images_in_t4: bool,
    pub kernel_equals_p: bool,
    pub h_in_p: bool,
    pub v_in_t4: bool,
    pub pipeline_order: Order,
    pub direct_order: Order,
}

impl PipelineReport {
    pub fn ok(&self) -> bool {
        self.u1_plus_u2_prime_inside_t4
            && self.t4_inside_u
            && self.p_extra_images_in_t4
            && self.kernel_equals_p
            && !self.h_in_p
            && !self.v_in_t4
            && self.pipeline_order == self.direct_order
            && self.pipeline_order == Order::Finite(BigInt::from(3))
    }
}

/// The end-to-end argument that `v` is not in `T4`: the kernel of
/// `H -> U / (T4 in P5)` is `P`, and `h_12345` is not in `P`.
pub fn verify_pipeline(
    s3: &SectionThree,
    pres: &Presentation,
    psi: &PsiMap,
    cache: &ComponentCache,
) -> PipelineReport {
    let t4 = cache.component_lattice(&IdealSpec::Tn(4), &MultiDegree::multilinear(5));
    let u = s3.u();
    let u1_u2p = s3.w1.sum(&s3.u2_prime).expect("same ambient");
    let t4_rows = t4.lattice.basis_rows();
    let projected: Option<Vec<Vec<BigInt>>> = psi.project(&t4_rows).into_iter().collect();
    let t4_inside_u = projected.is_some();
    let (p_extra_images_in_t4, kernel_equals_p) = match projected {
        Some(rows) => {
            let image = Lattice::from_rows(psi.matrix.ncols(), &rows).expect("quotient width");
            let extra_ok = pres
                .p_extra()
                .iter()
                .all(|r| image.contains(&combine(r, &psi.matrix)).expect("width"));
            let ker = preimage(&psi.matrix, &image).expect("width");
            (extra_ok, ker == pres.p_lattice())
        }
        None => (false, false),
    };
    let p = pres.p_lattice();
    let h = pres.unit(&[1, 2, 3, 4, 5]);
    let v = product32(&[1, 2, 3, 4, 5]);
    PipelineReport {
        t4_rank: t4.rank(),
        u_rank: u.rank(),
        u1_plus_u2_prime_inside_t4: u1_u2p.is_sublattice_of(&t4.lattice).expect("same ambient"),
        t4_inside_u,
        p_extra_images_in_t4,
        kernel_equals_p,
        h_in_p: p.contains(&h).expect("width"),
        v_in_t4: t4.contains(&v).expect("P5"),
        pipeline_order: p.order_of(&h).expect("width"),
        direct_order: cache.order_mod_ideal(&v, &IdealSpec::Tn(4)).expect("graded"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    struct Fixture {
        s3: SectionThree,
        pres: Presentation,
        psi: PsiMap,
    }

    fn fixture() -> &'static Fixture {
        static F: OnceLock<Fixture> = OnceLock::new();
        F.get_or_init(|| {
            let s3 = build_section3();
            let pres = build_presentation();
            let psi = build_psi(&s3, &pres).expect("basis of U");
            Fixture { s3, pres, psi }
        })
    }

    #[test]
    fn small_vn_sets() {
        let v2 = vn_basis(2).unwrap();
        assert_eq!(v2.elements, vec![var_commutator(&[2, 1])]);
        let v3 = vn_basis(3).unwrap();
        assert_eq!(v3.elements, vec![var_commutator(&[3, 1, 2]), var_commutator(&[3, 2, 1])]);
        assert_eq!(vn_basis(5).unwrap().elements.len(), 24);
        assert!(vn_basis(1).is_err());
        assert!(vn_basis(8).is_err());
    }

    #[test]
    fn vn_reports() {
        let cache = ComponentCache::new();
        for n in 2..=5 {
            let r = verify_vn_basis(n, &cache).unwrap();
            assert!(r.ok(), "{r:?}");
        }
        let lead = var_commutator(&[5, 2, 1, 3, 4]).lex_leading_monomial().cloned();
        assert_eq!(lead, Some(Monomial::new(vec![5, 2, 1, 3, 4])));
    }

    #[test]
    fn section_three_counts() {
        let f = fixture();
        assert_eq!((f.s3.b1.len(), f.s3.b2.len(), f.s3.b3.len()), (24, 8, 12));
        assert!(f.s3.b().iter().all(|b| b.homogeneous_degree() == Some(MultiDegree::multilinear(5))));
        let r = verify_w1_w2_disjoint(&f.s3);
        assert!(r.ok(), "{r:?}");
        assert_eq!(r.w1_part_ranks, vec![6; 5]);
        assert_eq!(r.w1_rank, 30);
        assert_eq!(r.w2_rank, 44);
        let b = verify_b_basis(&f.s3);
        assert!(b.ok(), "{b:?}");
    }

    #[test]
    fn presentation_shape() {
        let f = fixture();
        assert_eq!(f.pres.len(), 120);
        assert_eq!(f.pres.q_raw_count, 360);
        assert_eq!(f.pres.p_raw_count, 600);
        assert!(f.pres.q_lattice().is_sublattice_of(&f.pres.p_lattice()).unwrap());
        for r in &f.pres.p {
            let ones = r.iter().filter(|x| x.is_one()).count();
            assert!(r.iter().all(|x| x.is_zero() || x.is_one()));
            assert!(ones == 2 || ones == 3);
        }
    }

    #[test]
    fn mu_examples() {
        assert_eq!(mu(&[1, 2, 3, 4, 5]).unwrap(), 1);
        assert_eq!(mu(&[2, 1, 3, 4, 5]).unwrap(), -1);
        assert!(mu(&[1, 2, 3]).is_err());
        assert!(mu(&[1, 1, 3, 4, 5]).is_err());
        let f = fixture();
        let jacobi = &f.pres.q[f.pres.q.len() - 1];
        assert_eq!(mu_of(&f.pres, jacobi).abs(), BigInt::from(3));
    }

    #[test]
    fn h_not_in_p() {
        let r = verify_h_not_in_p(&fixture().pres);
        assert!(r.ok(), "{r:?}");
    }

    #[test]
    fn kernel_of_psi() {
        let f = fixture();
        let r = verify_ker_psi(&f.pres, &f.psi);
        assert!(r.ok(), "{r:?}");
        assert_eq!(r.quotient_rank, 20);
    }

    #[test]
    fn pipeline_agrees_with_direct_order() {
        let f = fixture();
        let r = verify_pipeline(&f.s3, &f.pres, &f.psi, &ComponentCache::new());
        assert!(r.ok(), "{r:?}");
    }

    proptest! {
        #[test]
        fn mu_is_additive(a in prop::collection::vec(-3i64..4, 120), b in prop::collection::vec(-3i64..4, 120)) {
            let pres = &fixture().pres;
            let a: Vec<BigInt> = a.into_iter().map(BigInt::from).collect();
            let b: Vec<BigInt> = b.into_iter().map(BigInt::from).collect();
            let s: Vec<BigInt> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            prop_assert_eq!(mu_of(pres, &s), mu_of(pres, &a) + mu_of(pres, &b));
        }
    }
}
