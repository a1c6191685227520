//! Named verification suites, one per claim, with JSON witnesses.

use std::time::Instant;

use num_bigint::BigInt;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{ClaimError, IdealError};
use crate::freering::{commutator, Monomial, MultiDegree, Poly};
use crate::ideals::{ComponentCache, IdealSpec};
use crate::liebasis::{self, permutations, var_commutator};
use crate::par::Exec;
use crate::t32basis;
use crate::zlinalg::{quotient_invariants, snf, IntMatrix, Order};

pub const REGISTRY: [&str; 17] = [
    "theorem-1.1",
    "prop-1.4",
    "prop-1.5",
    "lemma-2.1",
    "eq-2-signs",
    "remark-2.3-n5",
    "lemma-3.1",
    "lemma-3.2",
    "lemma-3.3",
    "lemma-4.1",
    "lemma-4.2",
    "prop-2.5",
    "lemma-5.1",
    "cor-5.2",
    "nonmember-5",
    "theorem-1.3-graded",
    "lemma-6.1",
];

/// Sweeps whose conclusions need degree-6 components never go below this.
pub const DEGREE_SIX: u32 = 6;

#[derive(Clone, Debug)]
pub struct Config {
    pub max_degree: u32,
    pub max_var: u32,
    pub exec: Exec,
    /// Include Smith transforms in witnesses where a Smith form is taken.
    pub transforms: bool,
    /// Random instances per identity check.
    pub samples: usize,
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            max_degree: 5,
            max_var: 5,
            exec: Exec::Parallel,
            transforms: false,
            samples: 24,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Verified,
    Failed,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub claim_id: String,
    pub status: Status,
    pub witnesses: Value,
    pub elapsed_ms: u64,
}

impl VerificationReport {
    pub fn verified(&self) -> bool {
        self.status == Status::Verified
    }
}

fn outcome(ok: bool, witnesses: Value) -> (Status, Value) {
    (if ok { Status::Verified } else { Status::Failed }, witnesses)
}

fn to_json<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

pub fn verify(id: &str, cfg: &Config, cache: &ComponentCache) -> Result<VerificationReport, ClaimError> {
    let start = Instant::now();
    let (status, witnesses) = match id {
        "theorem-1.1" => theorem_1_1(cache)?,
        "prop-1.4" => prop_1_4(cfg, cache),
        "prop-1.5" => prop_1_5(cache)?,
        "lemma-2.1" => lemma_2_1(cfg, cache)?,
        "eq-2-signs" => eq_2_signs(cache)?,
        "remark-2.3-n5" => remark_n5(cache)?,
        "lemma-3.1" => lemma_3_1(cfg, cache)?,
        "lemma-3.2" => {
            let r = liebasis::verify_w1_w2_disjoint(&liebasis::build_section3());
            outcome(r.ok(), to_json(&r))
        }
        "lemma-3.3" => {
            let r = liebasis::verify_b_basis(&liebasis::build_section3());
            outcome(r.ok(), to_json(&r))
        }
        "lemma-4.1" => {
            let s3 = liebasis::build_section3();
            let pres = liebasis::build_presentation();
            match liebasis::build_psi(&s3, &pres) {
                Ok(psi) => {
                    let r = liebasis::verify_ker_psi(&pres, &psi);
                    outcome(r.ok(), to_json(&r))
                }
                Err(e) => outcome(false, json!({ "error": e })),
            }
        }
        "lemma-4.2" => {
            let r = liebasis::verify_h_not_in_p(&liebasis::build_presentation());
            outcome(r.ok(), to_json(&r))
        }
        "prop-2.5" => {
            let s3 = liebasis::build_section3();
            let pres = liebasis::build_presentation();
            match liebasis::build_psi(&s3, &pres) {
                Ok(psi) => {
                    let r = liebasis::verify_pipeline(&s3, &pres, &psi, cache);
                    outcome(r.ok(), to_json(&r))
                }
                Err(e) => outcome(false, json!({ "error": e })),
            }
        }
        "lemma-5.1" => lemma_5_1(cfg, cache)?,
        "cor-5.2" => cor_5_2(cfg, cache)?,
        "nonmember-5" => {
            let r = t32basis::verify_nonmembership_instances(cache);
            outcome(r.iter().all(|x| x.order == Order::Infinite), json!({ "instances": r }))
        }
        "theorem-1.3-graded" => theorem_1_3(cfg, cache),
        "lemma-6.1" => {
            let mus = MultiDegree::all_bounded(DEGREE_SIX, cfg.max_degree.max(DEGREE_SIX));
            let r = t32basis::verify_t32_decomposition(&mus, cfg.exec, cache);
            outcome(r.ok(), to_json(&r))
        }
        other => return Err(ClaimError::UnknownClaim(other.to_string())),
    };
    Ok(VerificationReport {
        claim_id: id.to_string(),
        status,
        witnesses,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

/// Runs every registered claim, in registry order.
pub fn verify_all(cfg: &Config, cache: &ComponentCache) -> Vec<VerificationReport> {
    REGISTRY
        .iter()
        .map(|id| verify(id, cfg, cache).expect("registered claim"))
        .collect()
}

/// `v = [x1,x2,x3][x4,x5]`.
pub fn v() -> Poly {
    var_commutator(&[1, 2, 3]) * var_commutator(&[4, 5])
}

/// `w = [x1[x2,x3,x4],x5]`.
pub fn w() -> Poly {
    let inner = Poly::var(1) * var_commutator(&[2, 3, 4]);
    commutator(&[inner, Poly::var(5)]).expect("two arguments")
}

fn three(p: &Poly) -> Poly {
    p.scale(&BigInt::from(3))
}

fn theorem_1_1(cache: &ComponentCache) -> Result<(Status, Value), IdealError> {
    let t4 = IdealSpec::Tn(4);
    let order = cache.order_mod_ideal(&v(), &t4)?;
    let v_member = cache.ideal_member(&v(), &t4)?;
    let three_v_member = cache.ideal_member(&three(&v()), &t4)?;
    // Multilinear part of the quotient of the two ideals.
    let p5 = MultiDegree::multilinear(5);
    let small = cache.component_lattice(&t4, &p5);
    let big = cache.component_lattice(&IdealSpec::T32, &p5);
    let q = quotient_invariants(&small.lattice, &big.lattice)?;
    let cor_ok = q.free_rank == 0 && !q.torsion.is_empty() && q.torsion.iter().all(|t| *t == BigInt::from(3));
    let ok = order == Order::Finite(BigInt::from(3)) && !v_member && three_v_member && cor_ok;
    Ok(outcome(
        ok,
        json!({
            "order": order,
            "v_member": v_member,
            "three_v_member": three_v_member,
            "t32_over_t4_p5": q,
            "three_torsion_multiplicity": q.torsion.len(),
        }),
    ))
}

fn prop_1_4(cfg: &Config, cache: &ComponentCache) -> (Status, Value) {
    let bound = cfg.max_degree.max(DEGREE_SIX);
    let reports: Vec<t32basis::PowerProductReport> = (2..=4)
        .map(|m| t32basis::verify_power_products(m, bound, cfg.exec, cache))
        .collect();
    let ok = reports.iter().all(t32basis::PowerProductReport::ok);
    outcome(ok, json!({ "max_total_degree": bound, "by_m": reports }))
}

fn prop_1_5(cache: &ComponentCache) -> Result<(Status, Value), IdealError> {
    let w = w();
    let g3 = cache.ideal_member(&w, &IdealSpec::GammaN(3))?;
    let six_w = cache.ideal_member(&w.scale(&BigInt::from(6)), &IdealSpec::GammaN(4))?;
    let w_g4 = cache.ideal_member(&w, &IdealSpec::GammaN(4))?;
    let order = cache.order_mod_ideal(&w, &IdealSpec::GammaN(4))?;
    let divides_six = matches!(&order, Order::Finite(k) if *k > BigInt::from(1) && (BigInt::from(6) % k) == BigInt::from(0));
    Ok(outcome(
        g3 && six_w && !w_g4 && divides_six,
        json!({ "w_in_gamma3": g3, "six_w_in_gamma4": six_w, "w_in_gamma4": w_g4, "order_mod_gamma4": order }),
    ))
}

fn random_monomial(rng: &mut StdRng, max_var: u32, max_len: usize) -> Poly {
    let len = rng.gen_range(1..=max_len);
    Poly::from_monomial(Monomial::new((0..len).map(|_| rng.gen_range(1..=max_var)).collect()))
}

/// Random monomial tuples of total degree at most `max_total`.
fn random_tuples(cfg: &Config, k: usize, max_var: u32, max_len: usize, max_total: usize) -> Vec<Vec<Poly>> {
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    let mut out = Vec::with_capacity(cfg.samples);
    while out.len() < cfg.samples {
        let t: Vec<Poly> = (0..k).map(|_| random_monomial(&mut rng, max_var, max_len)).collect();
        let deg: usize = t.iter().map(|m| m.terms().next().map_or(0, |(w, _)| w.len())).sum();
        if deg <= max_total {
            out.push(t);
        }
    }
    out
}

fn c(args: &[&Poly]) -> Poly {
    let owned: Vec<Poly> = args.iter().map(|&p| p.clone()).collect();
    commutator(&owned).expect("nonempty")
}

/// Checks `identity(a)` lies in `spec` on the variable instance and on
/// random monomial instances.
fn identity_check(
    cfg: &Config,
    cache: &ComponentCache,
    spec: &IdealSpec,
    arity: usize,
    max_var: u32,
    max_len: usize,
    identity: &(dyn Fn(&[Poly]) -> Poly + Sync),
) -> Result<(bool, Value), IdealError> {
    let vars: Vec<Poly> = (1..=arity as u32).map(Poly::var).collect();
    let mut instances = vec![vars];
    instances.extend(random_tuples(cfg, arity, max_var, max_len, 7));
    let results: Vec<Result<bool, IdealError>> =
        cfg.exec.map(&instances, |a| cache.ideal_member(&identity(a), spec));
    let mut failures = Vec::new();
    for (a, r) in instances.iter().zip(results) {
        if !r? {
            failures.push(a.iter().map(ToString::to_string).collect::<Vec<_>>());
        }
    }
    Ok((failures.is_empty(), json!({ "instances": instances.len(), "failures": failures })))
}

fn lemma_2_1(cfg: &Config, cache: &ComponentCache) -> Result<(Status, Value), IdealError> {
    let t4 = IdealSpec::Tn(4);
    let first = |a: &[Poly]| c(&[&a[0], &a[1], &a[2]]) * c(&[&a[3], &a[4]]) + c(&[&a[0], &a[1], &a[3]]) * c(&[&a[2], &a[4]]);
    let second = |a: &[Poly]| c(&[&a[0], &a[1], &a[2]]) * c(&[&a[3], &a[4]]) + c(&[&a[0], &a[3], &a[2]]) * c(&[&a[1], &a[4]]);
    let (ok1, w1) = identity_check(cfg, cache, &t4, 5, 3, 3, &first)?;
    let (ok2, w2) = identity_check(cfg, cache, &t4, 5, 3, 3, &second)?;
    let three_v = cache.ideal_member(&three(&v()), &t4)?;
    Ok(outcome(
        ok1 && ok2 && three_v,
        json!({ "first": w1, "second": w2, "three_v_in_t4": three_v }),
    ))
}

fn eq_2_signs(cache: &ComponentCache) -> Result<(Status, Value), IdealError> {
    let mut failures = Vec::new();
    let perms = permutations(5);
    for p in &perms {
        let s = [p[0], p[1], p[2], p[3], p[4]];
        if !cache.sign_congruence_check(&s)? {
            failures.push(p.clone());
        }
    }
    Ok(outcome(failures.is_empty(), json!({ "permutations": perms.len(), "failures": failures })))
}

fn remark_n5(cache: &ComponentCache) -> Result<(Status, Value), IdealError> {
    let t5 = IdealSpec::Tn(5);
    let f = var_commutator(&[1, 2, 3]) * var_commutator(&[4, 5, 6]);
    let three_f = cache.ideal_member(&three(&f), &t5)?;
    let order = cache.order_mod_ideal(&f, &t5)?;
    Ok(outcome(
        three_f,
        json!({ "three_f_in_t5": three_f, "order_mod_t5": order, "component_dim": 720 }),
    ))
}

fn lemma_3_1(cfg: &Config, cache: &ComponentCache) -> Result<(Status, Value), IdealError> {
    let top = cfg.max_var.clamp(6, liebasis::MAX_VN);
    let ns: Vec<u32> = (2..=top).collect();
    let reports: Vec<Result<liebasis::VnReport, IdealError>> =
        cfg.exec.map(&ns, |&n| liebasis::verify_vn_basis(n, cache));
    let reports = reports.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut w = json!({ "by_n": reports });
    if cfg.transforms {
        let set = liebasis::vn_basis(3)?;
        let basis = crate::ideals::ComponentBasis::new(&MultiDegree::multilinear(3));
        let rows = set.elements.iter().map(|e| basis.coords(e)).collect::<Result<Vec<_>, _>>()?;
        let s = snf(&IntMatrix::from_rows(basis.dim(), rows)?, true);
        if let Some((u, v)) = s.transforms {
            w["snf_transforms_n3"] = json!({ "u": u.to_json(), "v": v.to_json() });
        }
    }
    Ok(outcome(reports.iter().all(liebasis::VnReport::ok), w))
}

fn lemma_5_1(cfg: &Config, cache: &ComponentCache) -> Result<(Status, Value), IdealError> {
    let id = |a: &[Poly]| {
        c(&[&a[0], &a[1]]) * c(&[&a[2], &a[3]]) * c(&[&a[4], &a[5]])
            + c(&[&a[0], &a[2]]) * c(&[&a[1], &a[3]]) * c(&[&a[4], &a[5]])
    };
    let (ok, w) = identity_check(cfg, cache, &IdealSpec::T32, 6, 4, 2, &id)?;
    Ok(outcome(ok, w))
}

/// Signed congruence for products of three brackets, over all of `S6`.
fn cor_5_2(cfg: &Config, cache: &ComponentCache) -> Result<(Status, Value), IdealError> {
    let base = product_of_brackets(&[1, 2, 3, 4, 5, 6]);
    let perms = permutations(6);
    let results: Vec<Result<bool, IdealError>> = cfg.exec.map(&perms, |p| {
        let sign = crate::ideals::permutation_sign(p).expect("permutation");
        let f = base.clone() - product_of_brackets(p).scale(&BigInt::from(sign));
        cache.ideal_member(&f, &IdealSpec::T32)
    });
    let mut failures = Vec::new();
    for (p, r) in perms.iter().zip(results) {
        if !r? {
            failures.push(p.clone());
        }
    }
    Ok(outcome(failures.is_empty(), json!({ "permutations": perms.len(), "failures": failures })))
}

fn product_of_brackets(idx: &[u32]) -> Poly {
    idx.chunks(2).map(var_commutator).fold(Poly::one(), |a, b| a * b)
}

fn theorem_1_3(cfg: &Config, cache: &ComponentCache) -> (Status, Value) {
    let mut mus = MultiDegree::all_bounded(cfg.max_var, cfg.max_degree);
    let p6 = MultiDegree::multilinear(DEGREE_SIX);
    if !mus.contains(&p6) {
        mus.push(p6);
    }
    let r = t32basis::verify_graded_basis(&mus, cfg.exec, cache);
    let p5 = r
        .records
        .iter()
        .find(|x| x.multidegree == MultiDegree::multilinear(5).to_string())
        .map(to_json);
    let total_d: usize = r.records.iter().map(|x| x.d_count).sum();
    let ok = r.ok();
    outcome(
        ok,
        json!({
            "components": r.components,
            "failures": r.failures,
            "total_basis_elements": total_d,
            "multilinear_5": p5,
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_unique_and_dispatchable() {
        let mut ids = REGISTRY.to_vec();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), REGISTRY.len());
        let cfg = Config::default();
        let cache = ComponentCache::new();
        assert!(matches!(verify("lemma-9.9", &cfg, &cache), Err(ClaimError::UnknownClaim(_))));
    }

    #[test]
    fn quick_claims_verify() {
        let cfg = Config {
            samples: 4,
            ..Config::default()
        };
        let cache = ComponentCache::new();
        for id in ["theorem-1.1", "prop-1.5", "lemma-2.1", "lemma-3.2", "lemma-4.2", "nonmember-5"] {
            let r = verify(id, &cfg, &cache).unwrap();
            assert!(r.verified(), "{id}: {}", r.witnesses);
        }
    }

    #[test]
    fn report_json_shape() {
        let cache = ComponentCache::new();
        let r = verify("theorem-1.1", &Config::default(), &cache).unwrap();
        let j = serde_json::to_value(&r).unwrap();
        assert_eq!(j["status"], "verified");
        assert_eq!(j["witnesses"]["order"], "3");
        assert_eq!(j["claim_id"], "theorem-1.1");
    }
}
