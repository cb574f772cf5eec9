//! Seeded property suites over random instances.
//!
//! Every trial draws from its own stream, derived from the run seed, the
//! shape and the trial index, so a failing trial can be replayed alone. The
//! first failure of a run is kept as a counterexample holding the instance
//! file and the vectors involved.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::category::{
    check_phi_naturality, check_psi_naturality, d_on_morphism, gl1_demo, is_tvec_morphism, phi_naturality_scalar,
    tensor_on_morphisms, SheetMaps, TvecMorphism, VecPairMorphism,
};
use crate::error::{Error, Result};
use crate::ratlin::{Matrix, Scalar, Vector};
use crate::reconstruct::{recover_factors, verify_round_trip, Reconstruction};
use crate::squares::{complete_square, is_square, Square};
use crate::tensor_space::{
    generate_instance, random_factors, random_nonzero, seeded_rng, FactorShape, InstanceFile, SeededRng,
    TensorSpaceInstance,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Lemmas,
    Squares,
    Bilinearity,
    Recovery,
    Naturality,
    All,
}

impl Suite {
    pub const EACH: [Suite; 5] =
        [Suite::Lemmas, Suite::Squares, Suite::Bilinearity, Suite::Recovery, Suite::Naturality];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemmas => "lemmas",
            Suite::Squares => "squares",
            Suite::Bilinearity => "bilinearity",
            Suite::Recovery => "recovery",
            Suite::Naturality => "naturality",
            Suite::All => "all",
        }
    }

    pub fn default_shapes(self) -> Vec<FactorShape> {
        let grid = |lo: usize, hi: usize| -> Vec<FactorShape> {
            (lo..=hi).flat_map(|m| (lo..=hi).map(move |n| FactorShape { m, n })).collect()
        };
        match self {
            Suite::Lemmas | Suite::Naturality => grid(2, 3),
            Suite::Squares | Suite::Bilinearity => grid(2, 4),
            Suite::Recovery => {
                let mut shapes = grid(2, 4);
                shapes.extend([FactorShape { m: 2, n: 6 }, FactorShape { m: 4, n: 3 }, FactorShape { m: 2, n: 5 }]);
                shapes.dedup();
                shapes
            }
            Suite::All => Vec::new(),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug)]
pub struct PropsConfig {
    pub suite: Suite,
    /// Trials per shape.
    pub trials: usize,
    pub seed: u64,
    /// Overrides the suite's default shapes.
    pub shapes: Option<Vec<FactorShape>>,
    /// Corrupt one monomial of the first quadric of every generated instance.
    pub inject_fault: bool,
}

impl PropsConfig {
    pub fn new(suite: Suite, trials: usize, seed: u64) -> Self {
        PropsConfig { suite, trials, seed, shapes: None, inject_fault: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyCount {
    pub suite: &'static str,
    pub property: &'static str,
    pub passed: usize,
    pub failed: usize,
}

/// A replayable failure: the instance plus the vectors of the failing check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub suite: &'static str,
    pub property: &'static str,
    pub trial: usize,
    pub instance: InstanceFile,
    pub vectors: BTreeMap<String, Vector>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropsReport {
    pub suite: Suite,
    pub seed: u64,
    pub trials: usize,
    pub passed: bool,
    pub properties: Vec<PropertyCount>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

impl PropsReport {
    pub fn count(&self, property: &str) -> Option<&PropertyCount> {
        self.properties.iter().find(|p| p.property == property)
    }
}

/// Random stream for one trial of one shape.
pub fn trial_rng(seed: u64, shape: FactorShape, trial: usize) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((shape.m as u64) << 56) | ((shape.n as u64) << 48) | trial as u64);
    rng
}

pub fn run_props(cfg: &PropsConfig) -> PropsReport {
    let mut tally = Tally::default();
    let suites: Vec<Suite> = if cfg.suite == Suite::All { Suite::EACH.to_vec() } else { vec![cfg.suite] };
    for suite in suites {
        tally.suite = suite.name();
        let shapes = cfg.shapes.clone().unwrap_or_else(|| suite.default_shapes());
        for shape in shapes {
            match suite {
                Suite::Lemmas => lemmas(cfg, shape, &mut tally),
                Suite::Squares => squares(cfg, shape, &mut tally),
                Suite::Bilinearity => bilinearity(cfg, shape, &mut tally),
                Suite::Recovery => recovery(cfg, shape, &mut tally),
                Suite::Naturality => naturality(cfg, shape, &mut tally),
                Suite::All => unreachable!("expanded above"),
            }
        }
    }
    PropsReport {
        suite: cfg.suite,
        seed: cfg.seed,
        trials: cfg.trials,
        passed: tally.first.is_none(),
        properties: tally.counts,
        counterexample: tally.first,
    }
}

#[derive(Default)]
struct Tally {
    suite: &'static str,
    counts: Vec<PropertyCount>,
    first: Option<Counterexample>,
}

impl Tally {
    fn check(
        &mut self,
        inst: &TensorSpaceInstance,
        trial: usize,
        property: &'static str,
        outcome: Result<bool>,
        vectors: &[(&str, &Vector)],
    ) {
        let suite = self.suite;
        let idx = match self.counts.iter().position(|c| c.suite == suite && c.property == property) {
            Some(i) => i,
            None => {
                self.counts.push(PropertyCount { suite, property, passed: 0, failed: 0 });
                self.counts.len() - 1
            }
        };
        let error = match outcome {
            Ok(true) => {
                self.counts[idx].passed += 1;
                return;
            }
            Ok(false) => None,
            Err(e) => Some(e.to_string()),
        };
        self.counts[idx].failed += 1;
        if self.first.is_none() {
            self.first = Some(Counterexample {
                suite,
                property,
                trial,
                instance: inst.to_file(),
                vectors: vectors.iter().map(|(k, v)| (k.to_string(), (*v).clone())).collect(),
                error,
            });
        }
    }
}

fn instance(rng: &mut SeededRng, shape: FactorShape, pointed: bool, fault: bool) -> TensorSpaceInstance {
    let mut inst = generate_instance(shape, rng.gen(), pointed);
    if fault {
        inst.inject_fault();
    }
    inst
}

fn random_scalar(rng: &mut SeededRng) -> Scalar {
    let p = loop {
        let p: i64 = rng.gen_range(-5..=5);
        if p != 0 {
            break p;
        }
    };
    Scalar::new(p, rng.gen_range(1..=4))
}

fn random_combination(rng: &mut SeededRng, basis: &[Vector]) -> Vector {
    let coeffs = random_nonzero(rng, basis.len(), 3);
    let mut out = Vector::zeros(basis[0].len());
    for (b, c) in basis.iter().zip(coeffs.iter()) {
        out = out.axpy(c, b);
    }
    out
}

fn random_invertible(rng: &mut SeededRng, n: usize) -> Matrix {
    loop {
        let rows: Vec<Vector> = (0..n).map(|_| random_nonzero(rng, n, 3)).collect();
        let m = Matrix::from_rows(n, &rows);
        if m.rank() == n {
            return m;
        }
    }
}

fn random_pair(rng: &mut SeededRng, shape: FactorShape) -> VecPairMorphism {
    let g = random_invertible(rng, shape.m);
    let h = random_invertible(rng, shape.n);
    VecPairMorphism::new(g, h).expect("factors are invertible")
}

fn proportional(x: &Vector, y: &Vector) -> bool {
    x.ratio_to(y).is_some() || y.ratio_to(x).is_some()
}

fn lemmas(cfg: &PropsConfig, shape: FactorShape, tally: &mut Tally) {
    for trial in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, shape, trial);
        let inst = instance(&mut rng, shape, false, cfg.inject_fault);
        let hidden = inst.hidden();
        let range = inst.sample_range();

        let s = inst.sample_simple(&mut rng);
        let t = inst.sample_simple(&mut rng);
        let sum = &s + &t;
        let dense = random_nonzero(&mut rng, inst.dim(), 3);
        for v in [&s, &sum, &dense] {
            let outcome = inst.is_simple(v).and_then(|simple| Ok(simple == hidden.factor(v)?.is_some()));
            tally.check(&inst, trial, "oracle_matches_hidden_rank", outcome, &[("v", v)]);
        }
        let vanish = inst.quadrics().iter().all(|q| q.eval(&s).is_zero());
        tally.check(&inst, trial, "quadrics_vanish_on_samples", Ok(vanish), &[("sample", &s)]);

        let k = rng.gen_range(1..=shape.m + 1);
        let a_list: Vec<Vector> = (0..k).map(|_| random_nonzero(&mut rng, shape.m, 2)).collect();
        let b_list: Vec<Vector> = (0..k)
            .map(|_| if rng.gen_bool(0.5) { Vector::zeros(shape.n) } else { random_nonzero(&mut rng, shape.n, 2) })
            .collect();
        let named: Vec<(String, &Vector)> = a_list
            .iter()
            .enumerate()
            .map(|(i, a)| (format!("a{i}"), a))
            .chain(b_list.iter().enumerate().map(|(i, b)| (format!("b{i}"), b)))
            .collect();
        let named: Vec<(&str, &Vector)> = named.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        tally.check(&inst, trial, "rule", inst.verify_rule(&a_list, &b_list), &named);

        let (alpha, beta) = random_factors(&mut rng, shape, range);
        let c = random_scalar(&mut rng);
        let v = inst.embed_simple(&alpha, &beta).expect("shape matches");
        let v2 = inst.embed_simple(&alpha.scale(&c), &beta.scale(&c.recip().expect("nonzero"))).expect("shape matches");
        let outcome = hidden
            .factor(&v2)
            .map(|f| v == v2 && f.is_some_and(|(a2, b2)| proportional(&a2, &alpha) && proportional(&b2, &beta)));
        tally.check(&inst, trial, "factors_unique_up_to_scale", outcome, &[("v", &v), ("rescaled", &v2)]);

        let (alpha2, beta2) = random_factors(&mut rng, shape, range);
        let choice = rng.gen_range(0..3);
        let u = inst.embed_simple(&alpha, &beta).expect("shape matches");
        let w = match choice {
            0 => inst.embed_simple(&alpha2, &beta),
            1 => inst.embed_simple(&alpha, &beta2),
            _ => inst.embed_simple(&alpha2, &beta2),
        }
        .expect("shape matches");
        let outcome = inst.is_simple(&(&u + &w)).and_then(|simple| {
            let fu = hidden.factor(&u)?.ok_or(Error::NotSimple)?;
            let fw = hidden.factor(&w)?.ok_or(Error::NotSimple)?;
            let shares = proportional(&fu.0, &fw.0) || proportional(&fu.1, &fw.1);
            Ok((!simple || shares) && (choice == 2 || simple))
        });
        tally.check(&inst, trial, "simple_sum_shares_a_factor", outcome, &[("u", &u), ("w", &w)]);
    }
}

fn squares(cfg: &PropsConfig, shape: FactorShape, tally: &mut Tally) {
    for trial in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, shape, trial);
        let inst = instance(&mut rng, shape, false, cfg.inject_fault);
        let range = inst.sample_range();
        let emb = |x: &Vector, y: &Vector| inst.embed_simple(x, y).expect("shape matches");
        let (alpha0, beta0) = random_factors(&mut rng, shape, range);
        let (alpha, beta) = random_factors(&mut rng, shape, range);
        let (a, b, c, d) = (emb(&alpha0, &beta0), emb(&alpha0, &beta), emb(&alpha, &beta0), emb(&alpha, &beta));
        let corners = [("a", &a), ("b", &b), ("c", &c), ("d", &d)];

        let outcome = complete_square(&inst, &a, &b, &c).map(|r| r.d == d);
        tally.check(&inst, trial, "completion_matches_hidden", outcome, &corners);
        let sq = Square::new(a.clone(), b.clone(), c.clone(), d.clone());
        tally.check(&inst, trial, "is_square_accepts", is_square(&inst, &sq), &corners);

        let lambda = random_scalar(&mut rng);
        let mu = random_scalar(&mut rng);
        let outcome = complete_square(&inst, &a, &b, &a.scale(&lambda)).map(|r| r.d == b.scale(&lambda));
        tally.check(&inst, trial, "column_scaled", outcome, &corners);
        let outcome = complete_square(&inst, &a, &a.scale(&mu), &c).map(|r| r.d == c.scale(&mu));
        tally.check(&inst, trial, "row_scaled", outcome, &corners);
        let outcome =
            complete_square(&inst, &a, &a.scale(&mu), &a.scale(&lambda)).map(|r| r.d == a.scale(&(&lambda * &mu)));
        tally.check(&inst, trial, "doubly_scaled", outcome, &corners);

        let kappa = random_scalar(&mut rng);
        let outcome = is_square(&inst, &sq.scale_first_row(&kappa))
            .and_then(|r| Ok(r && is_square(&inst, &sq.scale_first_column(&kappa))?));
        tally.check(&inst, trial, "rescaling_closure", outcome, &corners);

        let doubled = Square::new(a.clone(), b.clone(), c.clone(), d.scale(&Scalar::from(2)));
        tally.check(&inst, trial, "fourth_corner_unique", is_square(&inst, &doubled).map(|r| !r), &corners);

        let mut alpha1 = random_nonzero(&mut rng, shape.m, range);
        if (&alpha0 + &alpha1).is_zero() {
            alpha1 = alpha0.clone();
        }
        let (a1, b1) = (emb(&alpha1, &beta0), emb(&alpha1, &beta));
        let summed = Square::new(&a + &a1, &b + &b1, c.clone(), d.clone());
        tally.check(&inst, trial, "row_additivity", is_square(&inst, &summed), &[("a1", &a1), ("b1", &b1)]);
    }
}

fn build_recon<'a>(
    inst: &'a TensorSpaceInstance,
    rng: &mut SeededRng,
    tally: &mut Tally,
    trial: usize,
) -> Option<Reconstruction<'a>> {
    let mut recon_rng = seeded_rng(rng.gen());
    let recon = recover_factors(inst, &mut recon_rng, None);
    let outcome = recon.as_ref().map(|_| true).map_err(Clone::clone);
    tally.check(inst, trial, "reconstruction_builds", outcome, &[]);
    recon.ok()
}

fn bilinearity(cfg: &PropsConfig, shape: FactorShape, tally: &mut Tally) {
    let mut rng = trial_rng(cfg.seed, shape, usize::MAX >> 16);
    let inst = instance(&mut rng, shape, false, cfg.inject_fault);
    let Some(recon) = build_recon(&inst, &mut rng, tally, 0) else {
        return;
    };
    let special = recon.special_basis();
    let outcome = special.iter().try_fold(true, |acc, v| Ok(acc && inst.is_simple(v)?));
    tally.check(&inst, 0, "special_basis_simple", outcome, &[]);
    let lambda = random_scalar(&mut rng);
    let inv = lambda.recip().expect("nonzero");
    let scaled_e: Vec<Vector> = recon.basis_e().iter().map(|e| e.scale(&lambda)).collect();
    let scaled_f: Vec<Vector> = recon.basis_f().iter().map(|f| f.scale(&inv)).collect();
    let outcome = recon.phi_from_bases(&scaled_e, &scaled_f).map(|phi| phi == *recon.phi());
    tally.check(&inst, 0, "gl1_rescaling_invariance", outcome, &[]);

    for trial in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, shape, trial);
        let x = random_combination(&mut rng, recon.basis_e());
        let x2 = random_combination(&mut rng, recon.basis_e());
        let y = random_combination(&mut rng, recon.basis_f());
        let y2 = random_combination(&mut rng, recon.basis_f());
        let lam = random_scalar(&mut rng);
        let vs = [("x", &x), ("x2", &x2), ("y", &y), ("y2", &y2)];

        let bar = |p: &Vector, q: &Vector| recon.bar_tensor(p, q);
        let outcome = (|| Ok(bar(&x.axpy(&lam, &x2), &y)? == bar(&x, &y)?.axpy(&lam, &bar(&x2, &y)?)))();
        tally.check(&inst, trial, "bilinear_left", outcome, &vs);
        let outcome = (|| Ok(bar(&x, &y.axpy(&lam, &y2))? == bar(&x, &y)?.axpy(&lam, &bar(&x, &y2)?)))();
        tally.check(&inst, trial, "bilinear_right", outcome, &vs);
        let outcome = bar(&x, &y).and_then(|p| inst.is_simple(&p));
        tally.check(&inst, trial, "image_in_cone", outcome, &vs);

        let s = inst.sample_simple(&mut rng);
        let t = inst.sample_simple(&mut rng);
        let outcome = recon.factorize_simple(&s).and_then(|(p, q)| Ok(bar(&p, &q)? == s));
        tally.check(&inst, trial, "factorize_round_trip", outcome, &[("s", &s)]);
        let sum = &s + &t;
        let outcome = (|| Ok(recon.tensor_rank(&sum)? == inst.hidden().unscramble(&sum)?.rank()))();
        tally.check(&inst, trial, "tensor_rank_matches_hidden", outcome, &[("s", &s), ("t", &t)]);
    }
}

fn recovery(cfg: &PropsConfig, shape: FactorShape, tally: &mut Tally) {
    for trial in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, shape, trial);
        let pointed = trial % 2 == 1;
        let inst = instance(&mut rng, shape, pointed, cfg.inject_fault);
        let recon_seed: u64 = rng.gen();
        let recon = match recover_factors(&inst, &mut seeded_rng(recon_seed), None) {
            Ok(r) => r,
            Err(e) => {
                tally.check(&inst, trial, "recover_succeeds", Err(e), &[]);
                continue;
            }
        };
        tally.check(&inst, trial, "recover_succeeds", Ok(true), &[]);
        let outcome = verify_round_trip(&inst, &recon).map(|r| r.success && (!r.swap || shape.m == shape.n));
        tally.check(&inst, trial, "sheets_match_hidden", outcome, &[("w0", recon.base_point())]);
        if pointed {
            let kept = inst.base_point() == Some(recon.base_point());
            tally.check(&inst, trial, "base_point_kept", Ok(kept), &[]);
        }
        if trial == 0 {
            let again = recover_factors(&inst, &mut seeded_rng(recon_seed), None).map(|r| r == recon);
            tally.check(&inst, trial, "deterministic", again, &[]);
        }
    }
}

fn naturality(cfg: &PropsConfig, shape: FactorShape, tally: &mut Tally) {
    for trial in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, shape, trial);
        let a = instance(&mut rng, shape, true, cfg.inject_fault);
        let pm = random_pair(&mut rng, shape);
        let pm2 = random_pair(&mut rng, shape);
        let (alpha0, beta0) = a.hidden().factor(a.base_point().expect("pointed")).unwrap().expect("simple base point");
        let (alpha1, beta1) = (pm.g.mul_vec(&alpha0), pm.h.mul_vec(&beta0));
        let (alpha2, beta2) = (pm2.g.mul_vec(&alpha1), pm2.h.mul_vec(&beta1));
        let rebase = |inst: TensorSpaceInstance, x: &Vector, y: &Vector| {
            let w = inst.embed_simple(x, y).expect("shape matches");
            inst.with_base_point(w).expect("image of a simple vector is simple")
        };
        let b = rebase(instance(&mut rng, shape, false, cfg.inject_fault), &alpha1, &beta1);
        let c = rebase(instance(&mut rng, shape, false, cfg.inject_fault), &alpha2, &beta2);
        let (Some(ra), Some(rb), Some(rc)) = (
            build_recon(&a, &mut rng, tally, trial),
            build_recon(&b, &mut rng, tally, trial),
            build_recon(&c, &mut rng, tally, trial),
        ) else {
            continue;
        };
        let f = tensor_on_morphisms(&a, &b, &pm).expect("shapes match");
        let g = tensor_on_morphisms(&b, &c, &pm2).expect("shapes match");
        tally.check(&a, trial, "certified", Ok(is_tvec_morphism(&f) && is_tvec_morphism(&g)), &[]);
        tally.check(&a, trial, "psi_natural", check_psi_naturality(&ra, &rb, &pm), &[]);
        tally.check(&a, trial, "phi_natural", check_phi_naturality(&f, &ra, &rb), &[]);

        let outcome = (|| -> Result<bool> {
            let id = VecPairMorphism::identity(shape.m, shape.n);
            let tensor_id = tensor_on_morphisms(&a, &a, &id)?.map() == TvecMorphism::identity(&a).map();
            let d_id = d_on_morphism(&TvecMorphism::identity(&a), &ra, &ra)?
                == SheetMaps { f1: Matrix::identity(shape.m), f2: Matrix::identity(shape.n), swapped: false };
            let tensor_comp = tensor_on_morphisms(&a, &c, &pm2.compose(&pm)?)?.map() == g.compose(&f)?.map();
            let d_comp = d_on_morphism(&g.compose(&f)?, &ra, &rc)?
                == d_on_morphism(&g, &rb, &rc)?.compose(&d_on_morphism(&f, &ra, &rb)?);
            Ok(tensor_id && d_id && tensor_comp && d_comp)
        })();
        tally.check(&a, trial, "functor_laws", outcome, &[]);

        let lambda = random_scalar(&mut rng);
        tally.check(&a, trial, "gl1_obstruction", gl1_demo(&a, &b, &pm, &lambda), &[]);

        let generic = random_invertible(&mut rng, a.dim());
        let morph = TvecMorphism::new(&a, &b, generic).expect("dims match");
        let outcome = if is_tvec_morphism(&morph) {
            // Accepting is only right if the map really preserves the cone.
            (0..5).try_fold(true, |acc, _| Ok(acc && b.is_simple(&morph.apply(&a.sample_simple(&mut rng)))?))
        } else {
            Ok(true)
        };
        tally.check(&a, trial, "rejects_generic_maps", outcome, &[]);

        if trial == 0 {
            let kappa = loop {
                let k = random_scalar(&mut rng);
                if !k.is_one() {
                    break k;
                }
            };
            let scaled = b.clone().with_base_point(b.base_point().expect("pointed").scale(&kappa));
            let outcome = scaled.and_then(|bs| {
                let rbs = recover_factors(&bs, &mut seeded_rng(0), None)?;
                let fs = TvecMorphism::new(&a, &bs, f.map().clone())?;
                Ok(phi_naturality_scalar(&fs, &ra, &rbs)? == Some(kappa.clone()))
            });
            tally.check(&a, trial, "unpointed_scalar", outcome, &[]);
        }
    }
}
