//! Verification suites over a Q-datum, one report line per statement.

use std::collections::BTreeSet;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::kostant;
use crate::lweight::{self, PosetChecker};
use crate::qcartan::{self, QuantumCartan};
use crate::qdatum::{commutation_normal_form, ConvexOrder, QDatum};
use crate::rootsys::twisted::TwistedType;
use crate::rootsys::is_convex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    Incomplete,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIPPED",
            Status::Incomplete => "INCOMPLETE",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub suite: String,
    /// The statement checked, in words.
    pub statement: String,
    pub status: Status,
    /// Number of individual instances checked.
    pub checked: usize,
    /// The first few failures, or the reason for a skip.
    pub details: Vec<String>,
}

impl SuiteResult {
    fn new(suite: &str, statement: &str) -> Self {
        Self {
            suite: suite.into(),
            statement: statement.into(),
            status: Status::Pass,
            checked: 0,
            details: Vec::new(),
        }
    }

    fn fail(&mut self, detail: impl Into<String>) {
        self.status = Status::Fail;
        if self.details.len() < 5 {
            self.details.push(detail.into());
        }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.fail(detail());
        }
    }

    fn skipped(suite: &str, statement: &str, why: &str) -> Self {
        let mut r = Self::new(suite, statement);
        r.status = Status::Skipped;
        r.details.push(why.into());
        r
    }

    /// Records an error: budget overruns make the suite incomplete, anything
    /// else is a failure.
    fn error(&mut self, e: &Error) {
        if let Error::BudgetExceeded(_) = e {
            if self.status == Status::Pass {
                self.status = Status::Incomplete;
            }
            self.details.push(e.to_string());
        } else {
            self.fail(e.to_string());
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

impl fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {} [{} checked]", self.status, self.suite, self.statement, self.checked)?;
        for d in &self.details {
            write!(f, "\n    {d}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyConfig {
    /// Enumeration budget for adapted words and Kostant partitions.
    pub budget: usize,
    /// Largest `|β|` for the poset and injectivity checks.
    pub max_height: i64,
    /// Window `U` for the inverse quantum Cartan matrix; default from the datum.
    pub cutoff: Option<i64>,
    pub samples: usize,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            budget: 100_000,
            max_height: 3,
            cutoff: None,
            samples: 20,
            seed: 0,
        }
    }
}

pub const VALIDATE: &str = "height function satisfies the Q-datum axioms";
pub const IMAGE: &str = "Im Ω̃_Q equals the closed-form set and has L elements";
pub const CONVEX: &str = "the adapted word is a reduced word of w0 with a convex order";
pub const ADAPTED: &str = "all adapted words form one commutation class with one Ω̃_Q";
pub const COXETER: &str = "β_k = τ_Q^e γ_ι and the ν_k are τ_Q-translates of fundamental weights";
pub const INVERSE: &str = "Ã(z)A(z) = 1 on the window and ã(u) = 0 for u ≤ 0";
pub const PAIRING: &str = "ã_ij(u) − ã_ij(−u) = (Λ_ι, τ_Q^e γ_ȷ)";
pub const VANISHING: &str = "ã_ij vanishes at ±(ξ_ȷ − ξ_ι) − 𝗌_i − 2l𝗌_ij";
pub const BRIDGE: &str = "(ν_k, β_t) is the ã-difference at p_t − p_k ± 𝗌";
pub const ORDER: &str = "ρ has the sign pattern, is injective, and commutes with swaps of commuting letters";
pub const COINCIDENCE: &str = "𝒫_Q ∩ 𝒬 is the free lattice on α_{i,p}, (i,p) ∈ K̂";
pub const DELTA: &str = "partial sums of Ω_Q^{-1}(α_{i,p}) are δ_{k,k0}";
pub const POSET: &str = "Ω_Q is a poset isomorphism (KP(β), ⪯) → (𝒫⁺_{Q,β}, ≤)";
pub const BLOCKS: &str = "𝒫⁺_Q splits by β into blocks with no ≤ between blocks";
pub const D_TABLE: &str = "tabulated d_i agree with the real-root search";
pub const TWIST_CL: &str = "cl(𝐭(α^𝗀_{ι,a})) is the classical simple root";
pub const TWIST_INJECTIVE: &str = "𝐭 is injective on the fundamental ℓ-weights of 𝒫_Q";

/// Runs every suite on `q`. Suites after a failed axiom check are skipped.
pub fn verify_all(q: &QDatum, cfg: &VerifyConfig) -> Vec<SuiteResult> {
    let mut out = Vec::new();
    let mut r = SuiteResult::new("validate", VALIDATE);
    let violations = q.validate();
    r.checked = q.rank();
    for v in &violations {
        r.fail(v.to_string());
    }
    let valid = violations.is_empty();
    out.push(r);
    let downstream: [(&str, &str); 13] = [
        ("image", IMAGE),
        ("convex-order", CONVEX),
        ("adapted-words", ADAPTED),
        ("coxeter", COXETER),
        ("inverse-cartan", INVERSE),
        ("pairing", PAIRING),
        ("vanishing", VANISHING),
        ("bridge", BRIDGE),
        ("order", ORDER),
        ("coincidence", COINCIDENCE),
        ("delta", DELTA),
        ("poset-iso", POSET),
        ("blocks", BLOCKS),
    ];
    if !valid {
        out.extend(
            downstream
                .iter()
                .map(|(s, st)| SuiteResult::skipped(s, st, "invalid datum")),
        );
        return out;
    }
    let o = match q.adapted_word() {
        Ok(o) => o,
        Err(e) => {
            let mut r = SuiteResult::new("convex-order", CONVEX);
            r.error(&e);
            out.push(r);
            return out;
        }
    };
    out.push(image_suite(q, &o));
    out.push(convex_suite(&o));
    out.push(adapted_suite(q, cfg.budget));
    out.push(coxeter_suite(q, &o));
    out.extend(cartan_suites(q, &o, cfg.cutoff));
    out.push(order_suite(&o, cfg));
    out.push(coincidence_suite(&o, cfg));
    out.push(delta_suite(&o));
    out.push(poset_suite(&o, cfg));
    out.push(blocks_suite(&o, cfg));
    out
}

pub fn image_suite(q: &QDatum, o: &ConvexOrder) -> SuiteResult {
    let mut r = SuiteResult::new("image", IMAGE);
    let got = o.image();
    let want = q.image_formula();
    r.check(got == want, || {
        let extra: Vec<_> = got.difference(&want).collect();
        let missing: Vec<_> = want.difference(&got).collect();
        format!("extra {extra:?}, missing {missing:?}")
    });
    r.check(got.len() == q.num_positive_roots(), || {
        format!("|Im| = {} but L = {}", got.len(), q.num_positive_roots())
    });
    r
}

pub fn convex_suite(o: &ConvexOrder) -> SuiteResult {
    let mut r = SuiteResult::new("convex-order", CONVEX);
    r.check(o.datum.cartan.is_reduced_word_of_w0(o.word()), || "not a reduced word of w0".into());
    r.check(is_convex(o.betas()), || "order is not convex".into());
    r
}

pub fn adapted_suite(q: &QDatum, budget: usize) -> SuiteResult {
    let mut r = SuiteResult::new("adapted-words", ADAPTED);
    let words = match q.all_adapted_words(budget) {
        Ok(w) => w,
        Err(e) => {
            r.error(&e);
            return r;
        }
    };
    let classes: BTreeSet<Vec<usize>> = words
        .iter()
        .map(|w| commutation_normal_form(&q.cartan, w))
        .collect();
    r.check(classes.len() == 1, || format!("{} commutation classes", classes.len()));
    let mut maps = BTreeSet::new();
    for w in &words {
        match ConvexOrder::new(q.clone(), w.clone()) {
            Ok(o) => {
                maps.insert(o.omega_map());
            }
            Err(e) => r.fail(e.to_string()),
        }
        r.checked += 1;
    }
    r.check(maps.len() == 1, || format!("{} distinct Ω̃ maps", maps.len()));
    r
}

pub fn coxeter_suite(q: &QDatum, o: &ConvexOrder) -> SuiteResult {
    let mut r = SuiteResult::new("coxeter", COXETER);
    match q.tau_q().and_then(|t| q.check_tau(&t, o)) {
        Ok(()) => r.checked = 2 * o.len(),
        Err(e) => r.error(&e),
    }
    r
}

/// Inverse quantum Cartan matrix, pairing, vanishing and bridge suites.
pub fn cartan_suites(q: &QDatum, o: &ConvexOrder, cutoff: Option<i64>) -> Vec<SuiteResult> {
    let mut inv = SuiteResult::new("inverse-cartan", INVERSE);
    let mut pairing = SuiteResult::new("pairing", PAIRING);
    let mut vanishing = SuiteResult::new("vanishing", VANISHING);
    let mut bridge = SuiteResult::new("bridge", BRIDGE);
    let u = cutoff.unwrap_or_else(|| qcartan::default_cutoff(q));
    let a = QuantumCartan::build(&q.g0);
    let series = match a.invert(u) {
        Ok(s) => s,
        Err(e) => {
            inv.error(&e);
            return vec![inv, pairing, vanishing, bridge];
        }
    };
    for res in [series.check_back_multiplication(&a), series.check_vanishing_below_one()] {
        inv.checked += 1;
        if let Err(e) = res {
            inv.error(&e);
        }
    }
    match q.tau_q() {
        Ok(tau) => {
            for iota in 0..q.rank() {
                for jota in 0..q.rank() {
                    for v in -u..=u {
                        match qcartan::pairing_identity(q, &tau, &series, iota, jota, v) {
                            Ok(c) => pairing.check(c.equal, || {
                                format!("ι={} ȷ={} u={v}: {} vs {}", iota + 1, jota + 1, c.lhs, c.rhs)
                            }),
                            Err(e) => pairing.error(&e),
                        }
                    }
                    vanishing.check(qcartan::vanishing_check(q, &series, iota, jota), || {
                        format!("ι={} ȷ={}", iota + 1, jota + 1)
                    });
                }
            }
        }
        Err(e) => pairing.error(&e),
    }
    for k in 0..o.len() {
        for t in 0..o.len() {
            match qcartan::nu_beta_bridge(o, &series, k, t) {
                Ok(c) => bridge.check(c.equal, || {
                    format!("k={} t={}: {} vs {}", k + 1, t + 1, c.lhs, c.rhs)
                }),
                Err(e) => bridge.error(&e),
            }
        }
    }
    vec![inv, pairing, vanishing, bridge]
}

pub fn order_suite(o: &ConvexOrder, cfg: &VerifyConfig) -> SuiteResult {
    let mut r = SuiteResult::new("order", ORDER);
    let ord = &o.order;
    let signs = kostant::sign_pattern_failures(ord);
    r.checked += ord.len() * ord.len();
    for (k, l) in signs {
        r.fail(format!("sign of (ν_{}, β_{})", k + 1, l + 1));
    }
    match kostant::injective_on_box(ord, 3, 10_000_000) {
        Some(ok) => r.check(ok, || "ρ not injective on [-3,3]^L".into()),
        None => r.details.push("box [-3,3]^L too large, checked on KP(β) only".into()),
    }
    let rho_t = kostant::rho_matrix(ord);
    for beta in kostant::nonnegative_weights(ord.cartan.rank(), cfg.max_height) {
        let kps = match kostant::enumerate(ord, &beta, Some(cfg.budget)) {
            Ok(k) => k,
            Err(e) => {
                r.error(&e);
                continue;
            }
        };
        let rhos: BTreeSet<Vec<i64>> = kps.iter().map(|m| kostant::rho_with(&rho_t, &m.mults)).collect();
        r.check(rhos.len() == kps.len(), || format!("ρ not injective on KP({beta})"));
        match kostant::commutation_equivariance(ord, &kps) {
            Ok(res) => {
                for (k, ok) in res {
                    r.check(ok, || format!("swap at {} for β = {beta}", k + 1));
                }
            }
            Err(e) => r.error(&e),
        }
    }
    r
}

pub fn coincidence_suite(o: &ConvexOrder, cfg: &VerifyConfig) -> SuiteResult {
    let mut r = SuiteResult::new("coincidence", COINCIDENCE);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    match lweight::coincidence_report(o, cfg.samples, &mut rng) {
        Ok(c) => {
            r.checked = 2 + c.samples;
            if !c.generators_in_image {
                r.fail("some α_{i,p}, (i,p) ∈ K̂, leave 𝒫_Q");
            }
            if c.intersection_dim != c.khat.len() {
                r.fail(format!("rank {} but |K̂| = {}", c.intersection_dim, c.khat.len()));
            }
            if c.sample_failures > 0 {
                r.fail(format!("{} of {} samples failed", c.sample_failures, c.samples));
            }
        }
        Err(e) => r.error(&e),
    }
    r
}

pub fn delta_suite(o: &ConvexOrder) -> SuiteResult {
    let mut r = SuiteResult::new("delta", DELTA);
    for (i, p) in lweight::khat(o) {
        match lweight::delta_identity(o, i, p) {
            Ok(d) => r.check(d.in_kernel && d.holds, || {
                format!("({}, {p}): m = {:?}, sums = {:?}", i + 1, d.m, d.partial_sums)
            }),
            Err(e) => r.error(&e),
        }
    }
    r
}

pub fn poset_suite(o: &ConvexOrder, cfg: &VerifyConfig) -> SuiteResult {
    let mut r = SuiteResult::new("poset-iso", POSET);
    let checker = match PosetChecker::new(o) {
        Ok(c) => c,
        Err(e) => {
            r.error(&e);
            return r;
        }
    };
    for beta in kostant::nonnegative_weights(o.datum.rank(), cfg.max_height) {
        match checker.check(&beta, Some(cfg.budget)) {
            Ok(p) => {
                r.checked += p.pairs;
                if !p.passed() {
                    r.fail(format!(
                        "β = {beta}: {} discrepancies, injective = {}",
                        p.discrepancies.len(),
                        p.injective
                    ));
                }
            }
            Err(e) => r.error(&e),
        }
    }
    r
}

pub fn blocks_suite(o: &ConvexOrder, cfg: &VerifyConfig) -> SuiteResult {
    let mut r = SuiteResult::new("blocks", BLOCKS);
    let om = match lweight::OmegaQ::new(o) {
        Ok(om) => om,
        Err(e) => {
            r.error(&e);
            return r;
        }
    };
    let mut pis = Vec::new();
    let mut betas = Vec::new();
    for beta in kostant::nonnegative_weights(o.datum.rank(), cfg.max_height.min(2)) {
        match kostant::enumerate(&o.order, &beta, Some(cfg.budget)) {
            Ok(kps) => {
                for m in kps {
                    pis.push(om.apply(&m.mults));
                    betas.push(beta.clone());
                }
            }
            Err(e) => r.error(&e),
        }
    }
    match lweight::blocks(o, &pis) {
        Ok(b) => {
            r.checked = pis.len();
            for block in &b.blocks {
                for &n in &block.members {
                    r.check(betas[n] == block.beta, || format!("{} placed in β = {}", pis[n], block.beta));
                }
            }
            for (a, c) in b.cross_comparable {
                r.fail(format!("{} ≤ {} across blocks", pis[a], pis[c]));
            }
        }
        Err(e) => r.error(&e),
    }
    r
}

/// Suites specific to a twisted type, run on a σ = id datum of its 𝗀.
pub fn twisted_suites(tt: &TwistedType, q: &QDatum) -> Vec<SuiteResult> {
    let mut d = SuiteResult::new("d-table", D_TABLE);
    match tt.d_search() {
        Ok(found) => d.check(found == tt.d_table(), || {
            format!("table {:?}, search {found:?}", tt.d_table())
        }),
        Err(e) => d.error(&e),
    }
    let mut cl = SuiteResult::new("twist-cl", TWIST_CL);
    for p in -2..=2 {
        match lweight::twist_cl_failures(tt, p) {
            Ok(f) => cl.check(f.is_empty(), || format!("nodes {f:?} at p = {p}")),
            Err(e) => cl.error(&e),
        }
    }
    let mut inj = SuiteResult::new("twist-injective", TWIST_INJECTIVE);
    if q.cartan != tt.g || !q.sigma.is_identity() {
        inj.fail(format!("datum must be on {} with σ = id", tt.g.label));
    } else {
        match q.adapted_word().and_then(|o| lweight::twist_injective_on_image(tt, &o)) {
            Ok(ok) => inj.check(ok, || "two image points share a twisted parameter".into()),
            Err(e) => inj.error(&e),
        }
    }
    vec![d, cl, inj]
}

pub fn all_passed(results: &[SuiteResult]) -> bool {
    results.iter().all(SuiteResult::passed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> VerifyConfig {
        VerifyConfig {
            max_height: 3,
            ..VerifyConfig::default()
        }
    }

    #[test]
    fn a2_passes() {
        let q = QDatum::build("A2", &[], &[0, 1]).unwrap();
        let res = verify_all(&q, &cfg());
        assert!(all_passed(&res), "{}", res.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("\n"));
        assert_eq!(res.len(), 14);
    }

    #[test]
    fn b2_passes() {
        let q = QDatum::build("A3", &[vec![0, 2]], &[1, 0, -1]).unwrap();
        let res = verify_all(&q, &cfg());
        assert!(all_passed(&res), "{}", res.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("\n"));
    }

    #[test]
    fn invalid_datum_skips_downstream() {
        let c = crate::rootsys::CartanData::from_label("A3").unwrap();
        let sigma = crate::qdatum::DiagramAutomorphism::from_cycles(3, &[vec![0, 2]]).unwrap();
        let q = QDatum::new(c, sigma, vec![1, 0, 1]).unwrap();
        let res = verify_all(&q, &cfg());
        assert_eq!(res[0].status, Status::Fail);
        assert!(res[1..].iter().all(|r| r.status == Status::Skipped));
    }

    #[test]
    fn twisted_suites_pass() {
        let tt: TwistedType = "D4^(3)".parse().unwrap();
        let q = QDatum::build("D4", &[], &[0, 1, 2, 2]).unwrap();
        let res = twisted_suites(&tt, &q);
        assert!(all_passed(&res), "{res:?}");
    }

    #[test]
    fn report_line_format() {
        let mut r = SuiteResult::new("x", "a statement");
        r.check(true, String::new);
        assert_eq!(r.to_string(), "PASS x: a statement [1 checked]");
        r.error(&Error::BudgetExceeded(3));
        assert_eq!(r.status, Status::Incomplete);
    }
}
