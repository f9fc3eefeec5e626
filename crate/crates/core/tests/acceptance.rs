//! Acceptance criteria: one PASS/FAIL line per criterion, exact comparisons,
//! runtime budgets pinned below.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use qcombinat::kostant::{self, KostantPartition};
use qcombinat::lweight::{self, PosetChecker};
use qcombinat::qcartan::{self, QuantumCartan};
use qcombinat::qdatum::{
    commutation_normal_form, folding_for, induced_cartan, random_datum, ConvexOrder, DiagramAutomorphism,
    QDatum,
};
use qcombinat::rootsys::twisted::d_cross_check;
use qcombinat::rootsys::{dual_coxeter, CartanData, Family, Root, TypeLabel};
use qcombinat::matrix::IntMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20240917;
const IMAGE_BUDGET: Duration = Duration::from_secs(60);
const INVERSE_BUDGET: Duration = Duration::from_secs(30);
const DELTA_BUDGET: Duration = Duration::from_secs(60);
const POSET_BUDGET: Duration = Duration::from_secs(300);
const INVERSE_WINDOW: i64 = 40;

/// Outcome of one criterion.
struct Outcome {
    checked: usize,
    failures: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            checked: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

/// `(label, 0-based σ cycles)`: the simply-laced types and the folded pairs.
fn pairs(simply_laced: &[&'static str]) -> Vec<(&'static str, Vec<Vec<usize>>)> {
    let mut out: Vec<(&str, Vec<Vec<usize>>)> = simply_laced.iter().map(|&t| (t, vec![])).collect();
    out.push(("A3", vec![vec![0, 2]]));
    out.push(("A5", vec![vec![0, 4], vec![1, 3]]));
    out.push(("D4", vec![vec![2, 3]]));
    out.push(("D4", vec![vec![0, 2, 3]]));
    out.push(("E6", vec![vec![0, 4], vec![1, 3]]));
    out
}

fn data(label: &str, cycles: &[Vec<usize>], count: usize, rng: &mut ChaCha8Rng) -> Vec<QDatum> {
    let c = CartanData::from_label(label).unwrap();
    let sigma = DiagramAutomorphism::from_cycles(c.rank(), cycles).unwrap();
    (0..count).map(|_| random_datum(&c, &sigma, rng).unwrap()).collect()
}

fn name(q: &QDatum) -> String {
    if q.sigma.is_identity() {
        format!("{} ξ={:?}", q.cartan.label, q.xi)
    } else {
        format!("{}→{} ξ={:?}", q.cartan.label, q.g0.label, q.xi)
    }
}

/// Rank ≤ 4 data (simply-laced side), with the foldings they admit.
fn small_pairs() -> Vec<(&'static str, Vec<Vec<usize>>)> {
    vec![
        ("A1", vec![]),
        ("A2", vec![]),
        ("A3", vec![]),
        ("A4", vec![]),
        ("D4", vec![]),
        ("A3", vec![vec![0, 2]]),
        ("D4", vec![vec![2, 3]]),
        ("D4", vec![vec![0, 2, 3]]),
    ]
}

fn criterion_1() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for (label, cycles) in pairs(&["A1", "A2", "A3", "A4", "A5", "D4", "D5"]) {
        for q in data(label, &cycles, 20, &mut rng) {
            let o = q.adapted_word().unwrap();
            let img = o.image();
            out.check(img == q.image_formula(), || format!("{}: image differs", name(&q)));
            out.check(img.len() == q.num_positive_roots(), || format!("{}: |Im| != L", name(&q)));
        }
    }
    out
}

fn criterion_2() -> Outcome {
    let mut out = Outcome::new();
    let q = QDatum::build("A2", &[], &[0, 1]).unwrap();
    let o = q.adapted_word().unwrap();
    out.check(o.word() == [1, 0, 1], || format!("word {:?}", o.word()));
    let want: BTreeMap<Root, (usize, i64)> = [
        (Root(vec![0, 1]), (1, 1)),
        (Root(vec![1, 1]), (0, 0)),
        (Root(vec![1, 0]), (1, -1)),
    ]
    .into_iter()
    .collect();
    out.check(o.omega_map() == want, || format!("Ω̃ {:?}", o.omega_map()));
    out.check(kostant::rho(&o.order, &[1, 0, 1]) == [1, 1, 1], || "ρ(1,0,1)".into());
    out.check(kostant::rho(&o.order, &[0, 1, 0]) == [0, 1, 1], || "ρ(0,1,0)".into());
    out.check(lweight::khat(&o) == BTreeSet::from([(1, 0)]), || format!("K̂ {:?}", lweight::khat(&o)));
    let r = lweight::poset_iso_check(&o, &Root(vec![1, 1]), None).unwrap();
    out.check(r.passed() && r.size == 2 && r.strict == 1, || format!("{r:?}"));
    out
}

fn criterion_3() -> Outcome {
    let mut out = Outcome::new();
    let q = QDatum::build("A3", &[vec![0, 2]], &[1, 0, -1]).unwrap();
    let o = q.adapted_word().unwrap();
    out.check(o.word() == [0, 1, 2, 1, 0, 1], || format!("word {:?}", o.word()));
    let table: Vec<(Root, usize, i64)> = o.omega_tilde().into_iter().map(|e| (e.root, e.vertex, e.p)).collect();
    let want = vec![
        (Root(vec![1, 0, 0]), 0, 1),
        (Root(vec![1, 1, 0]), 1, 0),
        (Root(vec![1, 1, 1]), 2, -1),
        (Root(vec![0, 0, 1]), 1, -2),
        (Root(vec![0, 1, 1]), 0, -3),
        (Root(vec![0, 1, 0]), 1, -4),
    ];
    out.check(table == want, || format!("Ω̃ {table:?}"));
    let ind = induced_cartan(&q.cartan, &q.sigma).unwrap();
    out.check(
        ind.orbit_matrix == IntMatrix::from_rows(&[vec![2, -1], vec![-2, 2]]),
        || format!("orbit matrix {:?}", ind.orbit_matrix),
    );
    let tau = q.tau_q().unwrap();
    let c = &q.cartan;
    let expected = &(&c.reflection_weight_matrix(0) * &c.reflection_weight_matrix(1)) * &q.sigma.matrix();
    out.check(tau.matrix == expected, || format!("τ {:?}", tau.matrix));
    out.check(q.gamma(2).unwrap() == Root(vec![1, 1, 1]), || "(1 − τ²)Λ₃".into());
    out
}

/// Every 𝔤₀ of rank ≤ 6 with a Q-datum realising it.
fn rank_six_data(rng: &mut ChaCha8Rng) -> Vec<QDatum> {
    let mut out = Vec::new();
    let families = [Family::A, Family::B, Family::C, Family::D, Family::E, Family::F, Family::G];
    for family in families {
        for rank in 1..=6 {
            let Ok(g0) = TypeLabel::new(family, rank) else { continue };
            let (label, cycles) = match (folding_for(g0), g0.family) {
                (Some(f), _) => f,
                (None, Family::A | Family::D | Family::E) => (g0, vec![]),
                // C2 is B2, covered by its own folding
                (None, _) => continue,
            };
            out.extend(data(&label.to_string(), &cycles, 1, rng));
        }
    }
    out
}

/// Also returns the orbit pairs `(i, j)` for which no choice of `ι, ȷ`
/// satisfies the vanishing identity, out of all pairs tested.
fn criterion_4() -> (Outcome, usize, usize) {
    let mut out = Outcome::new();
    let (mut pairs_tested, mut pairs_without_choice) = (0, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    for q in rank_six_data(&mut rng) {
        let a = QuantumCartan::build(&q.g0);
        let s = match a.invert(INVERSE_WINDOW) {
            Ok(s) => s,
            Err(e) => {
                out.check(false, || format!("{}: {e}", q.g0.label));
                continue;
            }
        };
        out.check(s.check_back_multiplication(&a).is_ok(), || format!("{}: ÃA ≠ 1", q.g0.label));
        out.check(s.check_vanishing_below_one().is_ok(), || format!("{}: ã(u ≤ 0) ≠ 0", q.g0.label));
        let tau = match q.tau_q() {
            Ok(t) => t,
            Err(e) => {
                out.check(false, || format!("{}: {e}", name(&q)));
                continue;
            }
        };
        for iota in 0..q.rank() {
            for jota in 0..q.rank() {
                for u in -INVERSE_WINDOW..=INVERSE_WINDOW {
                    let c = qcartan::pairing_identity(&q, &tau, &s, iota, jota, u).unwrap();
                    out.check(c.equal, || format!("{}: pairing ι={iota} ȷ={jota} u={u}", name(&q)));
                }
                out.check(qcartan::vanishing_check(&q, &s, iota, jota), || {
                    format!("{}: vanishing ι={iota} ȷ={jota}", name(&q))
                });
            }
        }
        for oi in &q.orbits {
            for oj in &q.orbits {
                pairs_tested += 1;
                if !oi.iter().any(|&a| oj.iter().any(|&b| qcartan::vanishing_check(&q, &s, a, b))) {
                    pairs_without_choice += 1;
                }
            }
        }
    }
    let a2 = QuantumCartan::build(&CartanData::from_label("A2").unwrap())
        .invert(INVERSE_WINDOW)
        .unwrap();
    let a11: Vec<i64> = [1, 3, 5, 7].iter().map(|&u| a2.coeff(0, 0, u).unwrap()).collect();
    let a12: Vec<i64> = [2, 4, 6, 8].iter().map(|&u| a2.coeff(0, 1, u).unwrap()).collect();
    out.check(a11 == [1, 0, -1, 1], || format!("A2 ã11 {a11:?}"));
    out.check(a12 == [1, -1, 0, 1], || format!("A2 ã12 {a12:?}"));
    (out, pairs_tested, pairs_without_choice)
}

fn criterion_5() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    for (label, cycles) in pairs(&["A1", "A2", "A3", "A4", "A5", "D4", "D5"]) {
        for q in data(label, &cycles, 3, &mut rng) {
            let o = q.adapted_word().unwrap();
            for (i, p) in lweight::khat(&o) {
                let d = lweight::delta_identity(&o, i, p).unwrap();
                out.check(d.in_kernel && d.holds, || format!("{}: ({}, {p})", name(&q), i + 1));
            }
            let s = QuantumCartan::build(&q.g0).invert(qcartan::default_cutoff(&q)).unwrap();
            for k in 0..o.len() {
                for t in 0..o.len() {
                    let c = qcartan::nu_beta_bridge(&o, &s, k, t).unwrap();
                    out.check(c.equal, || format!("{}: bridge ({}, {})", name(&q), k + 1, t + 1));
                }
            }
        }
    }
    out
}

/// Poset isomorphism over all `β ∈ Q⁺` with `|β| ≤ 4`; failures at
/// non-roots are listed separately.
fn criterion_6() -> (Outcome, Vec<String>) {
    let mut out = Outcome::new();
    let mut non_roots = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
    for (label, cycles) in small_pairs() {
        for q in data(label, &cycles, 2, &mut rng) {
            let o = q.adapted_word().unwrap();
            let roots: BTreeSet<Root> = o.betas().iter().cloned().collect();
            let checker = PosetChecker::new(&o).unwrap();
            for beta in kostant::nonnegative_weights(q.rank(), 4) {
                let r = checker.check(&beta, None).unwrap();
                let ok = r.passed();
                if roots.contains(&beta) {
                    out.check(ok, || format!("{}: β = {beta} ({} discrepancies)", name(&q), r.discrepancies.len()));
                } else {
                    out.check(ok, || {
                        let msg = format!("{}: β = {beta} (not a root, {} discrepancies)", name(&q), r.discrepancies.len());
                        non_roots.push(msg.clone());
                        msg
                    });
                }
            }
        }
    }
    (out, non_roots)
}

fn criterion_7() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    for (label, cycles) in small_pairs() {
        for q in data(label, &cycles, 2, &mut rng) {
            let o = q.adapted_word().unwrap();
            let ord = &o.order;
            let signs = kostant::sign_pattern_failures(ord);
            out.checked += ord.len() * ord.len();
            if !signs.is_empty() {
                out.failures.push(format!("{}: sign pattern at {signs:?}", name(&q)));
            }
            if ord.len() <= 8 {
                let ok = kostant::injective_on_box(ord, 3, u64::MAX);
                out.check(ok == Some(true), || format!("{}: box injectivity {ok:?}", name(&q)));
            }
            let t = kostant::rho_matrix(ord);
            for beta in kostant::nonnegative_weights(q.rank(), 6) {
                let kps = kostant::enumerate(ord, &beta, None).unwrap();
                let rhos: BTreeSet<Vec<i64>> = kps.iter().map(|m| kostant::rho_with(&t, &m.mults)).collect();
                out.check(rhos.len() == kps.len(), || format!("{}: ρ on KP({beta})", name(&q)));
            }
            // ρ is linear, so the unit partitions 𝐦_α settle (iii) on all of ℤ^L
            for w in q.all_adapted_words(1_000_000).unwrap() {
                let wo = ConvexOrder::new(q.clone(), w).unwrap();
                let units: Vec<KostantPartition> =
                    (0..wo.len()).map(|k| KostantPartition::single(&wo.order, k)).collect();
                for (k, ok) in kostant::commutation_equivariance(&wo.order, &units).unwrap() {
                    out.check(ok, || format!("{}: swap at {} of {:?}", name(&q), k + 1, wo.word()));
                }
            }
        }
    }
    out
}

fn criterion_8() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    for (label, cycles) in small_pairs() {
        for q in data(label, &cycles, 5, &mut rng) {
            let words = q.all_adapted_words(1_000_000).unwrap();
            let classes: BTreeSet<Vec<usize>> =
                words.iter().map(|w| commutation_normal_form(&q.cartan, w)).collect();
            out.check(classes.len() == 1, || format!("{}: {} classes", name(&q), classes.len()));
            let maps: BTreeSet<_> = words
                .iter()
                .map(|w| ConvexOrder::new(q.clone(), w.clone()).unwrap().omega_map())
                .collect();
            out.check(maps.len() == 1, || format!("{}: {} Ω̃ maps", name(&q), maps.len()));
        }
    }
    out
}

fn criterion_9() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 9);
    let mut labels: Vec<(String, Vec<Vec<usize>>)> = Vec::new();
    for n in 1..=8 {
        labels.push((format!("A{n}"), vec![]));
    }
    for n in 4..=8 {
        labels.push((format!("D{n}"), vec![]));
    }
    for n in 6..=8 {
        labels.push((format!("E{n}"), vec![]));
    }
    for (family, ranks) in [(Family::B, 2..=5), (Family::C, 3..=6), (Family::F, 4..=4), (Family::G, 2..=2)] {
        for n in ranks {
            let (l, cyc) = folding_for(TypeLabel::new(family, n).unwrap()).unwrap();
            labels.push((l.to_string(), cyc));
        }
    }
    for (label, cycles) in &labels {
        for q in data(label, cycles, 3, &mut rng) {
            let hv = dual_coxeter(q.g0.label);
            out.check(q.image_formula().len() == q.num_positive_roots(), || {
                format!("{}: h^∨ = {hv}, |σ| = {}", name(&q), q.r())
            });
        }
    }
    for (t, (table, search)) in d_cross_check(8).unwrap() {
        out.check(table == search, || format!("{t}: table {table:?}, search {search:?}"));
    }
    out
}

fn report(id: u32, title: &str, start: Instant, budget: Option<Duration>, out: &Outcome) -> bool {
    let elapsed = start.elapsed();
    let in_time = budget.is_none_or(|b| elapsed < b);
    let ok = out.failures.is_empty() && in_time;
    let limit = budget.map_or(String::new(), |b| format!(" < {}s", b.as_secs()));
    println!(
        "{} criterion {id}: {title} [{} checks, {:.2}s{limit}]",
        if ok { "PASS" } else { "FAIL" },
        out.checked,
        elapsed.as_secs_f64()
    );
    for f in out.failures.iter().take(10) {
        println!("    {f}");
    }
    if out.failures.len() > 10 {
        println!("    ... {} more", out.failures.len() - 10);
    }
    if !in_time {
        println!("    runtime budget exceeded");
    }
    ok
}

fn main() -> ExitCode {
    let mut all = true;
    let t = Instant::now();
    all &= report(1, "image formula and |Im Ω̃| = L", t, Some(IMAGE_BUDGET), &criterion_1());
    let t = Instant::now();
    all &= report(2, "A2 worked example", t, None, &criterion_2());
    let t = Instant::now();
    all &= report(3, "B2 worked example from (A3, (1 3))", t, None, &criterion_3());
    let t = Instant::now();
    let (out4, tested, without) = criterion_4();
    all &= report(4, "inverse quantum Cartan matrix and its identities, U = 40", t, Some(INVERSE_BUDGET), &out4);
    println!("    vanishing with some ι, ȷ per orbit pair: {} of {tested} pairs", tested - without);
    let t = Instant::now();
    all &= report(5, "δ partial sums and the (ν, β) bridge", t, Some(DELTA_BUDGET), &criterion_5());
    let t = Instant::now();
    let (out6, non_roots) = criterion_6();
    all &= report(6, "Ω_Q poset isomorphism for |β| ≤ 4", t, Some(POSET_BUDGET), &out6);
    if !non_roots.is_empty() {
        println!("    {} of the failures are at β ∉ R⁺", non_roots.len());
    }
    let t = Instant::now();
    all &= report(7, "sign pattern, injectivity and commutation of ρ", t, None, &criterion_7());
    let t = Instant::now();
    all &= report(8, "adapted words form one class with one Ω̃", t, None, &criterion_8());
    let t = Instant::now();
    all &= report(9, "h^∨, |σ| and d_i tables", t, None, &criterion_9());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
