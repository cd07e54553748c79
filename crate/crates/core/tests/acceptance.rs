//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64 as C64;
use rand::Rng;

use upmlab::bounds;
use upmlab::device::{self, ProgrammableDevice};
use upmlab::linalg::{self, random_pure_state, random_pure_state_from, HermitianOperator, Matrix, Povm, PureState};
use upmlab::metrics;
use upmlab::packing::{self, StateNet, DEFAULT_STOP_AFTER};
use upmlab::rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let el = start.elapsed();
    ensure(el < limit, || format!("{what} took {el:?}, limit {limit:?}"))
}

/// Independent O(n²) Euclidean scan.
fn min_euclid(points: &[Vec<f64>]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let s: f64 = points[i].iter().zip(&points[j]).map(|(a, b)| (a - b) * (a - b)).sum();
            best = best.min(s.sqrt());
        }
    }
    best
}

fn overlap_sq(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C64>().norm_sqr()
}

fn oracle_d(a: &[C64], b: &[C64]) -> f64 {
    (1.0 - overlap_sq(a, b)).max(0.0).sqrt()
}

/// Independent O(A²) scan of pure-state distances.
fn min_state_distance(states: &[PureState]) -> f64 {
    let mut best: f64 = 1.0;
    for i in 0..states.len() {
        for j in i + 1..states.len() {
            best = best.min(oracle_d(states[i].amplitudes(), states[j].amplitudes()));
        }
    }
    best
}

fn criterion_1() -> Check {
    let mut notes = Vec::new();
    for (n, eps) in [(2usize, 0.02), (3, 0.05), (3, 0.02), (4, 0.05)] {
        let start = Instant::now();
        let net = packing::greedy_maximal_packing(n, 2.0 * eps, 1, DEFAULT_STOP_AFTER).map_err(|e| e.to_string())?;
        within(start, Duration::from_secs(60), &format!("packing ({n}, {eps})"))?;
        let count = net.count() as f64;
        let lemma = 1.0 / (10.0 * eps).powi(n as i32 - 1);
        let volume = ((1.0 / eps).powi(n as i32) - (1.0 / eps - 1.0).powi(n as i32)) / 3f64.powi(n as i32);
        ensure(count >= lemma, || format!("({n}, {eps}): {count} < {lemma}"))?;
        ensure(count >= volume, || format!("({n}, {eps}): {count} < volume {volume}"))?;
        let sep = min_euclid(&net.points);
        ensure(sep >= 2.0 * eps, || format!("({n}, {eps}): separation {sep}"))?;
        ensure(net.points.iter().all(|p| (p.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12), || {
            format!("({n}, {eps}): point off the sphere")
        })?;
        notes.push(format!("({n},{eps}) J={} lemma={lemma:.1} vol={volume:.1}", net.count()));
    }
    Ok(notes.join("; "))
}

fn criterion_2() -> Check {
    let mut notes = Vec::new();
    for delta in [1e-4, 1e-5] {
        let start = Instant::now();
        let net = packing::build_state_net(2, delta, 0, DEFAULT_STOP_AFTER).map_err(|e| e.to_string())?;
        let min_d = min_state_distance(&net.states);
        within(start, Duration::from_secs(300), &format!("qubit net at {delta}"))?;
        let a = net.count() as u64;
        let m = bounds::theorem1_bound(a, 2).map_err(|e| e.to_string())?;
        let closed_form = (1.0 / (12800.0 * delta)).ceil().max(1.0) as u64;
        ensure(m >= closed_form, || format!("delta {delta}: ceil(A/2) = {m} < {closed_form}"))?;
        ensure(bounds::qubit_bound(delta) == Ok(closed_form), || format!("qubit_bound({delta}) disagrees with {closed_form}"))?;
        let t = (16.0 * delta).sqrt();
        ensure(min_d > t, || format!("delta {delta}: min D {min_d} <= {t}"))?;
        ensure((min_d - net.min_pairwise_d).abs() <= 1e-12, || format!("stored min D {} != rescanned {min_d}", net.min_pairwise_d))?;
        notes.push(format!("delta={delta:e} A={a} m>={m} closed_form={closed_form} minD={min_d:.5}"));
    }
    Ok(notes.join("; "))
}

fn criterion_3() -> Check {
    let delta: f64 = 1.0 / 2400.0;
    let t = (24.0 * delta).sqrt();
    let start = Instant::now();
    let raw = packing::antipodal_packing(3, 2.0 * t * (1.0 + 1e-9), 0, DEFAULT_STOP_AFTER).map_err(|e| e.to_string())?;
    let half = packing::select_half(&raw).map_err(|e| e.to_string())?;
    let states = half.iter().map(|x| packing::real_embed(x)).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
    let net = StateNet::certify(3, t, states).map_err(|e| e.to_string())?;
    within(start, Duration::from_secs(60), "qutrit net")?;
    ensure(half.len() * 2 == raw.count(), || format!("half {} of {}", half.len(), raw.count()))?;
    let min_d = min_state_distance(&net.states);
    ensure(min_d > 0.1, || format!("min D {min_d} <= 0.1"))?;
    let needed = bounds::lemma2_formula(3, 0.1) / 2.0;
    ensure(net.count() as f64 >= needed, || format!("count {} < {needed}", net.count()))?;
    let built = packing::build_state_net(3, delta, 0, DEFAULT_STOP_AFTER).map_err(|e| e.to_string())?;
    ensure(min_state_distance(&built.states) > 0.1, || "build_state_net separation".into())?;
    Ok(format!("A={} (antipodal J={}), minD={min_d:.4}, needed>={needed}", net.count(), raw.count()))
}

fn criterion_4() -> Check {
    let mut r = rng::seeded(404);
    for k in 0..10_000 {
        let d = 2 + k % 4;
        let a = random_pure_state_from(&mut r, d);
        let b = random_pure_state_from(&mut r, d);
        let c = random_pure_state_from(&mut r, d);
        let dist = |x: &PureState, y: &PureState| metrics::pure_state_distance(x, y).unwrap();
        let (ab, bc, ac) = (dist(&a, &b), dist(&b, &c), dist(&a, &c));
        ensure(ac <= ab + bc + 1e-10, || format!("triangle fails: {ac} > {ab} + {bc}"))?;
        let theta: f64 = r.random::<f64>() * std::f64::consts::TAU;
        let shifted = dist(&a.with_phase(theta), &b);
        ensure((shifted - ab).abs() <= 1e-10, || format!("phase changes D: {shifted} vs {ab}"))?;
        ensure((ab - oracle_d(a.amplitudes(), b.amplitudes())).abs() <= 1e-12, || "D disagrees with oracle".into())?;
    }
    for _ in 0..1_000 {
        let a = random_pure_state_from(&mut r, 2);
        let b = random_pure_state_from(&mut r, 2);
        let u = random_pure_state_from(&mut r, 3);
        let v = random_pure_state_from(&mut r, 3);
        let base = metrics::pure_state_distance(&a, &b).unwrap();
        let big = metrics::pure_state_distance(&a.tensor(&u), &b.tensor(&v)).unwrap();
        ensure(big >= base - 1e-12, || format!("tensor monotonicity: {big} < {base}"))?;
    }
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let a = rng::unit_vector(&mut r, 3);
        let b = rng::unit_vector(&mut r, 3);
        let (qa, qb) = (packing::bloch_to_qubit(&a).unwrap(), packing::bloch_to_qubit(&b).unwrap());
        let d = metrics::pure_state_distance(&qa, &qb).unwrap();
        let e: f64 = a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt() / 2.0;
        worst = worst.max((d - e).abs());
    }
    ensure(worst <= 1e-12, || format!("Bloch correspondence off by {worst}"))?;
    Ok(format!("Bloch max deviation {worst:.2e}"))
}

fn pauli() -> [Matrix; 3] {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    [
        Matrix::from_rows(&[vec![z, one], vec![one, z]]).unwrap(),
        Matrix::from_rows(&[vec![z, -i], vec![i, z]]).unwrap(),
        Matrix::from_rows(&[vec![one, z], vec![z, -one]]).unwrap(),
    ]
}

fn random_effect<R: Rng>(r: &mut R) -> HermitianOperator {
    let u = random_pure_state_from(r, 2);
    let (a, b): (f64, f64) = (r.random(), r.random());
    let p = u.projector();
    let q = HermitianOperator::identity(2).sub(&p);
    p.scale(a).add(&q.scale(b))
}

fn random_two_outcome<R: Rng>(r: &mut R) -> Povm {
    let e = random_effect(r);
    Povm::new(vec![e.clone(), HermitianOperator::identity(2).sub(&e)]).unwrap()
}

fn fibonacci_sphere(n: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
            let rho = (1.0 - z * z).sqrt();
            let phi = golden * k as f64;
            [rho * phi.cos(), rho * phi.sin(), z]
        })
        .collect()
}

fn criterion_5() -> Check {
    let paulis = pauli();
    let samples = fibonacci_sphere(100_000);
    let mut r = rng::seeded(505);
    let mut worst_gap: f64 = 0.0;
    for _ in 0..200 {
        let p = random_two_outcome(&mut r);
        let g = random_two_outcome(&mut r);
        let exact = metrics::povm_dist(&p, &g).map_err(|e| e.to_string())?;
        let exact = exact.exact.ok_or("no exact value")?;
        // tr(ρΔ) = (tr Δ + r·tr(σΔ))/2 with ρ = (1 + r·σ)/2
        let coeffs: Vec<(f64, [f64; 3])> = p
            .elements()
            .iter()
            .zip(g.elements())
            .map(|(a, b)| {
                let delta = a.matrix() - b.matrix();
                let t = delta.trace().re;
                let v = [0, 1, 2].map(|k| (&paulis[k] * &delta).trace().re);
                (t, v)
            })
            .collect();
        let mut best: f64 = 0.0;
        for s in &samples {
            let val: f64 = coeffs.iter().map(|(t, v)| ((t + v[0] * s[0] + v[1] * s[1] + v[2] * s[2]) / 2.0).abs()).sum();
            ensure(val <= exact + 1e-12, || format!("sample {val} exceeds exact {exact}"))?;
            best = best.max(val);
        }
        worst_gap = worst_gap.max(exact - best);
        ensure(exact - best <= 1e-4, || format!("exact {exact} vs sampled max {best}"))?;
    }
    let z = Povm::from_projectors(&[PureState::basis(2, 0), PureState::basis(2, 1)]).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = PureState::new(vec![C64::new(h, 0.0), C64::new(h, 0.0)]).unwrap();
    let minus = PureState::new(vec![C64::new(h, 0.0), C64::new(-h, 0.0)]).unwrap();
    let x = Povm::from_projectors(&[plus, minus]).unwrap();
    let zx = metrics::povm_dist(&z, &x).unwrap().value();
    ensure((zx - 2f64.sqrt()).abs() <= 1e-12, || format!("Z vs X gives {zx}"))?;
    Ok(format!("max exact-sampled gap {worst_gap:.2e}; Z/X = {zx:.15}"))
}

fn criterion_6() -> Check {
    let mut r = rng::seeded(606);
    let mut max_ratio: f64 = 0.0;
    for k in 0..1_000 {
        let d = 2 + k % 3;
        let phi = random_pure_state_from(&mut r, d);
        let n = 1 + k % 5;
        let spread: f64 = 10f64.powf(-3.0 * r.random::<f64>());
        let mut states = Vec::new();
        let mut weights = Vec::new();
        for _ in 0..n {
            let noise = random_pure_state_from(&mut r, d);
            let amps: Vec<C64> =
                phi.amplitudes().iter().zip(noise.amplitudes()).map(|(a, b)| a + b * spread).collect();
            states.push(PureState::normalized(amps).unwrap());
            weights.push(r.random::<f64>() + 0.1);
        }
        let scale: f64 = (0.9 + 0.2 * r.random::<f64>()) / weights.iter().sum::<f64>();
        for w in &mut weights {
            *w = (*w * scale).min(1.0);
        }
        let mut mixture = HermitianOperator::zeros(d);
        for (w, s) in weights.iter().zip(&states) {
            mixture = mixture.add(&s.projector().scale(*w));
        }
        let eps = linalg::trace_norm(&mixture.sub(&phi.projector())).unwrap();
        let w = device::lemma1_extract(&weights, &states, &phi, eps).map_err(|e| e.to_string())?;
        let best = states.iter().map(|s| oracle_d(phi.amplitudes(), s.amplitudes())).fold(f64::INFINITY, f64::min);
        ensure((w.distance - best).abs() < 1e-12, || format!("witness {} not the closest {best}", w.distance))?;
        ensure(w.distance <= (2.0 * eps).sqrt() + 1e-12, || format!("distance {} > sqrt(2 eps), eps {eps}", w.distance))?;
        ensure(w.mixture_defect <= 2.0 * eps + 1e-12, || format!("defect {} > 2 eps {eps}", w.mixture_defect))?;
        if eps > 0.0 {
            max_ratio = max_ratio.max(w.distance / (2.0 * eps).sqrt());
        }
    }
    Ok(format!("max D/sqrt(2eps) = {max_ratio:.3}"))
}

fn criterion_7() -> Check {
    let delta = 1e-4;
    let full = packing::build_state_net(2, delta, 7, DEFAULT_STOP_AFTER).map_err(|e| e.to_string())?;
    let threshold = bounds::net_threshold(2, delta).value;
    let mut notes = Vec::new();
    for a in [4usize, 8, 16] {
        let start = Instant::now();
        let net = StateNet::certify(2, threshold, full.states[..a].to_vec()).map_err(|e| e.to_string())?;
        let dev = ProgrammableDevice::clock_for_net(&net, 7).map_err(|e| e.to_string())?;
        let programs: Vec<PureState> = (0..a).map(|k| PureState::basis(a, k)).collect();
        let cert = device::theorem1_certificate(&dev, &net, delta, &programs).map_err(|e| e.to_string())?;
        within(start, Duration::from_secs(30), &format!("certificate A = {a}"))?;
        ensure(cert.pass, || format!("A = {a}: certificate fails at {:?}", cert.failing_alpha))?;
        ensure(cert.i == a && cert.a == a, || format!("A = {a}: I = {}", cert.i))?;
        ensure(cert.injective, || format!("A = {a}: assignment not injective"))?;
        let mut seen: Vec<usize> = cert.assignment.iter().map(|x| x.expect("assigned")).collect();
        seen.sort_unstable();
        seen.dedup();
        ensure(seen.len() == a, || format!("A = {a}: assignment repeats"))?;
        ensure(cert.m_bound == a.div_ceil(2) as u64, || format!("A = {a}: m_bound {}", cert.m_bound))?;
        notes.push(format!("A={a} I={} m_bound={}", cert.i, cert.m_bound));
    }
    Ok(notes.join("; "))
}

fn criterion_8() -> Check {
    let mut notes = Vec::new();
    let mut r = rng::seeded(808);
    for delta in [1e-3, 1e-2, 0.05, 0.0624] {
        let threshold = bounds::net_threshold(2, delta).value;
        // orthogonal pair has D = 1, above every non-vacuous threshold
        let phi = random_pure_state_from(&mut r, 2);
        let a = phi.amplitudes();
        let perp = PureState::new(vec![-a[1].conj(), a[0].conj()]).unwrap();
        let net = StateNet::certify(2, threshold, vec![phi, perp]).map_err(|e| e.to_string())?;
        for m in [1usize, 2, 3] {
            let dev = ProgrammableDevice::trivial(2, m, 2).map_err(|e| e.to_string())?;
            let programs: Vec<PureState> = (0..2).map(|k| random_pure_state(m, 80 + k)).collect();
            let cert = device::theorem1_certificate(&dev, &net, delta, &programs).map_err(|e| e.to_string())?;
            ensure(!cert.pass, || format!("delta {delta}, m {m}: trivial device passes"))?;
            ensure(cert.failing_alpha == Some(0), || format!("failing alpha {:?}", cert.failing_alpha))?;
            // ρ_0 = I/2 against a pure target: trace-norm gap exactly 1
            let err = cert.per_alpha_error[0];
            ensure((err - 1.0).abs() < 1e-9, || format!("per-alpha error {err}"))?;
        }
        notes.push(format!("delta={delta}: fails at alpha 0"));
    }
    Ok(notes.join("; "))
}

fn criterion_9() -> Check {
    let mut count = 0;
    let mut worst: f64 = 0.0;
    for (d, m) in [(2usize, 2usize), (2, 4), (3, 3)] {
        for k in 0..500u64 {
            let outcomes = 2 + (k % 3) as usize;
            let dev = ProgrammableDevice::random(d, m, outcomes, 9000 + k).map_err(|e| e.to_string())?;
            let g = if k % 2 == 0 {
                device::program_povm_pure(&dev, &random_pure_state(m, k)).map_err(|e| e.to_string())?
            } else {
                let (p, q) = (random_pure_state(m, k), random_pure_state(m, k + 10_000));
                let sigma = p.projector().scale(0.3).add(&q.projector().scale(0.7));
                device::program_povm(&dev, &sigma).map_err(|e| e.to_string())?
            };
            let report = linalg::validate_povm(g.elements(), 1e-9).map_err(|e| e.to_string())?;
            ensure(report.valid, || format!("(d={d}, m={m}, k={k}): {}", report.describe(1e-9)))?;
            worst = worst.max(report.identity_deviation);
            count += 1;
        }
    }
    Ok(format!("{count} programmed POVMs valid, max |sum - I| = {worst:.2e}"))
}

fn run_cli(args: &[&str], dir: &Path) -> Result<(i32, Vec<u8>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_upmlab"))
        .args(args)
        .current_dir(dir)
        .env_remove("UPM_SEED")
        .output()
        .map_err(|e| e.to_string())?;
    Ok((out.status.code().unwrap_or(-1), out.stdout))
}

fn criterion_10() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = dir.path();
    let setup: &[&[&str]] = &[
        &["net", "--d", "2", "--delta", "1e-3", "--seed", "3", "--out", "net.json"],
        &["device", "--kind", "clock", "--net", "net.json", "--out", "clock.json", "--programs-out", "progs.json"],
    ];
    for args in setup {
        let (code, _) = run_cli(args, p)?;
        ensure(code == 0, || format!("{args:?} exited {code}"))?;
    }
    let commands: &[&[&str]] = &[
        &["net", "--d", "2", "--delta", "1e-4", "--seed", "5"],
        &["net", "--d", "3", "--delta", "1e-3", "--seed", "5", "--raw"],
        &["bound", "--d", "3", "--delta-grid", "1e-2:1e-6:log10"],
        &["scaling", "--d", "2", "--delta-grid", "1e-3:1e-5:log10", "--seed", "1"],
        &["device", "--kind", "random", "--d", "2", "--m", "3", "--seed", "4"],
        &["device", "--kind", "clock", "--net", "net.json", "--seed", "2"],
        &["eval", "--device", "clock.json", "--net", "net.json", "--seed", "2"],
        &["certify", "--device", "clock.json", "--net", "net.json", "--programs", "progs.json", "--delta", "1e-3"],
    ];
    for args in commands {
        let (c1, o1) = run_cli(args, p)?;
        let (c2, o2) = run_cli(args, p)?;
        ensure(c1 == 0 && c2 == 0, || format!("{args:?} exited {c1}/{c2}"))?;
        ensure(!o1.is_empty() && o1 == o2, || format!("{args:?} output differs between runs"))?;
    }
    Ok(format!("{} commands byte-identical on rerun", commands.len()))
}

fn main() {
    // accept and ignore libtest flags passed through by `cargo test`
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let criteria: [Criterion; 10] = [
        ("1 packing count", criterion_1),
        ("2 qubit bound", criterion_2),
        ("3 general-case net", criterion_3),
        ("4 metric suite", criterion_4),
        ("5 exact dist oracle", criterion_5),
        ("6 mixture extraction", criterion_6),
        ("7 certificate positive", criterion_7),
        ("8 certificate negative", criterion_8),
        ("9 POVM preservation", criterion_9),
        ("10 determinism", criterion_10),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        if filter.as_deref().is_some_and(|flt| !name.contains(flt)) {
            continue;
        }
        let start = Instant::now();
        match f() {
            Ok(note) => println!("criterion {name}: PASS ({:.1?}) {note}", start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("criterion {name}: FAIL ({:.1?}) {why}", start.elapsed());
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
