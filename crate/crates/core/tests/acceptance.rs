//! Acceptance suite: one PASS/FAIL line per criterion, with the failing sub-checks listed
//! underneath. Exits nonzero when any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use qfm_core::blocklin::{self, max_norm, op_norm, random, PartitionedMatrix};
use qfm_core::fock::{self, CutoffPolicy};
use qfm_core::markov::{self, InstanceKind, MarkovReport, Outcome, TripletPartition};
use qfm_core::quasifree::{self, QuasiFreeState};
use qfm_core::specfun;
use qfm_core::sweep::{self, Execution};
use qfm_core::{CMatrix, CVector, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcomes {
    checks: Vec<(String, bool)>,
}

impl Outcomes {
    fn new() -> Self {
        Self { checks: Vec::new() }
    }

    fn check(&mut self, label: impl Into<String>, ok: bool) {
        self.checks.push((label.into(), ok));
    }
}

fn run(id: u32, title: &str, budget: Duration, body: impl FnOnce(&mut Outcomes)) -> bool {
    let mut out = Outcomes::new();
    let start = Instant::now();
    body(&mut out);
    let elapsed = start.elapsed();
    out.check(
        format!("runtime {:.3} s < {} s", elapsed.as_secs_f64(), budget.as_secs()),
        elapsed < budget,
    );
    let pass = out.checks.iter().all(|(_, ok)| *ok);
    println!(
        "{} criterion {id}: {title} ({:.3} s)",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    for (label, ok) in &out.checks {
        if !ok {
            println!("    failed: {label}");
        }
    }
    pass
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn diag(xs: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(xs.len(), xs.iter().map(|&x| c(x))))
}

fn disk_point(rng: &mut impl Rng, radius: f64) -> C64 {
    let r = radius * rng.random::<f64>().sqrt();
    C64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
}

fn counterexample_reproduction(out: &mut Outcomes) {
    let r = match markov::reproduce_counterexample() {
        Ok(r) => r,
        Err(e) => return out.check(format!("reproduction ran ({e})"), false),
    };
    let rep = &r.report;
    out.check(
        format!("PSD: min eigenvalue {:.6e} >= -1e-12", rep.psd.min_eigenvalue),
        rep.psd.min_eigenvalue >= -1e-12,
    );
    match &rep.felk {
        Outcome::Verdict(f) => {
            out.check(format!("felk r1 {:.3e} <= 1e-10", f.r1), f.r1 <= 1e-10);
            out.check(format!("felk r2 {:.3e} <= 1e-10", f.r2), f.r2 <= 1e-10);
        }
        Outcome::NotApplicable { reason } => out.check(format!("felk evaluated ({reason})"), false),
    }
    match &rep.det {
        Outcome::Verdict(d) => {
            out.check(format!("det lhs {:.12} = 1 within 1e-9", d.lhs), (d.lhs - 1.0).abs() <= 1e-9);
            out.check(format!("det rhs {:.12} = 1 within 1e-9", d.rhs), (d.rhs - 1.0).abs() <= 1e-9);
        }
        Outcome::NotApplicable { reason } => out.check(format!("det evaluated ({reason})"), false),
    }
    match &rep.flow {
        Outcome::Verdict(f) => {
            out.check(format!("flow check fails (max deviation {:.4e})", f.max_deviation), !f.pass);
            let at_one = f.deviation_at(1.0).unwrap_or(f64::NAN);
            out.check(format!("flow deviation at t = 1: {at_one:.4e} > 1e-3"), at_one > 1e-3);
        }
        Outcome::NotApplicable { reason } => out.check(format!("flow evaluated ({reason})"), false),
    }
    out.check(format!("entropy gap {:.6e} nats > 1e-4", rep.gap), rep.gap > 1e-4);
    out.check("structural detector returns none", rep.structural.is_none());
    out.check(
        format!("classical check fails (residual {:.4e})", rep.classical.residual),
        !rep.classical.pass,
    );
}

fn entropy_vs_fock(out: &mut Outcomes) {
    let cutoff = 60;
    for a in [diag(&[0.3]), diag(&[1.0]), diag(&[0.2, 0.5])] {
        let label = format!("{:?}", a.diagonal().iter().map(|x| x.re).collect::<Vec<_>>());
        let basis = fock::enumerate_basis(a.nrows(), CutoffPolicy::TotalNumber(cutoff)).unwrap();
        let rho = fock::density_operator(&a, &basis).unwrap();
        out.check(
            format!("{label}: tail weight {:.3e} <= 1e-7", rho.tail_weight),
            rho.tail_weight.abs() <= 1e-7,
        );
        let closed = quasifree::entropy_closed_form(&QuasiFreeState::from_matrix(a.clone()).unwrap());
        let numeric = fock::vn_entropy_numeric(&rho.operator).unwrap();
        out.check(
            format!("{label}: closed {closed:.12} vs numeric {numeric:.12} within 1e-6"),
            (closed - numeric).abs() <= 1e-6,
        );
    }
    let s = QuasiFreeState::from_matrix(diag(&[1.0])).unwrap().entropy();
    out.check(
        format!("single mode lambda = 1: {s:.10} = 2 ln 2"),
        (s - 2.0 * 2f64.ln()).abs() < 1e-12 && (s - 1.386_294_4).abs() < 1e-7,
    );
}

fn weyl_elements(out: &mut Outcomes) {
    let cutoff = 60;
    let basis = fock::enumerate_basis(1, CutoffPolicy::PerMode(cutoff)).unwrap();
    let (a, adag) = fock::ladder_operators(&basis, 0).unwrap();
    for z in [c(0.3), C64::new(0.0, 0.5), C64::new(0.4, 0.3)] {
        let spectral = fock::weyl_operator(&CVector::from_element(1, z), &basis).unwrap();
        let pade = (a.matrix() * z - adag.matrix() * z.conj()).exp();
        let (mut e_spectral, mut e_pade) = (0.0_f64, 0.0_f64);
        for m in 0..=10 {
            for n in 0..=10 {
                let closed = specfun::weyl_matrix_element(m, n, z).unwrap();
                e_spectral = e_spectral.max((spectral.operator.matrix()[(m, n)] - closed).norm());
                e_pade = e_pade.max((pade[(m, n)] - closed).norm());
            }
        }
        out.check(format!("z = {z}: spectral oracle error {e_spectral:.3e} <= 1e-8"), e_spectral <= 1e-8);
        out.check(format!("z = {z}: Pade oracle error {e_pade:.3e} <= 1e-8"), e_pade <= 1e-8);
    }
    let mu: f64 = 0.5;
    let z = C64::new(0.3, 0.2);
    let sum: C64 = (0..=specfun::MAX_WEYL_INDEX)
        .map(|n| specfun::weyl_matrix_element(n, n, z).unwrap() * (mu.powi(n as i32) * (1.0 - mu)))
        .sum();
    let expected = (-(z.norm_sqr() / 2.0) * (1.0 + mu) / (1.0 - mu)).exp();
    let err = (sum - c(expected)).norm();
    out.check(format!("thermal sum error {err:.3e} <= 1e-9"), err <= 1e-9);
}

fn weyl_composition(out: &mut Outcomes) {
    let cutoff = 50;
    let interior = cutoff / 2 + 1;
    let basis = fock::enumerate_basis(1, CutoffPolicy::PerMode(cutoff)).unwrap();
    let w = |z: C64| fock::weyl_operator(&CVector::from_element(1, z), &basis).unwrap().operator.into_matrix();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let pairs: Vec<(C64, C64)> = (0..20)
        .map(|_| (disk_point(&mut rng, 0.8), disk_point(&mut rng, 0.8)))
        .collect();
    let errors = sweep::map(&pairs, Execution::default(), |&(z, zp)| {
        let lhs = w(z) * w(zp);
        let rhs = w(z + zp) * C64::from_polar(1.0, (z.conj() * zp).im);
        max_norm(&(lhs - rhs).view((0, 0), (interior, interior)).into_owned())
    });
    let worst = errors.iter().fold(0.0_f64, |m, &e| m.max(e));
    out.check(
        format!("20 pairs, worst error {worst:.3e} <= 1e-7 on occupations <= {}", interior - 1),
        worst <= 1e-7,
    );
}

fn strong_subadditivity(out: &mut Outcomes) {
    let seeds: Vec<u64> = (0..1000).collect();
    let gaps = sweep::map(&seeds, Execution::default(), |&s| {
        markov::entropy_gap(&sweep::random_partitioned_psd(s))
    });
    let errors = gaps.iter().filter(|g| g.is_err()).count();
    out.check(format!("{errors} evaluation errors"), errors == 0);
    let min = gaps.iter().flatten().fold(f64::INFINITY, |m, &g| m.min(g));
    out.check(format!("min gap {min:.3e} >= -1e-9 over 1000 instances"), min >= -1e-9);
}

fn equivalence(out: &mut Outcomes) {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut jobs = Vec::new();
    for (kind, seed_base) in [(InstanceKind::Markov, 0u64), (InstanceKind::Random, 1000)] {
        for k in 0..100 {
            let dims = TripletPartition::new(
                rng.random_range(1..=3),
                rng.random_range(2..=3),
                rng.random_range(1..=3),
            )
            .unwrap();
            jobs.push((kind, dims, seed_base + k));
        }
    }
    let opts = markov::CheckOptions::default();
    let results = sweep::map(&jobs, Execution::default(), |&(kind, dims, seed)| {
        let a = markov::gen_instance(kind, dims, seed)?;
        let a = markov::pad_to_strict_positivity(&a, markov::PADDING_MARGIN)?;
        let r = markov::check(&a, &opts)?;
        Ok::<(InstanceKind, PartitionedMatrix, MarkovReport), qfm_core::Error>((kind, a, r))
    });
    let (mut verdict_mismatch, mut chain, mut classical, mut a13, mut errors) = (0, 0, 0, 0, 0);
    let mut markov_count = 0;
    for res in &results {
        let Ok((kind, a, r)) = res else {
            errors += 1;
            continue;
        };
        let structural = r.structural_pass();
        let flow = r.flow_pass();
        if flow != Some(structural) || r.gap_markov != structural {
            verdict_mismatch += 1;
        }
        let bmc2 = r.bmc2_pass();
        if (flow == Some(true) && bmc2 != Some(true)) || (bmc2 == Some(true) && r.felk_pass() != Some(true)) {
            chain += 1;
        }
        if *kind == InstanceKind::Markov {
            markov_count += 1;
            classical += usize::from(!r.classical.pass);
            a13 += usize::from(op_norm(&a.block(0, 2)) > 1e-10);
        }
    }
    out.check(format!("{errors} evaluation errors"), errors == 0);
    out.check(format!("{verdict_mismatch} verdict mismatches among flow, structural, gap"), verdict_mismatch == 0);
    out.check(format!("{chain} violations of flow => bmc2 => felk"), chain == 0);
    out.check(format!("{classical} of {markov_count} Markov instances fail the classical check"), classical == 0);
    out.check(format!("{a13} of {markov_count} Markov instances with ||A13|| > 1e-10"), a13 == 0);
}

fn second_quantization(out: &mut Outcomes) {
    let seeds: Vec<u64> = (0..20).collect();
    let exec = Execution::default();

    let errs = sweep::map(&seeds, exec, |&s| {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let m = 2 + (s as usize % 2);
        let b = fock::enumerate_basis(m, CutoffPolicy::TotalNumber(5)).unwrap();
        let u1 = random::unitary(m, &mut rng);
        let u2 = random::gaussian(m, m, &mut rng).scale(0.5);
        let lhs = fock::gamma(&(&u1 * &u2), &b).unwrap();
        let rhs = fock::gamma(&u1, &b).unwrap().compose(&fock::gamma(&u2, &b).unwrap()).unwrap();
        max_norm(&(lhs.matrix() - rhs.matrix()))
    });
    let worst = errs.iter().fold(0.0_f64, |m, &e| m.max(e));
    out.check(format!("Gamma(U1 U2) = Gamma(U1) Gamma(U2): worst {worst:.3e} <= 1e-9"), worst <= 1e-9);

    let errs = sweep::map(&seeds, exec, |&s| {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + s);
        let cutoff = 4;
        let (u1, u2) = (random::unitary(2, &mut rng), random::unitary(1, &mut rng));
        let b = fock::enumerate_basis(3, CutoffPolicy::TotalNumber(cutoff)).unwrap();
        let b1 = fock::enumerate_basis(2, CutoffPolicy::TotalNumber(cutoff)).unwrap();
        let b2 = fock::enumerate_basis(1, CutoffPolicy::TotalNumber(cutoff)).unwrap();
        let g = fock::gamma(&blocklin::block_diag(&[&u1, &u2]), &b).unwrap();
        let (g1, g2) = (fock::gamma(&u1, &b1).unwrap(), fock::gamma(&u2, &b2).unwrap());
        let mut err = 0.0_f64;
        for row in 0..b.len() {
            for col in 0..b.len() {
                let (r, s) = (b.state(row), b.state(col));
                let i1 = (b1.index_of(&r[..2]).unwrap(), b1.index_of(&s[..2]).unwrap());
                let i2 = (b2.index_of(&r[2..]).unwrap(), b2.index_of(&s[2..]).unwrap());
                let product = g1.matrix()[i1] * g2.matrix()[i2];
                err = err.max((g.matrix()[(row, col)] - product).norm());
            }
        }
        err
    });
    let worst = errs.iter().fold(0.0_f64, |m, &e| m.max(e));
    out.check(format!("Gamma(U1 + U2) factorization: worst {worst:.3e} <= 1e-9"), worst <= 1e-9);

    let errs = sweep::map(&seeds, exec, |&s| {
        let mut rng = ChaCha8Rng::seed_from_u64(200 + s);
        let a = random::hermitian(2, &mut rng);
        let t = rng.random_range(-2.0..2.0);
        let b = fock::enumerate_basis(2, CutoffPolicy::TotalNumber(5)).unwrap();
        let f = fock::dgamma(&a, &b).unwrap();
        let lhs = (f.matrix() * C64::new(0.0, t)).exp();
        let u = blocklin::matrix_function_complex(&a, blocklin::Domain::Real, |x| C64::from_polar(1.0, t * x))
            .unwrap();
        let rhs = fock::gamma(&u, &b).unwrap();
        max_norm(&(lhs - rhs.matrix()))
    });
    let worst = errs.iter().fold(0.0_f64, |m, &e| m.max(e));
    out.check(format!("expm(itF(A)) = Gamma(expm(itA)): worst {worst:.3e} <= 1e-9"), worst <= 1e-9);

    let basis = fock::enumerate_basis(2, CutoffPolicy::TotalNumber(40)).unwrap();
    let errs = sweep::map(&seeds, exec, |&s| {
        let mut rng = ChaCha8Rng::seed_from_u64(300 + s);
        let w = random::wishart(2, 3, &mut rng);
        let radius = blocklin::eig_hermitian(&w).unwrap().max_eigenvalue();
        let a = w.scale(0.4 * rng.random_range(0.1..=1.0) / radius);
        let state = QuasiFreeState::from_matrix(a).unwrap();
        let k = quasifree::gibbs_generator(&state);
        let trace = fock::gamma(&k, &basis).unwrap().trace().re;
        let det = state.log_normalization().exp();
        ((trace - det) / det).abs()
    });
    let worst = errs.iter().fold(0.0_f64, |m, &e| m.max(e));
    out.check(
        format!("Tr Gamma(A(I+A)^-1) vs det(I+A) at cutoff 40: worst relative {worst:.3e} <= 1e-8"),
        worst <= 1e-8,
    );
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let results = [
        run(1, "counterexample reproduction", secs(1), counterexample_reproduction),
        run(2, "closed-form entropy vs Fock oracle", secs(5), entropy_vs_fock),
        run(3, "Weyl matrix elements", secs(10), weyl_elements),
        run(4, "Weyl composition law", secs(10), weyl_composition),
        run(5, "strong subadditivity", secs(10), strong_subadditivity),
        run(6, "Markov criteria equivalence", secs(60), equivalence),
        run(7, "second quantization", secs(30), second_quantization),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
