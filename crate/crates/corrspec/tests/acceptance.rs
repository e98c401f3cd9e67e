//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use corrspec_core::correlation::{build_pure, spectrum_of, CorrelationSpectrum};
use corrspec_core::linalg::{eig_symmetric, max_principal_angle};
use corrspec_core::momentum::{build_blocks, recover_translation_invariant, state_momentum};
use corrspec_core::reconstruction::{first_order_ratio, recover, sensitivity_report, Perturbation, Verdict};
use corrspec_core::spectra::{
    gibbs_state, ground_state_krylov, haar_state, product_state, reduce_density, reduce_state, KrylovOptions,
};
use corrspec_core::subregion::{recover_disordered_subregion, recover_thermal_log, restrict_hamiltonian};
use corrspec_core::{
    Boundary, HamiltonianSpectrum, LatticeSpec, LocalBasis, LocalHamiltonian, NamedModel, Pauli, PauliString, Region, C64,
    DEFAULT_ZERO_TOLERANCE,
};
use faer::{Mat, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = DEFAULT_ZERO_TOLERANCE;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// State shared between criteria.
#[derive(Default)]
struct Ctx {
    /// `(lambda_min, lambda_max)` of every correlation spectrum computed.
    psd: Vec<(f64, f64)>,
    /// Zero-momentum states on periodic chains.
    ti_states: Vec<(Arc<LocalBasis>, Vec<C64>)>,
    /// States sampled for the invariance checks.
    samples: Vec<(Arc<LocalBasis>, Vec<C64>)>,
}

impl Ctx {
    fn spectrum(&mut self, v: &[C64], basis: &Arc<LocalBasis>) -> CorrelationSpectrum {
        let s = build_pure(v, basis).unwrap().spectrum(TOL).unwrap();
        self.psd.push((s.eigenvalues[0], s.lambda_max()));
        s
    }
}

fn ring(n: usize) -> Arc<LocalBasis> {
    Arc::new(LocalBasis::new(LatticeSpec::qubit_chain(n, Boundary::Periodic).unwrap()))
}

fn chain(n: usize) -> Arc<LocalBasis> {
    Arc::new(LocalBasis::new(LatticeSpec::qubit_chain(n, Boundary::Open).unwrap()))
}

fn sorted_linf(a: &[f64], b: &[f64]) -> f64 {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn c1(ctx: &mut Ctx) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    let mut count = 0;
    for n in [8, 10] {
        let basis = ring(n);
        let dim = 1usize << n;
        for seed in 0..20u64 {
            let h = LocalHamiltonian::random_disordered(basis.clone(), 1000 + seed, 1.0).unwrap();
            let spec = HamiltonianSpectrum::compute(&h).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for index in [0, dim / 2, rng.random_range(1..dim - 1)] {
                let v = spec.eigenstate(index).unwrap().state;
                let s = ctx.spectrum(&v, &basis);
                let r = corrspec_core::reconstruction::recover_from_spectrum(&s).unwrap();
                let theta = r.angle_to(h.coeffs()).unwrap();
                count += 1;
                worst = worst.max(theta);
                if r.verdict != Verdict::Unique || !(theta <= 1e-8) {
                    failures.push(format!("n={n} seed={seed} index={index} {} theta={theta:.2e}", r.verdict.as_str()));
                }
                if n == 8 && seed < 4 && index == 0 {
                    ctx.samples.push((basis.clone(), v));
                }
            }
        }
    }
    outcome(failures.is_empty(), format!("{count} eigenstates, max theta {worst:.2e} rad; failures {failures:?}"))
}

/// Zero-momentum eigenstate nearest to `target` that is non-degenerate.
fn zero_momentum_near(spec: &HamiltonianSpectrum, n: usize, target: usize) -> Option<Vec<C64>> {
    let lattice = LatticeSpec::qubit_chain(n, Boundary::Periodic).unwrap();
    let len = spec.len();
    (0..len).flat_map(|d| [target.checked_sub(d), (d > 0).then_some(target + d)]).flatten().filter(|&i| i < len).find_map(
        |i| {
            if spec.is_degenerate(i) {
                return None;
            }
            let v = spec.eigenstate(i).unwrap().state;
            (state_momentum(&lattice, &v) == Ok(0)).then_some(v)
        },
    )
}

struct TiPair {
    ground_lambda2: f64,
    mid_lambda2: f64,
}

fn c2(ctx: &mut Ctx, pairs: &mut Vec<TiPair>) -> Outcome {
    let n = 10;
    let basis = ring(n);
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    let mut skipped = Vec::new();
    let mut seed = 0u64;
    while pairs.len() < 10 && seed < 60 {
        seed += 1;
        let h = LocalHamiltonian::random_translation_invariant(basis.clone(), seed, 1.0).unwrap();
        let spec = HamiltonianSpectrum::compute(&h).unwrap();
        let ground = spec.eigenstate(0).unwrap().state;
        if spec.is_degenerate(0) || state_momentum(basis.spec(), &ground) != Ok(0) {
            skipped.push(seed);
            continue;
        }
        let Some(mid) = zero_momentum_near(&spec, n, spec.len() / 2) else {
            skipped.push(seed);
            continue;
        };
        let cell = h.translation_cell(0.0).unwrap();
        let mut lambda2 = [0.0; 2];
        for (slot, v) in [ground, mid].into_iter().enumerate() {
            let blocks = build_blocks(&v, &basis).unwrap();
            let r = recover_translation_invariant(blocks.block(0), TOL).unwrap();
            let theta = r.angle_to(&cell).unwrap();
            worst = worst.max(theta);
            if r.verdict != Verdict::Unique || !(theta <= 1e-8) {
                failures.push(format!("seed={seed} state={slot} {} theta={theta:.2e}", r.verdict.as_str()));
            }
            lambda2[slot] = r.lambda2;
            ctx.ti_states.push((basis.clone(), v));
        }
        pairs.push(TiPair { ground_lambda2: lambda2[0], mid_lambda2: lambda2[1] });
    }
    let pass = failures.is_empty() && pairs.len() == 10;
    outcome(
        pass,
        format!(
            "{} chains (skipped seeds {skipped:?}: degenerate or nonzero-momentum ground state), max theta {worst:.2e} rad; failures {failures:?}",
            pairs.len()
        ),
    )
}

fn c3(ctx: &mut Ctx) -> Outcome {
    let mut zero_dev: f64 = 0.0;
    let mut one_dev: f64 = 0.0;
    let mut upper = Vec::new();
    for n in [6, 8, 10] {
        let basis = ring(n);
        let up = product_state(basis.spec(), &vec![0; n]).unwrap();
        ctx.spectrum(&up, &basis);
        let blocks = build_blocks(&up, &basis).unwrap();
        for s in blocks.block_spectra().unwrap() {
            zero_dev = s[..8].iter().fold(zero_dev, |m, l| m.max(l.abs()));
            one_dev = s[8..].iter().fold(one_dev, |m, l| m.max((l - 1.0).abs()));
            if upper.is_empty() {
                upper = s[8..].iter().map(|l| (l * 1e9).round() / 1e9).collect();
            }
        }
        ctx.ti_states.push((basis, up));
    }
    let pass = zero_dev <= 1e-12 && one_dev <= 1e-12;
    outcome(
        pass,
        format!("max |lambda| over 8 low bands {zero_dev:.1e}; upper four bands are {upper:?}, max |lambda - 1| {one_dev:.3}"),
    )
}

fn c4(ctx: &mut Ctx) -> Outcome {
    let mut worst: f64 = 0.0;
    let states = std::mem::take(&mut ctx.ti_states);
    for (basis, v) in &states {
        let full = ctx.spectrum(v, basis);
        let union = build_blocks(v, basis).unwrap().spectrum_union().unwrap();
        worst = worst.max(sorted_linf(&full.eigenvalues, &union));
    }
    ctx.samples.extend(states.iter().take(3).cloned());
    let count = states.len();
    ctx.ti_states = states;
    outcome(worst <= 1e-10, format!("{count} translation-invariant states, max sorted l-inf {worst:.2e}"))
}

/// `exp(i t a.sigma)` on one site, site 0 being the most significant bit.
fn rotate_site(state: &[C64], n: usize, site: usize, t: f64, axis: [f64; 3]) -> Vec<C64> {
    let norm = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
    let [x, y, z] = axis.map(|a| a / norm);
    let (c, s) = (t.cos(), t.sin());
    let i = C64::new(0.0, 1.0);
    let u = [
        [C64::new(c, 0.0) + i * s * z, i * s * C64::new(x, -y)],
        [i * s * C64::new(x, y), C64::new(c, 0.0) - i * s * z],
    ];
    let stride = 1usize << (n - 1 - site);
    let mut out = state.to_vec();
    for idx in (0..state.len()).filter(|idx| idx & stride == 0) {
        let (a, b) = (state[idx], state[idx | stride]);
        out[idx] = u[0][0] * a + u[0][1] * b;
        out[idx | stride] = u[1][0] * a + u[1][1] * b;
    }
    out
}

fn c5(ctx: &mut Ctx) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut basis_dev: f64 = 0.0;
    let mut unitary_dev: f64 = 0.0;
    let samples = std::mem::take(&mut ctx.samples);
    for (k, (basis, v)) in samples.iter().enumerate() {
        let m = build_pure(v, basis).unwrap();
        let base = m.spectrum(TOL).unwrap();
        let p = Perturbation::random(m.len(), 1.0, 50 + k as u64, 0).unwrap();
        let q = eig_symmetric(p.delta_m.as_ref()).unwrap().vectors;
        let rotated = q.transpose() * m.entries() * &q;
        let sym = Mat::from_fn(m.len(), m.len(), |i, j| 0.5 * (rotated[(i, j)] + rotated[(j, i)]));
        basis_dev = basis_dev.max(sorted_linf(&base.eigenvalues, &spectrum_of(&sym, TOL).unwrap().eigenvalues));

        let n = basis.spec().n();
        let axis = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(0.1..1.0)];
        let w = rotate_site(v, n, rng.random_range(0..n), rng.random_range(0.0..2.0 * PI), axis);
        unitary_dev = unitary_dev.max(sorted_linf(&base.eigenvalues, &ctx.spectrum(&w, basis).eigenvalues));
    }
    let worst_psd = ctx.psd.iter().map(|&(lo, hi)| -lo / hi).fold(f64::NEG_INFINITY, f64::max);
    let pass = worst_psd <= 1e-10 && basis_dev <= 1e-10 && unitary_dev <= 1e-10;
    outcome(
        pass,
        format!(
            "{} spectra, max -lambda_min/lambda_max {worst_psd:.1e}; {} states: basis change {basis_dev:.1e}, local unitary {unitary_dev:.1e}",
            ctx.psd.len(),
            samples.len()
        ),
    )
}

fn c6(ctx: &mut Ctx) -> Outcome {
    let n = 8;
    let basis = chain(n);
    let params = [("j".to_string(), 1.0), ("delta".to_string(), 0.6), ("field".to_string(), 0.3)].into();
    let h = LocalHamiltonian::named(&NamedModel::from_name("xxz", &params).unwrap(), basis.clone()).unwrap();
    let sz: Vec<f64> = {
        let mut c = vec![0.0; basis.len()];
        for x in 0..n {
            c[basis.index_of_pauli(&PauliString::single(x, Pauli::Z)).unwrap()] = 1.0;
        }
        c
    };
    let spec = HamiltonianSpectrum::compute(&h).unwrap();
    let mut worst: f64 = 0.0;
    let mut min_kernel = usize::MAX;
    let mut used = 0;
    for i in (0..spec.len()).filter(|&i| !spec.is_degenerate(i)).step_by(7).take(12) {
        let v = spec.eigenstate(i).unwrap().state;
        let s = ctx.spectrum(&v, &basis);
        let kernel = s.kernel();
        min_kernel = min_kernel.min(kernel.len());
        worst = worst.max(max_principal_angle(&[h.coeffs().to_vec(), sz.clone()], &kernel).unwrap());
        used += 1;
    }
    let xxz_ok = used > 0 && min_kernel >= 2 && worst <= 1e-6;

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut decoupled_min = usize::MAX;
    for _ in 0..5 {
        let levels: Vec<usize> = (0..n).map(|_| rng.random_range(0..2)).collect();
        let v = product_state(basis.spec(), &levels).unwrap();
        decoupled_min = decoupled_min.min(ctx.spectrum(&v, &basis).kernel_dim);
    }
    let pass = xxz_ok && decoupled_min > 1;
    outcome(
        pass,
        format!(
            "xxz: {used} non-degenerate eigenstates, min kernel_dim {min_kernel}, max angle of span(H, Sz) to kernel {worst:.1e}; decoupled product eigenstates min kernel_dim {decoupled_min}"
        ),
    )
}

fn disordered_ground(ctx: &mut Ctx, n: usize, seed: u64) -> Option<corrspec_core::CorrelationMatrix> {
    let basis = ring(n);
    let h = LocalHamiltonian::random_disordered(basis.clone(), seed, 1.0).unwrap();
    let v = HamiltonianSpectrum::compute(&h).unwrap().eigenstate(0).unwrap().state;
    let m = build_pure(&v, &basis).unwrap();
    let s = m.spectrum(TOL).unwrap();
    ctx.psd.push((s.eigenvalues[0], s.lambda_max()));
    (s.kernel_dim == 1).then_some(m)
}

fn c7(ctx: &mut Ctx) -> Outcome {
    let mut trials = 0;
    let mut violations = 0;
    let mut worst_ratio: f64 = 0.0;
    for seed in [71u64, 72, 73] {
        let Some(m) = disordered_ground(ctx, 8, seed) else {
            return outcome(false, format!("seed {seed} ground state is not unique"));
        };
        let r = sensitivity_report(&m, &[1e-4, 1e-3, 1e-2], 32, seed, TOL).unwrap();
        for row in &r.rows {
            trials += row.thetas.len();
            violations += row.thetas.iter().filter(|t| 0.5 * (2.0 * **t).sin() > row.bound).count();
            worst_ratio = worst_ratio.max(row.max_half_sin / row.bound);
        }
    }
    outcome(
        violations == 0,
        format!("{trials} trials, {violations} violations, max (sin 2theta / 2) / bound = {worst_ratio:.3}"),
    )
}

fn c8(ctx: &mut Ctx) -> Outcome {
    let mut ratios = Vec::new();
    for seed in [81u64, 82, 83, 84, 85] {
        let Some(m) = disordered_ground(ctx, 8, seed) else {
            return outcome(false, format!("seed {seed} ground state is not unique"));
        };
        let lambda2 = m.spectrum(TOL).unwrap().lambda2();
        let dir = Perturbation::random(m.len(), 1.0, seed, 0).unwrap();
        ratios.push(first_order_ratio(&m, &dir, 1e-3 * lambda2, TOL).unwrap().2);
    }
    let pass = ratios.iter().all(|r| (3.5..=4.5).contains(r));
    outcome(pass, format!("err(eps)/err(eps/2) at eps = 1e-3 lambda2: {ratios:.4?}"))
}

fn c9() -> Outcome {
    let n = 12;
    let region = Region::new(2, 8).unwrap();
    let basis = ring(n);
    let window = Arc::new(LocalBasis::for_region(basis.spec(), region).unwrap());
    let mut thetas = Vec::new();
    for seed in 0..8u64 {
        let h = LocalHamiltonian::random_disordered(basis.clone(), 900 + seed, 1.0).unwrap();
        let v = ground_state_krylov(&h, KrylovOptions { seed, ..KrylovOptions::default() }).unwrap().state;
        let rho = reduce_state(basis.spec(), &v, region).unwrap();
        let truth = restrict_hamiltonian(&h, region, &window).unwrap();
        let out = recover_disordered_subregion(&rho, &window, Some(truth.coeffs()), 1, TOL).unwrap();
        thetas.push(out.theta_trimmed.unwrap().to_degrees());
    }
    let mut sorted = thetas.clone();
    let med = median(&mut sorted);
    outcome(
        med <= 45.0,
        format!(
            "n=12, m_A=8, trim=1, ground states: median {med:.1} deg, spread {:.1}..{:.1} deg, per seed {thetas:.1?}",
            sorted[0],
            sorted[sorted.len() - 1]
        ),
    )
}

/// Dense `L_i` for the window basis from Kronecker products of Pauli matrices.
fn dense_pauli_op(basis: &LocalBasis, i: usize) -> Mat<C64> {
    let n = basis.spec().n();
    let z = C64::new(0.0, 0.0);
    let o = C64::new(1.0, 0.0);
    let im = C64::new(0.0, 1.0);
    let pauli = |l: u16| -> [[C64; 2]; 2] {
        match l {
            0 => [[o, z], [z, o]],
            1 => [[z, o], [o, z]],
            2 => [[z, -im], [im, z]],
            _ => [[o, z], [z, -o]],
        }
    };
    let mut letters = vec![0u16; n];
    for &(s, l) in basis.ops()[i].factors() {
        letters[s] = l;
    }
    let dim = 1usize << n;
    Mat::from_fn(dim, dim, |r, c| {
        letters.iter().enumerate().fold(o, |acc, (s, &l)| {
            let bit = n - 1 - s;
            acc * pauli(l)[(r >> bit) & 1][(c >> bit) & 1]
        })
    })
}

/// Trimmed angle between `-log rho` projected onto the window basis and the
/// truth, computed with dense matrices.
fn thermal_oracle(rho: &Mat<C64>, basis: &LocalBasis, truth: &[f64], trim: usize) -> f64 {
    let dim = rho.nrows();
    let e = rho.as_ref().self_adjoint_eigen(Side::Lower).unwrap();
    let vals: Vec<f64> = e.S().column_vector().iter().map(|x| x.re).collect();
    let u = e.U();
    let log = Mat::from_fn(dim, dim, |r, c| (0..dim).map(|k| u[(r, k)] * (-vals[k].ln()) * u[(c, k)].conj()).sum::<C64>());
    let n = basis.spec().n();
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (i, op) in basis.ops().iter().enumerate() {
        if !op.factors().iter().all(|&(s, _)| s >= trim && s + trim < n) {
            continue;
        }
        let l = dense_pauli_op(basis, i);
        let prod = log.as_ref() * l.as_ref();
        let c = (0..dim).map(|k| prod[(k, k)].re).sum::<f64>() / dim as f64;
        dot += c * truth[i];
        na += c * c;
        nb += truth[i] * truth[i];
    }
    (dot.abs() / (na * nb).sqrt()).min(1.0).acos()
}

fn c10() -> Outcome {
    let mut exact_theta: f64 = 0.0;
    let mut exact_beta: f64 = 0.0;
    let mut widest: f64 = 0.0;
    for (m, seed) in [(4, 1u64), (4, 2), (5, 3), (6, 4)] {
        let window = chain(m);
        let h = LocalHamiltonian::random_disordered(window.clone(), seed, 1.0).unwrap();
        let spec = HamiltonianSpectrum::compute(&h).unwrap();
        let e = spec.energies();
        // Double precision keeps the smallest Gibbs weight e^{-beta dE} only to
        // ~1e-16 e^{beta dE} relative accuracy, so beta dE stays below ~17.
        for beta in [0.3, 0.5] {
            widest = widest.max(beta * (e[e.len() - 1] - e[0]));
            let rho = spec.gibbs(beta).unwrap();
            let out = recover_thermal_log(&rho, &window, Some(h.coeffs()), 1).unwrap();
            exact_theta = exact_theta.max(out.theta_untrimmed.unwrap());
            exact_beta = exact_beta.max((out.beta.unwrap() / beta - 1.0).abs());
        }
    }

    let n = 8;
    let region = Region::new(2, 4).unwrap();
    let basis = ring(n);
    let window = Arc::new(LocalBasis::for_region(basis.spec(), region).unwrap());
    let mut thetas = Vec::new();
    let mut oracle_gap: f64 = 0.0;
    for seed in 0..5u64 {
        let h = LocalHamiltonian::random_disordered(basis.clone(), 100 + seed, 1.0).unwrap();
        let rho = gibbs_state(&h, 0.5).unwrap();
        let rho_a = reduce_density(basis.spec(), &rho, region).unwrap();
        let truth = restrict_hamiltonian(&h, region, &window).unwrap();
        let out = recover_thermal_log(&rho_a, &window, Some(truth.coeffs()), 1).unwrap();
        let theta = out.theta_trimmed.unwrap();
        let oracle = thermal_oracle(rho_a.matrix(), &window, truth.coeffs(), 1);
        oracle_gap = oracle_gap.max((theta - oracle).abs());
        thetas.push(theta.to_degrees());
    }
    let pass = exact_theta <= 1e-8 && exact_beta <= 1e-8 && oracle_gap <= 1e-8;
    outcome(
        pass,
        format!(
            "direct Gibbs (beta dE <= {widest:.1}): max theta {exact_theta:.1e}, max beta rel err {exact_beta:.1e}; partial trace n=8 |A|=4 beta=0.5: trimmed theta {thetas:.2?} deg, max gap to dense oracle {oracle_gap:.1e}"
        ),
    )
}

fn c11(pairs: &[TiPair]) -> Outcome {
    let wins = pairs.iter().filter(|p| p.mid_lambda2 > p.ground_lambda2).count();
    let ratios: Vec<f64> = pairs.iter().map(|p| p.mid_lambda2 / p.ground_lambda2).collect();
    outcome(
        pairs.len() == 10 && wins >= 8,
        format!("mid-spectrum lambda2(q=0) above ground in {wins}/{} chains, ratios {ratios:.2?}", pairs.len()),
    )
}

fn c12(ctx: &mut Ctx) -> Outcome {
    let basis = ring(8);
    let mut rel = Vec::new();
    let mut failures = 0;
    for seed in 0..20u64 {
        let v = haar_state(256, 1200 + seed);
        let s = ctx.spectrum(&v, &basis);
        let r = recover(&build_pure(&v, &basis).unwrap(), TOL).unwrap();
        let ratio = s.lambda1() / s.lambda_max();
        if r.verdict != Verdict::NoSolution || ratio < 1e3 * TOL {
            failures += 1;
        }
        rel.push(ratio);
        if seed < 3 {
            ctx.samples.push((basis.clone(), v));
        }
    }
    let mut sorted = rel.clone();
    let med = median(&mut sorted);
    outcome(
        failures == 0,
        format!(
            "20 Haar states, lambda1/lambda_S min {:.2e} median {med:.2e} max {:.2e}; {failures} failures",
            sorted[0],
            sorted[sorted.len() - 1]
        ),
    )
}

fn main() {
    let names = [
        "exact disordered recovery",
        "exact translation-invariant recovery via q=0 block",
        "product-state flat bands",
        "block-diagonalization consistency",
        "PSD and basis/local-unitary invariance",
        "symmetry degeneracy",
        "Davis-Kahan bound",
        "first-order perturbation ratio",
        "subregion disordered recovery",
        "thermal-log exactness",
        "ground-vs-excited lambda2 ordering",
        "Haar rejection",
    ];
    let start = Instant::now();
    let mut ctx = Ctx::default();
    let mut pairs = Vec::new();
    let mut results: Vec<Option<Outcome>> = (0..12).map(|_| None).collect();
    results[0] = Some(c1(&mut ctx));
    results[1] = Some(c2(&mut ctx, &mut pairs));
    results[2] = Some(c3(&mut ctx));
    results[3] = Some(c4(&mut ctx));
    results[5] = Some(c6(&mut ctx));
    results[6] = Some(c7(&mut ctx));
    results[7] = Some(c8(&mut ctx));
    results[8] = Some(c9());
    results[9] = Some(c10());
    results[10] = Some(c11(&pairs));
    results[11] = Some(c12(&mut ctx));
    results[4] = Some(c5(&mut ctx));

    let mut failed = 0;
    for (i, (name, r)) in names.iter().zip(results).enumerate() {
        let r = r.unwrap();
        failed += usize::from(!r.pass);
        println!("criterion {:>2} {}: {} ({})", i + 1, if r.pass { "PASS" } else { "FAIL" }, name, r.detail);
    }
    println!("acceptance: {} of 12 criteria passed in {:.1} s", 12 - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
