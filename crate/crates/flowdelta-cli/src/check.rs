//! Seeded random checks: eigenpairs, Rankine-Hugoniot residuals of the
//! constructed discontinuities and the speed ordering of classical patterns.

use std::fmt;

use flowdelta::classify::{self, Region};
use flowdelta::waves::{self, WaveKind};
use flowdelta::{SourceTerm, State, SystemParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXPONENTS: [f64; 5] = [-1.5, -1.0, -0.5, 0.5, 1.0];
const TOL: f64 = 1e-8;

pub struct Report {
    pub seed: u64,
    pub checked: usize,
    pub classified: usize,
    pub failures: Vec<String>,
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "seed {}: {} checks, {} Riemann problems classified, {} failures",
            self.seed,
            self.checked,
            self.classified,
            self.failures.len()
        )?;
        for m in self.failures.iter().take(20) {
            write!(f, "\n  {m}")?;
        }
        Ok(())
    }
}

fn random_params(rng: &mut ChaCha8Rng) -> SystemParams {
    let a = EXPONENTS[rng.gen_range(0..EXPONENTS.len())];
    let source = SourceTerm::constant(rng.gen_range(-0.2..0.2));
    SystemParams::new(a, rng.gen_range(2.0..8.0), source).expect("valid parameters")
}

fn random_state(rng: &mut ChaCha8Rng, rho_bar: f64) -> State {
    State::new(rng.gen_range(0.05..2.5 * rho_bar), rng.gen_range(-8.0..8.0))
}

/// `|A (∂U/∂W) r − λ (∂U/∂W) r|`, relative to the size of the terms.
fn eigen_residual(p: &SystemParams, s: State, t: f64) -> Option<f64> {
    let jac = p.conserved_jacobian(s, t).ok()?;
    let ev = p.eigenvalues(s, t);
    let vecs = p.eigenvectors(s, t).ok()?;
    let mut worst: f64 = 0.0;
    for (lambda, r) in [(ev.lambda_a, vecs.r_a), (ev.lambda_0, vecs.r_0)] {
        let w = [r[0], s.u_tilde * r[0] + s.rho * r[1]];
        let aw = [jac[0][0] * w[0] + jac[0][1] * w[1], jac[1][0] * w[0] + jac[1][1] * w[1]];
        let scale = 1.0 + aw[0].abs().max(aw[1].abs()) + (lambda * w[0]).abs().max((lambda * w[1]).abs());
        let res = (aw[0] - lambda * w[0]).abs().max((aw[1] - lambda * w[1]).abs());
        worst = worst.max(res / scale);
    }
    Some(worst)
}

pub fn run(seed: u64, samples: usize) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report { seed, checked: 0, classified: 0, failures: Vec::new() };
    for _ in 0..samples {
        let p = random_params(&mut rng);
        let t = rng.gen_range(0.0..5.0);
        let l = random_state(&mut rng, p.rho_bar);
        let r = random_state(&mut rng, p.rho_bar);
        if let Some(res) = eigen_residual(&p, l, t) {
            report.checked += 1;
            if res > TOL {
                report.failures.push(format!("eigenpair residual {res:e} at a={}, {l:?}, t={t}", p.a_exp));
            }
        }
        let Ok(pattern) = classify::classify_region(&p, l, r, t) else { continue };
        report.classified += 1;
        if pattern.region != Region::V {
            report.checked += 1;
            if !pattern.speeds_ordered() {
                report.failures.push(format!("{} speeds out of order: a={}, {l:?} -> {r:?}", pattern.label(), p.a_exp));
            }
        }
        for w in &pattern.waves {
            let discontinuity = matches!(w.kind, WaveKind::ShockA | WaveKind::Contact0 | WaveKind::ContactA);
            if !discontinuity || w.vertical || w.left.rho <= 0.0 || w.right.rho <= 0.0 || !w.speed_lo.is_finite() {
                continue;
            }
            report.checked += 1;
            let res = waves::rh_residual(&p, w.left, w.right, w.speed_lo, t);
            let fl = p.flux_or_zero(w.left, t);
            let fr = p.flux_or_zero(w.right, t);
            let scale = 1.0 + fl[0].abs().max(fl[1].abs()).max(fr[0].abs()).max(fr[1].abs());
            let rel = res[0].abs().max(res[1].abs()) / scale;
            if rel > TOL {
                report.failures.push(format!(
                    "{} in {}: RH residual {rel:e}, a={}, {:?} -> {:?}",
                    w.kind.symbol(),
                    pattern.label(),
                    p.a_exp,
                    w.left,
                    w.right
                ));
            }
        }
    }
    report
}
