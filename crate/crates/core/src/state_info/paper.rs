//! Recomputation of the worked examples: the counterexamples for `lowerIC_10`
//! and for the columnwise-order conjecture, the binary-output gap between
//! `upperIC_01` and `upperIC_11`, the 3×3 LP example and the two models of
//! the uniform binary symmetric channel.

use serde::Serialize;

use crate::channel::{Channel, DetChannel};
use crate::decomposition::{enumerate_vertices, Decomposition};
use crate::error::{Error, Result};
use crate::info::kl_divergence_nats;
use crate::intrinsic::{ic11_bounds, ic11_exact, rank1_probs, upper_ic_via_vertices};
use crate::optim::{blahut_arimoto, Sense};

use super::model::{causal_encoder_si_useless, StateChannelModel};
use super::strategy::{c_f, CfOptions, Flag};

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub item: String,
    pub passed: bool,
    pub observed: f64,
    pub expected: f64,
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct PaperReport {
    pub checks: Vec<CheckOutcome>,
}

impl PaperReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// The first failing check as an error.
    pub fn into_result(self) -> Result<PaperReport> {
        if let Some(c) = self.checks.iter().find(|c| !c.passed) {
            return Err(Error::VerificationFailed {
                item: c.item.clone(),
                observed: c.observed.to_string(),
                expected: c.expected.to_string(),
            });
        }
        Ok(self)
    }

    fn close(&mut self, item: &str, observed: f64, expected: f64, tol: f64) {
        self.checks.push(CheckOutcome {
            item: item.to_string(),
            passed: (observed - expected).abs() <= tol,
            observed,
            expected,
            detail: format!("|observed - expected| <= {tol:e}"),
        });
    }

    fn greater(&mut self, item: &str, observed: f64, bound: f64) {
        self.checks.push(CheckOutcome {
            item: item.to_string(),
            passed: observed > bound,
            observed,
            expected: bound,
            detail: "observed > expected".into(),
        });
    }

    fn less(&mut self, item: &str, observed: f64, bound: f64) {
        self.checks.push(CheckOutcome {
            item: item.to_string(),
            passed: observed < bound,
            observed,
            expected: bound,
            detail: "observed < expected".into(),
        });
    }
}

/// Tolerance overrides; `None` keeps each check's own tolerance.
#[derive(Clone, Copy, Debug, Default)]
pub struct PaperCheckOptions {
    pub tol: Option<f64>,
}

/// The two-state model whose mixture is `[[0.05,0.1,0.85],[0,0.05,0.95]]`.
pub fn mixture_counterexample() -> StateChannelModel {
    let k1 = Channel::new(vec![vec![0.0, 0.1, 0.9], vec![0.0, 0.05, 0.95]]).expect("valid kernel");
    let k2 = Channel::new(vec![vec![0.9, 0.1, 0.0], vec![0.0, 0.05, 0.95]]).expect("valid kernel");
    StateChannelModel::uninformed(vec![k1, k2], vec![17.0 / 18.0, 1.0 / 18.0]).expect("valid model")
}

/// Minimum of a convex function on `[0, 1]`: grid scan, then golden-section
/// refinement around the best grid point.
fn segment_minimum(f: impl Fn(f64) -> f64, grid: usize) -> f64 {
    let mut best = (f64::INFINITY, 0usize);
    for k in 0..=grid {
        let v = f(k as f64 / grid as f64);
        if v < best.0 {
            best = (v, k);
        }
    }
    let (mut a, mut b) = (
        (best.1.saturating_sub(1)) as f64 / grid as f64,
        ((best.1 + 1).min(grid)) as f64 / grid as f64,
    );
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    while b - a > 1e-12 {
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - phi * (b - a);
        d = a + phi * (b - a);
    }
    best.0.min(f((a + b) / 2.0))
}

pub fn run_paper_checks(opts: &PaperCheckOptions) -> Result<PaperReport> {
    let tol = |default: f64| opts.tol.unwrap_or(default);
    let mut r = PaperReport::default();

    // (a) lowerIC_10 exceeds C(W).
    let w = Channel::new(vec![vec![0.8, 0.2, 0.0], vec![0.6, 0.35, 0.05]])?;
    let cert = blahut_arimoto(&w, 1e-14, 1_000_000).or_else(|e| match e {
        Error::MaxIterExceeded { best, .. } => Ok(*best),
        e => Err(e),
    })?;
    for (k, e) in [0.56696216, 0.43303784].iter().enumerate() {
        r.close(&format!("a: mu[{}]", k + 1), cert.input_dist[k], *e, tol(5e-8));
    }
    let c = &cert.output_dist;
    for (k, e) in [0.71339243, 0.26495568, 0.02165189].iter().enumerate() {
        r.close(&format!("a: c[{}]", k + 1), c[k], *e, tol(5e-8));
    }
    for x in 0..2 {
        r.close(&format!("a: D(W_{}||c) nats", x + 1), kl_divergence_nats(w.row(x), c), 0.03541501, tol(5e-8));
    }
    let (p0, p1) = ([0.65, 0.35, 0.0], [0.6, 0.4, 0.0]);
    let seg = segment_minimum(
        |t| {
            let x: Vec<f64> = p0.iter().zip(&p1).map(|(a, b)| (1.0 - t) * a + t * b).collect();
            kl_divergence_nats(&x, c)
        },
        10_000,
    );
    r.greater("a: min over L of D(x||c) nats", seg, 0.0369);
    r.greater("a: segment minimum exceeds C(W)", seg, kl_divergence_nats(w.row(0), c));

    // (b) encoder state information helps despite columnwise order.
    let model = mixture_counterexample();
    let mix = model.mixture();
    let cert = blahut_arimoto(&mix, 1e-14, 1_000_000).or_else(|e| match e {
        Error::MaxIterExceeded { best, .. } => Ok(*best),
        e => Err(e),
    })?;
    let tau = &cert.output_dist;
    for (k, e) in [0.01984385, 0.06984385, 0.9103123].iter().enumerate() {
        r.close(&format!("b: tau[{}]", k + 1), tau[k], *e, tol(5e-8));
    }
    let d_delta = kl_divergence_nats(mix.row(0), tau);
    let d_gamma = kl_divergence_nats(mix.row(1), tau);
    r.close("b: D(delta||tau) nats", d_delta, 0.0238286, tol(1e-7));
    r.close("b: D(gamma||tau) nats", d_gamma, 0.0238286, tol(1e-7));
    let zeta: Vec<f64> = (0..3)
        .map(|y| model.p_s[0] * model.kernels[0].get(0, y) + model.p_s[1] * model.kernels[1].get(1, y))
        .collect();
    let d_zeta = kl_divergence_nats(&zeta, tau);
    r.close("b: D(zeta||tau) nats", d_zeta, 0.0246518, tol(1e-7));
    r.greater("b: D(zeta||tau) > D(gamma||tau)", d_zeta, d_gamma);
    let verdict = causal_encoder_si_useless(&model, None, 1e-9)?;
    r.greater("b: capacity with encoder SI exceeds C(W)", verdict.capacity_with_si, verdict.capacity_without_si);

    // (c) upperIC_01 < upperIC_11 for a 3×2 channel with distinct entries.
    let w = Channel::new(vec![vec![0.9, 0.1], vec![0.6, 0.4], vec![0.2, 0.8]])?;
    let rp = rank1_probs(&w);
    r.close("c: upperRP(2) exact", rp.exact_perfect.unwrap_or(f64::NAN), 1.0, 0.0);
    let b = ic11_bounds(&w)?;
    r.close(
        "c: upperIC_11",
        if b.upper.is_exact() { b.upper.lo } else { f64::NAN },
        1.0,
        tol(1e-9),
    );
    let (u01, _) = upper_ic_via_vertices(&w, Flag::F01, &CfOptions::default())?;
    r.less("c: upperIC_01 < upperIC_11", u01, 1.0);

    // The 3×3 LP example.
    let w = Channel::new(vec![vec![0.3, 0.3, 0.4], vec![0.2, 0.5, 0.3], vec![0.4, 0.1, 0.5]])?;
    let (lo, _) = ic11_exact(&w, Sense::Minimize)?;
    let (hi, _) = ic11_exact(&w, Sense::Maximize)?;
    let l3 = 3f64.log2();
    r.close("concrete: lowerIC_11", lo, 0.4, tol(1e-6));
    r.close("concrete: upperIC_11", hi, 0.2 + 0.8 * l3, tol(1e-6));
    let b = ic11_bounds(&w)?;
    r.close("concrete: lower bracket start", b.lower.lo, 0.4, tol(1e-9));
    r.close("concrete: lower bracket end", b.lower.hi, 0.4 * l3, tol(1e-9));
    r.close("concrete: upper bracket start", b.upper.lo, 1.0, tol(1e-9));
    r.close("concrete: upper bracket end", b.upper.hi, 0.1 + 0.9 * l3, tol(1e-9));

    // Two models of the uniform binary symmetric channel.
    let u = Channel::uniform(2, 2);
    let vertices = enumerate_vertices(&u)?;
    let swap = DetChannel::new(2, vec![1, 0])?;
    let f = Decomposition::from_atoms(2, 2, &[(DetChannel::identity(2), 0.5), (swap, 0.5)])?;
    let g = Decomposition::from_atoms(
        2,
        2,
        &[(DetChannel::constant(2, 2, 0), 0.5), (DetChannel::constant(2, 2, 1), 0.5)],
    )?;
    let found = |l: &Decomposition| if vertices.iter().any(|v| v.distance(l) < 1e-8) { 1.0 } else { 0.0 };
    r.close("intro: F is a vertex", found(&f), 1.0, 0.0);
    r.close("intro: G is a vertex", found(&g), 1.0, 0.0);
    r.close("intro: C_10(F)", c_f(&f, Flag::F10)?, 1.0, tol(1e-9));
    r.close("intro: C_11(F)", c_f(&f, Flag::F11)?, 1.0, tol(1e-9));
    r.close("intro: C_10(G)", c_f(&g, Flag::F10)?, 0.0, tol(1e-9));
    r.close("intro: C_11(G)", c_f(&g, Flag::F11)?, 0.0, tol(1e-9));
    Ok(r)
}

/// Runs every check and fails with the first mismatch.
pub fn verify_paper_examples() -> Result<PaperReport> {
    run_paper_checks(&PaperCheckOptions::default())?.into_result()
}
