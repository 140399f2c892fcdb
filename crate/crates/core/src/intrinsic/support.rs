//! Necessary conditions on the support of an optimal decomposition.
//!
//! Only the explicit patterns are checked. A full decision procedure would
//! need the kernel of the incidence matrix and is not implemented, so an
//! empty violation list does not prove optimality.

use serde::Serialize;

use crate::channel::DetChannel;
use crate::decomposition::Decomposition;
use crate::optim::Sense;

use super::rank::{rank1_probs, rank_profile};

const TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub rule: &'static str,
    pub detail: String,
}

fn label(d: &DetChannel) -> String {
    let im: Vec<String> = d.image().iter().map(|y| (y + 1).to_string()).collect();
    format!("[{}]", im.join(","))
}

/// Checks `λ` against the support patterns that rule out optimality for
/// `lowerIC_11` (`Minimize`) or `upperIC_11` (`Maximize`) of `reconstruct(λ)`.
pub fn validate_optimal_support(lambda: &Decomposition, sense: Sense) -> Vec<Violation> {
    let (m, n) = (lambda.m(), lambda.n());
    let atoms = lambda.atoms();
    let mut out = Vec::new();
    match sense {
        Sense::Maximize => {
            for (u, _) in atoms.iter().filter(|(d, _)| d.rank() == 1) {
                let j = u.apply(0);
                for (d, _) in atoms.iter().filter(|(d, _)| d != u) {
                    if d.column_weight(j) + 2 <= m {
                        out.push(Violation {
                            rule: "max.pattern",
                            detail: format!(
                                "{} has column {} weight {} <= m-2 alongside U_{}",
                                label(d),
                                j + 1,
                                d.column_weight(j),
                                j + 1
                            ),
                        });
                    }
                }
            }
            let w = lambda.reconstruct();
            let rp = rank1_probs(&w);
            let profile = rank_profile(lambda);
            let p1 = profile.get(1);
            if (p1 - rp.lower_rank1).abs() > TOL {
                out.push(Violation {
                    rule: "rank-one mass",
                    detail: format!("P(1) = {p1} but lowerRP(1) = {}", rp.lower_rank1),
                });
            }
            if rp.lower_rank1 > 0.0 {
                let ul = lambda.weight_of(&DetChannel::constant(m, n, rp.ell));
                if (ul - rp.lower_rank1).abs() > TOL {
                    out.push(Violation {
                        rule: "rank-one mass",
                        detail: format!("weight of U_{} is {ul}, expected {}", rp.ell + 1, rp.lower_rank1),
                    });
                }
                let p2 = profile.get(2);
                if (p2 - (1.0 - rp.lower_rank1)).abs() > TOL {
                    out.push(Violation {
                        rule: "rank-two mass",
                        detail: format!("P(2) = {p2}, expected {}", 1.0 - rp.lower_rank1),
                    });
                }
            }
        }
        Sense::Minimize => {
            let o = m.min(n);
            let perfect: Vec<&DetChannel> = atoms.iter().map(|(d, _)| d).filter(|d| d.rank() == o).collect();
            if m <= n {
                // A column of P_1 + ... + P_l with weight > 1 already shows up in a pair.
                for (a, p) in perfect.iter().enumerate() {
                    for q in &perfect[a + 1..] {
                        if (0..n).any(|j| (0..m).filter(|&x| p.apply(x) == j || q.apply(x) == j).count() > 1) {
                            out.push(Violation {
                                rule: "min.pattern (m<=n)",
                                detail: format!("perfect atoms {} and {} share a column", label(p), label(q)),
                            });
                        }
                    }
                }
            }
            if m >= n && perfect.len() >= 2 && perfect.len() <= 20 {
                for mask in 1u32..(1 << perfect.len()) {
                    if mask.count_ones() < 2 {
                        continue;
                    }
                    let set: Vec<&DetChannel> =
                        (0..perfect.len()).filter(|k| mask >> k & 1 == 1).map(|k| perfect[k]).collect();
                    let missing = (0..n).find(|&j| !(0..m).any(|x| set.iter().all(|d| d.apply(x) == j)));
                    if let Some(j) = missing {
                        let names: Vec<String> = set.iter().map(|d| label(d)).collect();
                        out.push(Violation {
                            rule: "min.pattern (m>=n)",
                            detail: format!("column {} of {} has no entry equal to {}", j + 1, names.join("+"), set.len()),
                        });
                    }
                }
            }
        }
    }
    out
}
