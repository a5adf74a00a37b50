use serde_json::{json, Value};

use super::{Histogram, Identity, ScenarioResult};
use crate::causality::{realize_sequential, CausalTree};
use crate::doubleslit::{run_branch, shot_histogram, superposition_check, Branch, BranchRun, DoubleSlitConfig};
use crate::error::{Error, Result};
use crate::kernel::{CVec, C64};
use crate::measurement::{Pmf, Povm, COMMUTE_TOL};

/// Norm drift allowed over a full run, absorber losses excluded.
pub const NORM_DRIFT_TOL: f64 = 1e-4;
/// Relative error allowed in the initial momentum expectation.
pub const MOMENTUM_TOL: f64 = 0.02;
/// Total-variation bound for the branch-2 superposition oracle.
pub const SUPERPOSITION_TOL: f64 = 1e-3;
/// Visibility margin by which branch 1 should beat branch 2.
pub const VISIBILITY_MARGIN: f64 = 0.2;
/// Per-bin agreement of shot counts with the pmf, in binomial standard
/// deviations.
pub const SHOT_SIGMAS: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchSelection {
    One,
    Two,
    Both,
}

impl BranchSelection {
    fn branches(self) -> Vec<Branch> {
        match self {
            BranchSelection::One => vec![Branch::One],
            BranchSelection::Two => vec![Branch::Two],
            BranchSelection::Both => vec![Branch::One, Branch::Two],
        }
    }
}

/// Largest `|count - N p| / sqrt(N p (1 - p))` over the histogram's bins. A
/// bin with `p = 0` contributes zero if empty and infinity otherwise.
pub fn histogram_sigma_residual(pmf: &Pmf, counts: &[(String, u64)]) -> f64 {
    let shots: u64 = counts.iter().map(|(_, c)| c).sum();
    let n = shots as f64;
    let mut probs: Vec<f64> = pmf.probabilities();
    probs.push(pmf.no_detection());
    probs
        .iter()
        .zip(counts)
        .map(|(&p, (_, c))| {
            let sd = (n * p * (1.0 - p)).sqrt();
            let dev = (*c as f64 - n * p).abs();
            if sd > 0.0 {
                dev / sd
            } else if dev == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max)
}

/// The two-branch causal tree with `O_g` on both leaves, one leaf behind the
/// phase shifter: its sequential realization must fail. Returns the
/// offending pair and the commutator norm.
pub fn surrogate_noncommutation() -> Result<(String, String, f64)> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let o_g = Povm::from_projectors(&[CVec::from_real(&[s, s])?, CVec::from_real(&[s, -s])?])?;
    let phase = crate::kernel::COp::diagonal(&[C64::new(1.0, 0.0), C64::new(0.0, 1.0)]);
    let mut tree = CausalTree::new("source", 2);
    tree.set_observable(tree.root(), Povm::existence(2))?;
    let t1 = tree.add_child(tree.root(), "branch 1", phase)?;
    let t2 = tree.add_child(tree.root(), "branch 2", crate::kernel::COp::identity(2))?;
    tree.set_observable(t1, o_g.clone())?;
    tree.set_observable(t2, o_g)?;
    match realize_sequential(&tree, COMMUTE_TOL) {
        Err(Error::NonCommuting { left, right, norm }) => Ok((left, right, norm)),
        Err(e) => Err(e),
        Ok(_) => Ok((String::new(), String::new(), 0.0)),
    }
}

fn branch_metadata(run: &BranchRun) -> Value {
    json!({
        "steps": run.steps,
        "stop": format!("{:?}", run.stop),
        "elapsed": run.packet.elapsed(),
        "visibility": run.visibility,
        "which_way": run.which_way,
        "absorbed": run.packet.absorbed(),
        "wall_loss": run.packet.wall_loss(),
        "norm_drift": run.packet.norm_drift(),
    })
}

pub fn run_doubleslit(config: &DoubleSlitConfig, selection: BranchSelection) -> Result<ScenarioResult> {
    let mut r = ScenarioResult::new("doubleslit");
    if let Value::Object(map) = serde_json::to_value(config)? {
        r.parameters = map.into_iter().collect();
    }
    r.param("branches", format!("{selection:?}").to_lowercase());

    let u0 = config.initial_packet()?;
    let (px, py) = u0.momentum_expectation(config.params.hbar);
    let p0 = config.params.hbar * config.params.k0;
    let momentum_error = ((px - p0).abs()).max(py.abs()) / p0;
    r.check(Identity::at_most("initial momentum within 2% of (hbar k0, 0)", momentum_error, MOMENTUM_TOL));
    r.meta("initial_momentum", json!([px, py]));

    let mut runs = Vec::new();
    for branch in selection.branches() {
        let run = run_branch(config, branch)?;
        let label = format!("branch {branch}");
        r.check(Identity::at_most(format!("{label} norm drift"), run.packet.norm_drift(), NORM_DRIFT_TOL));
        r.check(Identity::at_most(format!("{label} pmf normalization"), run.pmf.normalization_residual(), 1e-6));
        let counts = shot_histogram(&run.pmf, config.shots, config.seed);
        r.check(Identity::at_most(
            format!("{label} shot histogram within 3 sigma per bin"),
            histogram_sigma_residual(&run.pmf, &counts),
            SHOT_SIGMAS,
        ));
        r.histograms.push(Histogram { label: label.clone(), counts });
        r.push_pmf(&label, run.pmf.clone());
        r.meta(&format!("branch_{branch}"), branch_metadata(&run));
        runs.push(run);
    }

    if let Some(two) = runs.iter().find(|run| run.branch == Branch::Two) {
        let check = superposition_check(config, two)?;
        r.check(Identity::at_most(
            "branch 2 superposition oracle total variation",
            check.total_variation,
            SUPERPOSITION_TOL,
        ));
        r.push_pmf("branch 2 hole A only", check.upper_only);
        r.push_pmf("branch 2 hole B only", check.lower_only);
    }
    if let [one, two] = runs.as_slice() {
        r.check(Identity::exceeds(
            "visibility gap branch 1 - branch 2",
            one.visibility - two.visibility,
            VISIBILITY_MARGIN,
        ));
    }

    let (left, right, norm) = surrogate_noncommutation()?;
    r.meta("surrogate_noncommutation", json!({ "left": left, "right": right, "norm": norm }));
    r.check(Identity::exceeds("surrogate branches do not commute", norm, COMMUTE_TOL));
    Ok(r)
}
