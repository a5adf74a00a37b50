//! States, observables and the probability rule.
//!
//! An observable on `C^dim` is a finite outcome set together with one effect
//! per outcome, `0 <= F({x}) <= I`. Effects of larger events are sums, so
//! finite additivity holds by construction and the empty event maps to `0`.
//! The total effect is only required to satisfy `Σ F({x}) <= I`; whatever is
//! missing is reported as the probability that no value is obtained.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::kernel::{commutator_norm, is_positive, tensor_op, COp, CVec, C64};

/// Tolerance for positivity, normalization and trace checks.
pub const VALIDATION_TOL: f64 = 1e-10;

/// Default operator-norm tolerance for the commutativity gate.
pub const COMMUTE_TOL: f64 = 1e-10;

/// Smallest `|<u, C u>|` accepted as a post-selection denominator.
pub const DENOMINATOR_TOL: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Int(i64),
    Name(String),
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Int(n) => write!(f, "{n}"),
            Atom::Name(s) => f.write_str(s),
        }
    }
}

/// An outcome label: a single integer or name, or a tuple of them for
/// product observables. Products flatten, so `(x, (y, z))` is `(x, y, z)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Outcome(Vec<Atom>);

impl Outcome {
    pub fn int(n: i64) -> Self {
        Outcome(vec![Atom::Int(n)])
    }

    pub fn name(s: impl Into<String>) -> Self {
        Outcome(vec![Atom::Name(s.into())])
    }

    pub fn tuple(items: &[i64]) -> Self {
        Outcome(items.iter().map(|&n| Atom::Int(n)).collect())
    }

    pub fn product(&self, other: &Outcome) -> Outcome {
        Outcome(self.0.iter().chain(&other.0).cloned().collect())
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.0
    }

    /// Strips `prefix` from the front, if present.
    pub fn strip_prefix(&self, prefix: &Outcome) -> Option<Outcome> {
        self.0.starts_with(&prefix.0).then(|| Outcome(self.0[prefix.0.len()..].to_vec()))
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.as_slice() {
            [single] => write!(f, "{single}"),
            atoms => {
                let parts: Vec<String> = atoms.iter().map(Atom::to_string).collect();
                write!(f, "({})", parts.join(","))
            }
        }
    }
}

impl Serialize for Outcome {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl From<i64> for Outcome {
    fn from(n: i64) -> Self {
        Outcome::int(n)
    }
}

impl From<(i64, i64)> for Outcome {
    fn from((a, b): (i64, i64)) -> Self {
        Outcome::tuple(&[a, b])
    }
}

impl From<&str> for Outcome {
    fn from(s: &str) -> Self {
        Outcome::name(s)
    }
}

/// Unit vector state `|u><u|`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    vector: CVec,
}

impl PureState {
    pub fn new(vector: CVec) -> Result<Self> {
        let n = vector.norm();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("state vector has norm {n}")));
        }
        Ok(PureState { vector })
    }

    /// Rescales a nonzero vector to unit length.
    pub fn normalize(vector: CVec) -> Result<Self> {
        vector.normalized().map(|vector| PureState { vector }).ok_or_else(|| Error::InvalidState("zero vector".into()))
    }

    pub fn vector(&self) -> &CVec {
        &self.vector
    }

    pub fn dim(&self) -> usize {
        self.vector.dim()
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator { op: COp::projector(&self.vector) }
    }

    /// Schrödinger-picture evolution `u -> U u`.
    pub fn evolve(&self, unitary: &COp) -> Result<PureState> {
        PureState::new(unitary.apply(&self.vector)?)
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        PureState { vector: self.vector.tensor(&other.vector) }
    }
}

/// Positive, trace-one operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    op: COp,
}

impl DensityOperator {
    pub fn new(op: COp) -> Result<Self> {
        if !is_positive(&op, VALIDATION_TOL) {
            return Err(Error::InvalidState("density operator is not positive".into()));
        }
        let tr = op.trace();
        if (tr.re - 1.0).abs() > VALIDATION_TOL || tr.im.abs() > VALIDATION_TOL {
            return Err(Error::InvalidState(format!("density operator has trace {tr}")));
        }
        Ok(DensityOperator { op })
    }

    pub fn op(&self) -> &COp {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }
}

/// Anything that assigns expectation values to operators.
pub trait Expectation {
    fn dim(&self) -> usize;

    /// `rho(A)`: `<u, A u>` for a pure state, `tr(rho A)` for a mixed one.
    fn expect(&self, op: &COp) -> Result<C64>;
}

impl Expectation for PureState {
    fn dim(&self) -> usize {
        self.vector.dim()
    }

    fn expect(&self, op: &COp) -> Result<C64> {
        op.expectation(&self.vector)
    }
}

impl Expectation for DensityOperator {
    fn dim(&self) -> usize {
        self.op.dim()
    }

    fn expect(&self, op: &COp) -> Result<C64> {
        if op.dim() != self.op.dim() {
            return Err(Error::DimensionMismatch { expected: self.op.dim(), found: op.dim() });
        }
        Ok((&self.op * op).trace())
    }
}

/// Either kind of state.
#[derive(Clone, Debug, PartialEq)]
pub enum State {
    Pure(PureState),
    Mixed(DensityOperator),
}

impl Expectation for State {
    fn dim(&self) -> usize {
        match self {
            State::Pure(s) => s.dim(),
            State::Mixed(s) => s.dim(),
        }
    }

    fn expect(&self, op: &COp) -> Result<C64> {
        match self {
            State::Pure(s) => s.expect(op),
            State::Mixed(s) => s.expect(op),
        }
    }
}

impl From<PureState> for State {
    fn from(s: PureState) -> Self {
        State::Pure(s)
    }
}

impl From<DensityOperator> for State {
    fn from(s: DensityOperator) -> Self {
        State::Mixed(s)
    }
}

/// A finite observable `(X, 2^X, F)`, possibly sub-normalized.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    dim: usize,
    outcomes: Vec<Outcome>,
    effects: Vec<COp>,
}

/// Validating constructor for [`Povm`].
pub fn make_povm(outcomes: Vec<Outcome>, effects: Vec<COp>) -> Result<Povm> {
    Povm::new(outcomes, effects)
}

impl Povm {
    pub fn new(outcomes: Vec<Outcome>, effects: Vec<COp>) -> Result<Self> {
        let povm = Self::from_parts(outcomes, effects)?;
        povm.validate()?;
        Ok(povm)
    }

    fn from_parts(outcomes: Vec<Outcome>, effects: Vec<COp>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::InvalidOperator("observable needs at least one outcome".into()));
        }
        if outcomes.len() != effects.len() {
            return Err(Error::InvalidOperator(format!("{} outcomes but {} effects", outcomes.len(), effects.len())));
        }
        for (i, o) in outcomes.iter().enumerate() {
            if outcomes[..i].contains(o) {
                return Err(Error::InvalidOperator(format!("duplicate outcome {o}")));
            }
        }
        let dim = effects[0].dim();
        if let Some(e) = effects.iter().find(|e| e.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: e.dim() });
        }
        Ok(Povm { dim, outcomes, effects })
    }

    fn validate(&self) -> Result<()> {
        for (outcome, effect) in self.outcomes.iter().zip(&self.effects) {
            if !is_positive(effect, VALIDATION_TOL) {
                let min_eigenvalue = if effect.hermiticity_residual() > VALIDATION_TOL {
                    f64::NAN
                } else {
                    effect.hermitian_eigenvalues()[0]
                };
                return Err(Error::NotPositive { outcome: outcome.clone(), min_eigenvalue });
            }
        }
        let slack = &COp::identity(self.dim) - &self.total();
        if !is_positive(&slack, VALIDATION_TOL) {
            let max_eigenvalue = *self.total().hermitian_eigenvalues().last().unwrap();
            return Err(Error::Overcomplete { max_eigenvalue });
        }
        Ok(())
    }

    /// The single-outcome observable `{1: I}`.
    pub fn existence(dim: usize) -> Self {
        Povm { dim, outcomes: vec![Outcome::int(1)], effects: vec![COp::identity(dim)] }
    }

    /// Rank-one projectors onto an orthonormal family, labelled `1..=n`.
    pub fn from_projectors(vectors: &[CVec]) -> Result<Self> {
        let outcomes = (1..=vectors.len() as i64).map(Outcome::int).collect();
        Self::new(outcomes, vectors.iter().map(COp::projector).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn effects(&self) -> &[COp] {
        &self.effects
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Outcome, &COp)> {
        self.outcomes.iter().zip(&self.effects)
    }

    pub fn effect(&self, outcome: &Outcome) -> Option<&COp> {
        self.outcomes.iter().position(|o| o == outcome).map(|i| &self.effects[i])
    }

    /// `F(Ξ)` for an event given as a list of outcomes; the empty event maps
    /// to the zero operator.
    pub fn event_effect(&self, event: &[Outcome]) -> Result<COp> {
        let mut acc = COp::zeros(self.dim);
        for (i, o) in event.iter().enumerate() {
            if event[..i].contains(o) {
                continue;
            }
            let e = self.effect(o).ok_or_else(|| Error::InvalidParameter(format!("unknown outcome {o}")))?;
            acc = &acc + e;
        }
        Ok(acc)
    }

    /// `F(X)`.
    pub fn total(&self) -> COp {
        self.effects.iter().fold(COp::zeros(self.dim), |acc, e| &acc + e)
    }

    pub fn is_complete(&self, tol: f64) -> bool {
        self.total().max_abs_diff(&COp::identity(self.dim)) <= tol
    }
}

/// Outcome-indexed operator family with no positivity requirement. Formal
/// products of non-commuting observables land here.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorValuedMeasure {
    dim: usize,
    outcomes: Vec<Outcome>,
    operators: Vec<COp>,
    is_observable: bool,
}

impl OperatorValuedMeasure {
    pub fn new(outcomes: Vec<Outcome>, operators: Vec<COp>) -> Result<Self> {
        let Povm { dim, outcomes, effects } = Povm::from_parts(outcomes, operators)?;
        let candidate = Povm { dim, outcomes, effects };
        let is_observable = candidate.validate().is_ok();
        Ok(OperatorValuedMeasure { dim, outcomes: candidate.outcomes, operators: candidate.effects, is_observable })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn operators(&self) -> &[COp] {
        &self.operators
    }

    pub fn operator(&self, outcome: &Outcome) -> Option<&COp> {
        self.outcomes.iter().position(|o| o == outcome).map(|i| &self.operators[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Outcome, &COp)> {
        self.outcomes.iter().zip(&self.operators)
    }

    /// Whether every operator is an effect and they sum to at most `I`.
    pub fn is_observable(&self) -> bool {
        self.is_observable
    }

    pub fn to_povm(&self) -> Option<Povm> {
        self.is_observable.then(|| Povm {
            dim: self.dim,
            outcomes: self.outcomes.clone(),
            effects: self.operators.clone(),
        })
    }

    /// Largest Hermiticity residual over all operators.
    pub fn hermiticity_residual(&self) -> f64 {
        self.operators.iter().map(COp::hermiticity_residual).fold(0.0, f64::max)
    }

    /// Operators whose label starts with `prefix`, relabelled with the prefix
    /// removed.
    pub fn slice(&self, prefix: &Outcome) -> Result<OperatorValuedMeasure> {
        let (outcomes, operators): (Vec<_>, Vec<_>) =
            self.iter().filter_map(|(o, op)| o.strip_prefix(prefix).map(|rest| (rest, op.clone()))).unzip();
        if outcomes.is_empty() {
            return Err(Error::InvalidParameter(format!("no outcome starts with {prefix}")));
        }
        OperatorValuedMeasure::new(outcomes, operators)
    }
}

/// Probability mass function over outcomes plus the undetected remainder.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Pmf {
    entries: Vec<(Outcome, f64)>,
    no_detection: f64,
}

impl Pmf {
    /// Builds a pmf from raw probabilities and the detected total. Values
    /// within `VALIDATION_TOL` of `[0, 1]` are clamped; anything further out is
    /// rejected.
    pub fn from_raw(entries: Vec<(Outcome, f64)>, detected_total: f64) -> Result<Self> {
        let clamp = |p: f64, what: &str| -> Result<f64> {
            if !(-VALIDATION_TOL..=1.0 + VALIDATION_TOL).contains(&p) || p.is_nan() {
                return Err(Error::InvalidState(format!("{what} probability {p} outside [0, 1]")));
            }
            Ok(p.clamp(0.0, 1.0))
        };
        let entries = entries.into_iter().map(|(o, p)| Ok((o, clamp(p, "outcome")?))).collect::<Result<Vec<_>>>()?;
        let no_detection = clamp(1.0 - detected_total, "no-detection")?;
        Ok(Pmf { entries, no_detection })
    }

    /// Pmf from probabilities alone; the deficit from one is no-detection.
    pub fn from_probabilities(entries: Vec<(Outcome, f64)>) -> Result<Self> {
        let total = entries.iter().map(|(_, p)| p).sum();
        Self::from_raw(entries, total)
    }

    pub fn entries(&self) -> &[(Outcome, f64)] {
        &self.entries
    }

    pub fn probability(&self, outcome: &Outcome) -> Option<f64> {
        self.entries.iter().find(|(o, _)| o == outcome).map(|(_, p)| *p)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.entries.iter().map(|(_, p)| *p).collect()
    }

    pub fn no_detection(&self) -> f64 {
        self.no_detection
    }

    pub fn detected_mass(&self) -> f64 {
        self.entries.iter().map(|(_, p)| p).sum()
    }

    /// `|Σ p + no_detection - 1|`
    pub fn normalization_residual(&self) -> f64 {
        (self.detected_mass() + self.no_detection - 1.0).abs()
    }

    /// Half the L1 distance over the union of outcomes, no-detection included.
    pub fn total_variation(&self, other: &Pmf) -> f64 {
        let mut l1 = (self.no_detection - other.no_detection).abs();
        for (o, p) in &self.entries {
            l1 += (p - other.probability(o).unwrap_or(0.0)).abs();
        }
        for (o, q) in &other.entries {
            if self.probability(o).is_none() {
                l1 += q.abs();
            }
        }
        0.5 * l1
    }

    /// Inverse-CDF draws in declaration order with no-detection last.
    pub fn sample(&self, shots: usize, seed: u64) -> Vec<Shot> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let last_positive = self.entries.iter().rposition(|(_, p)| *p > 0.0);
        (0..shots)
            .map(|_| {
                let u: f64 = rng.gen();
                let mut cumulative = 0.0;
                for (o, p) in &self.entries {
                    cumulative += p;
                    if u < cumulative {
                        return Shot::Detected(o.clone());
                    }
                }
                match last_positive {
                    // roundoff left u just above the detected total
                    Some(i) if self.no_detection <= 0.0 => Shot::Detected(self.entries[i].0.clone()),
                    _ => Shot::NoDetection,
                }
            })
            .collect()
    }
}

/// One simulated measurement record.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Shot {
    Detected(Outcome),
    NoDetection,
}

/// Probability of each outcome, `rho(F({x}))`, and the undetected mass
/// `1 - rho(F(X))`.
pub fn axiom1_pmf<S: Expectation + ?Sized>(observable: &Povm, state: &S) -> Result<Pmf> {
    if observable.dim() != state.dim() {
        return Err(Error::DimensionMismatch { expected: observable.dim(), found: state.dim() });
    }
    let entries = observable.iter().map(|(o, e)| Ok((o.clone(), state.expect(e)?.re))).collect::<Result<Vec<_>>>()?;
    let detected = state.expect(&observable.total())?.re;
    Pmf::from_raw(entries, detected)
}

/// `shots` independent draws from the pmf of `observable` in `state`.
pub fn sample(observable: &Povm, state: &PureState, shots: usize, seed: u64) -> Result<Vec<Shot>> {
    Ok(axiom1_pmf(observable, state)?.sample(shots, seed))
}

/// The pair of effects with the largest commutator norm, as
/// `(norm, index in a, index in b)`.
pub fn max_commutator(a: &Povm, b: &Povm) -> Result<(f64, usize, usize)> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let mut worst = (0.0, 0, 0);
    for (i, ea) in a.effects().iter().enumerate() {
        for (j, eb) in b.effects().iter().enumerate() {
            let n = commutator_norm(ea, eb)?;
            if n > worst.0 {
                worst = (n, i, j);
            }
        }
    }
    Ok(worst)
}

/// Commutativity condition: every effect of `a` commutes with every effect of
/// `b` up to `tol` in operator norm.
pub fn commute(a: &Povm, b: &Povm, tol: f64) -> Result<bool> {
    Ok(max_commutator(a, b)?.0 <= tol)
}

/// Simultaneous observable with effects `F_a({x}) F_b({y})`; exists only when
/// the two observables commute.
pub fn product_observable(a: &Povm, b: &Povm, tol: f64) -> Result<Povm> {
    let (norm, i, j) = max_commutator(a, b)?;
    if norm > tol {
        return Err(Error::NonCommuting {
            left: a.outcomes()[i].to_string(),
            right: b.outcomes()[j].to_string(),
            norm,
        });
    }
    let (outcomes, effects) = pairwise(a, b, |x, y| x * y);
    Povm::new(outcomes, effects)
}

/// Observable on the tensor product with effects `F_a({x}) ⊗ F_b({y})`.
pub fn tensor_observable(a: &Povm, b: &Povm) -> Povm {
    let (outcomes, effects) = pairwise(a, b, tensor_op);
    Povm { dim: a.dim() * b.dim(), outcomes, effects }
}

/// Heisenberg-type conjugation `E -> B* E B` of every effect.
pub fn conjugate_observable(observable: &Povm, by: &COp) -> Result<Povm> {
    if by.dim() != observable.dim() {
        return Err(Error::DimensionMismatch { expected: observable.dim(), found: by.dim() });
    }
    let by_adj = by.adjoint();
    let effects = observable.effects().iter().map(|e| &(&by_adj * e) * by).collect();
    Povm::new(observable.outcomes().to_vec(), effects)
}

/// `F_a({x}) F_b({y})` without the commutativity requirement.
pub fn formal_product(a: &Povm, b: &Povm) -> Result<OperatorValuedMeasure> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let (outcomes, operators) = pairwise(a, b, |x, y| x * y);
    OperatorValuedMeasure::new(outcomes, operators)
}

fn pairwise(a: &Povm, b: &Povm, combine: impl Fn(&COp, &COp) -> COp) -> (Vec<Outcome>, Vec<COp>) {
    let mut outcomes = Vec::with_capacity(a.len() * b.len());
    let mut effects = Vec::with_capacity(a.len() * b.len());
    for (x, ex) in a.iter() {
        for (y, ey) in b.iter() {
            outcomes.push(x.product(y));
            effects.push(combine(ex, ey));
        }
    }
    (outcomes, effects)
}

/// Formal conditional values `<u, A_y u> / <u, N u>` for every operator
/// `A_y` of an already composed slice, with an explicit normalizing operator
/// `N`. The results may be negative or complex.
pub fn conditional_formal_values(
    slice: &OperatorValuedMeasure,
    state: &PureState,
    normalizer: &COp,
) -> Result<Vec<(Outcome, C64)>> {
    if slice.dim() != state.dim() {
        return Err(Error::DimensionMismatch { expected: slice.dim(), found: state.dim() });
    }
    let denominator = state.expect(normalizer)?;
    if denominator.norm() < DENOMINATOR_TOL {
        return Err(Error::ZeroDenominator { denominator: denominator.norm() });
    }
    slice.iter().map(|(o, op)| Ok((o.clone(), state.expect(op)? / denominator))).collect()
}

/// Conditional formal values of `inner` given that `conditioning` yields a
/// value in `condition`: `<u, C F(y) u> / <u, C u>` with `C` the
/// conditioning effect of the event.
pub fn weak_values(
    conditioning: &Povm,
    condition: &[Outcome],
    inner: &Povm,
    state: &PureState,
) -> Result<Vec<(Outcome, C64)>> {
    if conditioning.dim() != inner.dim() {
        return Err(Error::DimensionMismatch { expected: conditioning.dim(), found: inner.dim() });
    }
    let c = conditioning.event_effect(condition)?;
    let operators = inner.effects().iter().map(|f| &c * f).collect();
    let slice = OperatorValuedMeasure::new(inner.outcomes().to_vec(), operators)?;
    conditional_formal_values(&slice, state, &c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{I, ONE, ZERO};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn f(dim: usize, i: usize) -> CVec {
        CVec::basis(dim, i)
    }

    fn plus() -> CVec {
        let s = 1.0 / 2f64.sqrt();
        CVec::from_real(&[s, s]).unwrap()
    }

    fn minus() -> CVec {
        let s = 1.0 / 2f64.sqrt();
        CVec::from_real(&[s, -s]).unwrap()
    }

    fn o_f() -> Povm {
        Povm::from_projectors(&[f(2, 0), f(2, 1)]).unwrap()
    }

    fn o_g() -> Povm {
        Povm::from_projectors(&[plus(), minus()]).unwrap()
    }

    fn f_x() -> Povm {
        let plus_eff = COp::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap();
        let minus_eff = COp::from_real_rows(&[&[0.5, -0.5], &[-0.5, 0.5]]).unwrap();
        make_povm(vec![Outcome::int(1), Outcome::int(-1)], vec![plus_eff, minus_eff]).unwrap()
    }

    #[test]
    fn existence_observable_is_valid() {
        let e = make_povm(vec![1.into()], vec![COp::identity(2)]).unwrap();
        assert_eq!(e, Povm::existence(2));
        assert!(e.is_complete(1e-15));
    }

    #[test]
    fn sigma_x_observable_is_complete() {
        let o = f_x();
        assert!(o.is_complete(1e-15));
        assert_eq!(o.event_effect(&[]).unwrap(), COp::zeros(2));
        assert_eq!(o.event_effect(&[1.into(), (-1).into()]).unwrap(), o.total());
    }

    #[test]
    fn overcomplete_and_negative_effects_are_rejected() {
        let err = make_povm(vec![1.into()], vec![COp::identity(2).scale_real(2.0)]).unwrap_err();
        assert!(matches!(err, Error::Overcomplete { .. }));
        let err = make_povm(vec![1.into()], vec![COp::diagonal(&[ONE, r(-0.5)])]).unwrap_err();
        assert!(matches!(err, Error::NotPositive { .. }));
        let err = make_povm(vec![1.into(), 2.into()], vec![COp::identity(2), COp::identity(2)]).unwrap_err();
        assert!(matches!(err, Error::Overcomplete { .. }));
    }

    #[test]
    fn malformed_observables_are_rejected() {
        assert!(make_povm(vec![], vec![]).is_err());
        assert!(make_povm(vec![1.into(), 1.into()], vec![COp::zeros(2), COp::zeros(2)]).is_err());
        assert!(matches!(
            make_povm(vec![1.into(), 2.into()], vec![COp::zeros(2), COp::zeros(3)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn eigenstate_pmf() {
        let s = PureState::new(f(2, 0)).unwrap();
        let pmf = axiom1_pmf(&o_f(), &s).unwrap();
        assert_eq!(pmf.probabilities(), vec![1.0, 0.0]);
        assert_eq!(pmf.no_detection(), 0.0);
    }

    #[test]
    fn pure_and_mixed_pmfs_agree() {
        let s = PureState::new(plus()).unwrap();
        let a = axiom1_pmf(&o_f(), &s).unwrap();
        let b = axiom1_pmf(&o_f(), &s.density()).unwrap();
        let c = axiom1_pmf(&o_f(), &State::from(s.clone())).unwrap();
        assert!(a.total_variation(&b) < 1e-15);
        assert!(a.total_variation(&c) < 1e-15);
    }

    #[test]
    fn pmf_rejects_dimension_mismatch() {
        let s = PureState::new(f(3, 0)).unwrap();
        assert!(matches!(axiom1_pmf(&o_f(), &s), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn states_are_validated() {
        assert!(PureState::new(CVec::from_real(&[1.0, 1.0]).unwrap()).is_err());
        assert!(PureState::normalize(CVec::zeros(2)).is_err());
        assert!(DensityOperator::new(COp::identity(2)).is_err());
        assert!(DensityOperator::new(COp::diagonal(&[r(1.5), r(-0.5)])).is_err());
        assert!(DensityOperator::new(COp::identity(2).scale_real(0.5)).is_ok());
    }

    #[test]
    fn sampling_edge_cases() {
        let s = PureState::new(f(2, 0)).unwrap();
        assert!(sample(&o_f(), &s, 0, 1).unwrap().is_empty());
        let shots = sample(&o_f(), &s, 1000, 7).unwrap();
        assert!(shots.iter().all(|x| *x == Shot::Detected(1.into())));
        assert_eq!(shots, sample(&o_f(), &s, 1000, 7).unwrap());
    }

    #[test]
    fn sampling_reports_no_detection() {
        let half = make_povm(vec![1.into()], vec![COp::identity(2).scale_real(0.5)]).unwrap();
        let s = PureState::new(plus()).unwrap();
        let shots = sample(&half, &s, 20_000, 3).unwrap();
        let missed = shots.iter().filter(|x| **x == Shot::NoDetection).count() as f64;
        let p = 0.5;
        assert!((missed / 20_000.0 - p).abs() < 3.0 * (p * (1.0 - p) / 20_000.0).sqrt());
    }

    #[test]
    fn commute_examples() {
        let e = Povm::existence(2);
        assert!(commute(&e, &o_g(), COMMUTE_TOL).unwrap());
        assert!(!commute(&o_f(), &o_g(), COMMUTE_TOL).unwrap());
        let (norm, _, _) = max_commutator(&o_f(), &o_g()).unwrap();
        assert_abs_diff_eq!(norm, 0.5, epsilon = 1e-12);
        let left = tensor_observable(&o_f(), &Povm::existence(2));
        let right = tensor_observable(&Povm::existence(2), &o_g());
        assert!(commute(&left, &right, COMMUTE_TOL).unwrap());
        assert!(commute(&o_f(), &Povm::existence(3), COMMUTE_TOL).is_err());
    }

    #[test]
    fn product_of_diagonal_observable_with_itself() {
        let p = product_observable(&o_f(), &o_f(), COMMUTE_TOL).unwrap();
        assert_eq!(p.len(), 4);
        let pmf = axiom1_pmf(&p, &PureState::new(plus()).unwrap()).unwrap();
        let expected = [0.5, 0.0, 0.0, 0.5];
        for ((o, p), e) in pmf.entries().iter().zip(expected) {
            assert_abs_diff_eq!(*p, e, epsilon = 1e-15);
            let _ = o;
        }
        assert_eq!(p.outcomes()[1], Outcome::tuple(&[1, 2]));
    }

    #[test]
    fn product_with_existence_observable_keeps_pmf() {
        let s = PureState::new(plus()).unwrap();
        let p = product_observable(&o_g(), &Povm::existence(2), COMMUTE_TOL).unwrap();
        let a = axiom1_pmf(&p, &s).unwrap().probabilities();
        let b = axiom1_pmf(&o_g(), &s).unwrap().probabilities();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-15);
        }
    }

    #[test]
    fn non_commuting_product_is_rejected() {
        let err = product_observable(&o_f(), &o_g(), COMMUTE_TOL).unwrap_err();
        match err {
            Error::NonCommuting { norm, .. } => assert_abs_diff_eq!(norm, 0.5, epsilon = 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tensor_observables() {
        let gg = tensor_observable(&o_g(), &o_g());
        let expected = COp::projector(&minus().tensor(&plus()));
        assert!(gg.effect(&(2, 1).into()).unwrap().max_abs_diff(&expected) < 1e-15);
        let ee = tensor_observable(&Povm::existence(2), &Povm::existence(2));
        assert_eq!(ee.effects(), &[COp::identity(4)]);
        assert_eq!(ee.outcomes(), &[Outcome::tuple(&[1, 1])]);

        let u = PureState::new(plus()).unwrap();
        let pmf = axiom1_pmf(&tensor_observable(&o_f(), &o_f()), &u.tensor(&u)).unwrap();
        for p in pmf.probabilities() {
            assert_abs_diff_eq!(p, 0.25, epsilon = 1e-15);
        }
    }

    #[test]
    fn conjugation_examples() {
        assert_eq!(conjugate_observable(&o_g(), &COp::identity(2)).unwrap(), o_g());
        let u = COp::diagonal(&[ONE, I]);
        let c = conjugate_observable(&o_f(), &u).unwrap();
        for (e, v) in c.effects().iter().zip([f(2, 0), f(2, 1)]) {
            let expected = &(&u.adjoint() * &COp::projector(&v)) * &u;
            assert!(e.max_abs_diff(&expected) < 1e-15);
        }
        // conjugating by a projection yields a sub-normalized observable
        let p = COp::diagonal(&[ZERO, ONE]);
        let sub = conjugate_observable(&o_g(), &p).unwrap();
        assert!(!sub.is_complete(1e-6));
    }

    #[test]
    fn formal_product_examples() {
        let s = 1.0 / 3f64.sqrt();
        let g1 = CVec::from_real(&[s, s, -s]).unwrap();
        let g =
            make_povm(vec![1.into(), 2.into()], vec![COp::projector(&g1), &COp::identity(3) - &COp::projector(&g1)])
                .unwrap();
        let fo = Povm::from_projectors(&[f(3, 0), f(3, 1), f(3, 2)]).unwrap();
        let gf = formal_product(&g, &fo).unwrap();
        assert!(!gf.is_observable());
        assert!(gf.to_povm().is_none());
        let unnorm = CVec::from_real(&[1.0, 1.0, -1.0]).unwrap();
        let expected = COp::outer(&unnorm, &f(3, 0)).scale_real(1.0 / 3.0);
        assert!(gf.operator(&(1, 1).into()).unwrap().max_abs_diff(&expected) < 1e-15);
        assert!(gf.operator(&(1, 3).into()).unwrap().hermiticity_residual() > 0.1);

        let fp = formal_product(&o_f(), &o_f()).unwrap();
        assert!(fp.is_observable());
        assert_eq!(fp.to_povm().unwrap(), product_observable(&o_f(), &o_f(), COMMUTE_TOL).unwrap());
    }

    #[test]
    fn weak_values_of_commuting_pair_are_conditional_probabilities() {
        // Bayes oracle on a diagonal pair: P(y | x) = P(x, y) / P(x)
        let a = make_povm(
            vec![1.into(), 2.into()],
            vec![COp::diagonal(&[ONE, r(0.3), ZERO]), COp::diagonal(&[ZERO, r(0.7), ONE])],
        )
        .unwrap();
        let b = Povm::from_projectors(&[f(3, 0), f(3, 1), f(3, 2)]).unwrap();
        let u = PureState::normalize(CVec::from_real(&[1.0, 2.0, 3.0]).unwrap()).unwrap();
        let joint = axiom1_pmf(&product_observable(&a, &b, COMMUTE_TOL).unwrap(), &u).unwrap();
        let marginal = axiom1_pmf(&a, &u).unwrap();
        let wv = weak_values(&a, &[1.into()], &b, &u).unwrap();
        let p1 = marginal.probability(&1.into()).unwrap();
        for (y, v) in &wv {
            let bayes = joint.probability(&Outcome::int(1).product(y)).unwrap() / p1;
            assert_abs_diff_eq!(v.re, bayes, epsilon = 1e-12);
            assert!(v.im.abs() < 1e-12);
            assert!((0.0..=1.0).contains(&v.re));
        }
    }

    #[test]
    fn impossible_post_selection_is_reported() {
        let u = PureState::new(f(2, 0)).unwrap();
        let err = weak_values(&o_f(), &[2.into()], &o_g(), &u).unwrap_err();
        assert!(matches!(err, Error::ZeroDenominator { .. }));
        assert!(err.is_numeric());
    }

    #[test]
    fn slice_strips_prefix() {
        let fp = formal_product(&o_g(), &o_f()).unwrap();
        let sl = fp.slice(&1.into()).unwrap();
        assert_eq!(sl.outcomes(), &[Outcome::int(1), Outcome::int(2)]);
        assert!(fp.slice(&7.into()).is_err());
    }

    #[test]
    fn outcome_labels() {
        assert_eq!(Outcome::int(-1).to_string(), "-1");
        assert_eq!(Outcome::tuple(&[1, 2]).to_string(), "(1,2)");
        assert_eq!(Outcome::name("a").product(&Outcome::int(3)).to_string(), "(a,3)");
    }

    fn arb_unit(dim: usize) -> impl Strategy<Value = PureState> {
        prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim).prop_filter_map("nonzero", |v| {
            PureState::normalize(CVec::new(v.into_iter().map(|(a, b)| C64::new(a, b)).collect()).ok()?).ok()
        })
    }

    proptest! {
        #[test]
        fn pmf_mass_is_conserved(u in arb_unit(2), t in 0.0..1.0f64) {
            let sub = make_povm(
                vec![1.into(), 2.into()],
                vec![COp::projector(&plus()).scale_real(t), COp::projector(&minus())],
            ).unwrap();
            let pmf = axiom1_pmf(&sub, &u).unwrap();
            prop_assert!(pmf.normalization_residual() < 1e-10);
            let full = axiom1_pmf(&o_g(), &u).unwrap();
            prop_assert!(full.no_detection() < 1e-10);
        }
    }
}
