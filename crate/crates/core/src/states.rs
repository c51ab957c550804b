//! Forward, backward, paired and generalized state descriptions.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numerics::{c, evolve_unitary, CVector, DenseOperator, C64};

/// Default threshold below which `|<Phi|Psi>|` counts as orthogonal.
pub const NEAR_ORTHOGONAL_EPS: f64 = 1e-12;

fn validate(amplitudes: &CVector) -> Result<()> {
    if amplitudes.is_empty() {
        return Err(Error::EmptyDimension);
    }
    if amplitudes.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
        return Err(Error::NonFinite("state amplitudes"));
    }
    if amplitudes.norm() == 0.0 {
        return Err(Error::ZeroState);
    }
    Ok(())
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

mod amplitude_pairs {
    use super::*;

    #[derive(Serialize, Deserialize)]
    struct Repr {
        dim: usize,
        amplitudes: Vec<[f64; 2]>,
    }

    pub fn serialize<S: Serializer>(v: &CVector, s: S) -> std::result::Result<S::Ok, S::Error> {
        Repr { dim: v.len(), amplitudes: v.iter().map(|a| [a.re, a.im]).collect() }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<CVector, D::Error> {
        let r = Repr::deserialize(d)?;
        if r.dim != r.amplitudes.len() {
            return Err(serde::de::Error::custom(format!(
                "dim {} does not match {} amplitudes",
                r.dim,
                r.amplitudes.len()
            )));
        }
        let v = CVector::from_iterator(r.dim, r.amplitudes.iter().map(|[re, im]| c(*re, *im)));
        validate(&v).map_err(serde::de::Error::custom)?;
        Ok(v)
    }
}

/// Forward-evolving state `|Psi>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateVector {
    #[serde(with = "amplitude_pairs")]
    amplitudes: CVector,
}

impl StateVector {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        validate(&amplitudes)?;
        Ok(Self { amplitudes })
    }

    pub fn from_slice(values: &[C64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(values))
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(CVector::from_iterator(values.len(), values.iter().map(|&r| c(r, 0.0))))
    }

    pub fn basis(dim: usize, i: usize) -> Result<Self> {
        if i >= dim {
            return Err(Error::param("index", format!("{i} out of range for dimension {dim}")));
        }
        Ok(Self { amplitudes: crate::numerics::basis(dim, i) })
    }

    /// Spin-1/2 state `|up_n>` along a real direction.
    pub fn spin_up(direction: [f64; 3]) -> Result<Self> {
        let op = DenseOperator::spin_along(direction)?;
        let spec = crate::numerics::hermitian_eigendecomposition(&op, crate::numerics::DEFAULT_GROUPING_TOL)?;
        let top = spec.len() - 1;
        Self::new(spec.eigenvectors(top)[0].clone())
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalized(&self) -> Self {
        Self { amplitudes: self.amplitudes.unscale(self.norm()) }
    }

    pub fn scaled(&self, s: C64) -> Result<Self> {
        Self::new(&self.amplitudes * s)
    }

    /// The bra `<Psi|` dual to this ket.
    pub fn dual(&self) -> CoStateVector {
        CoStateVector { ket: self.amplitudes.clone() }
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        use crate::numerics::TensorProduct;
        Self::new(self.amplitudes.tensor(&other.amplitudes)?)
    }
}

/// Backward-evolving state `<Phi|`.
///
/// Stored through the ket `|Phi>`; pairing with `|Psi>` conjugates on the fly,
/// so `pair` is `sum_i conj(phi_i) psi_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoStateVector {
    #[serde(with = "amplitude_pairs")]
    ket: CVector,
}

impl CoStateVector {
    /// Builds `<Phi|` from the amplitudes of the ket `|Phi>`.
    pub fn from_ket(ket: CVector) -> Result<Self> {
        validate(&ket)?;
        Ok(Self { ket })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Ok(StateVector::from_real(values)?.dual())
    }

    pub fn basis(dim: usize, i: usize) -> Result<Self> {
        Ok(StateVector::basis(dim, i)?.dual())
    }

    pub fn spin_up(direction: [f64; 3]) -> Result<Self> {
        Ok(StateVector::spin_up(direction)?.dual())
    }

    pub fn dim(&self) -> usize {
        self.ket.len()
    }

    pub fn ket(&self) -> &CVector {
        &self.ket
    }

    pub fn norm(&self) -> f64 {
        self.ket.norm()
    }

    pub fn normalized(&self) -> Self {
        Self { ket: self.ket.unscale(self.norm()) }
    }

    /// The ket `|Phi>` as a state.
    pub fn dual(&self) -> StateVector {
        StateVector { amplitudes: self.ket.clone() }
    }

    pub fn pair(&self, state: &StateVector) -> Result<C64> {
        check_dims(self.dim(), state.dim())?;
        Ok(self.ket.dotc(&state.amplitudes))
    }

    /// `<Phi| op |Psi>`.
    pub fn sandwich(&self, op: &DenseOperator, state: &StateVector) -> Result<C64> {
        check_dims(self.dim(), op.dim())?;
        op.sandwich(&self.ket, &state.amplitudes)
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Ok(self.dual().tensor(&other.dual())?.dual())
    }
}

/// Anything that assigns an amplitude `sum_i alpha_i <Phi_i| op |Psi_i>` to an
/// operator. ABL probabilities and weak values are ratios of such amplitudes.
pub trait Description {
    fn dim(&self) -> usize;

    fn amplitude(&self, op: &DenseOperator) -> Result<C64>;

    /// `sum_i alpha_i <Phi_i|Psi_i>`.
    fn overlap(&self) -> Result<C64> {
        self.amplitude(&DenseOperator::identity(self.dim()))
    }

    /// Threshold on `|overlap|` used by divisions.
    fn epsilon(&self) -> f64 {
        NEAR_ORTHOGONAL_EPS
    }

    fn interchanged(&self) -> Self
    where
        Self: Sized;
}

/// `<Phi|| |Psi>` at a fixed intermediate time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoStateVector {
    bra: CoStateVector,
    ket: StateVector,
    #[serde(default = "default_eps")]
    epsilon: f64,
}

fn default_eps() -> f64 {
    NEAR_ORTHOGONAL_EPS
}

impl TwoStateVector {
    pub fn new(bra: CoStateVector, ket: StateVector) -> Result<Self> {
        check_dims(bra.dim(), ket.dim())?;
        Ok(Self { bra, ket, epsilon: NEAR_ORTHOGONAL_EPS })
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::param("epsilon", "must be finite and non-negative"));
        }
        self.epsilon = epsilon;
        Ok(self)
    }

    /// Pre-selection only: `<Psi|| |Psi>`.
    pub fn preselected_only(ket: StateVector) -> Self {
        Self { bra: ket.dual(), ket, epsilon: NEAR_ORTHOGONAL_EPS }
    }

    pub fn bra(&self) -> &CoStateVector {
        &self.bra
    }

    pub fn ket(&self) -> &StateVector {
        &self.ket
    }

    /// `<Phi|Psi>`, rejected when its magnitude does not exceed epsilon.
    pub fn checked_overlap(&self) -> Result<C64> {
        let o = self.bra.ket.dotc(&self.ket.amplitudes);
        if o.norm() <= self.epsilon {
            return Err(Error::NearOrthogonal { overlap: o.norm(), threshold: self.epsilon });
        }
        Ok(o)
    }

    pub fn to_generalized(&self) -> GeneralizedTwoStateVector {
        GeneralizedTwoStateVector {
            terms: vec![Term { alpha: c(1.0, 0.0), bra: self.bra.clone(), ket: self.ket.clone() }],
            epsilon: self.epsilon,
        }
    }
}

impl Description for TwoStateVector {
    fn dim(&self) -> usize {
        self.ket.dim()
    }

    fn amplitude(&self, op: &DenseOperator) -> Result<C64> {
        self.bra.sandwich(op, &self.ket)
    }

    fn overlap(&self) -> Result<C64> {
        Ok(self.bra.ket.dotc(&self.ket.amplitudes))
    }

    fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `<Phi|| |Psi>  ->  <Psi|| |Phi>`.
    fn interchanged(&self) -> Self {
        Self { bra: self.ket.dual(), ket: self.bra.dual(), epsilon: self.epsilon }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    #[serde(with = "complex_pair")]
    pub alpha: C64,
    pub bra: CoStateVector,
    pub ket: StateVector,
}

mod complex_pair {
    use super::*;

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<C64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(c(re, im))
    }
}

/// `sum_i alpha_i <Phi_i|| |Psi_i>`. Normalization is irrelevant to every
/// consumer, so none is imposed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneralizedTwoStateVector {
    terms: Vec<Term>,
    epsilon: f64,
}

impl<'de> Deserialize<'de> for GeneralizedTwoStateVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            terms: Vec<Term>,
            #[serde(default = "default_eps")]
            epsilon: f64,
        }
        let raw = Raw::deserialize(d)?;
        let mut g = Self::new(raw.terms.into_iter().map(|t| (t.alpha, t.bra, t.ket)).collect())
            .map_err(serde::de::Error::custom)?;
        g.epsilon = raw.epsilon;
        Ok(g)
    }
}

impl GeneralizedTwoStateVector {
    pub fn new(terms: Vec<(C64, CoStateVector, StateVector)>) -> Result<Self> {
        let dim = terms.first().ok_or(Error::EmptyDescription)?.2.dim();
        if terms.iter().all(|(a, _, _)| *a == c(0.0, 0.0)) {
            return Err(Error::EmptyDescription);
        }
        let mut out = Vec::with_capacity(terms.len());
        for (alpha, bra, ket) in terms {
            check_dims(dim, bra.dim())?;
            check_dims(dim, ket.dim())?;
            if !(alpha.re.is_finite() && alpha.im.is_finite()) {
                return Err(Error::NonFinite("coefficient"));
            }
            out.push(Term { alpha, bra, ket });
        }
        Ok(Self { terms: out, epsilon: NEAR_ORTHOGONAL_EPS })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::param("epsilon", "must be finite and non-negative"));
        }
        self.epsilon = epsilon;
        Ok(self)
    }
}

impl Description for GeneralizedTwoStateVector {
    fn dim(&self) -> usize {
        self.terms[0].ket.dim()
    }

    fn amplitude(&self, op: &DenseOperator) -> Result<C64> {
        let mut total = c(0.0, 0.0);
        for t in &self.terms {
            total += t.alpha * t.bra.sandwich(op, &t.ket)?;
        }
        Ok(total)
    }

    fn overlap(&self) -> Result<C64> {
        let mut total = c(0.0, 0.0);
        for t in &self.terms {
            total += t.alpha * t.bra.pair(&t.ket)?;
        }
        Ok(total)
    }

    fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `sum alpha_i <Phi_i|| |Psi_i>  ->  sum conj(alpha_i) <Psi_i|| |Phi_i>`.
    fn interchanged(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| Term { alpha: t.alpha.conj(), bra: t.ket.dual(), ket: t.bra.dual() })
            .collect();
        Self { terms, epsilon: self.epsilon }
    }
}

/// Either kind of description, for APIs and configs accepting both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnyDescription {
    TwoState(TwoStateVector),
    Generalized(GeneralizedTwoStateVector),
}

impl Description for AnyDescription {
    fn dim(&self) -> usize {
        match self {
            Self::TwoState(t) => t.dim(),
            Self::Generalized(g) => g.dim(),
        }
    }

    fn amplitude(&self, op: &DenseOperator) -> Result<C64> {
        match self {
            Self::TwoState(t) => t.amplitude(op),
            Self::Generalized(g) => g.amplitude(op),
        }
    }

    fn overlap(&self) -> Result<C64> {
        match self {
            Self::TwoState(t) => t.overlap(),
            Self::Generalized(g) => g.overlap(),
        }
    }

    fn epsilon(&self) -> f64 {
        match self {
            Self::TwoState(t) => t.epsilon(),
            Self::Generalized(g) => g.epsilon(),
        }
    }

    fn interchanged(&self) -> Self {
        match self {
            Self::TwoState(t) => Self::TwoState(t.interchanged()),
            Self::Generalized(g) => Self::Generalized(g.interchanged()),
        }
    }
}

/// `|Psi(t)> = U(t1, t) |a>` for time-independent `H`.
pub fn make_preselected(outcome_state: &StateVector, h: &DenseOperator, t1: f64, t: f64) -> Result<StateVector> {
    if !(t >= t1) {
        return Err(Error::param("t", "pre-selection time t1 must not exceed t"));
    }
    StateVector::new(evolve_unitary(outcome_state.amplitudes(), h, t - t1)?)
}

/// `<Phi(t)| = <b| U(t, t2)`, i.e. the ket `exp(+iH(t2 - t)) |b>`.
pub fn make_postselected(outcome_bra: &CoStateVector, h: &DenseOperator, t: f64, t2: f64) -> Result<CoStateVector> {
    if !(t2 >= t) {
        return Err(Error::param("t2", "post-selection time t2 must not precede t"));
    }
    CoStateVector::from_ket(evolve_unitary(outcome_bra.ket(), h, -(t2 - t))?)
}

/// Time-reversed description at the same time.
pub fn interchange<D: Description>(description: &D) -> D {
    description.interchanged()
}
