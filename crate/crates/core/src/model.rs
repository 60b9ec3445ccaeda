//! Datasets, networks, losses and the exact evaluation routines over them.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::linalg::{dot, rref};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Label {
    Scalar(Rational),
    Interval { alpha: Rational, beta: Rational },
}

impl Label {
    pub fn interval(alpha: Rational, beta: Rational) -> Result<Self> {
        if alpha > beta {
            return Err(Error::InvalidInput(format!("interval [{alpha}, {beta}] has alpha > beta")));
        }
        Ok(Label::Interval { alpha, beta })
    }

    /// `[alpha, beta]`; a scalar label `y` is the degenerate interval `[y, y]`.
    pub fn bounds(&self) -> (&Rational, &Rational) {
        match self {
            Label::Scalar(y) => (y, y),
            Label::Interval { alpha, beta } => (alpha, beta),
        }
    }

    pub fn is_scalar(&self) -> bool {
        matches!(self, Label::Scalar(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledPoint {
    pub x: Vec<Rational>,
    pub label: Label,
    pub multiplicity: u64,
}

impl LabeledPoint {
    pub fn scalar(x: Vec<Rational>, y: Rational) -> Self {
        Self { x, label: Label::Scalar(y), multiplicity: 1 }
    }

    pub fn with_multiplicity(mut self, multiplicity: u64) -> Self {
        self.multiplicity = multiplicity;
        self
    }

    /// The scalar label. Panics on interval labels; datasets are homogeneous
    /// and trainers check the kind up front.
    pub fn y(&self) -> &Rational {
        match &self.label {
            Label::Scalar(y) => y,
            Label::Interval { .. } => panic!("interval label where a scalar was expected"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    dim: usize,
    points: Vec<LabeledPoint>,
}

impl Dataset {
    pub fn new(dim: usize, points: Vec<LabeledPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("dataset must contain at least one point".into()));
        }
        let scalar = points[0].label.is_scalar();
        for (i, p) in points.iter().enumerate() {
            if p.x.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: p.x.len() });
            }
            if p.multiplicity == 0 {
                return Err(Error::InvalidInput(format!("point {i} has multiplicity 0")));
            }
            if p.label.is_scalar() != scalar {
                return Err(Error::IncompatibleLabels("dataset mixes scalar and interval labels".into()));
            }
            if let Label::Interval { alpha, beta } = &p.label {
                if alpha > beta {
                    return Err(Error::InvalidInput(format!("point {i}: interval has alpha > beta")));
                }
            }
        }
        Ok(Self { dim, points })
    }

    /// Builds a scalar-labelled dataset from `(x, y)` pairs.
    pub fn from_pairs(dim: usize, pairs: impl IntoIterator<Item = (Vec<Rational>, Rational)>) -> Result<Self> {
        Self::new(dim, pairs.into_iter().map(|(x, y)| LabeledPoint::scalar(x, y)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[LabeledPoint] {
        &self.points
    }

    /// Total point count `n`, counting multiplicities.
    pub fn total_count(&self) -> u64 {
        self.points.iter().map(|p| p.multiplicity).sum()
    }

    pub fn has_scalar_labels(&self) -> bool {
        self.points[0].label.is_scalar()
    }

    pub fn require_scalar_labels(&self) -> Result<()> {
        if self.has_scalar_labels() {
            Ok(())
        } else {
            Err(Error::IncompatibleLabels("this operation needs scalar labels".into()))
        }
    }

    /// Distinct coordinate vectors in order of first occurrence, and for each
    /// point the index of its coordinate vector.
    pub fn distinct_coordinates(&self) -> (Vec<Vec<Rational>>, Vec<usize>) {
        let mut index: HashMap<&[Rational], usize> = HashMap::new();
        let mut coords = Vec::new();
        let mut map = Vec::with_capacity(self.points.len());
        for p in &self.points {
            let id = *index.entry(&p.x).or_insert_with(|| {
                coords.push(p.x.clone());
                coords.len() - 1
            });
            map.push(id);
        }
        (coords, map)
    }

    /// Same points with interval labels `[y, y]` in place of scalar labels.
    pub fn to_interval_labels(&self) -> Dataset {
        let points = self
            .points
            .iter()
            .map(|p| {
                let (a, b) = p.label.bounds();
                LabeledPoint {
                    x: p.x.clone(),
                    label: Label::Interval { alpha: a.clone(), beta: b.clone() },
                    multiplicity: p.multiplicity,
                }
            })
            .collect();
        Dataset { dim: self.dim, points }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OutputSign {
    Positive,
    Negative,
}

impl OutputSign {
    pub const BOTH: [OutputSign; 2] = [OutputSign::Positive, OutputSign::Negative];

    pub fn as_i32(self) -> i32 {
        match self {
            OutputSign::Positive => 1,
            OutputSign::Negative => -1,
        }
    }

    pub fn from_i32(v: i32) -> Option<Self> {
        match v {
            1 => Some(OutputSign::Positive),
            -1 => Some(OutputSign::Negative),
            _ => None,
        }
    }

    pub fn apply(self, v: Rational) -> Rational {
        match self {
            OutputSign::Positive => v,
            OutputSign::Negative => -v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Neuron {
    pub w: Vec<Rational>,
    pub b: Rational,
    pub a: OutputSign,
}

impl Neuron {
    pub fn pre_activation(&self, x: &[Rational]) -> Rational {
        dot(&self.w, x) + &self.b
    }
}

/// `x ↦ Σ_j a_j [⟨w_j, x⟩ + b_j]₊` with `a_j ∈ {−1, +1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReluNetwork {
    neurons: Vec<Neuron>,
}

impl ReluNetwork {
    pub fn new(neurons: Vec<Neuron>) -> Result<Self> {
        let Some(first) = neurons.first() else {
            return Err(Error::InvalidInput("a network needs at least one neuron".into()));
        };
        let d = first.w.len();
        if let Some(bad) = neurons.iter().find(|n| n.w.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: bad.w.len() });
        }
        Ok(Self { neurons })
    }

    pub fn single(w: Vec<Rational>, b: Rational, a: OutputSign) -> Self {
        Self { neurons: vec![Neuron { w, b, a }] }
    }

    pub fn zero(dim: usize, k: usize) -> Self {
        let neurons = (0..k.max(1))
            .map(|_| Neuron { w: vec![Rational::zero(); dim], b: Rational::zero(), a: OutputSign::Positive })
            .collect();
        Self { neurons }
    }

    pub fn neurons(&self) -> &[Neuron] {
        &self.neurons
    }

    pub fn k(&self) -> usize {
        self.neurons.len()
    }

    pub fn dim(&self) -> usize {
        self.neurons[0].w.len()
    }
}

pub fn eval_network(net: &ReluNetwork, x: &[Rational]) -> Result<Rational> {
    if x.len() != net.dim() {
        return Err(Error::DimensionMismatch { expected: net.dim(), found: x.len() });
    }
    Ok(eval_unchecked(net, x))
}

pub(crate) fn eval_unchecked(net: &ReluNetwork, x: &[Rational]) -> Rational {
    let mut out = Rational::zero();
    for n in &net.neurons {
        let pre = n.pre_activation(x);
        if pre.is_positive() {
            out = match n.a {
                OutputSign::Positive => out + pre,
                OutputSign::Negative => out - pre,
            };
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LossSpec {
    /// `Σ mult · |ŷ − y|^p` with `0⁰ = 0`.
    Lp(Rational),
    /// `max dist_{α,β}(ŷ)`.
    LinfInterval,
}

impl LossSpec {
    pub fn lp(p: Rational) -> Result<Self> {
        if p.is_negative() {
            return Err(Error::UnsupportedLoss(format!("p = {p} must be nonnegative")));
        }
        Ok(LossSpec::Lp(p))
    }
}

impl fmt::Display for LossSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LossSpec::Lp(p) => write!(f, "l^{p}"),
            LossSpec::LinfInterval => f.write_str("l^inf-interval"),
        }
    }
}

/// A loss, exact when it is rational at rational weights and otherwise a
/// rational approximation from below accurate to the requested precision.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LossValue {
    exact: Option<Rational>,
    approx: Rational,
}

impl LossValue {
    pub fn exact(v: Rational) -> Self {
        Self { approx: v.clone(), exact: Some(v) }
    }

    pub fn approximate(v: Rational) -> Self {
        Self { exact: None, approx: v }
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn exact_value(&self) -> Option<&Rational> {
        self.exact.as_ref()
    }

    pub fn approx_value(&self) -> &Rational {
        &self.approx
    }

    pub fn to_f64(&self) -> f64 {
        self.approx.to_f64()
    }

    /// Compares exactly when both sides are exact, otherwise within
    /// [`EPS_CMP`](crate::config::EPS_CMP).
    pub fn approx_cmp(&self, other: &LossValue) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => a.cmp(b),
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                if (a - b).abs() <= crate::config::EPS_CMP {
                    Ordering::Equal
                } else {
                    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
                }
            }
        }
    }

    /// Decimal rendering with `digits` fractional digits (truncated).
    pub fn decimal(&self, digits: u32) -> String {
        decimal_string(&self.approx, digits)
    }
}

impl fmt::Display for LossValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "~{}", self.decimal(18)),
        }
    }
}

pub(crate) fn decimal_string(v: &Rational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let neg = v.is_negative();
    let abs = v.abs();
    let scaled = (abs.numer() * &scale) / abs.denom();
    let int_part = &scaled / &scale;
    let frac_part = (&scaled % &scale).abs();
    let mut frac = format!("{:0>width$}", frac_part.to_string(), width = digits as usize);
    while frac.ends_with('0') {
        frac.pop();
    }
    let sign = if neg { "-" } else { "" };
    if frac.is_empty() {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac}")
    }
}

/// Splits a nonnegative rational exponent into small `(num, den)` parts.
pub(crate) fn exponent_parts(p: &Rational) -> Result<(u32, u32)> {
    let (n, d) = (p.numer(), p.denom());
    match (n.to_u32(), d.to_u32()) {
        (Some(n), Some(d)) => Ok((n, d)),
        _ => Err(Error::UnsupportedLoss(format!("exponent {p} has too large a numerator or denominator"))),
    }
}

/// Lower approximation of `x^(num/den)` for `x ≥ 0`, with relative error below `2^-bits`.
pub fn approx_pow(x: &Rational, num: u32, den: u32, bits: u32) -> Rational {
    debug_assert!(!x.is_negative());
    if x.is_zero() {
        return if num == 0 { Rational::one() } else { Rational::zero() };
    }
    let base = x.pow(num);
    if den == 1 {
        return base;
    }
    let (n, d) = (base.numer(), base.denom());
    // extra bits so that small values keep `bits` significant bits
    let deficit = (d.bits() as i64 - n.bits() as i64).max(0) as u64;
    let frac_bits = bits as u64 + deficit / den as u64 + 2;
    let scaled: BigInt = (n << (frac_bits * den as u64) as usize) / d;
    let root = scaled.nth_root(den);
    Rational::from_bigints(root, BigInt::one() << frac_bits as usize)
}

/// Per-point `|r|^p` with the `0⁰ = 0` convention, in floating point.
#[inline]
pub(crate) fn lp_term_f64(residual: &Rational, p: f64) -> f64 {
    if residual.is_zero() {
        0.0
    } else if p == 0.0 {
        1.0
    } else {
        residual.to_f64().abs().powf(p)
    }
}

/// Exact `|r|^p` for integer `p`, with `0⁰ = 0`.
pub(crate) fn lp_term_exact(residual: &Rational, p: u32) -> Rational {
    if residual.is_zero() {
        Rational::zero()
    } else {
        residual.abs().pow(p)
    }
}

/// Distance from `t` to `[alpha, beta]`: `max{α − t, 0, t − β}`.
pub fn dist_interval(alpha: &Rational, beta: &Rational, t: &Rational) -> Result<Rational> {
    if alpha > beta {
        return Err(Error::InvalidInput(format!("interval [{alpha}, {beta}] has alpha > beta")));
    }
    Ok(dist_unchecked(alpha, beta, t))
}

pub(crate) fn dist_unchecked(alpha: &Rational, beta: &Rational, t: &Rational) -> Rational {
    if t < alpha {
        alpha - t
    } else if t > beta {
        t - beta
    } else {
        Rational::zero()
    }
}

/// Evaluates `loss` on all predictions `preds[i]` of the dataset points.
pub(crate) fn loss_from_predictions(data: &Dataset, preds: &[Rational], loss: &LossSpec, bits: u32) -> Result<LossValue> {
    match loss {
        LossSpec::Lp(p) => {
            data.require_scalar_labels()?;
            let (num, den) = exponent_parts(p)?;
            if den == 1 {
                let mut acc = Rational::zero();
                for (pt, pred) in data.points().iter().zip(preds) {
                    let t = lp_term_exact(&(pred - pt.y()), num);
                    if !t.is_zero() {
                        acc = acc.add_mul(&t, &Rational::from(pt.multiplicity));
                    }
                }
                Ok(LossValue::exact(acc))
            } else {
                let mut acc = Rational::zero();
                for (pt, pred) in data.points().iter().zip(preds) {
                    let r = (pred - pt.y()).abs();
                    if !r.is_zero() {
                        acc = acc.add_mul(&approx_pow(&r, num, den, bits), &Rational::from(pt.multiplicity));
                    }
                }
                Ok(LossValue::approximate(acc))
            }
        }
        LossSpec::LinfInterval => {
            let mut worst = Rational::zero();
            for (pt, pred) in data.points().iter().zip(preds) {
                let (a, b) = pt.label.bounds();
                let dist = dist_unchecked(a, b, pred);
                if dist > worst {
                    worst = dist;
                }
            }
            Ok(LossValue::exact(worst))
        }
    }
}

/// Loss of `net` on `data`, exact for integer `p` and for the interval loss.
pub fn loss_value(net: &ReluNetwork, data: &Dataset, loss: &LossSpec) -> Result<LossValue> {
    loss_value_with_precision(net, data, loss, crate::config::TrainConfig::default().precision_bits)
}

pub fn loss_value_with_precision(net: &ReluNetwork, data: &Dataset, loss: &LossSpec, bits: u32) -> Result<LossValue> {
    if net.dim() != data.dim() {
        return Err(Error::DimensionMismatch { expected: data.dim(), found: net.dim() });
    }
    let preds: Vec<Rational> = data.points().iter().map(|p| eval_unchecked(net, &p.x)).collect();
    loss_from_predictions(data, &preds, loss, bits)
}

/// Merges points with identical coordinates and labels, summing multiplicities.
pub fn dedupe(data: &Dataset) -> Dataset {
    let mut index: HashMap<(&[Rational], &Label), usize> = HashMap::new();
    let mut out: Vec<LabeledPoint> = Vec::new();
    for p in data.points() {
        match index.get(&(&p.x[..], &p.label)) {
            Some(&i) => out[i].multiplicity += p.multiplicity,
            None => {
                index.insert((&p.x, &p.label), out.len());
                out.push(p.clone());
            }
        }
    }
    Dataset { dim: data.dim(), points: out }
}

/// Affine map `x ↦ matrix · x + offset` from `R^d` onto `R^{d'}`, bijective on
/// the affine hull it was built for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineTransform {
    pub matrix: Vec<Vec<Rational>>,
    pub offset: Vec<Rational>,
    base: Vec<Rational>,
    directions: Vec<Vec<Rational>>,
}

impl AffineTransform {
    pub fn identity(dim: usize) -> Self {
        let matrix: Vec<Vec<Rational>> = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
            .collect();
        Self { directions: matrix.clone(), matrix, offset: vec![Rational::zero(); dim], base: vec![Rational::zero(); dim] }
    }

    pub fn input_dim(&self) -> usize {
        self.base.len()
    }

    pub fn output_dim(&self) -> usize {
        self.offset.len()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.input_dim())
    }

    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        self.matrix.iter().zip(&self.offset).map(|(row, o)| dot(row, x) + o).collect()
    }

    /// The unique hull point mapping to `y`.
    pub fn preimage(&self, y: &[Rational]) -> Vec<Rational> {
        let t0 = self.apply(&self.base);
        let mut x = self.base.clone();
        for ((dir, yk), bk) in self.directions.iter().zip(y).zip(&t0) {
            let c = yk - bk;
            for (xi, di) in x.iter_mut().zip(dir) {
                *xi = xi.add_mul(&c, di);
            }
        }
        x
    }
}

/// Re-expresses `data` in coordinates of its affine hull.
///
/// Exact Gaussian elimination on `x_i − x_1` selects the lexicographically
/// first pivot columns; the transform keeps exactly those coordinates.
pub fn affine_hull_reduce(data: &Dataset) -> (Dataset, AffineTransform) {
    let d = data.dim();
    let base = data.points()[0].x.clone();
    let diffs: Vec<Vec<Rational>> = data.points()[1..]
        .iter()
        .map(|p| p.x.iter().zip(&base).map(|(a, b)| a - b).collect())
        .collect();
    let (echelon, pivots) = rref(&diffs);
    if pivots.len() == d {
        return (data.clone(), AffineTransform::identity(d));
    }
    let matrix: Vec<Vec<Rational>> = pivots
        .iter()
        .map(|&c| (0..d).map(|j| if j == c { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    let transform = AffineTransform {
        matrix,
        offset: vec![Rational::zero(); pivots.len()],
        base,
        directions: echelon,
    };
    let points = data
        .points()
        .iter()
        .map(|p| LabeledPoint { x: transform.apply(&p.x), label: p.label.clone(), multiplicity: p.multiplicity })
        .collect();
    (Dataset { dim: pivots.len(), points }, transform)
}

/// Pulls a network on the reduced space back to the original coordinates.
pub fn lift_network(t: &AffineTransform, net: &ReluNetwork) -> Result<ReluNetwork> {
    if net.dim() != t.output_dim() {
        return Err(Error::DimensionMismatch { expected: t.output_dim(), found: net.dim() });
    }
    let d = t.input_dim();
    let neurons = net
        .neurons()
        .iter()
        .map(|n| {
            let mut w = vec![Rational::zero(); d];
            for (row, wk) in t.matrix.iter().zip(&n.w) {
                for (wj, m) in w.iter_mut().zip(row) {
                    *wj = wj.add_mul(wk, m);
                }
            }
            Neuron { w, b: &n.b + dot(&n.w, &t.offset), a: n.a }
        })
        .collect();
    ReluNetwork::new(neurons)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};
    use proptest::prelude::*;

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| qi(x)).collect()
    }

    fn neuron(w: &[i64], b: i64, a: OutputSign) -> Neuron {
        Neuron { w: v(w), b: qi(b), a }
    }

    #[test]
    fn eval_examples() {
        let ramp = ReluNetwork::single(v(&[1]), qi(0), OutputSign::Positive);
        assert_eq!(eval_network(&ramp, &v(&[2])).unwrap(), qi(2));
        let two = ReluNetwork::new(vec![neuron(&[1], 0, OutputSign::Positive), neuron(&[1], -1, OutputSign::Negative)]).unwrap();
        assert_eq!(eval_network(&two, &v(&[2])).unwrap(), qi(1));
        let clipped = ReluNetwork::single(v(&[1]), qi(-3), OutputSign::Positive);
        assert_eq!(eval_network(&clipped, &v(&[2])).unwrap(), qi(0));
        assert!(matches!(eval_network(&ramp, &v(&[1, 2])), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn loss_examples() {
        let zero = ReluNetwork::zero(1, 1);
        let fit = Dataset::from_pairs(1, [(v(&[0]), qi(0)), (v(&[1]), qi(0))]).unwrap();
        for p in [qi(0), q(1, 2), qi(1), qi(2)] {
            let l = loss_value(&zero, &fit, &LossSpec::Lp(p)).unwrap();
            assert_eq!(l.approx_value(), &qi(0));
        }
        assert!(loss_value(&zero, &fit, &LossSpec::LinfInterval).unwrap().is_exact());

        // residuals (1, 1, 0) under p = 0 count two misfits
        let d = Dataset::from_pairs(1, [(v(&[0]), qi(1)), (v(&[1]), qi(-1)), (v(&[2]), qi(0))]).unwrap();
        assert_eq!(loss_value(&zero, &d, &LossSpec::Lp(qi(0))).unwrap(), LossValue::exact(qi(2)));

        // residuals (4, 9) under p = 1/2: 2 + 3
        let d = Dataset::from_pairs(1, [(v(&[0]), qi(4)), (v(&[1]), qi(9))]).unwrap();
        let l = loss_value(&zero, &d, &LossSpec::Lp(q(1, 2))).unwrap();
        assert!(!l.is_exact());
        assert!((l.to_f64() - 5.0).abs() < 1e-15);
        assert_eq!(l.decimal(12), "5");
    }

    #[test]
    fn interval_loss_requires_nothing_scalar_loss_rejects_intervals() {
        let pts = vec![LabeledPoint { x: v(&[0]), label: Label::interval(qi(1), qi(2)).unwrap(), multiplicity: 1 }];
        let d = Dataset::new(1, pts).unwrap();
        let zero = ReluNetwork::zero(1, 1);
        assert!(matches!(loss_value(&zero, &d, &LossSpec::Lp(qi(1))), Err(Error::IncompatibleLabels(_))));
        assert_eq!(loss_value(&zero, &d, &LossSpec::LinfInterval).unwrap(), LossValue::exact(qi(1)));
    }

    #[test]
    fn dist_examples() {
        assert_eq!(dist_interval(&qi(1), &qi(2), &qi(0)).unwrap(), qi(1));
        assert_eq!(dist_interval(&qi(1), &qi(2), &q(3, 2)).unwrap(), qi(0));
        assert_eq!(dist_interval(&qi(1), &qi(2), &qi(3)).unwrap(), qi(1));
        assert!(dist_interval(&qi(2), &qi(1), &qi(0)).is_err());
    }

    #[test]
    fn dataset_validation() {
        assert!(Dataset::new(1, vec![]).is_err());
        assert!(Dataset::from_pairs(2, [(v(&[1]), qi(0))]).is_err());
        let mixed = vec![
            LabeledPoint::scalar(v(&[0]), qi(0)),
            LabeledPoint { x: v(&[1]), label: Label::Interval { alpha: qi(0), beta: qi(1) }, multiplicity: 1 },
        ];
        assert!(matches!(Dataset::new(1, mixed), Err(Error::IncompatibleLabels(_))));
        assert!(Dataset::new(1, vec![LabeledPoint::scalar(v(&[0]), qi(0)).with_multiplicity(0)]).is_err());
        assert!(Label::interval(qi(2), qi(1)).is_err());
    }

    #[test]
    fn dedupe_examples() {
        let copies = Dataset::from_pairs(1, (0..13).map(|_| (v(&[3]), qi(0)))).unwrap();
        let d = dedupe(&copies);
        assert_eq!(d.points().len(), 1);
        assert_eq!(d.points()[0].multiplicity, 13);

        let distinct = Dataset::from_pairs(1, [(v(&[0]), qi(0)), (v(&[1]), qi(0))]).unwrap();
        assert_eq!(dedupe(&distinct), distinct);

        let same_x = Dataset::from_pairs(1, [(v(&[0]), qi(0)), (v(&[0]), qi(1))]).unwrap();
        assert_eq!(dedupe(&same_x).points().len(), 2);
    }

    #[test]
    fn affine_hull_fixed_coordinate() {
        let d = Dataset::from_pairs(3, [(v(&[0, 0, 5]), qi(1)), (v(&[1, 0, 5]), qi(2)), (v(&[0, 1, 5]), qi(3))]).unwrap();
        let (r, t) = affine_hull_reduce(&d);
        assert_eq!(r.dim(), 2);
        for (orig, red) in d.points().iter().zip(r.points()) {
            assert_eq!(t.apply(&orig.x), red.x);
            assert_eq!(t.preimage(&red.x), orig.x);
        }
    }

    #[test]
    fn affine_hull_full_and_single() {
        let d = Dataset::from_pairs(2, [(v(&[0, 0]), qi(1)), (v(&[1, 0]), qi(2)), (v(&[0, 1]), qi(3))]).unwrap();
        let (r, t) = affine_hull_reduce(&d);
        assert!(t.is_identity());
        assert_eq!(r, d);

        let single = Dataset::from_pairs(4, [(v(&[1, 2, 3, 4]), qi(7))]).unwrap();
        let (r, t) = affine_hull_reduce(&single);
        assert_eq!(r.dim(), 0);
        assert_eq!(t.preimage(&[]), v(&[1, 2, 3, 4]));
        let net = ReluNetwork::single(vec![], qi(3), OutputSign::Positive);
        let lifted = lift_network(&t, &net).unwrap();
        assert_eq!(eval_network(&lifted, &v(&[1, 2, 3, 4])).unwrap(), qi(3));
    }

    #[test]
    fn lift_projection_places_weights() {
        // points on the plane x2 = 2 x1 + 1 in R^3 with x3 free
        let d = Dataset::from_pairs(3, [
            (v(&[0, 1, 0]), qi(0)),
            (v(&[1, 3, 0]), qi(1)),
            (v(&[0, 1, 2]), qi(2)),
            (v(&[2, 5, 7]), qi(3)),
        ])
        .unwrap();
        let (r, t) = affine_hull_reduce(&d);
        assert_eq!(r.dim(), 2);
        let net = ReluNetwork::new(vec![
            Neuron { w: vec![q(3, 2), qi(-1)], b: qi(1), a: OutputSign::Positive },
            Neuron { w: vec![qi(-2), q(1, 3)], b: qi(2), a: OutputSign::Negative },
        ])
        .unwrap();
        let lifted = lift_network(&t, &net).unwrap();
        for (orig, red) in d.points().iter().zip(r.points()) {
            assert_eq!(eval_network(&lifted, &orig.x).unwrap(), eval_network(&net, &red.x).unwrap());
        }
        assert!(lift_network(&t, &ReluNetwork::zero(3, 1)).is_err());
        let id = AffineTransform::identity(2);
        assert_eq!(lift_network(&id, &net).unwrap(), net);
    }

    #[test]
    fn approx_pow_accuracy() {
        let two = qi(2);
        let r = approx_pow(&two, 1, 2, 64);
        assert!(&r * &r <= two);
        assert!((r.to_f64() - 2f64.sqrt()).abs() < 1e-15);
        let tiny = q(1, 1_000_000_007);
        let r = approx_pow(&tiny, 1, 3, 64).to_f64();
        assert!((r / (1.0f64 / 1_000_000_007.0).cbrt() - 1.0).abs() < 1e-15);
        assert_eq!(approx_pow(&qi(9), 3, 2, 64), qi(27));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(decimal_string(&q(1, 8), 18), "0.125");
        assert_eq!(decimal_string(&q(-7, 2), 3), "-3.5");
        assert_eq!(decimal_string(&q(1, 3), 4), "0.3333");
    }

    fn arb_point(d: usize) -> impl Strategy<Value = Vec<Rational>> {
        proptest::collection::vec((-3i64..=3).prop_map(qi), d)
    }

    fn arb_net(d: usize) -> impl Strategy<Value = ReluNetwork> {
        proptest::collection::vec(
            (proptest::collection::vec((-4i64..=4, 1i64..=3).prop_map(|(n, d)| q(n, d)), d), -3i64..=3, any::<bool>()),
            1..=2,
        )
        .prop_map(|ns| {
            ReluNetwork::new(
                ns.into_iter()
                    .map(|(w, b, s)| Neuron { w, b: qi(b), a: if s { OutputSign::Positive } else { OutputSign::Negative } })
                    .collect(),
            )
            .unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn dedupe_preserves_loss(
            pts in proptest::collection::vec((arb_point(2), -2i64..=2), 1..8),
            net in arb_net(2),
            p in prop_oneof![Just(qi(0)), Just(q(1, 2)), Just(qi(1)), Just(qi(2))],
        ) {
            let mut all = pts.clone();
            all.extend(pts.iter().take(3).cloned());
            let data = Dataset::from_pairs(2, all.into_iter().map(|(x, y)| (x, qi(y)))).unwrap();
            let deduped = dedupe(&data);
            for loss in [LossSpec::Lp(p.clone()), LossSpec::LinfInterval] {
                let a = loss_value(&net, &data, &loss).unwrap();
                let b = loss_value(&net, &deduped, &loss).unwrap();
                if a.is_exact() {
                    prop_assert_eq!(a, b);
                } else {
                    prop_assert!((a.to_f64() - b.to_f64()).abs() < 1e-9);
                }
            }
        }

        #[test]
        fn reduced_loss_equals_lifted_loss(
            base in proptest::collection::vec(arb_point(2), 1..6),
            ys in proptest::collection::vec(-2i64..=2, 6),
            net in arb_net(1),
        ) {
            // embed R^2 points into the plane x3 = x1 - x2 of R^3, then also
            // into a line when all points share x2
            let data = Dataset::from_pairs(3, base.iter().zip(&ys).map(|(x, y)| {
                (vec![x[0].clone(), x[1].clone(), &x[0] - &x[1]], qi(*y))
            })).unwrap();
            let (reduced, t) = affine_hull_reduce(&data);
            prop_assume!(reduced.dim() >= 1);
            let net = if reduced.dim() == 1 { net } else {
                ReluNetwork::new(net.neurons().iter().map(|n| Neuron {
                    w: (0..reduced.dim()).map(|i| n.w[0].clone() * qi(i as i64 + 1)).collect(),
                    b: n.b.clone(),
                    a: n.a,
                }).collect()).unwrap()
            };
            let lifted = lift_network(&t, &net).unwrap();
            let loss = LossSpec::Lp(qi(1));
            prop_assert_eq!(loss_value(&net, &reduced, &loss).unwrap(), loss_value(&lifted, &data, &loss).unwrap());
            prop_assert!(reduced.dim() <= (data.points().len() - 1).min(3));
        }

        #[test]
        fn zero_exponent_counts_misfits(
            pts in proptest::collection::vec((arb_point(1), -2i64..=2), 1..8),
            net in arb_net(1),
        ) {
            let data = Dataset::from_pairs(1, pts.into_iter().map(|(x, y)| (x, qi(y)))).unwrap();
            let misfits = data.points().iter().filter(|p| eval_network(&net, &p.x).unwrap() != *p.y()).count();
            prop_assert_eq!(loss_value(&net, &data, &LossSpec::Lp(qi(0))).unwrap(), LossValue::exact(qi(misfits as i64)));
        }
    }
}
