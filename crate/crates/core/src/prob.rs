//! Simplex arithmetic: softmax, entropy, cross-entropy, KL divergence, the
//! `K+1`-class cross-entropy decomposition and target-vector construction.
//!
//! Class indices are zero-based. In a `RealPlusFake` layout with `K` real
//! classes the fake class sits at index `K`.
//!
//! Every logarithm of a probability goes through [`clamped_ln`], which floors
//! its argument at [`LOG_FLOOR`].

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

/// Lower clamp applied to every probability before taking its logarithm.
pub const LOG_FLOOR: f64 = 1e-12;

/// Maximum deviation of a vector's sum from 1 that is silently renormalized.
pub const SIMPLEX_TOL: f64 = 1e-9;

#[inline]
pub fn clamped_ln(p: f64) -> f64 {
    p.max(LOG_FLOOR).ln()
}

/// Unbounded real scores fed to a softmax.
#[derive(Debug, Clone, PartialEq)]
pub struct LogitVector(Vec<f64>);

impl LogitVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "logit vector needs at least 2 entries, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "non-finite logit at index {i}"
            )));
        }
        Ok(Self(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// How the entries of a probability vector map onto classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Layout {
    /// `classes` ordinary classes.
    RealOnly { classes: usize },
    /// `real_classes` real classes followed by one fake class.
    RealPlusFake { real_classes: usize },
}

impl Layout {
    pub fn len(&self) -> usize {
        match *self {
            Layout::RealOnly { classes } => classes,
            Layout::RealPlusFake { real_classes } => real_classes + 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn real_classes(&self) -> usize {
        match *self {
            Layout::RealOnly { classes } => classes,
            Layout::RealPlusFake { real_classes } => real_classes,
        }
    }
}

/// A point on the probability simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector {
    values: Vec<f64>,
    layout: Layout,
}

impl ProbVector {
    /// Validates `values` against the simplex. Sums within [`SIMPLEX_TOL`] of 1
    /// are renormalized; anything further off is rejected.
    pub fn new(mut values: Vec<f64>, layout: Layout) -> Result<Self> {
        check_len(layout.len(), values.len())?;
        if values.is_empty() {
            return Err(Error::InvalidInput("empty probability vector".into()));
        }
        for (i, v) in values.iter_mut().enumerate() {
            if !v.is_finite() || *v < -SIMPLEX_TOL || *v > 1.0 + SIMPLEX_TOL {
                return Err(Error::InvalidInput(format!(
                    "probability entry {i} = {v} outside [0, 1]"
                )));
            }
            *v = v.clamp(0.0, 1.0);
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::InvalidInput(format!(
                "probabilities sum to {sum}, not 1"
            )));
        }
        if sum != 1.0 {
            values.iter_mut().for_each(|v| *v /= sum);
        }
        Ok(Self { values, layout })
    }

    pub fn real_only(values: Vec<f64>) -> Result<Self> {
        let classes = values.len();
        Self::new(values, Layout::RealOnly { classes })
    }

    /// Interprets the last entry as the fake class.
    pub fn with_fake(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Layout(
                "a real-plus-fake vector needs at least one real class".into(),
            ));
        }
        let real_classes = values.len() - 1;
        Self::new(values, Layout::RealPlusFake { real_classes })
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform distribution over zero classes");
        Self {
            values: vec![1.0 / n as f64; n],
            layout: Layout::RealOnly { classes: n },
        }
    }

    pub fn one_hot(n: usize, index: usize) -> Result<Self> {
        if index >= n {
            return Err(Error::Label {
                label: index,
                classes: n,
            });
        }
        let mut values = vec![0.0; n];
        values[index] = 1.0;
        Ok(Self {
            values,
            layout: Layout::RealOnly { classes: n },
        })
    }

    /// Trusted constructor for vectors already on the simplex by construction.
    pub(crate) fn from_parts(values: Vec<f64>, layout: Layout) -> Self {
        debug_assert_eq!(values.len(), layout.len());
        Self { values, layout }
    }

    /// Reinterprets the same entries under another layout of equal length.
    pub fn with_layout(self, layout: Layout) -> Result<Self> {
        check_len(layout.len(), self.values.len())?;
        Ok(Self { layout, ..self })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.values
    }

    /// Total mass on the real classes (`D_r`). Equals the full sum for
    /// `RealOnly` vectors.
    pub fn real_mass(&self) -> f64 {
        self.values[..self.layout.real_classes()].iter().sum()
    }

    /// Mass on the fake class, if the layout has one.
    pub fn fake_prob(&self) -> Option<f64> {
        match self.layout {
            Layout::RealPlusFake { real_classes } => Some(self.values[real_classes]),
            Layout::RealOnly { .. } => None,
        }
    }
}

/// Which supervision a [`TargetVector`] encodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetKind {
    /// `v(y)` over `K+1` entries; `y == K` is the fake class.
    OneHotFull(usize),
    /// `u(y)` over the `K` real classes.
    OneHotReal(usize),
    /// Two-class smoothed target `[1-λ, λ]` (real side) or `[λ, 1-λ]` (fake side).
    Smoothed {
        lambda: f64,
        real_side: bool,
    },
    Uniform,
    /// Any other distribution, typically a soft label.
    Soft,
}

/// Supervision target of a cross-entropy loss.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetVector {
    probs: ProbVector,
    kind: TargetKind,
}

impl TargetVector {
    /// `v(y)` over `real_classes + 1` entries.
    pub fn one_hot_full(y: usize, real_classes: usize) -> Result<Self> {
        let n = real_classes + 1;
        let probs =
            ProbVector::one_hot(n, y)?.with_layout(Layout::RealPlusFake { real_classes })?;
        Ok(Self {
            probs,
            kind: TargetKind::OneHotFull(y),
        })
    }

    /// `v(K+1)`, the fake-class target.
    pub fn fake(real_classes: usize) -> Self {
        Self::one_hot_full(real_classes, real_classes).expect("fake index is in range")
    }

    /// `u(y)` over `classes` real classes.
    pub fn one_hot_real(y: usize, classes: usize) -> Result<Self> {
        Ok(Self {
            probs: ProbVector::one_hot(classes, y)?,
            kind: TargetKind::OneHotReal(y),
        })
    }

    /// `[1-λ, λ]` over `[real, fake]`.
    pub fn smoothed_real(lambda: f64) -> Result<Self> {
        check_smoothing(lambda)?;
        Ok(Self {
            probs: ProbVector::from_parts(
                vec![1.0 - lambda, lambda],
                Layout::RealOnly { classes: 2 },
            ),
            kind: TargetKind::Smoothed {
                lambda,
                real_side: true,
            },
        })
    }

    /// `[λ, 1-λ]` over `[real, fake]`.
    pub fn smoothed_fake(lambda: f64) -> Result<Self> {
        check_smoothing(lambda)?;
        Ok(Self {
            probs: ProbVector::from_parts(
                vec![lambda, 1.0 - lambda],
                Layout::RealOnly { classes: 2 },
            ),
            kind: TargetKind::Smoothed {
                lambda,
                real_side: false,
            },
        })
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            probs: ProbVector::uniform(n),
            kind: TargetKind::Uniform,
        }
    }

    pub fn soft(probs: ProbVector) -> Self {
        Self {
            probs,
            kind: TargetKind::Soft,
        }
    }

    pub fn probs(&self) -> &ProbVector {
        &self.probs
    }

    pub fn as_slice(&self) -> &[f64] {
        self.probs.as_slice()
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn kind(&self) -> TargetKind {
        self.kind
    }
}

pub(crate) fn check_smoothing(lambda: f64) -> Result<()> {
    if (0.0..0.5).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "smoothing must lie in [0, 0.5), got {lambda}"
        )))
    }
}

/// `log Σ exp(x_i)` with the maximum factored out.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Softmax of a raw slice. The maximum is subtracted before exponentiation.
pub fn softmax_slice(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let sum: f64 = out.iter().sum();
    out.iter_mut().for_each(|v| *v /= sum);
    out
}

/// `σ(l)` as a `RealOnly` probability vector.
pub fn softmax(logits: &LogitVector) -> ProbVector {
    let n = logits.len();
    ProbVector::from_parts(
        softmax_slice(logits.as_slice()),
        Layout::RealOnly { classes: n },
    )
}

/// `-Σ t_i log p_i` on raw slices, logs clamped at [`LOG_FLOOR`].
pub fn cross_entropy_raw(target: &[f64], probs: &[f64]) -> f64 {
    debug_assert_eq!(target.len(), probs.len());
    -target
        .iter()
        .zip(probs)
        .filter(|(t, _)| **t != 0.0)
        .map(|(t, p)| t * clamped_ln(*p))
        .sum::<f64>()
}

pub fn entropy_raw(probs: &[f64]) -> f64 {
    cross_entropy_raw(probs, probs)
}

/// `Σ p_i (log p_i - log q_i)` on raw slices.
pub fn kl_divergence_raw(p: &[f64], q: &[f64]) -> f64 {
    debug_assert_eq!(p.len(), q.len());
    p.iter()
        .zip(q)
        .filter(|(pi, _)| **pi != 0.0)
        .map(|(pi, qi)| pi * (clamped_ln(*pi) - clamped_ln(*qi)))
        .sum()
}

pub fn cross_entropy(target: &TargetVector, probs: &ProbVector) -> Result<f64> {
    check_len(target.len(), probs.len())?;
    Ok(cross_entropy_raw(target.as_slice(), probs.as_slice()))
}

pub fn entropy(probs: &ProbVector) -> f64 {
    entropy_raw(probs.as_slice())
}

pub fn kl_divergence(p: &ProbVector, q: &ProbVector) -> Result<f64> {
    check_len(p.len(), q.len())?;
    Ok(kl_divergence_raw(p.as_slice(), q.as_slice()))
}

/// Negative gradient of `H(target, σ(l))` with respect to `l`, i.e.
/// `target - σ(l)`.
pub fn ce_logit_gradient(target: &TargetVector, logits: &LogitVector) -> Result<Vec<f64>> {
    check_len(target.len(), logits.len())?;
    let sigma = softmax_slice(logits.as_slice());
    Ok(target
        .as_slice()
        .iter()
        .zip(&sigma)
        .map(|(t, s)| t - s)
        .collect())
}

/// Split of a `K+1` vector into its real-class conditional and its
/// real/fake marginal.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// `v_r`, the total real-class mass.
    pub r_mass: f64,
    /// `R(v) = v[..K] / v_r`; uniform when `v_r == 0`.
    pub real_part: ProbVector,
    /// `F(v) = [v_r, v_fake]`.
    pub fake_split: ProbVector,
    /// Set when `v_r == 0` and `real_part` is the uniform placeholder.
    pub degenerate: bool,
}

fn require_fake_layout(v: &ProbVector) -> Result<usize> {
    match v.layout() {
        Layout::RealPlusFake { real_classes } => Ok(real_classes),
        other => Err(Error::Layout(format!(
            "expected a real-plus-fake vector, got {other:?}"
        ))),
    }
}

pub fn decompose(v: &ProbVector) -> Result<Decomposition> {
    let k = require_fake_layout(v)?;
    let values = v.as_slice();
    let r_mass: f64 = values[..k].iter().sum();
    let fake = values[k];
    let split_sum = r_mass + fake;
    let fake_split = ProbVector::from_parts(
        vec![r_mass / split_sum, fake / split_sum],
        Layout::RealOnly { classes: 2 },
    );
    let (real_part, degenerate) = if r_mass > 0.0 {
        let real = values[..k].iter().map(|x| x / r_mass).collect();
        (
            ProbVector::from_parts(real, Layout::RealOnly { classes: k }),
            false,
        )
    } else {
        (ProbVector::uniform(k), true)
    };
    Ok(Decomposition {
        r_mass,
        real_part,
        fake_split,
        degenerate,
    })
}

/// The two pieces of a `K+1`-class cross-entropy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecomposedCe {
    /// `t_r · H(R(t), R(p))`.
    pub aux_classifier_term: f64,
    /// `H(F(t), F(p))`.
    pub labelgan_term: f64,
    pub total: f64,
}

/// Splits `H(t, p)` into `t_r · H(R(t), R(p)) + H(F(t), F(p))`.
///
/// `log R(p)_k` is taken as `log p_k - log p_r` with both logs clamped, so the
/// identity stays exact under clamping. A zero real mass in the target
/// contributes nothing (`0 · H ≡ 0`).
pub fn decomposed_cross_entropy(target: &TargetVector, probs: &ProbVector) -> Result<DecomposedCe> {
    let k = require_fake_layout(target.probs())?;
    let kp = require_fake_layout(probs)?;
    check_len(k, kp)?;
    let t = target.as_slice();
    let p = probs.as_slice();

    let t_r: f64 = t[..k].iter().sum();
    let p_r: f64 = p[..k].iter().sum();
    let log_p_r = clamped_ln(p_r);

    let aux_classifier_term = if t_r > 0.0 {
        let h_real = -t[..k]
            .iter()
            .zip(&p[..k])
            .filter(|(tk, _)| **tk != 0.0)
            .map(|(tk, pk)| (tk / t_r) * (clamped_ln(*pk) - log_p_r))
            .sum::<f64>();
        t_r * h_real
    } else {
        0.0
    };
    let labelgan_term = cross_entropy_raw(&[t_r, t[k]], &[p_r, p[k]]);
    Ok(DecomposedCe {
        aux_classifier_term,
        labelgan_term,
        total: aux_classifier_term + labelgan_term,
    })
}

/// Both sides of `E_x[H(p(x), ref)] = H(E_x[p(x)], ref)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedCe {
    pub mean_of_ce: f64,
    pub ce_of_mean: f64,
}

pub fn expected_ce_commutes(batch: &[ProbVector], reference: &ProbVector) -> Result<ExpectedCe> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    for row in batch {
        check_len(reference.len(), row.len())?;
    }
    let mean_of_ce = batch
        .iter()
        .map(|row| cross_entropy_raw(row.as_slice(), reference.as_slice()))
        .sum::<f64>()
        / batch.len() as f64;
    let mean = mean_rows(batch.iter().map(ProbVector::as_slice));
    let ce_of_mean = cross_entropy_raw(&mean, reference.as_slice());
    Ok(ExpectedCe {
        mean_of_ce,
        ce_of_mean,
    })
}

/// Column means of equal-length rows, accumulated as offsets from the first
/// row so that a batch of identical rows averages to that row bit for bit.
pub(crate) fn mean_rows<'a, I>(rows: I) -> Vec<f64>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut iter = rows.into_iter();
    let first = iter.next().expect("mean of zero rows").to_vec();
    let mut offset = vec![0.0; first.len()];
    let mut n = 1usize;
    for row in iter {
        for ((o, r), f) in offset.iter_mut().zip(row).zip(&first) {
            *o += r - f;
        }
        n += 1;
    }
    first
        .iter()
        .zip(&offset)
        .map(|(f, o)| f + o / n as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn logits_reject_non_finite_and_short() {
        assert!(matches!(
            LogitVector::new(vec![0.0, f64::NAN]),
            Err(Error::InvalidInput(_))
        ));
        assert!(LogitVector::new(vec![f64::INFINITY, 0.0]).is_err());
        assert!(LogitVector::new(vec![1.0]).is_err());
    }

    #[test]
    fn prob_vector_renormalizes_within_tolerance() {
        let p = ProbVector::real_only(vec![0.5 + 4e-10, 0.5]).unwrap();
        assert!(close(p.as_slice().iter().sum::<f64>(), 1.0, 1e-15));
        assert!(ProbVector::real_only(vec![0.5, 0.6]).is_err());
        assert!(ProbVector::real_only(vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn softmax_examples() {
        let p = softmax(&LogitVector::new(vec![0.0, 0.0]).unwrap());
        assert_eq!(p.as_slice(), &[0.5, 0.5]);

        let p = softmax(&LogitVector::new(vec![2f64.ln(), 0.0]).unwrap());
        assert!(close(p.as_slice()[0], 2.0 / 3.0, 1e-15));
        assert!(close(p.as_slice()[1], 1.0 / 3.0, 1e-15));
    }

    #[test]
    fn softmax_large_logits_do_not_overflow() {
        // Log-domain oracle: p_1 = exp(-1000 - ln(1 + e^-1000)) underflows to 0.
        let oracle_p1 = (-1000.0 - (-1000.0f64).exp().ln_1p()).exp();
        let p = softmax(&LogitVector::new(vec![1000.0, 0.0]).unwrap());
        assert_eq!(p.as_slice()[0], 1.0);
        assert_eq!(p.as_slice()[1], oracle_p1);
        assert!(p.as_slice().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn cross_entropy_examples() {
        let t = TargetVector::one_hot_real(0, 2).unwrap();
        let p = ProbVector::real_only(vec![1.0, 0.0]).unwrap();
        assert_eq!(cross_entropy(&t, &p).unwrap(), 0.0);
        let p = ProbVector::uniform(2);
        assert!(close(cross_entropy(&t, &p).unwrap(), 2f64.ln(), 1e-15));
        assert!(matches!(
            cross_entropy(&t, &ProbVector::uniform(3)),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&ProbVector::one_hot(4, 2).unwrap()), 0.0);
        assert!(close(entropy(&ProbVector::uniform(10)), 10f64.ln(), 1e-12));
        assert!(close(entropy(&ProbVector::uniform(10)), 10f64.ln(), 1e-12));
    }

    #[test]
    fn kl_examples() {
        let p = ProbVector::real_only(vec![0.2, 0.3, 0.5]).unwrap();
        assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
        let hot = ProbVector::one_hot(7, 3).unwrap();
        let kl = kl_divergence(&hot, &ProbVector::uniform(7)).unwrap();
        assert!(close(kl, 7f64.ln(), 1e-12));
    }

    #[test]
    fn logit_gradient_examples() {
        let l = LogitVector::new(vec![0.3, -1.2, 2.0]).unwrap();
        let t = TargetVector::soft(softmax(&l));
        let g = ce_logit_gradient(&t, &l).unwrap();
        assert!(g.iter().all(|v| v.abs() < 1e-15));

        let l = LogitVector::new(vec![0.0, 0.0]).unwrap();
        let t = TargetVector::one_hot_real(0, 2).unwrap();
        assert_eq!(ce_logit_gradient(&t, &l).unwrap(), vec![0.5, -0.5]);
    }

    #[test]
    fn decompose_examples() {
        let fake = TargetVector::fake(3);
        let d = decompose(fake.probs()).unwrap();
        assert_eq!(d.r_mass, 0.0);
        assert!(d.degenerate);
        assert_eq!(d.fake_split.as_slice(), &[0.0, 1.0]);
        assert_eq!(d.real_part, ProbVector::uniform(3));

        let v = TargetVector::one_hot_full(1, 3).unwrap();
        let d = decompose(v.probs()).unwrap();
        assert_eq!(d.r_mass, 1.0);
        assert!(!d.degenerate);
        assert_eq!(d.real_part, ProbVector::one_hot(3, 1).unwrap());
        assert_eq!(d.fake_split.as_slice(), &[1.0, 0.0]);

        assert!(matches!(
            decompose(&ProbVector::uniform(3)),
            Err(Error::Layout(_))
        ));
    }

    #[test]
    fn decomposed_ce_examples() {
        let p = ProbVector::with_fake(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let t = TargetVector::one_hot_full(1, 3).unwrap();
        let d = decomposed_cross_entropy(&t, &p).unwrap();
        let r_p = decompose(&p).unwrap().real_part;
        let aux = cross_entropy(&TargetVector::one_hot_real(1, 3).unwrap(), &r_p).unwrap();
        assert!(close(d.aux_classifier_term, aux, 1e-14));
        assert!(close(d.labelgan_term, -(0.6f64).ln(), 1e-14));
        assert!(close(d.total, cross_entropy(&t, &p).unwrap(), 1e-14));

        let d = decomposed_cross_entropy(&TargetVector::fake(3), &p).unwrap();
        assert_eq!(d.aux_classifier_term, 0.0);
        assert_eq!(d.total, d.labelgan_term);
    }

    #[test]
    fn expected_ce_examples() {
        let r = ProbVector::real_only(vec![0.1, 0.6, 0.3]).unwrap();
        let p = ProbVector::real_only(vec![0.3, 0.3, 0.4]).unwrap();
        let e = expected_ce_commutes(&[p.clone(), p.clone(), p.clone()], &r).unwrap();
        let direct = cross_entropy_raw(p.as_slice(), r.as_slice());
        assert_eq!(e.mean_of_ce, direct);
        assert_eq!(e.ce_of_mean, direct);

        let batch = [
            ProbVector::one_hot(2, 0).unwrap(),
            ProbVector::one_hot(2, 1).unwrap(),
        ];
        let e = expected_ce_commutes(&batch, &ProbVector::uniform(2)).unwrap();
        assert!(close(e.mean_of_ce, 2f64.ln(), 1e-15));
        assert!(close(e.ce_of_mean, 2f64.ln(), 1e-15));

        assert_eq!(
            expected_ce_commutes(&[], &ProbVector::uniform(2)),
            Err(Error::EmptyBatch)
        );
    }

    #[test]
    fn identical_rows_average_exactly() {
        let row = [0.1, 0.7, 0.2];
        let rows = vec![&row[..]; 7];
        assert_eq!(mean_rows(rows), row.to_vec());
    }

    #[test]
    fn smoothed_targets() {
        assert_eq!(
            TargetVector::smoothed_real(0.1).unwrap().as_slice(),
            &[0.9, 0.1]
        );
        assert_eq!(
            TargetVector::smoothed_fake(0.1).unwrap().as_slice(),
            &[0.1, 0.9]
        );
        assert!(TargetVector::smoothed_real(0.5).is_err());
    }
}
