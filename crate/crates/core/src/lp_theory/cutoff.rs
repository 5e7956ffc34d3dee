//! Smooth dyadic partitions of unity on (0, ∞).

/// φ(λ) = ψ(log₂λ) / Σ_k ψ(log₂λ − k) with ψ(u) = exp(−1/(1 − (u/W)²)) on |u| < W.
///
/// W = 1 is the standard bump, supported in [1/2, 2]. For 1/2 < W < 1 the
/// support shrinks to [2^{−W}, 2^{W}] and φ ≡ 1 on |log₂λ| ≤ 1 − W.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DyadicCutoff {
    pub width: f64,
}

impl DyadicCutoff {
    pub const fn standard() -> Self {
        DyadicCutoff { width: 1.0 }
    }

    /// Narrow bump with a plateau on [2^{−0.42}, 2^{0.42}].
    pub const fn plateau() -> Self {
        DyadicCutoff { width: 0.58 }
    }

    fn psi(&self, u: f64) -> f64 {
        bump(u / self.width)
    }

    /// φ(λ).
    pub fn value(&self, lambda: f64) -> f64 {
        if !(lambda > 0.0) {
            return 0.0;
        }
        let u = lambda.log2();
        let own = self.psi(u);
        if own == 0.0 {
            return 0.0;
        }
        let k0 = u.round() as i64;
        let total: f64 = (k0 - 2..=k0 + 2).map(|k| self.psi(u - k as f64)).sum();
        own / total
    }

    /// φ_j(λ) = φ(2^{−j}λ).
    pub fn at(&self, j: i32, lambda: f64) -> f64 {
        self.value(lambda * (-j as f64).exp2())
    }

    /// Support [2^{j−W}, 2^{j+W}] of φ_j.
    pub fn support(&self, j: i32) -> (f64, f64) {
        ((j as f64 - self.width).exp2(), (j as f64 + self.width).exp2())
    }

    /// Σ_{j ≤ 0} φ_j(λ), equal to 1 on (0, 2^{−W}].
    pub fn low_pass(&self, lambda: f64) -> f64 {
        if !(lambda > 0.0) {
            return 1.0;
        }
        // the complement Σ_{j ≥ 1} has finitely many nonzero terms
        let top = lambda.log2().ceil() as i32 + 2;
        1.0 - (1..=top).map(|j| self.at(j, lambda)).sum::<f64>()
    }

    /// The j with φ_j(λ) ≠ 0.
    pub fn active_scales(&self, lambda: f64) -> Vec<i32> {
        let u = lambda.log2();
        ((u - self.width).floor() as i32..=(u + self.width).ceil() as i32).filter(|&j| self.at(j, lambda) > 0.0).collect()
    }
}

/// exp(−1/(1 − x²)) on |x| < 1, zero outside.
pub fn bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - x * x)).exp()
    }
}

/// min over λ > 0 of Σ_j φ_j(λ)², scanned over one octave.
pub fn min_square_sum(cutoff: &DyadicCutoff) -> f64 {
    (0..=2000)
        .map(|i| {
            let lambda = (i as f64 / 2000.0).exp2();
            cutoff.active_scales(lambda).iter().map(|&j| cutoff.at(j, lambda).powi(2)).sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min)
}

/// φ_j(λ) for the standard cutoff.
pub fn dyadic_cutoff_value(j: i32, lambda: f64) -> f64 {
    DyadicCutoff::standard().at(j, lambda)
}
