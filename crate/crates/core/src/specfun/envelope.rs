//! Calibrated envelopes for |J_ν| and |J′_ν|.
//!
//! Two bounds are combined:
//!
//! * small argument: |J_ν(z)| ≤ C z^ν / (2^ν Γ(ν+½) Γ(½)) · (1 + 1/(ν+½)) with
//!   one absolute constant C;
//! * all arguments: |J_ν(r)| ≤ C_ν r^ν (1+r)^{−ν−½} and
//!   |J′_ν(r)| ≤ C′_ν r^{ν−1} (1+r)^{−ν+½}, with order-dependent constants.
//!
//! The constants are the maxima of the corresponding ratios over a dense scan,
//! times a safety margin. They live in a versioned text table generated by
//! [`calibrate`] and embedded at build time.

use std::fmt::Write as _;
use std::sync::OnceLock;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::bessel_j::{j_eval, j_value};
use super::gamma::ln_gamma;

const TABLE_TEXT: &str = include_str!("../../data/envelope_constants.txt");
const TABLE_VERSION: u32 = 1;

/// Scan layout used to calibrate the constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationGrid {
    pub nu_max: f64,
    pub nu_step: f64,
    pub r_max: f64,
    pub r_step: f64,
    pub margin: f64,
}

impl Default for CalibrationGrid {
    fn default() -> Self {
        CalibrationGrid { nu_max: 30.0, nu_step: 0.1, r_max: 100.0, r_step: 0.005, margin: 1.001 }
    }
}

impl CalibrationGrid {
    fn descriptor(&self) -> String {
        format!("nu:0:{}:{};r:0:{}:{};margin:{}", self.nu_max, self.nu_step, self.r_max, self.r_step, self.margin)
    }

    /// First 16 hex digits of the SHA-256 of the grid descriptor.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.descriptor().as_bytes());
        let mut s = String::with_capacity(16);
        for b in &digest[..8] {
            let _ = write!(s, "{b:02x}");
        }
        s
    }

    fn nu_count(&self) -> usize {
        (self.nu_max / self.nu_step).round() as usize + 1
    }

    fn r_count(&self) -> usize {
        (self.r_max / self.r_step).round() as usize + 1
    }
}

/// Calibrated constants on an equispaced order grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeTable {
    pub grid_hash: String,
    pub nu_step: f64,
    /// Absolute constant C of the small-argument bound.
    pub absolute: f64,
    /// C_ν at ν = i · nu_step.
    pub order: Vec<f64>,
    /// C′_ν at ν = i · nu_step.
    pub derivative: Vec<f64>,
}

impl EnvelopeTable {
    pub fn nu_max(&self) -> f64 {
        self.nu_step * (self.order.len() - 1) as f64
    }

    fn lookup(&self, table: &[f64], nu: f64) -> Option<f64> {
        let pos = nu / self.nu_step;
        let i = pos.floor() as usize;
        if i + 1 > table.len() {
            return None;
        }
        if (pos - pos.round()).abs() < 1e-9 {
            return table.get(pos.round() as usize).copied();
        }
        let hi = *table.get(i + 1)?;
        // off-grid orders take the larger neighbour with extra headroom
        Some(table[i].max(hi) * 1.01)
    }

    pub fn order_constant(&self, nu: f64) -> Option<f64> {
        self.lookup(&self.order, nu)
    }

    pub fn derivative_constant(&self, nu: f64) -> Option<f64> {
        self.lookup(&self.derivative, nu)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# conelab Bessel envelope constants");
        let _ = writeln!(s, "# columns: name nu value grid_hash");
        let _ = writeln!(s, "version {TABLE_VERSION}");
        let _ = writeln!(s, "est_r all {:.17e} {}", self.absolute, self.grid_hash);
        for (i, c) in self.order.iter().enumerate() {
            let _ = writeln!(s, "bess1 {:.1} {:.17e} {}", i as f64 * self.nu_step, c, self.grid_hash);
        }
        for (i, c) in self.derivative.iter().enumerate() {
            let _ = writeln!(s, "bess2 {:.1} {:.17e} {}", i as f64 * self.nu_step, c, self.grid_hash);
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut version = None;
        let mut absolute = None;
        let mut hash = None;
        let mut order = Vec::new();
        let mut derivative = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            let bad = || format!("line {}: malformed row {line:?}", lineno + 1);
            if cols[0] == "version" {
                version = Some(cols.get(1).and_then(|v| v.parse::<u32>().ok()).ok_or_else(bad)?);
                continue;
            }
            if cols.len() != 4 {
                return Err(bad());
            }
            let value: f64 = cols[2].parse().map_err(|_| bad())?;
            match hash.as_deref() {
                None => hash = Some(cols[3].to_string()),
                Some(h) if h != cols[3] => return Err(format!("line {}: mixed grid hashes", lineno + 1)),
                _ => {}
            }
            match cols[0] {
                "est_r" => absolute = Some(value),
                "bess1" => order.push((cols[1].parse::<f64>().map_err(|_| bad())?, value)),
                "bess2" => derivative.push((cols[1].parse::<f64>().map_err(|_| bad())?, value)),
                _ => return Err(bad()),
            }
        }
        if version != Some(TABLE_VERSION) {
            return Err(format!("unsupported table version {version:?}"));
        }
        if order.len() < 2 || order.len() != derivative.len() {
            return Err("order and derivative tables must have equal length >= 2".into());
        }
        let nu_step = order[1].0 - order[0].0;
        for (i, ((a, _), (b, _))) in order.iter().zip(&derivative).enumerate() {
            let expect = i as f64 * nu_step;
            if (a - expect).abs() > 1e-9 || (b - expect).abs() > 1e-9 {
                return Err(format!("order grid not equispaced at row {i}"));
            }
        }
        Ok(EnvelopeTable {
            grid_hash: hash.unwrap_or_default(),
            nu_step,
            absolute: absolute.ok_or("missing est_r row")?,
            order: order.into_iter().map(|p| p.1).collect(),
            derivative: derivative.into_iter().map(|p| p.1).collect(),
        })
    }
}

/// The embedded table, parsed once.
pub fn envelope_table() -> &'static EnvelopeTable {
    static TABLE: OnceLock<EnvelopeTable> = OnceLock::new();
    TABLE.get_or_init(|| EnvelopeTable::parse(TABLE_TEXT).expect("embedded envelope table is malformed"))
}

/// Small-argument bound without the constant C.
fn small_argument_shape(nu: f64, z: f64) -> f64 {
    let tail = 1.0 + 1.0 / (nu + 0.5);
    if z == 0.0 {
        return if nu == 0.0 { tail / std::f64::consts::PI } else { 0.0 };
    }
    (nu * (0.5 * z).ln() - ln_gamma(nu + 0.5) - 0.5 * std::f64::consts::PI.ln()).exp() * tail
}

fn order_shape(nu: f64, r: f64) -> f64 {
    if r == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    (nu * r.ln() - (nu + 0.5) * r.ln_1p()).exp()
}

fn derivative_shape(nu: f64, r: f64) -> f64 {
    ((nu - 1.0) * r.ln() - (nu - 0.5) * r.ln_1p()).exp()
}

/// J′_ν(r), with J′₀ = −J₁.
fn j_prime(nu: f64, r: f64) -> f64 {
    if nu == 0.0 {
        return -j_value(1.0, r);
    }
    let j = j_value(nu, r);
    let jm1 = if nu >= 1.0 { j_value(nu - 1.0, r) } else { 2.0 * nu / r * j - j_value(nu + 1.0, r) };
    jm1 - nu * j / r
}

/// Upper bound for |J_ν(r)|: the smaller of the two calibrated envelopes.
///
/// Beyond the tabulated orders only the small-argument form is used.
pub fn bessel_envelope(nu: f64, r: f64) -> f64 {
    let t = envelope_table();
    let small = t.absolute * small_argument_shape(nu, r);
    match t.order_constant(nu) {
        Some(c) => small.min(c * order_shape(nu, r)),
        None => small,
    }
}

/// Upper bound for sup_{0 ≤ x ≤ z} |J_ν(x)| from the small-argument form
/// alone; non-increasing in ν once ν ≥ z/2.
pub fn bessel_small_argument_bound(nu: f64, z: f64) -> f64 {
    (envelope_table().absolute * small_argument_shape(nu, z)).min(1.0)
}

/// Upper bound for sup_{0 ≤ x ≤ z} |J_ν(x)|, never above 1.
pub fn bessel_envelope_sup(nu: f64, z: f64) -> f64 {
    let t = envelope_table();
    let small = t.absolute * small_argument_shape(nu, z);
    let bound = match t.order_constant(nu) {
        // the order shape peaks at x = 2ν
        Some(c) => small.min(c * order_shape(nu, z.min(2.0 * nu))),
        None => small,
    };
    bound.min(1.0)
}

/// Upper bound for |J′_ν(r)|, r > 0, for tabulated orders.
pub fn bessel_derivative_envelope(nu: f64, r: f64) -> Option<f64> {
    envelope_table().derivative_constant(nu).map(|c| c * derivative_shape(nu, r))
}

/// Outcome of checking both envelopes on a grid.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EnvelopeCheck {
    pub points: usize,
    pub violations: usize,
    /// Largest |J|/envelope or |J′|/envelope seen.
    pub worst_ratio: f64,
}

/// Checks |J_ν(x)| and |J′_ν(x)| against their envelopes for
/// ν ∈ [0, nu_max], x ∈ [0, x_max], both with the given step.
pub fn check_envelopes(nu_max: f64, x_max: f64, step: f64) -> EnvelopeCheck {
    let nus: Vec<f64> = (0..=(nu_max / step).round() as usize).map(|i| i as f64 * step).collect();
    let xs: Vec<f64> = (0..=(x_max / step).round() as usize).map(|i| i as f64 * step).collect();
    let rows: Vec<(usize, usize, f64)> = nus
        .par_iter()
        .map(|&nu| {
            let (mut points, mut bad, mut worst) = (0, 0, 0.0f64);
            for &x in &xs {
                let j = if x == 0.0 {
                    if nu == 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    j_eval(nu, x, 1e-14).0
                };
                let mut ratios = vec![(j.abs(), bessel_envelope(nu, x))];
                if x > 0.0 {
                    if let Some(d) = bessel_derivative_envelope(nu, x) {
                        ratios.push((j_prime(nu, x).abs(), d));
                    }
                }
                for (v, e) in ratios {
                    points += 1;
                    if v > e {
                        bad += 1;
                    }
                    if e > 0.0 {
                        worst = worst.max(v / e);
                    }
                }
            }
            (points, bad, worst)
        })
        .collect();
    EnvelopeCheck {
        points: rows.iter().map(|r| r.0).sum(),
        violations: rows.iter().map(|r| r.1).sum(),
        worst_ratio: rows.iter().map(|r| r.2).fold(0.0, f64::max),
    }
}

/// Dense-scan calibration of all constants on the given grid.
pub fn calibrate(grid: &CalibrationGrid) -> EnvelopeTable {
    let rs: Vec<f64> = (0..grid.r_count()).map(|i| i as f64 * grid.r_step).collect();
    let rows: Vec<(f64, f64, f64)> = (0..grid.nu_count())
        .into_par_iter()
        .map(|i| {
            let nu = i as f64 * grid.nu_step;
            let mut small = 0.0f64;
            let mut order = 0.0f64;
            let mut deriv = 0.0f64;
            for &r in &rs {
                let j = if r == 0.0 {
                    if nu == 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    j_eval(nu, r, 1e-14).0
                };
                let s = small_argument_shape(nu, r);
                if s > 0.0 {
                    small = small.max(j.abs() / s);
                }
                let o = order_shape(nu, r);
                if o > 0.0 {
                    order = order.max(j.abs() / o);
                }
                if r > 0.0 {
                    deriv = deriv.max(j_prime(nu, r).abs() / derivative_shape(nu, r));
                }
            }
            (small, order, deriv)
        })
        .collect();
    let absolute = rows.iter().map(|r| r.0).fold(0.0, f64::max) * grid.margin;
    EnvelopeTable {
        grid_hash: grid.hash(),
        nu_step: grid.nu_step,
        absolute,
        order: rows.iter().map(|r| r.1 * grid.margin).collect(),
        derivative: rows.iter().map(|r| r.2 * grid.margin).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_table_round_trips() {
        let t = envelope_table();
        assert_eq!(t.grid_hash, CalibrationGrid::default().hash());
        assert_eq!(t.order.len(), 301);
        let again = EnvelopeTable::parse(&t.to_text()).unwrap();
        assert_eq!(&again, t);
    }

    #[test]
    fn known_values() {
        assert_eq!(bessel_envelope(1.5, 0.0), 0.0);
        let t = envelope_table();
        let at_origin = (3.0 * t.absolute / std::f64::consts::PI).min(t.order[0]);
        assert_eq!(bessel_envelope(0.0, 0.0), at_origin);
        let c2 = t.order_constant(2.0).unwrap();
        assert!(bessel_envelope(2.0, 1.0) <= c2 * 2f64.powf(-2.5) * (1.0 + 1e-15));
        assert!(bessel_envelope(2.0, 1.0) >= j_value(2.0, 1.0));
    }

    #[test]
    fn recalibration_reproduces_stored_constants() {
        // same r grid, a handful of orders
        let g = CalibrationGrid::default();
        let rs: Vec<f64> = (1..g.r_count()).map(|i| i as f64 * g.r_step).collect();
        let t = envelope_table();
        for &i in &[0usize, 7, 123, 300] {
            let nu = i as f64 * g.nu_step;
            let mut order = if nu == 0.0 { 1.0f64 } else { 0.0 };
            for &r in &rs {
                order = order.max(j_eval(nu, r, 1e-14).0.abs() / order_shape(nu, r));
            }
            let stored = t.order[i];
            assert!(((order * g.margin - stored) / stored).abs() < 1e-12, "nu = {nu}");
        }
    }

    #[test]
    fn table_parser_rejects_garbage() {
        assert!(EnvelopeTable::parse("version 2\n").is_err());
        assert!(EnvelopeTable::parse("version 1\nbess1 0.0 x abc\n").is_err());
    }

    #[test]
    fn sup_envelope_covers_running_maximum() {
        for nu in [0.0, 0.5, 3.7, 12.0, 45.0] {
            let mut running = 0.0f64;
            for i in 1..=4000 {
                let x = i as f64 * 0.02;
                running = running.max(j_value(nu, x).abs());
                assert!(running <= bessel_envelope_sup(nu, x), "nu {nu} x {x}");
            }
        }
    }
}
