//! Load models: constant power (CP), ZIP and its ZP reduction, plus the
//! appliance description used to size attacks.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::Bases;

/// Tolerance on the sum-to-one constraint of load model coefficients.
pub const COEFFICIENT_SUM_TOL: f64 = 1e-9;

fn check_sum(what: &str, parts: &[f64]) -> Result<()> {
    let sum: f64 = parts.iter().sum();
    if parts.iter().all(|c| c.is_finite()) && (sum - 1.0).abs() <= COEFFICIENT_SUM_TOL {
        Ok(())
    } else {
        Err(Error::CoefficientSumError {
            what: what.to_string(),
            sum,
        })
    }
}

/// Constant-power (`alpha`), constant-current (`beta`) and
/// constant-impedance (`gamma`) fractions for active and reactive demand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZipCoefficients {
    pub alpha_p: f64,
    pub beta_p: f64,
    pub gamma_p: f64,
    pub alpha_q: f64,
    pub beta_q: f64,
    pub gamma_q: f64,
}

impl ZipCoefficients {
    pub const CONSTANT_POWER: ZipCoefficients = ZipCoefficients {
        alpha_p: 1.0,
        beta_p: 0.0,
        gamma_p: 0.0,
        alpha_q: 1.0,
        beta_q: 0.0,
        gamma_q: 0.0,
    };

    pub fn new(p: [f64; 3], q: [f64; 3]) -> Result<Self> {
        let c = ZipCoefficients {
            alpha_p: p[0],
            beta_p: p[1],
            gamma_p: p[2],
            alpha_q: q[0],
            beta_q: q[1],
            gamma_q: q[2],
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        check_sum("active ZIP", &[self.alpha_p, self.beta_p, self.gamma_p])?;
        check_sum("reactive ZIP", &[self.alpha_q, self.beta_q, self.gamma_q])
    }

    /// Multipliers applied to nominal (P, Q) at voltage magnitude `v`.
    pub fn factors(&self, v: f64) -> (f64, f64) {
        (
            self.alpha_p + self.beta_p * v + self.gamma_p * v * v,
            self.alpha_q + self.beta_q * v + self.gamma_q * v * v,
        )
    }

    pub fn has_current_term(&self) -> bool {
        self.beta_p != 0.0 || self.beta_q != 0.0
    }
}

/// ZIP coefficients with the constant-current part split evenly between the
/// constant-power and constant-impedance parts, so demand is affine in the
/// squared voltage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZpCoefficients {
    pub alpha_p: f64,
    pub gamma_p: f64,
    pub alpha_q: f64,
    pub gamma_q: f64,
}

impl ZpCoefficients {
    pub const CONSTANT_POWER: ZpCoefficients = ZpCoefficients {
        alpha_p: 1.0,
        gamma_p: 0.0,
        alpha_q: 1.0,
        gamma_q: 0.0,
    };

    pub fn new(p: [f64; 2], q: [f64; 2]) -> Result<Self> {
        let c = ZpCoefficients {
            alpha_p: p[0],
            gamma_p: p[1],
            alpha_q: q[0],
            gamma_q: q[1],
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        check_sum("active ZP", &[self.alpha_p, self.gamma_p])?;
        check_sum("reactive ZP", &[self.alpha_q, self.gamma_q])
    }

    /// Multipliers applied to nominal (P, Q) at squared voltage `u`.
    pub fn factors_sq(&self, u: f64) -> (f64, f64) {
        (self.alpha_p + self.gamma_p * u, self.alpha_q + self.gamma_q * u)
    }
}

/// `alpha' = alpha + beta/2`, `gamma' = gamma + beta/2` for both triples.
pub fn to_zp(zip: &ZipCoefficients) -> ZpCoefficients {
    ZpCoefficients {
        alpha_p: zip.alpha_p + zip.beta_p / 2.0,
        gamma_p: zip.gamma_p + zip.beta_p / 2.0,
        alpha_q: zip.alpha_q + zip.beta_q / 2.0,
        gamma_q: zip.gamma_q + zip.beta_q / 2.0,
    }
}

/// ZIP demand for nominal power `base` at voltage magnitude `v`.
pub fn zip_power(base: Complex64, zip: &ZipCoefficients, v: f64) -> Result<Complex64> {
    if !(v > 0.0) {
        return Err(Error::NonpositiveVoltage(v));
    }
    let (fp, fq) = zip.factors(v);
    Ok(Complex64::new(base.re * fp, base.im * fq))
}

/// ZP demand for nominal power `base` at squared voltage `u`.
pub fn zp_power(base: Complex64, zp: &ZpCoefficients, u: f64) -> Result<Complex64> {
    if !(u > 0.0) {
        return Err(Error::NonpositiveSquaredVoltage(u));
    }
    let (fp, fq) = zp.factors_sq(u);
    Ok(Complex64::new(base.re * fp, base.im * fq))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LoadModel {
    ConstantPower,
    Zip(ZipCoefficients),
    Zp(ZpCoefficients),
}

impl LoadModel {
    pub fn tag(&self) -> &'static str {
        match self {
            LoadModel::ConstantPower => "CP",
            LoadModel::Zip(_) => "ZIP",
            LoadModel::Zp(_) => "ZP",
        }
    }

    /// The affine-in-U form used by the closed-form solvers.
    pub fn zp_equivalent(&self) -> ZpCoefficients {
        match self {
            LoadModel::ConstantPower => ZpCoefficients::CONSTANT_POWER,
            LoadModel::Zip(c) => to_zp(c),
            LoadModel::Zp(c) => *c,
        }
    }

    /// Multipliers on nominal (P, Q) at voltage magnitude `v`. Values are used
    /// as evaluated, including negative ones.
    pub fn factors(&self, v: f64) -> (f64, f64) {
        match self {
            LoadModel::ConstantPower => (1.0, 1.0),
            LoadModel::Zip(c) => c.factors(v),
            LoadModel::Zp(c) => c.factors_sq(v * v),
        }
    }
}

/// Nominal demand at a bus together with its voltage dependence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoadSpec {
    pub bus: usize,
    pub p0: f64,
    pub q0: f64,
    pub model: LoadModel,
}

impl LoadSpec {
    pub fn new(bus: usize, p0: f64, q0: f64, model: LoadModel) -> Result<Self> {
        if !(p0 >= 0.0 && q0 >= 0.0) {
            return Err(Error::NegativeLoad { bus, p: p0, q: q0 });
        }
        Ok(LoadSpec { bus, p0, q0, model })
    }

    pub fn constant_power(bus: usize, p0: f64, q0: f64) -> Result<Self> {
        Self::new(bus, p0, q0, LoadModel::ConstantPower)
    }

    pub fn base(&self) -> Complex64 {
        Complex64::new(self.p0, self.q0)
    }

    /// Demand at voltage magnitude `v` under this load's model.
    pub fn power_at(&self, v: f64) -> Complex64 {
        let (fp, fq) = self.model.factors(v);
        Complex64::new(self.p0 * fp, self.q0 * fq)
    }

    pub fn with_model(&self, model: LoadModel) -> LoadSpec {
        LoadSpec { model, ..*self }
    }
}

/// Replace the model of every load.
pub fn with_model(loads: &[LoadSpec], model: LoadModel) -> Vec<LoadSpec> {
    loads.iter().map(|l| l.with_model(model)).collect()
}

/// Scale both P and Q of every load.
pub fn scaled(loads: &[LoadSpec], factor: f64) -> Vec<LoadSpec> {
    loads
        .iter()
        .map(|l| LoadSpec {
            p0: l.p0 * factor,
            q0: l.q0 * factor,
            ..*l
        })
        .collect()
}

/// Per-bus demand at the given voltage magnitudes (indexed by `id - 1`).
pub(crate) fn nodal_demand(n: usize, loads: &[LoadSpec], v: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut p = vec![0.0; n];
    let mut q = vec![0.0; n];
    for load in loads {
        let s = load.power_at(v[load.bus - 1]);
        p[load.bus - 1] += s.re;
        q[load.bus - 1] += s.im;
    }
    (p, q)
}

/// One class of controllable appliance. Ratings are physical units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceSpec {
    pub name: String,
    pub p_per_device_kw: f64,
    pub q_per_device_kvar: f64,
    pub zip: ZipCoefficients,
}

impl DeviceSpec {
    pub fn new(name: impl Into<String>, p_kw: f64, q_kvar: f64, zip: ZipCoefficients) -> Result<Self> {
        let d = DeviceSpec {
            name: name.into(),
            p_per_device_kw: p_kw,
            q_per_device_kvar: q_kvar,
            zip,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p_per_device_kw > 0.0 && self.p_per_device_kw.is_finite()) {
            return Err(Error::NonpositivePower {
                what: format!("{} active power per device", self.name),
                value: self.p_per_device_kw,
            });
        }
        if !(self.q_per_device_kvar >= 0.0 && self.q_per_device_kvar.is_finite()) {
            return Err(Error::NonpositivePower {
                what: format!("{} reactive power per device", self.name),
                value: self.q_per_device_kvar,
            });
        }
        self.zip.validate()
    }

    /// Q_D / P_D.
    pub fn q_over_p(&self) -> f64 {
        self.q_per_device_kvar / self.p_per_device_kw
    }

    /// Nominal power of `count` devices in per-unit.
    pub fn nominal_pu(&self, count: u64, bases: &Bases) -> Complex64 {
        let n = count as f64;
        Complex64::new(
            bases.kw_to_pu(n * self.p_per_device_kw),
            bases.kw_to_pu(n * self.q_per_device_kvar),
        )
    }
}

/// How injected attack demand responds to voltage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttackModel {
    #[serde(rename = "cp")]
    ConstantPower,
    Zip,
}

impl AttackModel {
    pub fn tag(&self) -> &'static str {
        match self {
            AttackModel::ConstantPower => "cp",
            AttackModel::Zip => "zip",
        }
    }
}

/// Extra demand (p.u.) drawn by `count` switched-on devices at voltage `v`.
pub fn attack_injection(
    device: &DeviceSpec,
    count: u64,
    v: f64,
    model: AttackModel,
    bases: &Bases,
) -> Result<Complex64> {
    if count == 0 {
        return Err(Error::ZeroCount);
    }
    if !(v > 0.0) {
        return Err(Error::NonpositiveVoltage(v));
    }
    let base = device.nominal_pu(count, bases);
    match model {
        AttackModel::ConstantPower => Ok(base),
        AttackModel::Zip => zip_power(base, &device.zip, v),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zip_nominal_and_degenerate() {
        let zip = ZipCoefficients::new([0.2, 0.3, 0.5], [0.1, 0.6, 0.3]).unwrap();
        assert_eq!(zip_power(c(0.7, 0.4), &zip, 1.0).unwrap(), c(0.7, 0.4));
        let cp = ZipCoefficients::CONSTANT_POWER;
        assert_eq!(zip_power(c(0.7, 0.4), &cp, 0.83).unwrap(), c(0.7, 0.4));
    }

    #[test]
    fn zip_hand_value() {
        let zip = ZipCoefficients::new([0.2, 0.3, 0.5], [1.0, 0.0, 0.0]).unwrap();
        let s = zip_power(c(1.0, 0.0), &zip, 0.95).unwrap();
        assert!((s.re - 0.93625).abs() < 1e-15);
        assert_eq!(
            zip_power(c(1.0, 0.0), &zip, 0.0).unwrap_err(),
            Error::NonpositiveVoltage(0.0)
        );
    }

    #[test]
    fn zp_reduction() {
        let cp = to_zp(&ZipCoefficients::CONSTANT_POWER);
        assert_eq!((cp.alpha_p, cp.gamma_p), (1.0, 0.0));
        let i = to_zp(&ZipCoefficients::new([0.0, 1.0, 0.0], [0.0, 1.0, 0.0]).unwrap());
        assert_eq!((i.alpha_p, i.gamma_p, i.alpha_q, i.gamma_q), (0.5, 0.5, 0.5, 0.5));
        let m = to_zp(&ZipCoefficients::new([0.2, 0.3, 0.5], [0.2, 0.3, 0.5]).unwrap());
        assert!((m.alpha_p - 0.35).abs() < 1e-15 && (m.gamma_p - 0.65).abs() < 1e-15);
        assert!((m.alpha_q - 0.35).abs() < 1e-15 && (m.gamma_q - 0.65).abs() < 1e-15);
        m.validate().unwrap();
    }

    #[test]
    fn zp_values() {
        let zp = ZpCoefficients::new([0.35, 0.65], [0.35, 0.65]).unwrap();
        assert_eq!(zp_power(c(0.3, 0.2), &zp, 1.0).unwrap(), c(0.3, 0.2));
        let s = zp_power(c(1.0, 0.0), &zp, 0.9025).unwrap();
        assert!((s.re - 0.936625).abs() < 1e-12);
        let flat = ZpCoefficients::new([1.0, 0.0], [1.0, 0.0]).unwrap();
        assert_eq!(zp_power(c(0.3, 0.2), &flat, 0.5).unwrap(), c(0.3, 0.2));
        assert_eq!(
            zp_power(c(1.0, 0.0), &zp, -0.1).unwrap_err(),
            Error::NonpositiveSquaredVoltage(-0.1)
        );
    }

    #[test]
    fn coefficient_sum_is_enforced() {
        let e = ZipCoefficients::new([0.2, 0.3, 0.49], [1.0, 0.0, 0.0]).unwrap_err();
        assert_eq!(e.kind(), "CoefficientSumError");
        assert!(ZpCoefficients::new([0.5, 0.4], [1.0, 0.0]).is_err());
    }

    #[test]
    fn negative_loads_rejected() {
        assert_eq!(
            LoadSpec::constant_power(3, -0.1, 0.0).unwrap_err().kind(),
            "NegativeLoad"
        );
    }

    #[test]
    fn attack_injection_cases() {
        let bases = Bases::new(10.0, 12.66);
        let zip = ZipCoefficients::new([0.5, 0.2, 0.3], [0.1, 0.2, 0.7]).unwrap();
        let dev = DeviceSpec::new("ac", 0.5, 0.125, zip).unwrap();
        assert_eq!(
            attack_injection(&dev, 0, 1.0, AttackModel::ConstantPower, &bases).unwrap_err(),
            Error::ZeroCount
        );
        let one = attack_injection(&dev, 1, 0.9, AttackModel::ConstantPower, &bases).unwrap();
        assert_eq!(one, c(0.5 / 10_000.0, 0.125 / 10_000.0));
        let cp = attack_injection(&dev, 40, 1.0, AttackModel::ConstantPower, &bases).unwrap();
        let zp = attack_injection(&dev, 40, 1.0, AttackModel::Zip, &bases).unwrap();
        assert!((cp - zp).norm() < 1e-18);
        assert_eq!(
            attack_injection(&dev, 1, -1.0, AttackModel::Zip, &bases).unwrap_err(),
            Error::NonpositiveVoltage(-1.0)
        );
    }

    #[test]
    fn device_validation() {
        let e = DeviceSpec::new("x", 0.0, 0.1, ZipCoefficients::CONSTANT_POWER).unwrap_err();
        assert_eq!(e.kind(), "NonpositivePower");
    }

    fn zip_strategy() -> impl Strategy<Value = ZipCoefficients> {
        (-1.0f64..2.0, -1.0f64..2.0, -1.0f64..2.0, -1.0f64..2.0).prop_map(|(a, b, c, d)| ZipCoefficients {
            alpha_p: a,
            beta_p: b,
            gamma_p: 1.0 - a - b,
            alpha_q: c,
            beta_q: d,
            gamma_q: 1.0 - c - d,
        })
    }

    proptest! {
        #[test]
        fn zip_at_nominal_is_base(zip in zip_strategy(), p in 0.0f64..2.0, q in 0.0f64..2.0) {
            let s = zip_power(c(p, q), &zip, 1.0).unwrap();
            prop_assert!((s.re - p).abs() < 1e-12 && (s.im - q).abs() < 1e-12);
        }

        #[test]
        fn zp_error_is_quadratic_in_deviation(zip in zip_strategy(), v in 0.9f64..1.1, p in 0.0f64..2.0) {
            let exact = zip_power(c(p, p), &zip, v).unwrap();
            let approx = zp_power(c(p, p), &to_zp(&zip), v * v).unwrap();
            let bound_p = zip.beta_p.abs() * (v - 1.0).powi(2) * p / 2.0 + 1e-12;
            let bound_q = zip.beta_q.abs() * (v - 1.0).powi(2) * p / 2.0 + 1e-12;
            prop_assert!((exact.re - approx.re).abs() <= bound_p);
            prop_assert!((exact.im - approx.im).abs() <= bound_q);
        }

        #[test]
        fn zp_exact_without_current_term(a in -1.0f64..2.0, b in -1.0f64..2.0, v in 0.5f64..1.5) {
            let zip = ZipCoefficients { alpha_p: a, beta_p: 0.0, gamma_p: 1.0 - a,
                                        alpha_q: b, beta_q: 0.0, gamma_q: 1.0 - b };
            let exact = zip_power(c(0.3, 0.1), &zip, v).unwrap();
            let approx = zp_power(c(0.3, 0.1), &to_zp(&zip), v * v).unwrap();
            prop_assert!((exact - approx).norm() < 1e-14);
        }

        #[test]
        fn injection_linear_in_count(n in 1u64..5000, v in 0.8f64..1.1) {
            let bases = Bases::new(10.0, 12.66);
            let zip = ZipCoefficients::new([1.66, -1.83, 1.17], [12.47, -27.15, 15.68]).unwrap();
            let dev = DeviceSpec::new("ac", 0.5, 0.13, zip).unwrap();
            let one = attack_injection(&dev, 1, v, AttackModel::Zip, &bases).unwrap();
            let many = attack_injection(&dev, n, v, AttackModel::Zip, &bases).unwrap();
            prop_assert!((many - one * n as f64).norm() <= 1e-12 * many.norm().max(1e-9));
        }
    }
}
