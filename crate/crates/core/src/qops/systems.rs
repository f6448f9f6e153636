//! Right-hand sides of the coefficient equations, one type per model.
//!
//! Every model's two-time equations have the form
//! `d/dt x_i(t, s) = sum_j M_ij(X(t)) x_j(t, s)` (+ a noise feed for the
//! three-time models), with `X_i(t) = int_0^t K(t, s) x_i(t, s) ds`.

use crate::linalg::{C64, I, ZERO};
use crate::models::TwoQubitParams;

pub trait CoefficientSystem {
    fn n_fields(&self) -> usize;

    /// Diagonal values `x_i(t, s = t)`.
    fn initial(&self) -> Vec<C64>;

    /// Fill the row-major `n x n` matrix `M(X)`.
    fn generator(&self, big: &[C64], m: &mut [C64]);
}

/// Extra structure of models whose exact operator carries a noise term
/// `i int_0^t ds' x_5(t, s, s') xi*_{s'} Q_5`.
///
/// * `d/dt x_i(t, s)       += feed_i X_5(t, s)`
/// * `d/dt x_5(t, s, s')    = (source . x(t, s)) X_5(t, s') + rate(X) x_5(t, s, s')`
/// * `x_5(t, s, s' = t)     = boundary . x(t, s)`, `x_5(t, s = t, s') = 0`
pub trait NoiseCoupledSystem: CoefficientSystem {
    fn noise_feed(&self) -> Vec<C64>;
    fn noise_source(&self) -> Vec<C64>;
    fn noise_rate(&self, big: &[C64]) -> C64;
    fn noise_boundary(&self) -> Vec<C64>;
}

/// Single qubit, `d/dt x_1 = (i omega + X_1) x_1`.
#[derive(Debug, Clone, Copy)]
pub struct OneQubitSystem {
    pub omega: f64,
}

impl CoefficientSystem for OneQubitSystem {
    fn n_fields(&self) -> usize {
        1
    }

    fn initial(&self) -> Vec<C64> {
        vec![C64::from(1.0)]
    }

    fn generator(&self, big: &[C64], m: &mut [C64]) {
        m[0] = I * self.omega + big[0];
    }
}

/// Two-qubit zeroth-order operator, coefficients `f_1..f_4`.
#[derive(Debug, Clone, Copy)]
pub struct TwoQubitZeroth {
    pub p: TwoQubitParams,
}

impl CoefficientSystem for TwoQubitZeroth {
    fn n_fields(&self) -> usize {
        4
    }

    fn initial(&self) -> Vec<C64> {
        vec![C64::from(self.p.kappa_a), C64::from(self.p.kappa_b), ZERO, ZERO]
    }

    fn generator(&self, big: &[C64], m: &mut [C64]) {
        let TwoQubitParams {
            omega_a,
            omega_b,
            j_xy,
            j_z,
            kappa_a: ka,
            kappa_b: kb,
        } = self.p;
        let (cf1, cf2, cf3, cf4) = (big[0], big[1], big[2], big[3]);
        m.fill(ZERO);
        let mut set = |i: usize, j: usize, v: C64| m[4 * i + j] += v;

        // d f1 = 2i wA f1 - i Jxy f3 + 2i Jz f4 + kA F1 f1 - kB F1 f3 + kB F3 f1
        //        + kB F3 f4 + kB F4 f3 + kA F4 f4
        set(0, 0, I * 2.0 * omega_a);
        set(0, 2, -I * j_xy);
        set(0, 3, I * 2.0 * j_z);
        set(0, 0, ka * cf1);
        set(0, 2, -kb * cf1);
        set(0, 0, kb * cf3);
        set(0, 3, kb * cf3);
        set(0, 2, kb * cf4);
        set(0, 3, ka * cf4);

        // d f2 = 2i wB f2 - i Jxy f4 + 2i Jz f3 + kB F2 f2 - kA F2 f4 + kB F3 f3
        //        + kA F3 f4 + kA F4 f2 + kA F4 f3
        set(1, 1, I * 2.0 * omega_b);
        set(1, 3, -I * j_xy);
        set(1, 2, I * 2.0 * j_z);
        set(1, 1, kb * cf2);
        set(1, 3, -ka * cf2);
        set(1, 2, kb * cf3);
        set(1, 3, ka * cf3);
        set(1, 1, ka * cf4);
        set(1, 2, ka * cf4);

        // d f3 = 2i wB f3 - i Jxy f1 + 2i Jz f2 - kA F2 f1 + kB F2 f3 + kA F3 f1
        //        + kA F4 f2 + kB F3 f2 + kA F4 f3
        set(2, 2, I * 2.0 * omega_b);
        set(2, 0, -I * j_xy);
        set(2, 1, I * 2.0 * j_z);
        set(2, 0, -ka * cf2);
        set(2, 2, kb * cf2);
        set(2, 0, ka * cf3);
        set(2, 1, ka * cf4);
        set(2, 1, kb * cf3);
        set(2, 2, ka * cf4);

        // d f4 = 2i wA f4 - i Jxy f2 + 2i Jz f1 - kB F1 f2 + kA F1 f4 + kB F3 f1
        //        + kB F3 f4 + kA F4 f1 + kB F4 f2
        set(3, 3, I * 2.0 * omega_a);
        set(3, 1, -I * j_xy);
        set(3, 0, I * 2.0 * j_z);
        set(3, 1, -kb * cf1);
        set(3, 3, ka * cf1);
        set(3, 0, kb * cf3);
        set(3, 3, kb * cf3);
        set(3, 0, ka * cf4);
        set(3, 1, kb * cf4);
    }
}

/// Two-qubit exact operator: `f_1..f_4` plus the noise coefficient `f_5`.
///
/// The `f_1..f_4` rows are written out in their own term order; with the
/// noise coefficient switched off they coincide with [`TwoQubitZeroth`].
#[derive(Debug, Clone, Copy)]
pub struct TwoQubitExact {
    pub p: TwoQubitParams,
}

impl CoefficientSystem for TwoQubitExact {
    fn n_fields(&self) -> usize {
        4
    }

    fn initial(&self) -> Vec<C64> {
        vec![C64::from(self.p.kappa_a), C64::from(self.p.kappa_b), ZERO, ZERO]
    }

    fn generator(&self, big: &[C64], m: &mut [C64]) {
        let TwoQubitParams {
            omega_a,
            omega_b,
            j_xy,
            j_z,
            kappa_a: ka,
            kappa_b: kb,
        } = self.p;
        let (cf1, cf2, cf3, cf4) = (big[0], big[1], big[2], big[3]);
        let wa = I * 2.0 * omega_a;
        let wb = I * 2.0 * omega_b;
        let jxy = -I * j_xy;
        let jz = I * 2.0 * j_z;
        m.fill(ZERO);

        m[0] = wa + ka * cf1 + kb * cf3;
        m[2] = jxy - kb * cf1 + kb * cf4;
        m[3] = jz + ka * cf4 + kb * cf3;

        m[4 + 1] = wb + ka * cf4 + kb * cf2;
        m[4 + 2] = jz + ka * cf4 + kb * cf3;
        m[4 + 3] = jxy - ka * cf2 + ka * cf3;

        m[8] = jxy - ka * cf2 + ka * cf3;
        m[8 + 1] = jz + ka * cf4 + kb * cf3;
        m[8 + 2] = wb + ka * cf4 + kb * cf2;

        m[12] = jz + ka * cf4 + kb * cf3;
        m[12 + 1] = jxy - kb * cf1 + kb * cf4;
        m[12 + 3] = wa + ka * cf1 + kb * cf3;
    }
}

impl NoiseCoupledSystem for TwoQubitExact {
    fn noise_feed(&self) -> Vec<C64> {
        let (ka, kb) = (self.p.kappa_a, self.p.kappa_b);
        vec![-I * kb, -I * ka, -I * ka, -I * kb]
    }

    fn noise_source(&self) -> Vec<C64> {
        let (ka, kb) = (self.p.kappa_a, self.p.kappa_b);
        vec![C64::from(ka), C64::from(kb), C64::from(-kb), C64::from(-ka)]
    }

    fn noise_rate(&self, big: &[C64]) -> C64 {
        let (ka, kb) = (self.p.kappa_a, self.p.kappa_b);
        I * 2.0 * (self.p.omega_a + self.p.omega_b)
            + ka * big[0]
            + ka * big[3]
            + kb * big[1]
            + kb * big[2]
    }

    fn noise_boundary(&self) -> Vec<C64> {
        // f5(t, s, t) = i [kA f2 + kB f1]
        vec![I * self.p.kappa_b, I * self.p.kappa_a, ZERO, ZERO]
    }
}

/// Brownian oscillator, zeroth order: `Q ~ x_1 q + x_2 p`.
#[derive(Debug, Clone, Copy)]
pub struct QbmZeroth {
    pub omega_m: f64,
}

impl CoefficientSystem for QbmZeroth {
    fn n_fields(&self) -> usize {
        2
    }

    fn initial(&self) -> Vec<C64> {
        vec![C64::from(1.0), ZERO]
    }

    fn generator(&self, big: &[C64], m: &mut [C64]) {
        let (cx1, cx2) = (big[0], big[1]);
        let w = 2.0 * self.omega_m;
        // d x1 = 2 wm x2 + i X2 x1 - 2i X1 x2 ;  d x2 = -2 wm x1 - i X2 x2
        m[0] = I * cx2;
        m[1] = C64::from(w) - I * 2.0 * cx1;
        m[2] = C64::from(-w);
        m[3] = -I * cx2;
    }
}

/// `N_s` system fermions, `d/dt x_j = i A_j x_j + X_j sum_i x_i`.
#[derive(Debug, Clone)]
pub struct NFermionSystem {
    pub energies: Vec<f64>,
}

impl CoefficientSystem for NFermionSystem {
    fn n_fields(&self) -> usize {
        self.energies.len()
    }

    fn initial(&self) -> Vec<C64> {
        vec![C64::from(1.0); self.energies.len()]
    }

    fn generator(&self, big: &[C64], m: &mut [C64]) {
        let n = self.energies.len();
        for j in 0..n {
            for i in 0..n {
                m[n * j + i] = big[j];
            }
            m[n * j + j] += I * self.energies[j];
        }
    }
}

/// Two system fermions in a bosonic bath: `x_1..x_4` plus noise coefficient `x_5`.
#[derive(Debug, Clone, Copy)]
pub struct BosonicPair {
    pub omega_a: f64,
    pub omega_b: f64,
}

impl CoefficientSystem for BosonicPair {
    fn n_fields(&self) -> usize {
        4
    }

    fn initial(&self) -> Vec<C64> {
        vec![C64::from(1.0), C64::from(1.0), ZERO, ZERO]
    }

    fn generator(&self, big: &[C64], m: &mut [C64]) {
        let (cx1, cx2, cx3, cx4) = (big[0], big[1], big[2], big[3]);
        let wa = I * self.omega_a;
        let wb = I * self.omega_b;
        m.fill(ZERO);
        // d x1 = i wa x1 + x1 X1 + x2 X1
        m[0] = wa + cx1;
        m[1] = cx1;
        // d x2 = i wb x2 + x1 X2 + x2 X2
        m[4] = cx2;
        m[4 + 1] = wb + cx2;
        // d x3 = i wb x3 - x4 X2 + x3 X2 + x2 X3 + x3 X3 - x3 X4 - x2 X4 - i X5
        m[8 + 1] = cx3 - cx4;
        m[8 + 2] = wb + cx2 + cx3 - cx4;
        m[8 + 3] = -cx2;
        // d x4 = i wa x4 + x4 X1 + x1 X4 - x1 X3 - x3 X1 + x4 X3 - x4 X4 - i X5
        m[12] = cx4 - cx3;
        m[12 + 2] = -cx1;
        m[12 + 3] = wa + cx1 + cx3 - cx4;
    }
}

impl NoiseCoupledSystem for BosonicPair {
    fn noise_feed(&self) -> Vec<C64> {
        vec![ZERO, ZERO, -I, -I]
    }

    fn noise_source(&self) -> Vec<C64> {
        vec![C64::from(1.0), C64::from(1.0), ZERO, ZERO]
    }

    fn noise_rate(&self, big: &[C64]) -> C64 {
        I * (self.omega_a + self.omega_b) + big[0] + big[1] + big[2] - big[3]
    }

    fn noise_boundary(&self) -> Vec<C64> {
        // i x5(t, s, t) = 2 (x2 - x1) + x3 + x4
        vec![I * 2.0, -I * 2.0, -I, -I]
    }
}
