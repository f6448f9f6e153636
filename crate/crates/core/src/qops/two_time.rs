//! Method of lines for two-time coefficient fields.
//!
//! The state at step `k` is `x(t_k, s_j)` for `j = 0..=k`. One RK4 step in
//! `t` advances all of them together; at every stage the memory integral
//! `X(tau)` is rebuilt from the stage values by trapezoid over the nodes
//! `s_0..s_k`, plus the strip `[t_k, tau]` whose far end is the diagonal
//! value `x(tau, tau)`. The new diagonal node is appended after the step.

use super::{flag_sample, zero_vec, CoefficientGrid, CoefficientSystem, QbarSeries, SolveOptions, TimeGrid};
use crate::kernels::{CorrelationKernel, KernelTable};
use crate::linalg::C64;

/// Stage memory integral at `tau = t_k + c h`, with `c2 = 2 c` in `{0, 1, 2}`.
pub(super) fn memory_integral(
    table: &KernelTable,
    xs: &[C64],
    nf: usize,
    k: usize,
    c2: usize,
    init: &[C64],
    out: &mut [C64],
) {
    let h = table.step();
    out.fill(C64::from(0.0));
    if k > 0 {
        for j in 0..=k {
            let w = if j == 0 || j == k { 0.5 * h } else { h };
            let kv = table.at_half(2 * (k - j) + c2) * w;
            for i in 0..nf {
                out[i] += kv * xs[j * nf + i];
            }
        }
    }
    if c2 > 0 {
        let strip = 0.25 * h * c2 as f64;
        let near = table.at_half(c2) * strip;
        let diag = table.at_half(0) * strip;
        for i in 0..nf {
            out[i] += near * xs[k * nf + i] + diag * init[i];
        }
    }
}

pub(super) fn solve<S: CoefficientSystem + ?Sized>(
    system: &S,
    kernel: &CorrelationKernel,
    grid: TimeGrid,
    opts: &SolveOptions,
) -> CoefficientGrid {
    let nf = system.n_fields();
    let init = system.initial();
    let h = grid.h;
    let table = KernelTable::new(kernel, h, grid.n);

    let mut series = QbarSeries::new(h, nf);
    series.push(0.0, zero_vec(nf));
    let mut slices = Vec::new();
    let record = |k: usize| opts.record_stride.is_some_and(|s| s > 0 && k.is_multiple_of(s));

    let mut xs: Vec<C64> = init.clone();
    if record(0) {
        slices.push((0, split(&xs, nf)));
    }

    let mut big = zero_vec(nf);
    let mut m = zero_vec(nf * nf);
    let mut stage = Vec::new();
    let mut acc = Vec::new();
    let mut deriv = Vec::new();

    let mut rhs = |k: usize, c2: usize, x: &[C64], d: &mut Vec<C64>| {
        memory_integral(&table, x, nf, k, c2, &init, &mut big);
        system.generator(&big, &mut m);
        d.resize(x.len(), C64::from(0.0));
        for (xj, dj) in x.chunks(nf).zip(d.chunks_mut(nf)) {
            for (r, dr) in dj.iter_mut().enumerate() {
                let row = &m[r * nf..(r + 1) * nf];
                *dr = row.iter().zip(xj).map(|(a, b)| a * b).sum();
            }
        }
    };

    for k in 0..grid.n {
        let len = xs.len();
        acc.clear();
        acc.extend_from_slice(&xs);
        for (c2, weight, next) in [(0usize, 1.0, 0.5), (1, 2.0, 0.5), (1, 2.0, 1.0), (2, 1.0, 0.0)] {
            let input: &[C64] = if c2 == 0 { &xs } else { &stage };
            rhs(k, c2, input, &mut deriv);
            for q in 0..len {
                acc[q] += deriv[q] * (h * weight / 6.0);
            }
            if next > 0.0 {
                stage.clear();
                stage.extend(xs.iter().zip(&deriv).map(|(a, v)| a + v * (h * next)));
            }
        }
        std::mem::swap(&mut xs, &mut acc);
        xs.extend_from_slice(&init);

        let mut now = zero_vec(nf);
        memory_integral(&table, &xs, nf, k + 1, 0, &init, &mut now);
        if record(k + 1) {
            slices.push((k + 1, split(&xs, nf)));
        }
        let flagged = flag_sample(&now, h, opts.divergence_threshold);
        series.push((k + 1) as f64 * h, now);
        if flagged {
            series.singular_at = Some(k + 1);
            break;
        }
    }

    CoefficientGrid {
        h,
        n_fields: nf,
        series,
        final_x: split(&xs, nf),
        slices,
        noise: None,
    }
}

fn split(xs: &[C64], nf: usize) -> Vec<Vec<C64>> {
    xs.chunks(nf).map(|c| c.to_vec()).collect()
}
