//! Method of lines for the models with a three-time noise coefficient.
//!
//! Besides the two-time fields `x_i(t_k, s_j)` the state holds the dense
//! square `x_5(t_k, s_j, s'_l)`, `j, l <= k`. After each step a zero row
//! (`s = t`) and a boundary column (`s' = t`) are appended. The two rules
//! disagree at the corner `s = s' = t`, where `x_5` jumps as a function of
//! `s`; the corner node stores the mean of both sides, which keeps the
//! trapezoid rule second order across the jump.

use rayon::prelude::*;

use super::two_time::memory_integral;
use super::{flag_sample, zero_vec, CoefficientGrid, NoiseCoupledSystem, NoiseField, QbarSeries, SolveOptions, TimeGrid};
use crate::kernels::{CorrelationKernel, KernelTable};
use crate::linalg::{C64, ZERO};

const CHUNK: usize = 64;

struct Workspace {
    big: Vec<C64>,
    big5: Vec<C64>,
    m: Vec<C64>,
}

/// `X_5(tau, s'_l)` for `l = 0..d`, with `x_5(tau, tau, .) = 0` on the strip.
fn noise_integral(table: &KernelTable, x5: &[C64], d: usize, c2: usize, out: &mut [C64]) {
    let h = table.step();
    let k = d - 1;
    let mut weights = vec![ZERO; d];
    if k > 0 {
        for (j, w) in weights.iter_mut().enumerate() {
            let tw = if j == 0 || j == k { 0.5 * h } else { h };
            *w = table.at_half(2 * (k - j) + c2) * tw;
        }
    }
    if c2 > 0 {
        weights[k] += table.at_half(c2) * (0.25 * h * c2 as f64);
    }
    out[..d].par_chunks_mut(CHUNK).enumerate().for_each(|(ci, chunk)| {
        let l0 = ci * CHUNK;
        chunk.fill(ZERO);
        for (j, w) in weights.iter().enumerate() {
            if *w == ZERO {
                continue;
            }
            let row = &x5[j * d + l0..j * d + l0 + chunk.len()];
            for (o, v) in chunk.iter_mut().zip(row) {
                *o += w * v;
            }
        }
    });
}

#[allow(clippy::too_many_arguments)]
fn stage_rhs<S: NoiseCoupledSystem + Sync + ?Sized>(
    system: &S,
    table: &KernelTable,
    feed: &[C64],
    source: &[C64],
    init: &[C64],
    k: usize,
    c2: usize,
    x: &[C64],
    x5: &[C64],
    dx: &mut [C64],
    dx5: &mut [C64],
    ws: &mut Workspace,
) {
    let nf = init.len();
    let d = k + 1;
    memory_integral(table, x, nf, k, c2, init, &mut ws.big);
    noise_integral(table, x5, d, c2, &mut ws.big5);
    system.generator(&ws.big, &mut ws.m);
    let rate = system.noise_rate(&ws.big);
    let m = &ws.m;
    let big5 = &ws.big5[..d];

    for j in 0..d {
        let xj = &x[j * nf..(j + 1) * nf];
        for r in 0..nf {
            let row = &m[r * nf..(r + 1) * nf];
            let mx: C64 = row.iter().zip(xj).map(|(a, b)| a * b).sum();
            dx[j * nf + r] = mx + feed[r] * big5[j];
        }
    }
    let src: Vec<C64> = (0..d)
        .map(|j| source.iter().zip(&x[j * nf..(j + 1) * nf]).map(|(a, b)| a * b).sum())
        .collect();
    dx5[..d * d]
        .par_chunks_mut(d)
        .zip(x5[..d * d].par_chunks(d))
        .enumerate()
        .for_each(|(j, (drow, xrow))| {
            let sj = src[j];
            for ((o, b5), v) in drow.iter_mut().zip(big5).zip(xrow) {
                *o = sj * b5 + rate * v;
            }
        });
}

pub(super) fn solve<S: NoiseCoupledSystem + Sync + ?Sized>(
    system: &S,
    kernel: &CorrelationKernel,
    grid: TimeGrid,
    opts: &SolveOptions,
) -> CoefficientGrid {
    let nf = system.n_fields();
    let init = system.initial();
    let feed = system.noise_feed();
    let source = system.noise_source();
    let boundary = system.noise_boundary();
    let h = grid.h;
    let table = KernelTable::new(kernel, h, grid.n);
    let dot = |a: &[C64], b: &[C64]| -> C64 { a.iter().zip(b).map(|(p, q)| p * q).sum() };
    let corner = dot(&boundary, &init) * 0.5;
    let record = |k: usize| opts.record_stride.is_some_and(|s| s > 0 && k.is_multiple_of(s));

    let cap = grid.n + 1;
    let mut ws = Workspace {
        big: zero_vec(nf),
        big5: zero_vec(cap),
        m: zero_vec(nf * nf),
    };

    let mut xs = init.clone();
    let mut x5 = vec![corner];
    let mut series = QbarSeries::new(h, nf);
    series.push(0.0, zero_vec(nf));
    let mut big5_hist = vec![vec![ZERO]];
    let mut slices = Vec::new();
    let mut snapshots = Vec::new();
    if record(0) {
        slices.push((0, xs.chunks(nf).map(|c| c.to_vec()).collect()));
        snapshots.push((0, x5.clone()));
    }

    let (mut sx, mut sx5) = (Vec::new(), Vec::new());
    let (mut ax, mut ax5) = (Vec::new(), Vec::new());
    let (mut dx, mut dx5) = (Vec::new(), Vec::new());

    for k in 0..grid.n {
        let d = k + 1;
        let (lx, l5) = (xs.len(), x5.len());
        dx.resize(lx, ZERO);
        dx5.resize(l5, ZERO);
        ax.clone_from(&xs);
        ax5.clone_from(&x5);
        for (c2, weight, next) in [(0usize, 1.0, 0.5), (1, 2.0, 0.5), (1, 2.0, 1.0), (2, 1.0, 0.0)] {
            {
                let (ix, i5): (&[C64], &[C64]) = if c2 == 0 { (&xs, &x5) } else { (&sx, &sx5) };
                stage_rhs(system, &table, &feed, &source, &init, k, c2, ix, i5, &mut dx, &mut dx5, &mut ws);
            }
            let w = h * weight / 6.0;
            for (a, v) in ax.iter_mut().zip(&dx) {
                *a += v * w;
            }
            ax5.par_iter_mut().zip(dx5.par_iter()).for_each(|(a, v)| *a += v * w);
            if next > 0.0 {
                let s = h * next;
                sx.clear();
                sx.extend(xs.iter().zip(&dx).map(|(a, v)| a + v * s));
                sx5.resize(l5, ZERO);
                sx5.par_iter_mut()
                    .zip(x5.par_iter().zip(dx5.par_iter()))
                    .for_each(|(o, (a, v))| *o = a + v * s);
            }
        }
        std::mem::swap(&mut xs, &mut ax);
        xs.extend_from_slice(&init);

        // Re-layout x5 from d x d to (d + 1) x (d + 1).
        let nd = d + 1;
        let mut grown = vec![ZERO; nd * nd];
        for j in 0..d {
            grown[j * nd..j * nd + d].copy_from_slice(&ax5[j * d..(j + 1) * d]);
            grown[j * nd + d] = dot(&boundary, &xs[j * nf..(j + 1) * nf]);
        }
        grown[d * nd + d] = corner;
        x5 = grown;

        memory_integral(&table, &xs, nf, k + 1, 0, &init, &mut ws.big);
        noise_integral(&table, &x5, nd, 0, &mut ws.big5);
        series.push((k + 1) as f64 * h, ws.big.clone());
        big5_hist.push(ws.big5[..nd].to_vec());
        if record(k + 1) {
            slices.push((k + 1, xs.chunks(nf).map(|c| c.to_vec()).collect()));
            snapshots.push((k + 1, x5.clone()));
        }
        if flag_sample(&ws.big, h, opts.divergence_threshold)
            || flag_sample(&ws.big5[..nd], h, opts.divergence_threshold)
        {
            series.singular_at = Some(k + 1);
            break;
        }
    }

    let final_dim = xs.len() / nf;
    CoefficientGrid {
        h,
        n_fields: nf,
        series,
        final_x: xs.chunks(nf).map(|c| c.to_vec()).collect(),
        slices,
        noise: Some(NoiseField {
            big5: big5_hist,
            final_x5: x5,
            final_dim,
            snapshots,
        }),
    }
}
