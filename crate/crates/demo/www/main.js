import init, { coherence, concurrence, coefficients } from './pkg/fqsd_demo.js';

const COLORS = ['#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e'];

// series: [{ label, y, color, dashed }], all sampled on t.
function plot(canvas, t, series) {
  const dpr = window.devicePixelRatio || 1;
  const w = canvas.clientWidth, h = canvas.clientHeight;
  canvas.width = w * dpr;
  canvas.height = h * dpr;
  const ctx = canvas.getContext('2d');
  ctx.scale(dpr, dpr);
  ctx.clearRect(0, 0, w, h);

  const pad = { l: 48, r: 12, t: 12, b: 28 };
  const finite = series.flatMap(s => s.y).filter(Number.isFinite);
  let lo = Math.min(0, ...finite), hi = Math.max(...finite);
  if (!(hi > lo)) hi = lo + 1;
  const t0 = t[0], t1 = t[t.length - 1];
  const x = v => pad.l + (v - t0) / (t1 - t0) * (w - pad.l - pad.r);
  const y = v => h - pad.b - (v - lo) / (hi - lo) * (h - pad.t - pad.b);

  ctx.strokeStyle = '#999';
  ctx.fillStyle = '#444';
  ctx.font = '11px system-ui';
  ctx.beginPath();
  ctx.moveTo(pad.l, pad.t);
  ctx.lineTo(pad.l, h - pad.b);
  ctx.lineTo(w - pad.r, h - pad.b);
  ctx.stroke();
  for (let k = 0; k <= 4; k++) {
    const v = lo + (hi - lo) * k / 4;
    ctx.fillText(v.toFixed(2), 4, y(v) + 4);
    const tv = t0 + (t1 - t0) * k / 4;
    ctx.fillText(tv.toFixed(1), x(tv) - 8, h - 10);
  }

  series.forEach((s, i) => {
    ctx.strokeStyle = s.color;
    ctx.setLineDash(s.dashed ? [5, 4] : []);
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    let pen = false;
    s.y.forEach((v, n) => {
      if (!Number.isFinite(v)) { pen = false; return; }
      pen ? ctx.lineTo(x(t[n]), y(v)) : ctx.moveTo(x(t[n]), y(v));
      pen = true;
    });
    ctx.stroke();
    ctx.setLineDash([]);
    ctx.fillStyle = s.color;
    ctx.fillText(s.label, w - pad.r - 130, pad.t + 12 + 13 * i);
  });
}

function numbers(form) {
  const out = {};
  for (const el of form.elements) if (el.name) out[el.name] = el.value;
  return out;
}

function wire(id, compute) {
  const section = document.getElementById(id);
  const form = section.querySelector('form');
  const canvas = section.querySelector('canvas');
  const status = section.querySelector('.status');
  const run = () => {
    status.className = 'status';
    status.textContent = 'running...';
    // Let the status paint before the solver blocks the thread.
    setTimeout(() => {
      const start = performance.now();
      try {
        const { t, series, note } = compute(numbers(form));
        plot(canvas, t, series);
        status.textContent = `${t.length} steps in ${(performance.now() - start).toFixed(0)} ms${note ? '; ' + note : ''}`;
      } catch (e) {
        status.className = 'status error';
        status.textContent = e.message || String(e);
      }
    }, 0);
  };
  form.addEventListener('submit', e => { e.preventDefault(); run(); });
  run();
}

await init();

wire('coherence', p => {
  const d = JSON.parse(coherence(+p.g, +p.omega_b, +p.omega, +p.t_final, +p.h));
  return {
    t: d.t,
    series: [
      { label: '|rho21|', y: d.abs_rho21, color: COLORS[0] },
      { label: 'rho_ee', y: d.rho_ee, color: COLORS[1], dashed: true },
    ],
    note: d.truncated_at === null ? '' : `coefficients diverge at t = ${d.truncated_at.toFixed(3)}`,
  };
});

wire('concurrence', p => {
  const cutoffs = p.cutoffs.split(',').map(Number).filter(Number.isFinite);
  const d = JSON.parse(concurrence(+p.strength, new Float64Array(cutoffs), +p.t_final, +p.h));
  const keys = Object.keys(d).filter(k => k !== 't');
  return {
    t: d.t,
    series: keys.map((k, i) => ({ label: k.replace('concurrence_wc_', 'cutoff '), y: d[k], color: COLORS[i % COLORS.length] })),
  };
});

wire('coefficients', p => {
  const d = JSON.parse(coefficients(+p.w1, +p.w2, +p.gamma, +p.big_omega, +p.t_final, +p.h));
  const series = [];
  for (let i = 1; i <= 4; i++) {
    series.push({ label: `|X${i}| fermionic`, y: d[`abs_X${i}_fermionic`], color: COLORS[i - 1] });
    series.push({ label: `|X${i}| bosonic`, y: d[`abs_X${i}_bosonic`], color: COLORS[i - 1], dashed: true });
  }
  return { t: d.t, series };
});
